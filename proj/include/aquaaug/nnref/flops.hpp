#pragma once

#include <cstdint>

#include "aquaaug/nnref/tensor.hpp"

namespace aquaaug::nnref {

/// Multiply-accumulate counts for one multi-head attention layer.
/// `area`/`full` count only the QK^T and P*V products; the `_with_projection`
/// variants add the Q/K/V and output projections (4 * B * N * C^2).
struct AttentionFlops {
  std::uint64_t area = 0;
  std::uint64_t full = 0;
  std::uint64_t area_with_projection = 0;
  std::uint64_t full_with_projection = 0;
};

/// Throws InvalidArgument unless `areas` divides H*W. Independent of the head count.
AttentionFlops attention_flops(const Dims& dims, int areas);

}  // namespace aquaaug::nnref
