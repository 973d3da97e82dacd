#include "aquaaug/nnref/flops.hpp"

#include "aquaaug/errors.hpp"

namespace aquaaug::nnref {

AttentionFlops attention_flops(const Dims& dims, int areas) {
  if (areas < 1 || dims.tokens() % areas != 0)
    throw InvalidArgument("areas must divide H*W");
  const std::uint64_t b = static_cast<std::uint64_t>(dims.batch);
  const std::uint64_t n = static_cast<std::uint64_t>(dims.tokens());
  const std::uint64_t c = static_cast<std::uint64_t>(dims.channels);
  const std::uint64_t na = n / static_cast<std::uint64_t>(areas);

  // Per area and head: QK^T is na*na*d_k, P*V is na*na*d_k; summed over heads d_k -> C.
  AttentionFlops f;
  f.area = b * static_cast<std::uint64_t>(areas) * 2 * na * na * c;
  f.full = b * 2 * n * n * c;
  const std::uint64_t projections = b * 4 * n * c * c;
  f.area_with_projection = f.area + projections;
  f.full_with_projection = f.full + projections;
  return f;
}

}  // namespace aquaaug::nnref
