#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "aquaaug/nnref/attention.hpp"
#include "aquaaug/nnref/relan.hpp"

namespace aquaaug::nnref {

struct GradCheckOptions {
  double step = 1e-5;
  /// Lower bound on the relative-error denominator, so entries whose true
  /// gradient is ~0 are judged on absolute error.
  double denominator_floor = 1e-4;
};

struct GradCheckResult {
  std::size_t entries = 0;
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::string worst;  // parameter name and flat index of the worst entry

  bool passed(double tolerance) const { return max_relative_error < tolerance; }
};

/// One checked scalar: a live pointer into the parameters plus its analytic gradient.
struct GradEntry {
  std::string name;
  double* value;
  double analytic;
};

/// Central differences of `loss` at every entry, compared to the analytic value.
GradCheckResult compare_gradients(const std::function<double()>& loss,
                                  std::vector<GradEntry> entries,
                                  const GradCheckOptions& opts = {});

/// Loss = sum(out * upstream). Checks input and every projection matrix.
GradCheckResult check_attention_gradients(const TensorMap& x, const AttentionParams& p,
                                          const TensorMap& upstream,
                                          const GradCheckOptions& opts = {});

/// Same loss through a full R-ELAN block, including alpha and the 1x1 maps.
GradCheckResult check_relan_gradients(const TensorMap& x, const RelanParams& p,
                                      const TensorMap& upstream,
                                      const GradCheckOptions& opts = {});

/// Entries uniform in [-scale, scale].
TensorMap random_tensor(const Dims& dims, Stream& rng, double scale = 1.0);

double inner_product(const TensorMap& a, const TensorMap& b);

}  // namespace aquaaug::nnref
