#pragma once

#include <Eigen/Dense>

#include <vector>

#include "aquaaug/nnref/attention.hpp"

namespace aquaaug::nnref {

/// Residual aggregation block:
///   out = alpha * Fusion(Concat_i Path_i(Transition(x))) + x
/// Transition (C_t x C) and Fusion (C x P*C_t) are bias-free 1x1 convolutions;
/// each path is a chain of area-attention blocks of width C_t.
struct RelanParams {
  Eigen::MatrixXd transition;
  std::vector<std::vector<AttentionParams>> paths;
  Eigen::MatrixXd fusion;
  double alpha = 1.0;

  int channels() const { return static_cast<int>(transition.cols()); }
  int hidden() const { return static_cast<int>(transition.rows()); }

  void validate(const Dims& input) const;

  /// `blocks_per_path[i]` A2 blocks on path i, entries uniform in [-scale, scale].
  static RelanParams random(int channels, int hidden, const std::vector<int>& blocks_per_path,
                            int heads, int areas, double alpha, Stream& rng, double scale = 0.5);
};

struct RelanCache {
  RelanParams params;
  Dims dims;
  TensorMap input;
  TensorMap transitioned;                        // B x C_t x H x W
  std::vector<std::vector<AttentionCache>> blocks;  // [path][block]
  std::vector<TensorMap> path_out;               // B x C_t x H x W per path
  TensorMap fused;                               // Fusion(...) before alpha
};

struct RelanGrads {
  TensorMap x;
  Eigen::MatrixXd transition;
  std::vector<std::vector<AttentionGrads>> paths;
  Eigen::MatrixXd fusion;
  double alpha = 0.0;
};

struct RelanForward {
  TensorMap out;
  RelanCache cache;
};

RelanForward relan_forward_cached(const TensorMap& x, const RelanParams& p);
TensorMap relan_forward(const TensorMap& x, const RelanParams& p);
RelanGrads relan_backward(const TensorMap& grad_out, const RelanCache& cache);

/// Pointwise channel map: out[b, :, y, x] = weights * in[b, :, y, x].
TensorMap pointwise(const TensorMap& x, const Eigen::MatrixXd& weights);

}  // namespace aquaaug::nnref
