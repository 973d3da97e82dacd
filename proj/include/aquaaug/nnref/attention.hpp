#pragma once

#include <Eigen/Dense>

#include <vector>

#include "aquaaug/nnref/tensor.hpp"
#include "aquaaug/rng.hpp"

namespace aquaaug::nnref {

/// Multi-head area attention weights. Head i projects tokens with
/// query[i], key[i], value[i] (each C x d_k, d_k = C / heads); the
/// concatenated heads go through `output` (C x C).
struct AttentionParams {
  int heads = 1;
  int areas = 4;
  std::vector<Eigen::MatrixXd> query;
  std::vector<Eigen::MatrixXd> key;
  std::vector<Eigen::MatrixXd> value;
  Eigen::MatrixXd output;

  int channels() const { return static_cast<int>(output.rows()); }
  int head_dim() const { return channels() / heads; }

  /// Throws ShapeMismatch unless heads | C, areas | H*W and all matrices fit.
  void validate(const Dims& input) const;

  /// Entries uniform in [-scale, scale].
  static AttentionParams random(int channels, int heads, int areas, Stream& rng,
                                double scale = 0.5);
};

/// Intermediates kept by the forward pass for the backward pass.
struct AttentionCache {
  AttentionParams params;
  Dims dims;
  std::vector<Eigen::MatrixXd> x;  // per batch: N x C
  // [batch][head]: N x d_k projections
  std::vector<std::vector<Eigen::MatrixXd>> q, k, v;
  // [batch][head][area]: n_a x n_a softmax weights
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> attn;
  std::vector<Eigen::MatrixXd> concat;  // per batch: N x C, heads before the output projection
};

struct AttentionGrads {
  TensorMap x;
  std::vector<Eigen::MatrixXd> query;
  std::vector<Eigen::MatrixXd> key;
  std::vector<Eigen::MatrixXd> value;
  Eigen::MatrixXd output;
};

struct AttentionForward {
  TensorMap out;
  AttentionCache cache;
};

/// Tokens are the flattened H*W positions, split into `areas` contiguous equal
/// runs. Each head attends only within its token's area (max-subtracted softmax
/// of QK^T / sqrt(d_k)); heads are concatenated and projected by `output`.
AttentionForward area_attention_forward(const TensorMap& x, const AttentionParams& p);

AttentionGrads area_attention_backward(const TensorMap& grad_out, const AttentionCache& cache);

/// The concatenated head outputs (before the output projection) as a B x C x H x W map.
TensorMap pre_projection(const AttentionCache& cache);

}  // namespace aquaaug::nnref
