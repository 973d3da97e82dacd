#include "aquaaug/nnref/relan.hpp"

#include <string>

#include "aquaaug/errors.hpp"

namespace aquaaug::nnref {

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, Stream& rng, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

Dims with_channels(Dims d, int c) {
  d.channels = c;
  return d;
}

}  // namespace

TensorMap pointwise(const TensorMap& x, const Eigen::MatrixXd& weights) {
  if (weights.cols() != x.dims().channels) throw ShapeMismatch("1x1 conv input width mismatch");
  TensorMap out(with_channels(x.dims(), static_cast<int>(weights.rows())));
  for (int b = 0; b < x.dims().batch; ++b) out.set_tokens(b, x.tokens(b) * weights.transpose());
  return out;
}

void RelanParams::validate(const Dims& input) const {
  if (input.channels != channels()) throw ShapeMismatch("R-ELAN input channels differ from transition");
  if (paths.empty()) throw ShapeMismatch("R-ELAN needs at least one path");
  const Dims hidden_dims = with_channels(input, hidden());
  for (const auto& path : paths)
    for (const auto& block : path) block.validate(hidden_dims);
  if (fusion.rows() != channels())
    throw ShapeMismatch("fusion must map back to the input width for the residual add");
  if (fusion.cols() != static_cast<Eigen::Index>(paths.size()) * hidden())
    throw ShapeMismatch("fusion input width must equal paths * C_t (" +
                        std::to_string(paths.size() * hidden()) + ")");
}

RelanParams RelanParams::random(int channels, int hidden, const std::vector<int>& blocks_per_path,
                                int heads, int areas, double alpha, Stream& rng, double scale) {
  RelanParams p;
  p.transition = random_matrix(hidden, channels, rng, scale);
  for (int blocks : blocks_per_path) {
    std::vector<AttentionParams> path;
    for (int i = 0; i < blocks; ++i)
      path.push_back(AttentionParams::random(hidden, heads, areas, rng, scale));
    p.paths.push_back(std::move(path));
  }
  p.fusion = random_matrix(channels, hidden * static_cast<int>(blocks_per_path.size()), rng, scale);
  p.alpha = alpha;
  return p;
}

RelanForward relan_forward_cached(const TensorMap& x, const RelanParams& p) {
  p.validate(x.dims());
  RelanForward fw;
  RelanCache& c = fw.cache;
  c.params = p;
  c.dims = x.dims();
  c.input = x;
  c.transitioned = pointwise(x, p.transition);

  const int ct = p.hidden();
  const int np = static_cast<int>(p.paths.size());
  TensorMap cat(with_channels(x.dims(), ct * np));
  c.blocks.resize(np);
  for (int i = 0; i < np; ++i) {
    TensorMap h = c.transitioned;
    for (const auto& block : p.paths[i]) {
      auto step = area_attention_forward(h, block);
      c.blocks[i].push_back(std::move(step.cache));
      h = std::move(step.out);
    }
    for (int b = 0; b < x.dims().batch; ++b) {
      const Eigen::MatrixXd t = h.tokens(b);
      Eigen::MatrixXd all = cat.tokens(b);
      all.middleCols(i * ct, ct) = t;
      cat.set_tokens(b, all);
    }
    c.path_out.push_back(std::move(h));
  }

  c.fused = pointwise(cat, p.fusion);
  fw.out = TensorMap(x.dims());
  auto& out = fw.out.data();
  const auto& f = c.fused.data();
  const auto& in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.alpha * f[i] + in[i];
  return fw;
}

TensorMap relan_forward(const TensorMap& x, const RelanParams& p) {
  return relan_forward_cached(x, p).out;
}

RelanGrads relan_backward(const TensorMap& grad_out, const RelanCache& c) {
  const RelanParams& p = c.params;
  if (!(grad_out.dims() == c.dims)) throw ShapeMismatch("gradient shape differs from forward output");
  const int ct = p.hidden();
  const int np = static_cast<int>(p.paths.size());
  const int batch = c.dims.batch;

  RelanGrads g;
  g.alpha = 0.0;
  for (std::size_t i = 0; i < grad_out.data().size(); ++i)
    g.alpha += grad_out.data()[i] * c.fused.data()[i];

  // d fused = alpha * d out; fusion is a pointwise map of the concatenation.
  g.fusion = Eigen::MatrixXd::Zero(p.fusion.rows(), p.fusion.cols());
  std::vector<Eigen::MatrixXd> dcat(batch);
  for (int b = 0; b < batch; ++b) {
    const Eigen::MatrixXd dfused = p.alpha * grad_out.tokens(b);
    Eigen::MatrixXd cat(c.dims.tokens(), ct * np);
    for (int i = 0; i < np; ++i) cat.middleCols(i * ct, ct) = c.path_out[i].tokens(b);
    g.fusion += dfused.transpose() * cat;
    dcat[b] = dfused * p.fusion;
  }

  TensorMap dtrans(with_channels(c.dims, ct));
  g.paths.resize(np);
  for (int i = 0; i < np; ++i) {
    TensorMap dh(with_channels(c.dims, ct));
    for (int b = 0; b < batch; ++b) dh.set_tokens(b, dcat[b].middleCols(i * ct, ct));
    std::vector<AttentionGrads> grads(p.paths[i].size());
    for (int k = static_cast<int>(p.paths[i].size()) - 1; k >= 0; --k) {
      grads[k] = area_attention_backward(dh, c.blocks[i][k]);
      dh = grads[k].x;
    }
    for (std::size_t j = 0; j < dh.data().size(); ++j) dtrans.data()[j] += dh.data()[j];
    g.paths[i] = std::move(grads);
  }

  g.transition = Eigen::MatrixXd::Zero(p.transition.rows(), p.transition.cols());
  g.x = grad_out;  // residual path
  for (int b = 0; b < batch; ++b) {
    const Eigen::MatrixXd du = dtrans.tokens(b);
    g.transition += du.transpose() * c.input.tokens(b);
    g.x.set_tokens(b, g.x.tokens(b) + du * p.transition);
  }
  return g;
}

}  // namespace aquaaug::nnref
