#include "aquaaug/nnref/attention.hpp"

#include <cmath>
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

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& s) {
  Eigen::MatrixXd p(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const double mx = s.row(r).maxCoeff();
    p.row(r) = (s.row(r).array() - mx).exp();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

}  // namespace

void AttentionParams::validate(const Dims& input) const {
  const int c = channels();
  if (heads < 1 || c % heads != 0)
    throw ShapeMismatch("heads (" + std::to_string(heads) + ") must divide channels (" +
                        std::to_string(c) + ")");
  if (areas < 1 || input.tokens() % areas != 0)
    throw ShapeMismatch("areas (" + std::to_string(areas) + ") must divide H*W (" +
                        std::to_string(input.tokens()) + ")");
  if (input.channels != c) throw ShapeMismatch("input channels differ from attention width");
  if (output.cols() != c) throw ShapeMismatch("output projection must be C x C");
  const auto h = static_cast<std::size_t>(heads);
  if (query.size() != h || key.size() != h || value.size() != h)
    throw ShapeMismatch("need one Q/K/V projection per head");
  const int dk = head_dim();
  for (std::size_t i = 0; i < h; ++i)
    for (const auto* m : {&query[i], &key[i], &value[i]})
      if (m->rows() != c || m->cols() != dk) throw ShapeMismatch("head projection must be C x d_k");
}

AttentionParams AttentionParams::random(int channels, int heads, int areas, Stream& rng,
                                        double scale) {
  if (heads < 1 || channels % heads != 0) throw ShapeMismatch("heads must divide channels");
  AttentionParams p;
  p.heads = heads;
  p.areas = areas;
  const int dk = channels / heads;
  for (int i = 0; i < heads; ++i) {
    p.query.push_back(random_matrix(channels, dk, rng, scale));
    p.key.push_back(random_matrix(channels, dk, rng, scale));
    p.value.push_back(random_matrix(channels, dk, rng, scale));
  }
  p.output = random_matrix(channels, channels, rng, scale);
  return p;
}

AttentionForward area_attention_forward(const TensorMap& x, const AttentionParams& p) {
  const Dims& d = x.dims();
  p.validate(d);
  const int n = d.tokens();
  const int dk = p.head_dim();
  const int na = n / p.areas;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  AttentionForward fw{TensorMap(d), {}};
  AttentionCache& c = fw.cache;
  c.params = p;
  c.dims = d;
  c.x.resize(d.batch);
  c.q.assign(d.batch, std::vector<Eigen::MatrixXd>(p.heads));
  c.k = c.q;
  c.v = c.q;
  c.attn.assign(d.batch, std::vector<std::vector<Eigen::MatrixXd>>(
                             p.heads, std::vector<Eigen::MatrixXd>(p.areas)));
  c.concat.resize(d.batch);

  for (int b = 0; b < d.batch; ++b) {
    c.x[b] = x.tokens(b);
    Eigen::MatrixXd& z = c.concat[b];
    z.resize(n, d.channels);
    for (int h = 0; h < p.heads; ++h) {
      c.q[b][h] = c.x[b] * p.query[h];
      c.k[b][h] = c.x[b] * p.key[h];
      c.v[b][h] = c.x[b] * p.value[h];
      for (int a = 0; a < p.areas; ++a) {
        const auto qa = c.q[b][h].middleRows(a * na, na);
        const auto ka = c.k[b][h].middleRows(a * na, na);
        const auto va = c.v[b][h].middleRows(a * na, na);
        Eigen::MatrixXd pa = softmax_rows(scale * qa * ka.transpose());
        z.block(a * na, h * dk, na, dk) = pa * va;
        c.attn[b][h][a] = std::move(pa);
      }
    }
    fw.out.set_tokens(b, z * p.output);
  }
  return fw;
}

AttentionGrads area_attention_backward(const TensorMap& grad_out, const AttentionCache& c) {
  const AttentionParams& p = c.params;
  const Dims& d = c.dims;
  if (!(grad_out.dims() == d)) throw ShapeMismatch("gradient shape differs from forward output");
  const int n = d.tokens();
  const int dk = p.head_dim();
  const int na = n / p.areas;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  AttentionGrads g;
  g.x = TensorMap(d);
  g.output = Eigen::MatrixXd::Zero(d.channels, d.channels);
  for (int h = 0; h < p.heads; ++h) {
    g.query.push_back(Eigen::MatrixXd::Zero(d.channels, dk));
    g.key.push_back(Eigen::MatrixXd::Zero(d.channels, dk));
    g.value.push_back(Eigen::MatrixXd::Zero(d.channels, dk));
  }

  for (int b = 0; b < d.batch; ++b) {
    const Eigen::MatrixXd dy = grad_out.tokens(b);
    g.output += c.concat[b].transpose() * dy;
    const Eigen::MatrixXd dz = dy * p.output.transpose();
    Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(n, d.channels);

    for (int h = 0; h < p.heads; ++h) {
      Eigen::MatrixXd dq(n, dk), dkm(n, dk), dv(n, dk);
      for (int a = 0; a < p.areas; ++a) {
        const Eigen::MatrixXd& pa = c.attn[b][h][a];
        const auto qa = c.q[b][h].middleRows(a * na, na);
        const auto ka = c.k[b][h].middleRows(a * na, na);
        const auto va = c.v[b][h].middleRows(a * na, na);
        const auto doa = dz.block(a * na, h * dk, na, dk);

        const Eigen::MatrixXd dp = doa * va.transpose();
        dv.middleRows(a * na, na) = pa.transpose() * doa;
        // Softmax Jacobian, row-wise: dS = P * (dP - rowsum(dP * P)).
        const Eigen::VectorXd inner = (dp.array() * pa.array()).rowwise().sum();
        const Eigen::MatrixXd ds = pa.array() * (dp.colwise() - inner).array();
        dq.middleRows(a * na, na) = scale * ds * ka;
        dkm.middleRows(a * na, na) = scale * ds.transpose() * qa;
      }
      g.query[h] += c.x[b].transpose() * dq;
      g.key[h] += c.x[b].transpose() * dkm;
      g.value[h] += c.x[b].transpose() * dv;
      dx += dq * p.query[h].transpose() + dkm * p.key[h].transpose() + dv * p.value[h].transpose();
    }
    g.x.set_tokens(b, dx);
  }
  return g;
}

TensorMap pre_projection(const AttentionCache& cache) {
  TensorMap z(cache.dims);
  for (int b = 0; b < cache.dims.batch; ++b) z.set_tokens(b, cache.concat[b]);
  return z;
}

}  // namespace aquaaug::nnref
