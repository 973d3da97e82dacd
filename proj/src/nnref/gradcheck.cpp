#include "aquaaug/nnref/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "aquaaug/errors.hpp"

namespace aquaaug::nnref {

namespace {

void add_matrix(std::vector<GradEntry>& out, const std::string& name, Eigen::MatrixXd& m,
                const Eigen::MatrixXd& grad) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    out.push_back({name + "[" + std::to_string(i) + "]", m.data() + i, grad.data()[i]});
}

void add_tensor(std::vector<GradEntry>& out, const std::string& name, TensorMap& t,
                const TensorMap& grad) {
  for (std::size_t i = 0; i < t.data().size(); ++i)
    out.push_back({name + "[" + std::to_string(i) + "]", &t.data()[i], grad.data()[i]});
}

void add_attention(std::vector<GradEntry>& out, const std::string& prefix, AttentionParams& p,
                   const AttentionGrads& g) {
  for (int h = 0; h < p.heads; ++h) {
    const std::string head = prefix + "h" + std::to_string(h) + ".";
    add_matrix(out, head + "Wq", p.query[h], g.query[h]);
    add_matrix(out, head + "Wk", p.key[h], g.key[h]);
    add_matrix(out, head + "Wv", p.value[h], g.value[h]);
  }
  add_matrix(out, prefix + "Wo", p.output, g.output);
}

}  // namespace

TensorMap random_tensor(const Dims& dims, Stream& rng, double scale) {
  TensorMap t(dims);
  for (double& v : t.data()) v = rng.uniform(-scale, scale);
  return t;
}

double inner_product(const TensorMap& a, const TensorMap& b) {
  if (!(a.dims() == b.dims())) throw ShapeMismatch("inner product of differently shaped maps");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

GradCheckResult compare_gradients(const std::function<double()>& loss,
                                  std::vector<GradEntry> entries, const GradCheckOptions& opts) {
  GradCheckResult r;
  for (const GradEntry& e : entries) {
    const double saved = *e.value;
    *e.value = saved + opts.step;
    const double up = loss();
    *e.value = saved - opts.step;
    const double down = loss();
    *e.value = saved;
    const double numeric = (up - down) / (2.0 * opts.step);
    const double abs_err = std::abs(numeric - e.analytic);
    const double denom =
        std::max({std::abs(numeric), std::abs(e.analytic), opts.denominator_floor});
    const double rel = abs_err / denom;
    ++r.entries;
    r.max_absolute_error = std::max(r.max_absolute_error, abs_err);
    if (rel > r.max_relative_error || r.worst.empty()) {
      if (rel >= r.max_relative_error) r.worst = e.name;
      r.max_relative_error = std::max(r.max_relative_error, rel);
    }
  }
  return r;
}

GradCheckResult check_attention_gradients(const TensorMap& x0, const AttentionParams& p0,
                                          const TensorMap& upstream,
                                          const GradCheckOptions& opts) {
  TensorMap x = x0;
  AttentionParams p = p0;
  const auto fw = area_attention_forward(x, p);
  const AttentionGrads g = area_attention_backward(upstream, fw.cache);

  std::vector<GradEntry> entries;
  add_tensor(entries, "x", x, g.x);
  add_attention(entries, "", p, g);
  auto loss = [&] { return inner_product(area_attention_forward(x, p).out, upstream); };
  return compare_gradients(loss, std::move(entries), opts);
}

GradCheckResult check_relan_gradients(const TensorMap& x0, const RelanParams& p0,
                                      const TensorMap& upstream, const GradCheckOptions& opts) {
  TensorMap x = x0;
  RelanParams p = p0;
  const auto fw = relan_forward_cached(x, p);
  const RelanGrads g = relan_backward(upstream, fw.cache);

  std::vector<GradEntry> entries;
  add_tensor(entries, "x", x, g.x);
  add_matrix(entries, "transition", p.transition, g.transition);
  for (std::size_t i = 0; i < p.paths.size(); ++i)
    for (std::size_t k = 0; k < p.paths[i].size(); ++k)
      add_attention(entries, "path" + std::to_string(i) + ".block" + std::to_string(k) + ".",
                    p.paths[i][k], g.paths[i][k]);
  add_matrix(entries, "fusion", p.fusion, g.fusion);
  entries.push_back({"alpha", &p.alpha, g.alpha});
  auto loss = [&] { return inner_product(relan_forward(x, p), upstream); };
  return compare_gradients(loss, std::move(entries), opts);
}

}  // namespace aquaaug::nnref
