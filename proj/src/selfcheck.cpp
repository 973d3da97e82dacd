#include "aquaaug/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

#include "aquaaug/geometry.hpp"
#include "aquaaug/letterbox.hpp"
#include "aquaaug/nnref/flops.hpp"
#include "aquaaug/nnref/gradcheck.hpp"
#include "aquaaug/optics.hpp"
#include "aquaaug/rng.hpp"

namespace aquaaug {

namespace {

using namespace nnref;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

CheckResult check(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    CheckResult r = body();
    r.name = name;
    return r;
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

struct SmallConfig {
  Dims dims;
  int heads;
  int areas;
};

const std::vector<SmallConfig>& grad_configs() {
  static const std::vector<SmallConfig> c{
      {{1, 4, 2, 2}, 2, 2}, {{1, 4, 2, 4}, 1, 4}, {{2, 4, 2, 2}, 2, 1},
      {{1, 6, 3, 2}, 3, 3}, {{2, 2, 2, 3}, 1, 2},
  };
  return c;
}

CheckResult flops_ratio() {
  for (auto [hw, l] : {std::pair{64, 4}, {256, 4}, {256, 16}}) {
    const auto f = attention_flops({1, 8, hw / 8, 8}, l);
    if (f.full != f.area * static_cast<std::uint64_t>(l))
      return {"", false, "ratio != l at H*W=" + std::to_string(hw)};
  }
  const auto one = attention_flops({2, 8, 4, 4}, 1);
  return {"", one.area == one.full, "l in {4,16}; l=1 equal"};
}

CheckResult softmax_rows() {
  Stream rng(11);
  const Dims d{2, 4, 4, 4};
  const auto fw = area_attention_forward(random_tensor(d, rng), AttentionParams::random(4, 2, 4, rng));
  double worst = 0.0;
  for (const auto& b : fw.cache.attn)
    for (const auto& h : b)
      for (const auto& a : h)
        for (Eigen::Index r = 0; r < a.rows(); ++r) worst = std::max(worst, std::abs(a.row(r).sum() - 1.0));
  return {"", worst <= 1e-12, fmt("max |rowsum-1| = %.2e", worst)};
}

CheckResult singleton_areas() {
  Stream rng(12);
  const Dims d{1, 4, 2, 3};
  const auto x = random_tensor(d, rng);
  const auto p = AttentionParams::random(4, 2, d.tokens(), rng);
  const auto fw = area_attention_forward(x, p);
  const Eigen::MatrixXd& z = fw.cache.concat[0];
  double worst = 0.0;
  for (int h = 0; h < p.heads; ++h)
    worst = std::max(worst, (z.middleCols(h * p.head_dim(), p.head_dim()) - fw.cache.v[0][h])
                                .cwiseAbs()
                                .maxCoeff());
  return {"", worst == 0.0, fmt("max diff %.2e", worst)};
}

CheckResult locality() {
  Stream rng(13);
  const Dims d{1, 4, 4, 4};
  const int areas = 4;
  const auto x = random_tensor(d, rng);
  const auto p = AttentionParams::random(4, 2, areas, rng);
  const auto base = pre_projection(area_attention_forward(x, p).cache);
  const int na = d.tokens() / areas;
  for (int t = 0; t < d.tokens(); ++t) {
    TensorMap y = x;
    y.at(0, 1, t / d.width, t % d.width) += 0.5;
    const auto moved = pre_projection(area_attention_forward(y, p).cache);
    for (int u = 0; u < d.tokens(); ++u) {
      const bool same_area = u / na == t / na;
      for (int c = 0; c < d.channels; ++c) {
        const bool changed = moved.at(0, c, u / d.width, u % d.width) != base.at(0, c, u / d.width, u % d.width);
        if (changed && !same_area) return {"", false, "token leaked across areas"};
      }
    }
  }
  return {"", true, "16 perturbations"};
}

CheckResult attention_grads() {
  Stream rng(14);
  double worst = 0.0;
  for (const auto& c : grad_configs()) {
    const auto p = AttentionParams::random(c.dims.channels, c.heads, c.areas, rng);
    const auto r = check_attention_gradients(random_tensor(c.dims, rng), p, random_tensor(c.dims, rng));
    worst = std::max(worst, r.max_relative_error);
  }
  return {"", worst < 1e-6, fmt("5 configs, max rel err %.2e", worst)};
}

CheckResult relan_grads() {
  Stream rng(15);
  double worst = 0.0;
  const std::vector<std::pair<Dims, std::vector<int>>> cases{
      {{1, 4, 2, 2}, {1, 2}}, {{2, 4, 2, 2}, {1}}, {{1, 4, 2, 4}, {2, 1}}};
  for (const auto& [d, blocks] : cases) {
    const auto p = RelanParams::random(d.channels, 2, blocks, 2, 2, 0.7, rng);
    const auto r = check_relan_gradients(random_tensor(d, rng), p, random_tensor(d, rng));
    worst = std::max(worst, r.max_relative_error);
  }
  return {"", worst < 1e-6, fmt("3 configs, max rel err %.2e", worst)};
}

CheckResult relan_alpha() {
  Stream rng(16);
  const Dims d{1, 4, 4, 4};
  const auto x = random_tensor(d, rng);
  auto p = RelanParams::random(4, 4, {1, 2}, 2, 4, 0.0, rng);
  if (!(relan_forward(x, p) == x)) return {"", false, "alpha=0 changed the input"};
  p.alpha = 1.0;
  const auto o1 = relan_forward(x, p);
  p.alpha = 2.0;
  const auto o2 = relan_forward(x, p);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.data().size(); ++i)
    worst = std::max(worst, std::abs((o2.data()[i] - x.data()[i]) - 2.0 * (o1.data()[i] - x.data()[i])));
  return {"", worst <= 1e-12, fmt("alpha=0 exact; linearity dev %.2e", worst)};
}

CheckResult shapes() {
  Stream rng(17);
  const Dims d{2, 4, 2, 4};
  const auto x = random_tensor(d, rng);
  const auto a = area_attention_forward(x, AttentionParams::random(4, 2, 2, rng)).out;
  const auto r = relan_forward(x, RelanParams::random(4, 2, {1, 2}, 1, 2, 1.0, rng));
  return {"", a.dims() == d && r.dims() == d, "A2 and R-ELAN keep B x C x H x W"};
}

CheckResult kernel_laws() {
  Stream rng(18);
  double ratio_dev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double z = rng.uniform(0.1, 20.0);
    const double s1 = DepthKernelParams{1.5, 5.0, z, 0.78}.sigma();
    const double s2 = DepthKernelParams{1.5, 5.0, 2.0 * z, 0.78}.sigma();
    ratio_dev = std::max(ratio_dev, std::abs(s2 / s1 - std::pow(2.0, 0.78)));
  }
  double sum_dev = 0.0;
  for (const PsfKernel& k : {build_psf({0.7, 1.3, std::nullopt}), build_psf({2.0, 0.5, 20}),
                             build_depth_gaussian({1.5, 5.0, 8.0, 0.78})}) {
    double s = 0.0;
    for (double w : k.weights) s += w;
    sum_dev = std::max(sum_dev, std::abs(s - 1.0));
  }
  const bool ok = ratio_dev <= 1e-12 && sum_dev <= 1e-9;
  return {"", ok, fmt("sigma ratio dev %.1e", ratio_dev) + fmt(", unit-sum dev %.1e", sum_dev)};
}

CheckResult fft_matches_direct() {
  Stream rng(19);
  std::vector<float> px(24 * 20 * 3);
  for (float& v : px) v = static_cast<float>(rng.uniform());
  const ImageBuffer img(24, 20, 3, std::move(px));
  const PsfKernel k = build_psf({1.0, 3.0, 20});
  const ImageBuffer da = detail::convolve_direct(img, k);
  const ImageBuffer fb = detail::convolve_fft(img, k);
  const auto a = da.f32();
  const auto b = fb.f32();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(double(a[i]) - b[i]));
  return {"", worst <= 1e-5, fmt("max diff %.2e", worst)};
}

CheckResult flip_involution() {
  Stream rng(20);
  std::vector<std::uint8_t> px(17 * 9 * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  const ImageBuffer img(17, 9, 3, std::move(px));
  AnnotationSet ann{"x", {{0, snap_unit(0.3), 0.4, 0.2, 0.2, 1.0}}};
  const auto [i1, a1] = hflip(img, ann);
  const auto [i2, a2] = hflip(i1, a1);
  return {"", i2 == img && a2 == ann, "double flip is exact"};
}

CheckResult letterbox_1080p() {
  const auto g = letterbox_geometry(1920, 1080, 640);
  const bool ok = g.content_width == 640 && g.content_height == 360 && g.pad_top == 140 &&
                  g.pad_bottom == 140;
  return {"", ok, "1920x1080 -> 640x360 + 140/140"};
}

CheckResult normalize_exact() {
  const ImageBuffer img(3, 1, 1, std::vector<std::uint8_t>{0, 128, 255});
  const ImageBuffer n = normalize(img);
  const auto f = n.f32();
  const bool ok = f[0] == 0.0f && f[1] == static_cast<float>(128.0 / 255.0) && f[2] == 1.0f;
  return {"", ok, "{0,128,255} -> {0,128/255,1}"};
}

}  // namespace

std::vector<CheckResult> run_selfcheck() {
  const std::vector<std::pair<std::string, CheckResult (*)()>> suite{
      {"attention flops ratio", flops_ratio},
      {"softmax rows sum to 1", softmax_rows},
      {"singleton areas pass V through", singleton_areas},
      {"area locality", locality},
      {"A2 gradient check", attention_grads},
      {"R-ELAN gradient check", relan_grads},
      {"R-ELAN alpha residual", relan_alpha},
      {"output shapes", shapes},
      {"kernel laws", kernel_laws},
      {"FFT vs direct convolution", fft_matches_direct},
      {"flip involution", flip_involution},
      {"letterbox 1920x1080", letterbox_1080p},
      {"normalize by 255", normalize_exact},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : suite) out.push_back(check(name, fn));
  return out;
}

std::string format_check_table(const std::vector<CheckResult>& results) {
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  std::string out;
  std::size_t failed = 0;
  for (const auto& r : results) {
    out += r.passed ? "PASS  " : "FAIL  ";
    out += r.name + std::string(width - r.name.size() + 2, ' ') + r.detail + "\n";
    failed += r.passed ? 0 : 1;
  }
  out += std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) + " passed\n";
  return out;
}

}  // namespace aquaaug
