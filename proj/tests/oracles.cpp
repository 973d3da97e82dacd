#include "oracles.hpp"

#include <cmath>

namespace oracle {

using aquaaug::nnref::Dims;

namespace {

// Pointwise map out[c'] = sum_c W[c'][c] * in[c] at every position.
TensorMap channel_map(const TensorMap& x, const Eigen::MatrixXd& w) {
  const Dims d = x.dims();
  Dims od = d;
  od.channels = static_cast<int>(w.rows());
  TensorMap out(od);
  for (int b = 0; b < d.batch; ++b)
    for (int o = 0; o < od.channels; ++o)
      for (int y = 0; y < d.height; ++y)
        for (int xx = 0; xx < d.width; ++xx) {
          double s = 0.0;
          for (int c = 0; c < d.channels; ++c) s += w(o, c) * x.at(b, c, y, xx);
          out.at(b, o, y, xx) = s;
        }
  return out;
}

double value_at(const TensorMap& t, int b, int c, int token) {
  return t.at(b, c, token / t.dims().width, token % t.dims().width);
}

int fold(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

double expo(double r, double lambda) { return std::exp(-r / lambda) / lambda; }
double lorentz(double r, double lambda) { return 1.0 / (1.0 + (r / lambda) * (r / lambda)); }

}  // namespace

TensorMap attention(const TensorMap& x, const AttentionParams& p, int areas, bool pre_projection) {
  const Dims d = x.dims();
  const int n = d.height * d.width;
  const int c = d.channels;
  const int dk = c / p.heads;
  const int run = n / areas;
  TensorMap concat(d);
  for (int b = 0; b < d.batch; ++b)
    for (int h = 0; h < p.heads; ++h) {
      std::vector<double> q(n * dk, 0.0), k(n * dk, 0.0), v(n * dk, 0.0);
      for (int t = 0; t < n; ++t)
        for (int j = 0; j < dk; ++j)
          for (int ch = 0; ch < c; ++ch) {
            const double xv = value_at(x, b, ch, t);
            q[t * dk + j] += xv * p.query[h](ch, j);
            k[t * dk + j] += xv * p.key[h](ch, j);
            v[t * dk + j] += xv * p.value[h](ch, j);
          }
      for (int i = 0; i < n; ++i) {
        std::vector<double> score(n, -INFINITY);
        double best = -INFINITY;
        for (int j = 0; j < n; ++j) {
          if (i / run != j / run) continue;
          double s = 0.0;
          for (int e = 0; e < dk; ++e) s += q[i * dk + e] * k[j * dk + e];
          score[j] = s / std::sqrt(static_cast<double>(dk));
          best = std::max(best, score[j]);
        }
        double total = 0.0;
        for (int j = 0; j < n; ++j)
          if (i / run == j / run) total += std::exp(score[j] - best);
        for (int e = 0; e < dk; ++e) {
          double acc = 0.0;
          for (int j = 0; j < n; ++j)
            if (i / run == j / run) acc += std::exp(score[j] - best) / total * v[j * dk + e];
          concat.at(b, h * dk + e, i / d.width, i % d.width) = acc;
        }
      }
    }
  if (pre_projection) return concat;
  // out[c'] = sum_c concat[c] * W^O[c][c']
  return channel_map(concat, p.output.transpose());
}

TensorMap relan(const TensorMap& x, const RelanParams& p) {
  const TensorMap u = channel_map(x, p.transition);
  std::vector<TensorMap> outs;
  for (const auto& path : p.paths) {
    TensorMap h = u;
    for (const auto& block : path) h = attention(h, block, block.areas);
    outs.push_back(h);
  }
  Dims cd = u.dims();
  cd.channels = u.dims().channels * static_cast<int>(outs.size());
  TensorMap cat(cd);
  for (std::size_t i = 0; i < outs.size(); ++i)
    for (int b = 0; b < cd.batch; ++b)
      for (int c = 0; c < u.dims().channels; ++c)
        for (int y = 0; y < cd.height; ++y)
          for (int xx = 0; xx < cd.width; ++xx)
            cat.at(b, static_cast<int>(i) * u.dims().channels + c, y, xx) = outs[i].at(b, c, y, xx);
  const TensorMap f = channel_map(cat, p.fusion);
  TensorMap out = x;
  for (std::size_t i = 0; i < out.data().size(); ++i)
    out.data()[i] = p.alpha * f.data()[i] + x.data()[i];
  return out;
}

double psf_centre_tap(double ls, double lt, int radius) {
  const int side = 2 * radius + 1;
  auto conv_at = [&](int pi, int pj) {
    // (E * L)(p) = sum_u E(u) L(p - u), both supported on [-R, R]^2
    double s = 0.0;
    for (int ui = -radius; ui <= radius; ++ui)
      for (int uj = -radius; uj <= radius; ++uj) {
        const int vi = pi - ui, vj = pj - uj;
        if (vi < -radius || vi > radius || vj < -radius || vj > radius) continue;
        s += expo(std::hypot(ui, uj), ls) * lorentz(std::hypot(vi, vj), lt);
      }
    return s;
  };
  double total = 0.0;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) total += conv_at(i - radius, j - radius);
  return conv_at(0, 0) / total;
}

std::vector<double> normalized_lorentzian(double lt, int radius) {
  std::vector<double> g;
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i)
    for (int j = -radius; j <= radius; ++j) {
      g.push_back(lorentz(std::sqrt(double(i * i + j * j)), lt));
      total += g.back();
    }
  for (double& v : g) v /= total;
  return g;
}

std::vector<double> gaussian(double sigma, int radius) {
  std::vector<double> g;
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i)
    for (int j = -radius; j <= radius; ++j) {
      g.push_back(std::exp(-double(i * i + j * j) / (2.0 * sigma * sigma)));
      total += g.back();
    }
  for (double& v : g) v /= total;
  return g;
}

std::vector<double> correlate(const aquaaug::ImageBuffer& img, const aquaaug::PsfKernel& k) {
  const int w = img.width(), h = img.height(), c = img.channels(), r = k.radius();
  const auto src = img.f32();
  std::vector<double> out(src.size(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < c; ++ch) {
        double s = 0.0;
        for (int di = -r; di <= r; ++di)
          for (int dj = -r; dj <= r; ++dj)
            s += k.at(di + r, dj + r) * src[img.index(fold(x + dj, w), fold(y + di, h), ch)];
        out[img.index(x, y, ch)] = s;
      }
  return out;
}

double hue_shift_fine(const aquaaug::SpectralTable& t, double z) {
  const auto& wl = t.wavelengths();
  auto interp = [&](const std::vector<double>& f, double lam) {
    std::size_t i = 0;
    while (i + 2 < wl.size() && wl[i + 1] <= lam) ++i;
    const double u = (lam - wl[i]) / (wl[i + 1] - wl[i]);
    return f[i] + u * (f[i + 1] - f[i]);
  };
  std::vector<double> absorb;
  for (double tv : t.transmission()) absorb.push_back(-std::log(tv) / t.path_length());
  const int n = 300;  // 1 nm steps
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double lam = 400.0 + i;
    const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double ti = std::exp(-interp(absorb, lam) * z) * interp(t.illuminant(), lam);
    num += weight * ti * interp(t.hue_response(), lam);
    den += weight * ti;
  }
  return std::atan(num / den) * 180.0 / M_PI;
}

double truncated_pareto_mean(double lo, double hi, double alpha) {
  const int n = 200000;  // even, Simpson
  const double step = (hi - lo) / n;
  double m1 = 0.0, m0 = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double a = lo + i * step;
    const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double pdf = std::pow(a, -(alpha + 1.0));
    m0 += wgt * pdf;
    m1 += wgt * a * pdf;
  }
  return m1 / m0;
}

MaskCount box_coverage(const aquaaug::BBox& box, const std::vector<aquaaug::Rect>& rects,
                       int width, int height) {
  std::vector<char> erased(static_cast<std::size_t>(width) * height, 0);
  for (const auto& r : rects)
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x) erased[static_cast<std::size_t>(y) * width + x] = 1;
  MaskCount m;
  const double x0 = (box.cx - box.w / 2) * width, x1 = (box.cx + box.w / 2) * width;
  const double y0 = (box.cy - box.h / 2) * height, y1 = (box.cy + box.h / 2) * height;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      if (px < x0 || px >= x1 || py < y0 || py >= y1) continue;
      ++m.total;
      m.covered += erased[static_cast<std::size_t>(y) * width + x];
    }
  return m;
}

}  // namespace oracle
