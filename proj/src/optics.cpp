#include "aquaaug/optics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>

#include "aquaaug/errors.hpp"

namespace aquaaug {

namespace {

constexpr int kDirectMaxSide = 33;
constexpr double kIdentitySigma = 0.05;

void normalize_weights(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw InvalidArgument("kernel has no mass");
  for (double& v : w) v /= total;
}

template <typename Profile>
std::vector<double> radial_grid(int radius, Profile profile) {
  const int side = 2 * radius + 1;
  std::vector<double> g(static_cast<std::size_t>(side) * side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j)
      g[static_cast<std::size_t>(i) * side + j] = profile(std::hypot(i - radius, j - radius));
  return g;
}

void check_f32(const ImageBuffer& img) {
  if (img.depth() != Depth::F32) throw WrongDepth("convolve expects an F32 image");
}

// Reflect-101 lookup for offsets -r..n-1+r.
std::vector<int> fold_table(int n, int r) {
  std::vector<int> t(static_cast<std::size_t>(n) + 2 * r);
  for (int i = -r; i < n + r; ++i) t[i + r] = detail::reflect101(i, n);
  return t;
}

float store(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

// FFTW's planner is not re-entrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

}  // namespace

int PsfParams::resolved_radius() const {
  if (!(lambda_scatter > 0.0) || !(lambda_turb > 0.0))
    throw InvalidArgument("PSF lengths must be positive");
  if (kernel_radius) {
    if (*kernel_radius < 1) throw InvalidArgument("PSF radius must be >= 1");
    if (*kernel_radius > kMaxKernelRadius)
      throw RadiusOverflow("PSF radius " + std::to_string(*kernel_radius) + " exceeds 64");
    return *kernel_radius;
  }
  const double r = std::ceil(6.0 * std::max(lambda_scatter, lambda_turb));
  return static_cast<int>(std::min(r, static_cast<double>(kMaxKernelRadius)));
}

double DepthKernelParams::sigma() const {
  if (!(sigma_ref > 0.0) || !(z_ref > 0.0) || !(z >= 0.0))
    throw InvalidArgument("depth kernel needs sigma_ref > 0, z_ref > 0, z >= 0");
  if (z == 0.0) return 0.0;
  return sigma_ref * std::pow(z / z_ref, exponent);
}

PsfKernel identity_kernel() { return PsfKernel{1, {1.0}, std::monostate{}}; }

namespace detail {

std::vector<double> exponential_grid(double lambda, int radius) {
  return radial_grid(radius, [lambda](double r) { return std::exp(-r / lambda) / lambda; });
}

std::vector<double> lorentzian_grid(double lambda, int radius) {
  return radial_grid(radius, [lambda](double r) {
    const double q = r / lambda;
    return 1.0 / (1.0 + q * q);
  });
}

std::vector<double> convolve_cropped(const std::vector<double>& a, const std::vector<double>& b,
                                     int radius) {
  const int side = 2 * radius + 1;
  std::vector<double> out(a.size(), 0.0);
  // out(p) = sum_q a(q) b(p - q), with all indices relative to the centre tap.
  for (int pi = -radius; pi <= radius; ++pi) {
    for (int pj = -radius; pj <= radius; ++pj) {
      const int qi_lo = std::max(-radius, pi - radius);
      const int qi_hi = std::min(radius, pi + radius);
      const int qj_lo = std::max(-radius, pj - radius);
      const int qj_hi = std::min(radius, pj + radius);
      double acc = 0.0;
      for (int qi = qi_lo; qi <= qi_hi; ++qi) {
        const double* arow = &a[static_cast<std::size_t>(qi + radius) * side];
        const double* brow = &b[static_cast<std::size_t>(pi - qi + radius) * side];
        for (int qj = qj_lo; qj <= qj_hi; ++qj) acc += arow[qj + radius] * brow[pj - qj + radius];
      }
      out[static_cast<std::size_t>(pi + radius) * side + (pj + radius)] = acc;
    }
  }
  return out;
}

int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

ImageBuffer convolve_direct(const ImageBuffer& img, const PsfKernel& kernel) {
  check_f32(img);
  const int w = img.width();
  const int h = img.height();
  const int c = img.channels();
  const int r = kernel.radius();
  const auto xs = fold_table(w, r);
  const auto ys = fold_table(h, r);
  auto src = img.f32();
  ImageBuffer out = ImageBuffer::zeros(w, h, c, Depth::F32);
  auto dst = out.f32();
  std::vector<double> acc(c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int ki = 0; ki < kernel.side; ++ki) {
        const std::size_t row = static_cast<std::size_t>(ys[y + ki]) * w;
        for (int kj = 0; kj < kernel.side; ++kj) {
          const double wt = kernel.at(ki, kj);
          const std::size_t base = (row + xs[x + kj]) * c;
          for (int k = 0; k < c; ++k) acc[k] += wt * src[base + k];
        }
      }
      for (int k = 0; k < c; ++k) dst[img.index(x, y, k)] = store(acc[k]);
    }
  }
  return out;
}

ImageBuffer convolve_separable(const ImageBuffer& img, const std::vector<double>& taps) {
  check_f32(img);
  const int w = img.width();
  const int h = img.height();
  const int c = img.channels();
  const int r = static_cast<int>(taps.size()) / 2;
  const auto xs = fold_table(w, r);
  const auto ys = fold_table(h, r);
  auto src = img.f32();

  // Horizontal pass kept in double so the vertical pass sees unrounded values.
  std::vector<double> tmp(img.sample_count());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (int t = 0; t < static_cast<int>(taps.size()); ++t)
          acc += taps[t] * src[img.index(xs[x + t], y, k)];
        tmp[img.index(x, y, k)] = acc;
      }

  ImageBuffer out = ImageBuffer::zeros(w, h, c, Depth::F32);
  auto dst = out.f32();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (int t = 0; t < static_cast<int>(taps.size()); ++t)
          acc += taps[t] * tmp[img.index(x, ys[y + t], k)];
        dst[img.index(x, y, k)] = store(acc);
      }
  return out;
}

ImageBuffer convolve_fft(const ImageBuffer& img, const PsfKernel& kernel) {
  check_f32(img);
  const int w = img.width();
  const int h = img.height();
  const int c = img.channels();
  const int r = kernel.radius();
  // Circular convolution on the reflect-padded frame; the interior never wraps.
  const int pw = w + 2 * r;
  const int ph = h + 2 * r;
  const int cw = pw / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(ph) * pw;
  const std::size_t ncplx = static_cast<std::size_t>(ph) * cw;

  auto real = fftw_buffer<double>(nreal);
  auto spec = fftw_buffer<fftw_complex>(ncplx);
  auto kspec = fftw_buffer<fftw_complex>(ncplx);

  fftw_plan fwd;
  fftw_plan inv;
  {
    std::lock_guard lock(planner_mutex());
    fwd = fftw_plan_dft_r2c_2d(ph, pw, real.get(), spec.get(), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_2d(ph, pw, spec.get(), real.get(), FFTW_ESTIMATE);
  }
  struct PlanGuard {
    fftw_plan p;
    ~PlanGuard() {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(p);
    }
  } gf{fwd}, gi{inv};

  // Correlation: tap (di, dj) lands at (-di, -dj) modulo the frame.
  std::fill_n(real.get(), nreal, 0.0);
  for (int di = -r; di <= r; ++di)
    for (int dj = -r; dj <= r; ++dj) {
      const int yy = ((-di) % ph + ph) % ph;
      const int xx = ((-dj) % pw + pw) % pw;
      real[static_cast<std::size_t>(yy) * pw + xx] = kernel.at(di + r, dj + r);
    }
  fftw_execute_dft_r2c(fwd, real.get(), kspec.get());

  const auto xs = fold_table(w, r);
  const auto ys = fold_table(h, r);
  auto src = img.f32();
  ImageBuffer out = ImageBuffer::zeros(w, h, c, Depth::F32);
  auto dst = out.f32();
  const double scale = 1.0 / static_cast<double>(nreal);

  for (int k = 0; k < c; ++k) {
    for (int y = 0; y < ph; ++y)
      for (int x = 0; x < pw; ++x)
        real[static_cast<std::size_t>(y) * pw + x] = src[img.index(xs[x], ys[y], k)];
    fftw_execute_dft_r2c(fwd, real.get(), spec.get());
    for (std::size_t i = 0; i < ncplx; ++i) {
      const std::complex<double> a(spec[i][0], spec[i][1]);
      const std::complex<double> b(kspec[i][0], kspec[i][1]);
      const auto p = a * b;
      spec[i][0] = p.real();
      spec[i][1] = p.imag();
    }
    fftw_execute_dft_c2r(inv, spec.get(), real.get());
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        dst[img.index(x, y, k)] =
            store(real[static_cast<std::size_t>(y + r) * pw + (x + r)] * scale);
  }
  return out;
}

}  // namespace detail

PsfKernel build_psf(const PsfParams& params) {
  const int radius = params.resolved_radius();
  auto scatter = detail::exponential_grid(params.lambda_scatter, radius);
  auto turb = detail::lorentzian_grid(params.lambda_turb, radius);
  PsfKernel k{2 * radius + 1, detail::convolve_cropped(scatter, turb, radius), params};
  k.provenance = PsfParams{params.lambda_scatter, params.lambda_turb, radius};
  normalize_weights(k.weights);
  return k;
}

PsfKernel build_depth_gaussian(const DepthKernelParams& params) {
  const double sigma = params.sigma();
  if (sigma < kIdentitySigma) {
    PsfKernel k = identity_kernel();
    k.provenance = params;
    return k;
  }
  const double rr = std::ceil(4.0 * sigma);
  if (rr > kMaxKernelRadius)
    throw RadiusOverflow("Gaussian radius " + std::to_string(static_cast<long long>(rr)) +
                         " exceeds 64 (sigma " + std::to_string(sigma) + ")");
  const int radius = static_cast<int>(rr);
  const int side = 2 * radius + 1;

  std::vector<double> g(side);
  for (int i = 0; i < side; ++i) {
    const double d = i - radius;
    g[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
  }
  normalize_weights(g);

  PsfKernel k{side, std::vector<double>(static_cast<std::size_t>(side) * side), params};
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) k.weights[static_cast<std::size_t>(i) * side + j] = g[i] * g[j];
  return k;
}

ImageBuffer convolve(const ImageBuffer& img, const PsfKernel& kernel) {
  check_f32(img);
  if (kernel.is_identity()) return img;
  if (kernel.is_gaussian()) {
    // Row sums of an outer-product kernel recover the 1-D taps.
    std::vector<double> taps(kernel.side, 0.0);
    for (int i = 0; i < kernel.side; ++i)
      for (int j = 0; j < kernel.side; ++j) taps[i] += kernel.at(i, j);
    return detail::convolve_separable(img, taps);
  }
  if (kernel.side <= kDirectMaxSide) return detail::convolve_direct(img, kernel);
  return detail::convolve_fft(img, kernel);
}

}  // namespace aquaaug
