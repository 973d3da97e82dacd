#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "aquaaug/errors.hpp"
#include "aquaaug/optics.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace aquaaug;

namespace {

double sum(const PsfKernel& k) { return std::accumulate(k.weights.begin(), k.weights.end(), 0.0); }

void check_kernel_shape(const PsfKernel& k) {
  const int s = k.side;
  REQUIRE(s % 2 == 1);
  CHECK(std::abs(sum(k) - 1.0) <= 1e-9);
  const int r = k.radius();
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      REQUIRE(k.at(i, j) >= 0.0);
      REQUIRE(std::abs(k.at(i, j) - k.at(j, i)) <= 1e-12);
      REQUIRE(std::abs(k.at(i, j) - k.at(s - 1 - i, j)) <= 1e-12);
    }
  // Non-increasing along both axes away from the centre.
  for (int d = 1; d <= r; ++d) {
    REQUIRE(k.at(r, r + d) <= k.at(r, r + d - 1) + 1e-15);
    REQUIRE(k.at(r + d, r) <= k.at(r + d - 1, r) + 1e-15);
  }
}

}  // namespace

TEST_CASE("psf radius rules") {
  CHECK(PsfParams{1.0, 2.5, std::nullopt}.resolved_radius() == 15);
  CHECK(PsfParams{20.0, 1.0, std::nullopt}.resolved_radius() == 64);
  CHECK(PsfParams{1.0, 1.0, 7}.resolved_radius() == 7);
  CHECK_THROWS_AS(build_psf({1.0, 1.0, 65}), RadiusOverflow);
  CHECK_THROWS_AS(build_psf({0.0, 1.0, 3}), InvalidArgument);
}

TEST_CASE("psf kernels are normalized, symmetric and radially decaying") {
  for (const PsfParams& p : {PsfParams{0.5, 0.5, std::nullopt}, PsfParams{2, 3, 12},
                             PsfParams{1e-3, 2, std::nullopt}, PsfParams{4, 1, 30}}) {
    const auto k = build_psf(p);
    check_kernel_shape(k);
    CHECK(std::holds_alternative<PsfParams>(k.provenance));
  }
}

TEST_CASE("psf with vanishing scatter is the normalized Lorentzian") {
  const auto k = build_psf({1e-3, 2.0, std::nullopt});
  const auto want = oracle::normalized_lorentzian(2.0, k.radius());
  REQUIRE(want.size() == k.weights.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(k.weights[i] - want[i]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("psf centre tap matches the direct double sum") {
  const auto k = build_psf({2.0, 3.0, 12});
  CHECK(std::abs(k.at(12, 12) - oracle::psf_centre_tap(2.0, 3.0, 12)) <= 1e-10);
}

TEST_CASE("profile convolution commutes") {
  const int r = 9;
  const auto e = detail::exponential_grid(1.3, r);
  const auto l = detail::lorentzian_grid(2.1, r);
  const auto a = detail::convolve_cropped(e, l, r);
  const auto b = detail::convolve_cropped(l, e, r);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) <= 1e-12);
}

namespace {

// Total-variation distance between `small` and `big` pooled onto the small
// grid: big tap (i, j) lands at ((i - Rb) / 2 + Rs, (j - Rb) / 2 + Rs), with
// taps on a cell boundary split between neighbours.
double downsampled_tv(const PsfKernel& small, const PsfKernel& big) {
  const int rs = small.radius(), rb = big.radius();
  std::vector<double> pooled(small.weights.size(), 0.0);
  for (int i = 0; i < big.side; ++i)
    for (int j = 0; j < big.side; ++j) {
      const double fi = (i - rb) / 2.0 + rs, fj = (j - rb) / 2.0 + rs;
      const int i0 = static_cast<int>(std::floor(fi)), j0 = static_cast<int>(std::floor(fj));
      const double ui = fi - i0, uj = fj - j0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double w = (a ? ui : 1 - ui) * (b ? uj : 1 - uj);
          const int ii = i0 + a, jj = j0 + b;
          if (w == 0.0 || ii < 0 || jj < 0 || ii >= small.side || jj >= small.side) continue;
          pooled[static_cast<std::size_t>(ii) * small.side + jj] += w * big.at(i, j);
        }
    }
  double tv = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) tv += std::abs(pooled[i] - small.weights[i]);
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("psf scale covariance under 2x downsampling") {
  // Resolved kernels (lengths of a few pixels) with the automatic radius.
  for (auto [ls, lt] : std::vector<std::pair<double, double>>{{2.0, 3.0}, {3.0, 2.0}, {2.5, 4.0}}) {
    const auto small = build_psf({ls, lt, std::nullopt});
    const auto big = build_psf({2 * ls, 2 * lt, std::nullopt});
    REQUIRE(big.radius() == 2 * small.radius());
    CHECK_MESSAGE(downsampled_tv(small, big) < 0.01, ls << "," << lt);
  }
  // Point sampling of the cusp at r = 0 is the residual; it shrinks as the kernel widens.
  double prev = 1.0;
  for (double s : {0.5, 1.0, 2.0}) {  // larger s would hit the radius cap
    const double tv = downsampled_tv(build_psf({s, 1.5 * s, std::nullopt}), build_psf({2 * s, 3 * s, std::nullopt}));
    CHECK(tv < prev);
    prev = tv;
  }
}

TEST_CASE("depth gaussian") {
  const auto id = build_depth_gaussian({1.5, 5.0, 0.0, 0.78});
  CHECK(id.is_identity());
  CHECK(id.weights == std::vector<double>{1.0});
  CHECK(DepthKernelParams{1.0, 1.0, 8.0, 0.78}.sigma() == doctest::Approx(5.0630).epsilon(1e-4));
  CHECK(DepthKernelParams{1.0, 1.0, 8.0, 0.78}.sigma() == doctest::Approx(std::pow(8.0, 0.78)).epsilon(1e-15));
  CHECK_THROWS_AS(build_depth_gaussian({20.0, 1.0, 1.0, 1.0}), RadiusOverflow);

  // sigma = 2 (sigma_ref 2 at z = z_ref), radius ceil(4 sigma) = 8.
  const auto g = build_depth_gaussian({2.0, 5.0, 5.0, 0.78});
  REQUIRE(g.side == 17);
  check_kernel_shape(g);
  const auto want = oracle::gaussian(2.0, 8);
  for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(std::abs(g.weights[i] - want[i]) <= 1e-12);
}

TEST_CASE("sigma scaling law") {
  Stream rng(9);
  for (int i = 0; i < 100; ++i) {
    const double z = rng.uniform(1e-3, 50.0);
    const DepthKernelParams a{1.5, 5.0, z, 0.78}, b{1.5, 5.0, 2 * z, 0.78};
    REQUIRE(std::abs(b.sigma() / a.sigma() - std::pow(2.0, 0.78)) <= 1e-12);
  }
}

TEST_CASE("identity kernel leaves the image bit-identical") {
  Stream rng(10);
  const auto img = testing::random_f32(13, 7, 3, rng);
  CHECK(convolve(img, identity_kernel()) == img);
}

TEST_CASE("constant images are preserved") {
  const auto img = testing::constant_f32(20, 15, 3, 0.375f);
  for (const auto& k : {build_psf({1.0, 2.0, 6}), build_depth_gaussian({1.5, 5, 9, 0.78}),
                        build_psf({2.0, 3.0, 20})}) {
    const auto out = convolve(img, k);
    for (float v : out.f32()) REQUIRE(std::abs(v - 0.375f) <= 1e-6);
  }
}

TEST_CASE("convolution matches the nested-loop oracle") {
  Stream rng(11);
  const auto img = testing::random_f32(16, 16, 3, rng);
  for (const auto& k : {build_psf({0.8, 1.1, 2}), build_depth_gaussian({1.5, 5, 3, 0.78}),
                        build_psf({2.0, 2.0, 12}), build_psf({2.0, 4.0, 20})}) {
    const auto got = convolve(img, k);
    const auto want = oracle::correlate(img, k);
    double worst = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i)
      worst = std::max(worst, std::abs(double(got.f32()[i]) - want[i]));
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("fft path agrees with direct path") {
  Stream rng(12);
  const auto img = testing::random_f32(45, 38, 3, rng);
  const auto k = build_psf({1.5, 3.0, 24});
  REQUIRE(k.side > 33);
  const ImageBuffer a = detail::convolve_direct(img, k);
  const ImageBuffer b = detail::convolve_fft(img, k);
  CHECK(testing::max_abs_diff(a.f32(), b.f32()) <= 1e-5);
  // Tiny images force repeated reflection folds.
  const auto tiny = testing::random_f32(5, 3, 1, rng);
  const ImageBuffer c = detail::convolve_fft(tiny, k);
  const auto want = oracle::correlate(tiny, k);
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(c.f32()[i] - want[i]) <= 1e-5);
}

TEST_CASE("separable path matches direct 2-D") {
  Stream rng(13);
  const auto img = testing::random_f32(30, 21, 3, rng);
  const auto g = build_depth_gaussian({1.5, 5, 12, 0.78});
  const ImageBuffer a = convolve(img, g);
  const ImageBuffer b = detail::convolve_direct(img, g);
  CHECK(testing::max_abs_diff(a.f32(), b.f32()) <= 1e-6);
}

TEST_CASE("reflect-101 folding") {
  CHECK(detail::reflect101(-1, 5) == 1);
  CHECK(detail::reflect101(-2, 5) == 2);
  CHECK(detail::reflect101(5, 5) == 3);
  CHECK(detail::reflect101(6, 5) == 2);
  CHECK(detail::reflect101(-9, 3) == 1);
  CHECK(detail::reflect101(7, 1) == 0);
}

TEST_CASE("mean preservation on interior-dominated images") {
  Stream rng(14);
  const auto k = build_psf({1.0, 1.5, 5});
  const auto img = testing::random_f32(11 * 12, 11 * 12, 3, rng);
  const auto out = convolve(img, k);
  double a = 0.0, b = 0.0;
  for (float v : img.f32()) a += v;
  for (float v : out.f32()) b += v;
  CHECK(std::abs(b - a) / a < 1e-3);
}
