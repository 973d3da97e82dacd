#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "aquaaug/image.hpp"

namespace aquaaug {

inline constexpr int kMaxKernelRadius = 64;

/// Scatter (exponential) and turbulence (Lorentzian) lengths, in pixels.
struct PsfParams {
  double lambda_scatter = 1.0;
  double lambda_turb = 1.0;
  std::optional<int> kernel_radius;  // auto: ceil(6 * max(lambda)) capped at 64

  int resolved_radius() const;
};

/// sigma(z) = sigma_ref * (z / z_ref)^exponent, sigma(0) = 0.
struct DepthKernelParams {
  double sigma_ref = 1.5;
  double z_ref = 5.0;
  double z = 0.0;
  double exponent = 0.78;

  double sigma() const;
};

/// Odd-sided, unit-sum, non-negative kernel plus the parameters that built it.
struct PsfKernel {
  int side = 1;
  std::vector<double> weights;  // side * side, row-major
  std::variant<std::monostate, PsfParams, DepthKernelParams> provenance;

  int radius() const noexcept { return side / 2; }
  double at(int row, int col) const { return weights[static_cast<std::size_t>(row) * side + col]; }
  bool is_identity() const noexcept { return side == 1; }
  bool is_gaussian() const noexcept {
    return std::holds_alternative<DepthKernelParams>(provenance);
  }
};

PsfKernel identity_kernel();

/// Exponential and Lorentzian radial profiles sampled on (2R+1)^2 grids,
/// convolved in 2-D, cropped to (2R+1)^2 and renormalized.
PsfKernel build_psf(const PsfParams& params);

/// Isotropic Gaussian with sigma(z) on radius ceil(4 sigma); identity when sigma < 0.05 px.
PsfKernel build_depth_gaussian(const DepthKernelParams& params);

/// Per-channel 2-D correlation with reflect-101 borders. F32 in, F32 out, same shape.
/// Gaussians go through the separable path, small kernels through direct 2-D,
/// kernels wider than 33 taps through the FFT path.
ImageBuffer convolve(const ImageBuffer& img, const PsfKernel& kernel);

namespace detail {

/// Sampled radial profiles on a (2R+1)^2 grid centred on the middle tap.
std::vector<double> exponential_grid(double lambda, int radius);
std::vector<double> lorentzian_grid(double lambda, int radius);

/// Full discrete 2-D convolution of two (2R+1)^2 grids, cropped back to (2R+1)^2.
std::vector<double> convolve_cropped(const std::vector<double>& a, const std::vector<double>& b,
                                     int radius);

/// Reflect-101 index folding, valid for any offset and any n >= 1.
int reflect101(int i, int n);

ImageBuffer convolve_direct(const ImageBuffer& img, const PsfKernel& kernel);
ImageBuffer convolve_separable(const ImageBuffer& img, const std::vector<double>& taps);
ImageBuffer convolve_fft(const ImageBuffer& img, const PsfKernel& kernel);

}  // namespace detail

}  // namespace aquaaug
