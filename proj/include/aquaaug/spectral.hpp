#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "aquaaug/image.hpp"

namespace aquaaug {

/// Sampled spectra on a uniform wavelength grid covering [400, 700] nm.
///
/// `transmission` is the water transmittance over `path_length_m` metres.
/// Tables loaded from CSV describe a 1 m path; at_depth() rescales them with
/// Beer-Lambert, T(z) = T(1 m)^z.
class SpectralTable {
 public:
  SpectralTable(std::vector<double> wavelengths_nm, std::vector<double> transmission,
                std::vector<double> illuminant, std::vector<double> hue_response,
                double path_length_m = 1.0);

  /// Parse the `wavelength_nm,transmission,illuminant,hue_response` CSV format.
  static SpectralTable from_csv(std::istream& in);
  static SpectralTable load(const std::filesystem::path& path);
  /// The bundled pure-seawater table (1 m path, flat illuminant, linear hue basis).
  static const SpectralTable& default_table();

  /// Same spectra with the transmission re-expressed for a path of `z` metres.
  SpectralTable at_depth(double z) const;

  const std::vector<double>& wavelengths() const noexcept { return wavelengths_; }
  const std::vector<double>& transmission() const noexcept { return transmission_; }
  const std::vector<double>& illuminant() const noexcept { return illuminant_; }
  const std::vector<double>& hue_response() const noexcept { return hue_response_; }
  double path_length() const noexcept { return path_length_; }
  double step() const noexcept { return wavelengths_[1] - wavelengths_[0]; }

 private:
  std::vector<double> wavelengths_;
  std::vector<double> transmission_;
  std::vector<double> illuminant_;
  std::vector<double> hue_response_;
  double path_length_;
};

/// Optical water state for the saturation and value transforms.
struct WaterParams {
  double beta_turbidity = 0.0;    // [0,1]
  double c_d = 0.0;               // diffuse attenuation, 1/m
  double z = 0.0;                 // depth, m
  double irradiance_ratio = 1.0;  // E_d(z) / E_d(0), (0,1]

  void validate() const;
};

/// arctan(∫T·I·h̄ / ∫T·I) over the table grid (trapezoid rule), in degrees.
/// Throws DegenerateSpectrum when ∫T·I <= 1e-12.
double hue_shift_degrees(const SpectralTable& table);

/// Multiplicative value factor irradiance_ratio * exp(-c_d * z).
double value_decay_factor(const WaterParams& params);

// The transforms below take an F32 three-channel image and keep its shape.
ImageBuffer apply_hue_shift(const ImageBuffer& img, double delta_h_degrees);
ImageBuffer apply_saturation_scale(const ImageBuffer& img, const WaterParams& params);
ImageBuffer apply_value_decay(const ImageBuffer& img, const WaterParams& params);

/// All three transforms fused into one HSV round trip per pixel.
ImageBuffer apply_hsv_physics(const ImageBuffer& img, double delta_h_degrees,
                              const WaterParams& params);

}  // namespace aquaaug
