#include "aquaaug/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "aquaaug/color.hpp"
#include "aquaaug/errors.hpp"
#include "aquaaug/spectral_default.hpp"

namespace aquaaug {

namespace {

constexpr double kBandStart = 400.0;
constexpr double kBandEnd = 700.0;

double parse_number(std::string_view s, int line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw InvalidArgument("spectral table line " + std::to_string(line) + ": bad number '" +
                          std::string(s) + "'");
  return v;
}

template <typename PixelFn>
ImageBuffer map_hsv(const ImageBuffer& img, PixelFn fn) {
  if (img.channels() != 3) throw InvalidArgument("HSV transforms need a 3-channel image");
  ImageBuffer out = img;
  auto px = out.f32();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    HsvPixel hsv = rgb_to_hsv({px[i], px[i + 1], px[i + 2]});
    fn(hsv);
    const Rgb rgb = hsv_to_rgb(hsv);
    px[i] = static_cast<float>(rgb.r);
    px[i + 1] = static_cast<float>(rgb.g);
    px[i + 2] = static_cast<float>(rgb.b);
  }
  return out;
}

}  // namespace

SpectralTable::SpectralTable(std::vector<double> wavelengths_nm, std::vector<double> transmission,
                             std::vector<double> illuminant, std::vector<double> hue_response,
                             double path_length_m)
    : wavelengths_(std::move(wavelengths_nm)),
      transmission_(std::move(transmission)),
      illuminant_(std::move(illuminant)),
      hue_response_(std::move(hue_response)),
      path_length_(path_length_m) {
  const std::size_t n = wavelengths_.size();
  if (n < 16) throw InvalidArgument("spectral table needs at least 16 samples");
  if (transmission_.size() != n || illuminant_.size() != n || hue_response_.size() != n)
    throw InvalidArgument("spectral table columns differ in length");
  if (std::abs(wavelengths_.front() - kBandStart) > 1e-9 ||
      std::abs(wavelengths_.back() - kBandEnd) > 1e-9)
    throw InvalidArgument("spectral table must span exactly 400-700 nm");
  const double h = (kBandEnd - kBandStart) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(wavelengths_[i] - (kBandStart + h * static_cast<double>(i))) > 1e-6)
      throw InvalidArgument("spectral table grid must be uniform and ascending");
  if (std::ranges::any_of(transmission_, [](double t) { return t < 0.0; }) ||
      std::ranges::any_of(illuminant_, [](double v) { return v < 0.0; }))
    throw InvalidArgument("transmission and illuminant must be non-negative");
  if (std::ranges::all_of(illuminant_, [](double v) { return v == 0.0; }))
    throw InvalidArgument("illuminant is identically zero");
  if (!(path_length_ >= 0.0)) throw InvalidArgument("path length must be non-negative");
}

SpectralTable SpectralTable::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("spectral table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "wavelength_nm,transmission,illuminant,hue_response")
    throw InvalidArgument("unexpected spectral table header: " + line);

  std::vector<double> cols[4];
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string_view rest = line;
    for (int c = 0; c < 4; ++c) {
      const auto comma = rest.find(',');
      if ((c < 3) == (comma == std::string_view::npos))
        throw InvalidArgument("spectral table line " + std::to_string(lineno) +
                              ": expected 4 fields");
      cols[c].push_back(parse_number(rest.substr(0, comma), lineno));
      if (c < 3) rest.remove_prefix(comma + 1);
    }
  }
  return {std::move(cols[0]), std::move(cols[1]), std::move(cols[2]), std::move(cols[3])};
}

SpectralTable SpectralTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open spectral table " + path.string());
  return from_csv(in);
}

const SpectralTable& SpectralTable::default_table() {
  static const SpectralTable table = [] {
    std::istringstream in(detail::kDefaultSpectralCsv);
    return from_csv(in);
  }();
  return table;
}

SpectralTable SpectralTable::at_depth(double z) const {
  if (!(z >= 0.0)) throw InvalidArgument("depth must be non-negative");
  std::vector<double> t(transmission_.size());
  if (path_length_ == 0.0) {
    if (z != 0.0) throw InvalidArgument("cannot rescale a zero-length transmission");
    t = transmission_;
  } else {
    const double e = z / path_length_;
    std::ranges::transform(transmission_, t.begin(), [e](double v) { return std::pow(v, e); });
  }
  return {wavelengths_, std::move(t), illuminant_, hue_response_, z};
}

void WaterParams::validate() const {
  if (!(beta_turbidity >= 0.0 && beta_turbidity <= 1.0))
    throw InvalidArgument("beta_turbidity must lie in [0,1]");
  if (!(c_d >= 0.0)) throw InvalidArgument("c_d must be non-negative");
  if (!(z >= 0.0)) throw InvalidArgument("z must be non-negative");
  if (!(irradiance_ratio > 0.0 && irradiance_ratio <= 1.0))
    throw InvalidArgument("irradiance_ratio must lie in (0,1]");
}

double hue_shift_degrees(const SpectralTable& table) {
  const auto& t = table.transmission();
  const auto& il = table.illuminant();
  const auto& hr = table.hue_response();
  const std::size_t n = t.size();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    const double ti = t[i] * il[i];
    num += w * ti * hr[i];
    den += w * ti;
  }
  num *= table.step();
  den *= table.step();
  if (den <= 1e-12) throw DegenerateSpectrum("integral of T*I vanishes; water is opaque");
  return std::atan(num / den) * 180.0 / std::numbers::pi;
}

double value_decay_factor(const WaterParams& params) {
  return params.irradiance_ratio * std::exp(-params.c_d * params.z);
}

ImageBuffer apply_hue_shift(const ImageBuffer& img, double delta_h_degrees) {
  return map_hsv(img, [=](HsvPixel& p) { p.h = wrap_degrees(p.h + delta_h_degrees); });
}

ImageBuffer apply_saturation_scale(const ImageBuffer& img, const WaterParams& params) {
  params.validate();
  const double k = 1.0 - params.beta_turbidity;
  return map_hsv(img, [=](HsvPixel& p) { p.s = std::clamp(p.s * k, 0.0, 1.0); });
}

ImageBuffer apply_value_decay(const ImageBuffer& img, const WaterParams& params) {
  params.validate();
  const double k = value_decay_factor(params);
  return map_hsv(img, [=](HsvPixel& p) { p.v = std::clamp(p.v * k, 0.0, 1.0); });
}

ImageBuffer apply_hsv_physics(const ImageBuffer& img, double delta_h_degrees,
                              const WaterParams& params) {
  params.validate();
  const double ks = 1.0 - params.beta_turbidity;
  const double kv = value_decay_factor(params);
  return map_hsv(img, [=](HsvPixel& p) {
    p.h = wrap_degrees(p.h + delta_h_degrees);
    p.s = std::clamp(p.s * ks, 0.0, 1.0);
    p.v = std::clamp(p.v * kv, 0.0, 1.0);
  });
}

}  // namespace aquaaug
