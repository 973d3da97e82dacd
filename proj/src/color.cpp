#include "aquaaug/color.hpp"

#include <algorithm>
#include <cmath>

namespace aquaaug {

double wrap_degrees(double h) {
  double w = std::fmod(h, 360.0);
  if (w < 0.0) w += 360.0;
  // fmod of a tiny negative number can round back up to exactly 360.
  return w >= 360.0 ? 0.0 : w;
}

HsvPixel rgb_to_hsv(Rgb p) {
  const double mx = std::max({p.r, p.g, p.b});
  const double mn = std::min({p.r, p.g, p.b});
  const double delta = mx - mn;

  HsvPixel out;
  out.v = mx;
  if (delta <= 0.0 || mx <= 0.0) return out;

  out.s = delta / mx;
  double h;
  if (mx == p.r)
    h = (p.g - p.b) / delta;
  else if (mx == p.g)
    h = 2.0 + (p.b - p.r) / delta;
  else
    h = 4.0 + (p.r - p.g) / delta;
  out.h = wrap_degrees(h * 60.0);
  return out;
}

Rgb hsv_to_rgb(HsvPixel p) {
  const double h = wrap_degrees(p.h);
  const double s = std::clamp(p.s, 0.0, 1.0);
  const double v = std::clamp(p.v, 0.0, 1.0);
  if (s == 0.0) return {v, v, v};

  const double hh = h / 60.0;
  const int sector = std::min(static_cast<int>(hh), 5);
  const double f = hh - sector;
  const double lo = v * (1.0 - s);
  const double fall = v * (1.0 - s * f);
  const double rise = v * (1.0 - s * (1.0 - f));

  Rgb out;
  switch (sector) {
    case 0: out = {v, rise, lo}; break;
    case 1: out = {fall, v, lo}; break;
    case 2: out = {lo, v, rise}; break;
    case 3: out = {lo, fall, v}; break;
    case 4: out = {rise, lo, v}; break;
    default: out = {v, lo, fall}; break;
  }
  out.r = std::clamp(out.r, 0.0, 1.0);
  out.g = std::clamp(out.g, 0.0, 1.0);
  out.b = std::clamp(out.b, 0.0, 1.0);
  return out;
}

}  // namespace aquaaug
