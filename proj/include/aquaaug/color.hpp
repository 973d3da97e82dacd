#pragma once

namespace aquaaug {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

/// Hexcone HSV. h in degrees [0, 360), s and v in [0, 1].
struct HsvPixel {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

/// Achromatic inputs (max == min) map to h = 0, s = 0.
HsvPixel rgb_to_hsv(Rgb p);

/// Hue is wrapped modulo 360 and s, v clamped before conversion.
Rgb hsv_to_rgb(HsvPixel p);

/// Wrap any angle in degrees into [0, 360).
double wrap_degrees(double h);

}  // namespace aquaaug
