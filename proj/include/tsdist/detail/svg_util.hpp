#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace tsdist::svg {

std::string xml_escape(const std::string& s);

// Fixed-decimal formatting for coordinates; deterministic bytes.
std::string fmt(double v, int decimals = 2);

// Compact value formatting for axis/colorbar annotations.
std::string fmt_value(double v);

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
};

// 256-level sequential colormap, dark at t = 0 and light at t = 1, built by
// linear interpolation between five stops of strictly increasing luminance
// (see README for the stop table). Larger t never yields a darker color.
Rgb sequential_color(double t);

std::string rgb_string(Rgb c);

// Shade for a distance value: the matrix MINIMUM maps to the darkest color.
// Degenerate ranges (max == min) map everything to the darkest color.
Rgb distance_color(double value, double vmin, double vmax);

}  // namespace tsdist::svg
