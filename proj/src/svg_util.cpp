#include "tsdist/detail/svg_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tsdist::svg {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c; break;
    }
  }
  return out;
}

std::string fmt(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    bool all_zero = true;
    for (char c : s)
      if (c != '-' && c != '0' && c != '.') all_zero = false;
    if (all_zero) s.erase(0, 1);  // normalize "-0.00" to "0.00"
  }
  return s;
}

std::string fmt_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

// dark indigo -> violet -> rose -> orange -> pale gold; luminance strictly
// increases stop to stop, and linear channel interpolation preserves that.
constexpr Rgb kStops[5] = {
    {20, 12, 90}, {85, 30, 124}, {170, 60, 110}, {230, 120, 60}, {252, 230, 120}};

double luminance(Rgb c) { return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b; }

// 256-entry table: channel-wise linear interpolation between the stops,
// then a monotonicity clamp so per-channel rounding can never make a higher
// level darker than a lower one.
const std::array<Rgb, 256>& color_table() {
  static const std::array<Rgb, 256> table = [] {
    std::array<Rgb, 256> t{};
    for (int level = 0; level < 256; ++level) {
      const double scaled = (level / 255.0) * 4.0;
      const int seg = std::min(3, static_cast<int>(scaled));
      const double frac = scaled - seg;
      const Rgb& a = kStops[seg];
      const Rgb& b = kStops[seg + 1];
      auto lerp = [&](uint8_t x, uint8_t y) {
        return static_cast<uint8_t>(std::lround(x + (static_cast<double>(y) - x) * frac));
      };
      t[level] = Rgb{lerp(a.r, b.r), lerp(a.g, b.g), lerp(a.b, b.b)};
      if (level > 0 && luminance(t[level]) < luminance(t[level - 1])) t[level] = t[level - 1];
    }
    return t;
  }();
  return table;
}

}  // namespace

Rgb sequential_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int level = static_cast<int>(std::lround(t * 255.0));
  return color_table()[static_cast<std::size_t>(level)];
}

std::string rgb_string(Rgb c) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)", c.r, c.g, c.b);
  return buf;
}

Rgb distance_color(double value, double vmin, double vmax) {
  if (!(vmax > vmin)) return sequential_color(0.0);
  return sequential_color((value - vmin) / (vmax - vmin));
}

}  // namespace tsdist::svg
