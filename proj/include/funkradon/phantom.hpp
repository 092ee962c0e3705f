#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "funkradon/core.hpp"
#include "funkradon/field.hpp"
#include "funkradon/format.hpp"

namespace funkradon {

/// One analytic blob: a Gaussian or a (possibly mollified) disc.
struct Component {
  enum class Shape { gauss, disc };
  Shape shape = Shape::gauss;
  Point2 center;
  double size = 1.0;   // sigma for gauss, radius for disc
  double amp = 1.0;
  double width = 0.0;  // disc mollification width; 0 = exact indicator

  /// Radius about `center` outside which the value is treated as zero.
  double reach(double gauss_sigmas = 6.0) const {
    return shape == Shape::gauss ? gauss_sigmas * size : size;
  }
  bool exact_indicator() const { return shape == Shape::disc && width == 0.0; }
};

/// C-infinity step from 0 (s <= 0) to 1 (s >= 1). The cubic smoothstep
/// has a jump in its second derivative, which stalls the refinement of
/// curve quadratures crossing the disc rim.
inline double smoothstep01(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

class Phantom {
 public:
  Phantom() = default;
  explicit Phantom(std::vector<Component> parts) : parts_(std::move(parts)) {
    for (const auto& c : parts_) check(c);
  }

  static Phantom gaussian(Point2 c, double sigma, double amp = 1.0) {
    return Phantom({{Component::Shape::gauss, c, sigma, amp, 0.0}});
  }
  static Phantom disc(Point2 c, double r, double amp = 1.0, double w = 0.0) {
    return Phantom({{Component::Shape::disc, c, r, amp, w}});
  }

  /// `gauss:cx,cy,sigma,amp` and `disc:cx,cy,r,amp[,w]`, joined by ';'.
  static Phantom parse(std::string_view text);
  std::string descriptor() const;

  const std::vector<Component>& components() const { return parts_; }
  bool empty() const { return parts_.empty(); }

  Phantom operator+(const Phantom& o) const {
    std::vector<Component> all = parts_;
    all.insert(all.end(), o.parts_.begin(), o.parts_.end());
    return Phantom(std::move(all));
  }
  Phantom scaled(double s) const {
    std::vector<Component> all = parts_;
    for (auto& c : all) c.amp *= s;
    return Phantom(std::move(all));
  }

  double operator()(Point2 x) const {
    double v = 0.0;
    for (const auto& c : parts_) v += eval_component(c, x);
    return v;
  }

  static double eval_component(const Component& c, Point2 x) {
    const double d2 = norm2(x - c.center);
    if (c.shape == Component::Shape::gauss) return c.amp * std::exp(-0.5 * d2 / (c.size * c.size));
    const double d = std::sqrt(d2);
    if (c.width == 0.0) return d <= c.size ? c.amp : 0.0;
    return c.amp * smoothstep01((c.size - d) / c.width);
  }

  /// Bounding radius about the origin (Gaussians counted to 6 sigma).
  double support_radius() const {
    double r = 0.0;
    for (const auto& c : parts_) r = std::max(r, norm(c.center) + c.reach());
    return r;
  }

  /// Disc (center, radius) containing every component out to `gauss_sigmas`.
  std::pair<Point2, double> bounding_disc(double gauss_sigmas = 6.0) const {
    if (parts_.empty()) return {{0.0, 0.0}, 0.0};
    double lx = 1e300, ly = 1e300, hx = -1e300, hy = -1e300;
    for (const auto& c : parts_) {
      const double r = c.reach(gauss_sigmas);
      lx = std::min(lx, c.center.x - r);
      hx = std::max(hx, c.center.x + r);
      ly = std::min(ly, c.center.y - r);
      hy = std::max(hy, c.center.y + r);
    }
    const Point2 mid{0.5 * (lx + hx), 0.5 * (ly + hy)};
    double rad = 0.0;
    for (const auto& c : parts_) rad = std::max(rad, norm(c.center - mid) + c.reach(gauss_sigmas));
    return {mid, rad};
  }

  /// Smallest feature scale (sigma, mollification width, or radius).
  double feature_scale() const {
    double s = 1e300;
    for (const auto& c : parts_) {
      if (c.shape == Component::Shape::gauss) s = std::min(s, c.size);
      else s = std::min(s, c.width > 0.0 ? c.width : c.size);
    }
    return s;
  }

  double max_amplitude() const {
    double a = 0.0;
    for (const auto& c : parts_) a = std::max(a, std::abs(c.amp));
    return a;
  }

 private:
  static void check(const Component& c) {
    if (!std::isfinite(c.center.x) || !std::isfinite(c.center.y) || !std::isfinite(c.amp))
      throw DomainError("phantom component has non-finite parameters");
    if (!(c.size > 0.0) || !std::isfinite(c.size))
      throw DomainError(c.shape == Component::Shape::gauss ? "gaussian sigma must be positive"
                                                            : "disc radius must be positive");
    if (!(c.width >= 0.0) || !std::isfinite(c.width)) throw DomainError("disc mollification width must be >= 0");
  }

  std::vector<Component> parts_;
};

inline Phantom Phantom::parse(std::string_view text) {
  std::vector<Component> parts;
  std::size_t pos = 0;
  if (text.empty()) throw ParseError("empty phantom descriptor", 0);
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(pos, end - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos)
      throw ParseError("expected shape:values in '" + std::string(item) + "'", pos);
    const std::string_view shape = item.substr(0, colon);
    std::vector<double> vals;
    std::size_t vp = colon + 1;
    while (true) {
      std::size_t comma = item.find(',', vp);
      if (comma == std::string_view::npos) comma = item.size();
      const std::string_view tok = item.substr(vp, comma - vp);
      auto v = parse_double(tok);
      if (!v || !std::isfinite(*v)) throw ParseError("invalid number '" + std::string(tok) + "'", pos + vp);
      vals.push_back(*v);
      if (comma == item.size()) break;
      vp = comma + 1;
    }
    Component c;
    if (shape == "gauss") {
      if (vals.size() != 4) throw ParseError("gauss expects cx,cy,sigma,amp", pos);
      c = {Component::Shape::gauss, {vals[0], vals[1]}, vals[2], vals[3], 0.0};
    } else if (shape == "disc") {
      if (vals.size() != 4 && vals.size() != 5) throw ParseError("disc expects cx,cy,r,amp[,w]", pos);
      c = {Component::Shape::disc, {vals[0], vals[1]}, vals[2], vals[3], vals.size() == 5 ? vals[4] : 0.0};
    } else {
      throw ParseError("unknown phantom shape '" + std::string(shape) + "' (expected gauss or disc)", pos);
    }
    parts.push_back(c);
    if (end == text.size()) break;
    pos = end + 1;
  }
  return Phantom(std::move(parts));
}

inline std::string Phantom::descriptor() const {
  std::string out;
  for (const auto& c : parts_) {
    if (!out.empty()) out += ';';
    out += c.shape == Component::Shape::gauss ? "gauss:" : "disc:";
    out += format_shortest(c.center.x) + ',' + format_shortest(c.center.y) + ',' + format_shortest(c.size) +
           ',' + format_shortest(c.amp);
    if (c.shape == Component::Shape::disc && c.width > 0.0) out += ',' + format_shortest(c.width);
  }
  return out;
}

inline ScalarField rasterize(const Phantom& p, const Grid& g) {
  ScalarField f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = p(g.point(i, j));
  return f;
}

inline void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw DomainError("fields are sampled on different grids");
}

/// ||a - b||_2 / ||b||_2.
inline double rel_l2(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    const double d = a.values()[k] - b.values()[k];
    num += d * d;
    den += b.values()[k] * b.values()[k];
  }
  if (den == 0.0) throw DomainError("rel_l2: reference field is identically zero");
  return std::sqrt(num / den);
}

inline double linf(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

}  // namespace funkradon
