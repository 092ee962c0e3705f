#pragma once

// Curve families generated by Phi(x; lambda, phi) = lambda + psi(x, phi).
// Each family supplies psi, its gradient, the normalizer D(x), the admissible
// lambda range over its support disc, the |grad psi| = m(x) mu(lambda)
// factorization and the exact trigonometric form of psi(x, .) - psi(y, .).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "funkradon/core.hpp"
#include "funkradon/format.hpp"
#include "funkradon/trigpoly.hpp"

namespace funkradon {

enum class Family { radon, funk, hgeodesic, equidistant, ellipse, hyperbola, parabola, cormack };

inline constexpr std::array<std::string_view, 8> kFamilyTags = {
    "radon", "funk", "hgeodesic", "equidistant", "ellipse", "hyperbola", "parabola", "cormack"};

inline std::string_view tag_of(Family f) { return kFamilyTags[static_cast<std::size_t>(f)]; }

inline std::optional<Family> family_from_tag(std::string_view tag) {
  for (std::size_t i = 0; i < kFamilyTags.size(); ++i)
    if (kFamilyTags[i] == tag) return static_cast<Family>(i);
  return std::nullopt;
}

/// Annulus inner <= |x| <= outer (inner may be 0).
struct Region {
  double inner = 0.0;
  double outer = 1.0;
  bool contains(Point2 p) const {
    const double r = norm(p);
    return r <= outer && r >= inner;
  }
};

class GeometryFamily {
 public:
  struct Params {
    double e1 = 1.0;       // ellipse half-axes
    double e2 = 1.0;
    double eps = 2.0;      // hyperbola eccentricity
    int k = 1;             // cormack order
    double support = 1.0;  // outer radius of the reconstruction region
    double inner = 0.0;    // excluded disc around the origin (parabola, cormack)
  };

  GeometryFamily(Family family, Params p) : family_(family), p_(p) { validate(); }

  static GeometryFamily radon(double support = 1.0) { return {Family::radon, with_support(support)}; }
  static GeometryFamily funk(double support = 1.0) { return {Family::funk, with_support(support)}; }
  static GeometryFamily hgeodesic(double support = 0.8) { return {Family::hgeodesic, with_support(support)}; }
  static GeometryFamily equidistant(double support = 0.8) { return {Family::equidistant, with_support(support)}; }
  static GeometryFamily ellipse(double e1, double e2, double support) {
    Params p = with_support(support);
    p.e1 = e1;
    p.e2 = e2;
    return {Family::ellipse, p};
  }
  static GeometryFamily hyperbola(double eps, double support = 1.0) {
    Params p = with_support(support);
    p.eps = eps;
    return {Family::hyperbola, p};
  }
  static GeometryFamily parabola(double support = 2.0, double inner = 0.2) {
    Params p = with_support(support);
    p.inner = inner;
    return {Family::parabola, p};
  }
  static GeometryFamily cormack(int k, double support = 2.0, double inner = 0.2) {
    Params p = with_support(support);
    p.k = k;
    p.inner = inner;
    return {Family::cormack, p};
  }

  /// Parses `tag[:param=value,...]`, e.g. `ellipse:e1=1.2,e2=0.8,support=0.7`.
  static GeometryFamily parse(std::string_view text);

  /// Canonical descriptor; parse(descriptor()) reproduces *this.
  std::string descriptor() const;

  Family family() const { return family_; }
  std::string_view tag() const { return tag_of(family_); }
  const Params& params() const { return p_; }
  double support_radius() const { return p_.support; }
  Region region() const { return {p_.inner, p_.support}; }

  /// Radius of a disc around the origin that level-curve tracing avoids:
  /// the excluded disc for punctured families, a tiny disc for the
  /// hyperbola (psi has a conical point at the origin), else 0.
  double trace_exclusion() const {
    if (family_ == Family::hyperbola) return 1e-6 * p_.support;
    return p_.inner;
  }

  /// +1 when the curves are {lambda + psi = 0}; -1 for the ellipse family,
  /// whose curves are the circles {|x - E(phi)|^2 = lambda}.
  int orientation() const { return family_ == Family::ellipse ? -1 : 1; }

  /// Sheets of the plane level set per curve of the quotient family
  /// (cormack: k rotated copies); forward integrals are divided by it.
  int quotient_multiplicity() const { return family_ == Family::cormack ? p_.k : 1; }

  /// True for families whose data must be mirrored to negative lambda before
  /// filtering (parabola: lambda >= 0 parametrizes each parabola once).
  bool even_in_lambda() const { return family_ == Family::parabola; }

  bool in_domain(Point2 x) const {
    if (!std::isfinite(x.x) || !std::isfinite(x.y)) return false;
    switch (family_) {
      case Family::hgeodesic:
      case Family::equidistant: return norm2(x) < 1.0;
      case Family::parabola:
      case Family::cormack: return !(x.x == 0.0 && x.y == 0.0);
      default: return true;
    }
  }

  void require_domain(Point2 x) const {
    if (!in_domain(x))
      throw DomainError(std::string(tag()) + ": point (" + format_shortest(x.x) + ", " +
                        format_shortest(x.y) + ") is outside the family's domain");
  }

  double psi(Point2 x, double phi) const {
    require_domain(x);
    return psi_unchecked(x, phi);
  }

  /// lambda of the curve through x at angle phi (the backprojection abscissa).
  double level(Point2 x, double phi) const { return -orientation() * psi_unchecked(x, phi); }

  /// Euclidean gradient of psi in the chart coordinates.
  Point2 gradient(Point2 x, double phi) const;

  Point2 level_gradient(Point2 x, double phi) const {
    return gradient(x, phi) * static_cast<double>(-orientation());
  }

  /// |grad_g psi|: Euclidean except funk (spherical metric in gnomonic
  /// coordinates). Throws if not strictly positive.
  double grad_norm(Point2 x, double phi) const;

  /// sqrt(det g) of the family's metric in chart coordinates.
  double area_density(Point2 x) const {
    if (family_ == Family::funk) {
      const double q = 1.0 + norm2(x);
      return 1.0 / (q * std::sqrt(q));
    }
    return 1.0;
  }

  /// Riemannian length of the Euclidean unit vector `u` at x.
  double line_factor(Point2 x, Point2 u) const {
    if (family_ == Family::funk) {
      const double q = 1.0 + norm2(x);
      const double yu = dot(x, u);
      return std::sqrt(q * norm2(u) - yu * yu) / q;
    }
    return norm(u);
  }

  /// Closed-form normalizer D(x) = (1/2pi) \int dphi / |grad_g psi|^2.
  double dcoef_closed(Point2 x) const;

  /// Interval of lambda covering every curve that meets the support disc.
  Interval lambda_range() const { return lambda_range(p_.support); }
  Interval lambda_range(double support_radius) const;

  bool factorizable() const { return family_ != Family::hyperbola; }
  double weight_m(Point2 x) const;
  double weight_mu(double lambda) const;

  /// psi(x, .) - psi(y, .) as an exact trigonometric polynomial; nullopt for
  /// the parabola, whose psi(x, .) is not one.
  std::optional<TrigPoly> trig_difference(Point2 x, Point2 y) const;

  /// ellipse: ||x + y||*_e < 2 for all x, y in the support disc. Always true
  /// for the other families.
  bool support_condition_holds() const {
    if (family_ != Family::ellipse) return true;
    return p_.support < std::min(p_.e1, p_.e2);
  }

  /// Dual ellipse norm ||z||*_e = sqrt((z1/e1)^2 + (z2/e2)^2).
  double dual_norm(Point2 z) const { return std::hypot(z.x / p_.e1, z.y / p_.e2); }

  /// Source point E(phi) = (e1 cos phi, e2 sin phi) of the ellipse family.
  Point2 source(double phi) const { return {p_.e1 * std::cos(phi), p_.e2 * std::sin(phi)}; }

  double psi_unchecked(Point2 x, double phi) const;

 private:
  static Params with_support(double s) {
    Params p;
    p.support = s;
    return p;
  }

  void validate() const;

  Family family_;
  Params p_;
};

// ---------------------------------------------------------------------------

inline void GeometryFamily::validate() const {
  const std::string t(tag());
  if (!(p_.support > 0.0) || !std::isfinite(p_.support))
    throw DomainError(t + ": support radius must be positive");
  if (!(p_.inner >= 0.0) || !(p_.inner < p_.support))
    throw DomainError(t + ": inner radius must satisfy 0 <= inner < support");
  switch (family_) {
    case Family::hgeodesic:
    case Family::equidistant:
      if (!(p_.support < 1.0)) throw DomainError(t + ": support radius must be < 1 (unit disc model)");
      break;
    case Family::ellipse:
      if (!(p_.e1 > 0.0) || !(p_.e2 > 0.0)) throw DomainError(t + ": half-axes must be positive");
      break;
    case Family::hyperbola:
      if (!(p_.eps > 1.0)) throw DomainError(t + ": eccentricity must exceed 1");
      break;
    case Family::cormack:
      if (p_.k < 1) throw DomainError(t + ": order k must be a positive integer");
      [[fallthrough]];
    case Family::parabola:
      if (!(p_.inner > 0.0)) throw DomainError(t + ": region must exclude a disc around the origin (inner > 0)");
      break;
    default: break;
  }
}

inline double GeometryFamily::psi_unchecked(Point2 x, double phi) const {
  const Point2 e = unit(phi);
  const double u = dot(x, e);
  switch (family_) {
    case Family::radon: return -u;
    case Family::funk: return u;
    case Family::hgeodesic: return -2.0 * u / (1.0 + norm2(x));
    case Family::equidistant: return -2.0 * u / (1.0 - norm2(x));
    case Family::ellipse: return norm2(x - source(phi));
    case Family::hyperbola: return p_.eps * u - norm(x);
    case Family::parabola: return -std::sqrt(std::max(0.0, norm(x) + u));
    case Family::cormack: {
      const std::complex<double> z{x.x, x.y};
      return -(std::polar(1.0, -phi) * std::pow(z, p_.k)).real();
    }
  }
  return 0.0;
}

inline Point2 GeometryFamily::gradient(Point2 x, double phi) const {
  require_domain(x);
  const Point2 e = unit(phi);
  const double u = dot(x, e);
  const double rho = norm2(x);
  switch (family_) {
    case Family::radon: return -e;
    case Family::funk: return e;
    case Family::hgeodesic: {
      const double q = 1.0 + rho;
      return e * (-2.0 / q) + x * (4.0 * u / (q * q));
    }
    case Family::equidistant: {
      const double q = 1.0 - rho;
      return e * (-2.0 / q) - x * (4.0 * u / (q * q));
    }
    case Family::ellipse: return (x - source(phi)) * 2.0;
    case Family::hyperbola: {
      const double r = std::sqrt(rho);
      if (r == 0.0) throw DomainError("hyperbola: gradient undefined at the focus");
      return e * p_.eps - x * (1.0 / r);
    }
    case Family::parabola: {
      // grad = -(x/r + e) / (2 sqrt(r + u)); |grad| = 1/sqrt(2r) everywhere,
      // so normalize the direction to stay finite near the ray r + u = 0.
      const double r = std::sqrt(rho);
      const Point2 v = x * (1.0 / r) + e;
      const double nv = norm(v);
      if (nv == 0.0) throw DomainError("parabola: gradient direction undefined on the axis ray");
      return v * (-1.0 / (nv * std::sqrt(2.0 * r)));
    }
    case Family::cormack: {
      const std::complex<double> z{x.x, x.y};
      const std::complex<double> c =
          static_cast<double>(p_.k) * std::polar(1.0, -phi) * std::pow(z, p_.k - 1);
      return {-c.real(), c.imag()};
    }
  }
  return {};
}

inline double GeometryFamily::grad_norm(Point2 x, double phi) const {
  require_domain(x);
  const Point2 e = unit(phi);
  const double u = dot(x, e);
  const double rho = norm2(x);
  double g = 0.0;
  switch (family_) {
    case Family::radon: g = 1.0; break;
    case Family::funk: g = std::sqrt((1.0 + rho) * (1.0 + u * u)); break;
    case Family::hgeodesic: {
      const double s = -2.0 * u / (1.0 + rho);
      g = 2.0 / (1.0 + rho) * std::sqrt(1.0 - s * s);
      break;
    }
    case Family::equidistant: {
      const double q = 1.0 - rho;
      g = 2.0 / q * std::sqrt(1.0 + 4.0 * u * u / (q * q));
      break;
    }
    case Family::ellipse: g = 2.0 * norm(x - source(phi)); break;
    case Family::hyperbola: {
      const double r = std::sqrt(rho);
      if (r == 0.0) throw DomainError("hyperbola: gradient undefined at the focus");
      g = std::sqrt(1.0 + p_.eps * p_.eps - 2.0 * p_.eps * u / r);
      break;
    }
    case Family::parabola: g = 1.0 / std::sqrt(2.0 * std::sqrt(rho)); break;
    case Family::cormack: g = p_.k * std::pow(std::sqrt(rho), p_.k - 1); break;
  }
  if (!(g > 0.0) || !std::isfinite(g))
    throw DomainError(std::string(tag()) + ": gradient norm is not strictly positive");
  return g;
}

inline double GeometryFamily::dcoef_closed(Point2 x) const {
  require_domain(x);
  const double rho = norm2(x);
  switch (family_) {
    case Family::radon: return 1.0;
    case Family::funk: {
      const double q = 1.0 + rho;
      return 1.0 / (q * std::sqrt(q));
    }
    case Family::hgeodesic: return std::pow(1.0 + rho, 3) / (4.0 * (1.0 - rho));
    case Family::equidistant: return std::pow(1.0 - rho, 3) / (4.0 * (1.0 + rho));
    case Family::ellipse: {
      if (!(dual_norm(x) < 1.0))
        throw DomainError("ellipse: D(x) requires x strictly inside the source ellipse");
      if (p_.e1 == p_.e2) return 0.25 / (p_.e1 * p_.e1 - rho);
      // 4|x - E(phi)|^2 as a second-order trigonometric polynomial.
      const double e1s = p_.e1 * p_.e1;
      const double e2s = p_.e2 * p_.e2;
      const TrigPoly t({4.0 * (rho + 0.5 * (e1s + e2s)), -8.0 * x.x * p_.e1, 2.0 * (e1s - e2s)},
                       {-8.0 * x.y * p_.e2, 0.0});
      return residue_integral(TrigPoly::constant(1.0), t) / kTwoPi;
    }
    case Family::hyperbola: return 1.0 / (p_.eps * p_.eps - 1.0);
    case Family::parabola: return 2.0 * std::sqrt(rho);
    case Family::cormack: return 1.0 / (p_.k * p_.k * std::pow(rho, p_.k - 1));
  }
  return 0.0;
}

inline Interval GeometryFamily::lambda_range(double R) const {
  if (!(R > 0.0)) throw DomainError("lambda_range: support radius must be positive");
  switch (family_) {
    case Family::radon:
    case Family::funk: return {-R, R};
    case Family::hgeodesic: {
      const double m = 2.0 * R / (1.0 + R * R);
      return {-m, m};
    }
    case Family::equidistant: {
      if (!(R < 1.0)) throw DomainError("equidistant: support radius must be < 1");
      const double m = 2.0 * R / (1.0 - R * R);
      return {-m, m};
    }
    case Family::ellipse: {
      const double lo = std::max(0.0, std::min(p_.e1, p_.e2) - R);
      const double hi = std::max(p_.e1, p_.e2) + R;
      return {lo * lo, hi * hi};
    }
    case Family::hyperbola: return {-(p_.eps - 1.0) * R, (p_.eps + 1.0) * R};
    case Family::parabola: return {0.0, std::sqrt(2.0 * R)};
    case Family::cormack: {
      const double m = std::pow(R, p_.k);
      return {-m, m};
    }
  }
  return {};
}

inline double GeometryFamily::weight_m(Point2 x) const {
  require_domain(x);
  const double rho = norm2(x);
  switch (family_) {
    case Family::radon:
    case Family::ellipse: return 1.0;
    case Family::funk: return std::sqrt(1.0 + rho);
    case Family::hgeodesic: return 2.0 / (1.0 + rho);
    case Family::equidistant: return 2.0 / (1.0 - rho);
    case Family::parabola: return 1.0 / std::sqrt(2.0 * std::sqrt(rho));
    case Family::cormack: return p_.k * std::pow(std::sqrt(rho), p_.k - 1);
    case Family::hyperbola: break;
  }
  throw FactorizationUnavailable("hyperbola: |grad psi| does not factor as m(x) mu(lambda)");
}

inline double GeometryFamily::weight_mu(double lambda) const {
  switch (family_) {
    case Family::radon:
    case Family::parabola:
    case Family::cormack: return 1.0;
    case Family::funk:
    case Family::equidistant: return std::sqrt(1.0 + lambda * lambda);
    case Family::hgeodesic:
      if (!(std::abs(lambda) < 1.0)) throw DomainError("hgeodesic: mu(lambda) requires |lambda| < 1");
      return std::sqrt(1.0 - lambda * lambda);
    case Family::ellipse:
      if (!(lambda > 0.0)) throw DomainError("ellipse: mu(lambda) requires lambda > 0");
      return 2.0 * std::sqrt(lambda);
    case Family::hyperbola: break;
  }
  throw FactorizationUnavailable("hyperbola: |grad psi| does not factor as m(x) mu(lambda)");
}

inline std::optional<TrigPoly> GeometryFamily::trig_difference(Point2 x, Point2 y) const {
  require_domain(x);
  require_domain(y);
  if (x == y) throw DomainError("trig_difference: x and y must differ");
  const Point2 d = x - y;
  std::optional<TrigPoly> t;
  switch (family_) {
    case Family::radon: t = TrigPoly::first_order(0.0, -d.x, -d.y); break;
    case Family::funk: t = TrigPoly::first_order(0.0, d.x, d.y); break;
    case Family::hgeodesic:
    case Family::equidistant: {
      const double s = family_ == Family::hgeodesic ? 1.0 : -1.0;
      const Point2 w = x * (1.0 / (1.0 + s * norm2(x))) - y * (1.0 / (1.0 + s * norm2(y)));
      t = TrigPoly::first_order(0.0, -2.0 * w.x, -2.0 * w.y);
      break;
    }
    case Family::ellipse:
      t = TrigPoly::first_order(norm2(x) - norm2(y), -2.0 * p_.e1 * d.x, -2.0 * p_.e2 * d.y);
      break;
    case Family::hyperbola:
      t = TrigPoly::first_order(norm(y) - norm(x), p_.eps * d.x, p_.eps * d.y);
      break;
    case Family::parabola: return std::nullopt;
    case Family::cormack: {
      const std::complex<double> c =
          std::pow(std::complex<double>{x.x, x.y}, p_.k) - std::pow(std::complex<double>{y.x, y.y}, p_.k);
      t = TrigPoly::first_order(0.0, -c.real(), -c.imag());
      break;
    }
  }
  if (t->order() == 0 && t->a(0) == 0.0)
    throw DomainError(std::string(tag()) + ": x and y are identified by the family (psi(x,.) == psi(y,.))");
  return t;
}

inline std::string GeometryFamily::descriptor() const {
  std::string out(tag());
  auto kv = [&](std::string_view k, const std::string& v, bool first) {
    out += first ? ':' : ',';
    out += k;
    out += '=';
    out += v;
  };
  switch (family_) {
    case Family::ellipse:
      kv("e1", format_shortest(p_.e1), true);
      kv("e2", format_shortest(p_.e2), false);
      kv("support", format_shortest(p_.support), false);
      break;
    case Family::hyperbola:
      kv("eps", format_shortest(p_.eps), true);
      kv("support", format_shortest(p_.support), false);
      break;
    case Family::cormack:
      kv("k", std::to_string(p_.k), true);
      kv("support", format_shortest(p_.support), false);
      kv("inner", format_shortest(p_.inner), false);
      break;
    case Family::parabola:
      kv("support", format_shortest(p_.support), true);
      kv("inner", format_shortest(p_.inner), false);
      break;
    default: kv("support", format_shortest(p_.support), true); break;
  }
  return out;
}

inline GeometryFamily GeometryFamily::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string_view tag = text.substr(0, colon);
  const auto fam = family_from_tag(tag);
  if (!fam) {
    std::string known;
    for (auto t : kFamilyTags) known += (known.empty() ? "" : ", ") + std::string(t);
    throw ParseError("unknown geometry tag '" + std::string(tag) + "' (expected one of " + known + ")", 0);
  }
  Params p;
  switch (*fam) {
    case Family::hgeodesic:
    case Family::equidistant: p.support = 0.8; break;
    case Family::parabola:
    case Family::cormack:
      p.support = 2.0;
      p.inner = -1.0;  // resolved below
      break;
    default: break;
  }
  bool have_e1 = false, have_e2 = false, have_eps = false, have_k = false, have_support = false;
  std::vector<std::string> seen;
  if (colon != std::string_view::npos) {
    std::size_t pos = colon + 1;
    if (pos >= text.size()) throw ParseError("empty parameter list after ':'", pos);
    while (pos <= text.size()) {
      std::size_t end = text.find(',', pos);
      if (end == std::string_view::npos) end = text.size();
      const std::string_view item = text.substr(pos, end - pos);
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw ParseError("expected key=value in '" + std::string(item) + "'", pos);
      const std::string key(item.substr(0, eq));
      const std::string_view val = item.substr(eq + 1);
      const std::size_t vpos = pos + eq + 1;
      if (std::find(seen.begin(), seen.end(), key) != seen.end())
        throw ParseError("duplicate parameter '" + key + "'", pos);
      seen.push_back(key);
      auto num = [&]() {
        auto v = parse_double(val);
        if (!v || !std::isfinite(*v)) throw ParseError("invalid number '" + std::string(val) + "' for " + key, vpos);
        return *v;
      };
      const bool allowed =
          key == "support" || (key == "inner" && (*fam == Family::parabola || *fam == Family::cormack)) ||
          ((key == "e1" || key == "e2") && *fam == Family::ellipse) ||
          (key == "eps" && *fam == Family::hyperbola) || (key == "k" && *fam == Family::cormack);
      if (!allowed) throw ParseError("parameter '" + key + "' is not valid for " + std::string(tag), pos);
      if (key == "support") {
        p.support = num();
        have_support = true;
      } else if (key == "inner") {
        p.inner = num();
      } else if (key == "e1") {
        p.e1 = num();
        have_e1 = true;
      } else if (key == "e2") {
        p.e2 = num();
        have_e2 = true;
      } else if (key == "eps") {
        p.eps = num();
        have_eps = true;
      } else if (key == "k") {
        auto v = parse_int(val);
        if (!v) throw ParseError("order k must be an integer, got '" + std::string(val) + "'", vpos);
        p.k = static_cast<int>(*v);
        have_k = true;
      }
      pos = end + 1;
      if (end == text.size()) break;
    }
  }
  if (*fam == Family::ellipse && !(have_e1 && have_e2))
    throw ParseError("ellipse requires e1 and e2", text.size());
  if (*fam == Family::hyperbola && !have_eps) throw ParseError("hyperbola requires eps", text.size());
  if (*fam == Family::cormack && !have_k) throw ParseError("cormack requires k", text.size());
  if (*fam == Family::ellipse && !have_support) p.support = 0.7 * std::min(p.e1, p.e2);
  if (p.inner < 0.0) p.inner = 0.1 * p.support;
  return GeometryFamily(*fam, p);
}

}  // namespace funkradon
