#pragma once

// Off-diagonal nucleus N(x, y) = (P) \int dphi / (psi(x,phi) - psi(y,phi))^2.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "funkradon/geometry.hpp"
#include "funkradon/quadrature.hpp"
#include "funkradon/trigpoly.hpp"

namespace funkradon {

struct NucleusReport {
  double value = 0.0;      ///< extrapolated PV value
  double scale = 1.0;      ///< max |t'| over the real zeros of t
  double tolerance = 0.0;  ///< rel_tol * max(1, scale^2)
  bool pass = false;
  bool sampled = false;    ///< direct sampling path (no trig-poly form)
  std::vector<double> eps;
  std::vector<double> regularized;
  /// parabola only: the one-lift nucleus with the literal psi, for reference
  std::optional<double> literal;
};

namespace detail {

/// Real zeros of a continuous 2pi-periodic g located by sign changes on a
/// uniform scan and refined by bisection.
template <class G>
std::vector<double> scan_zeros(const G& g, int samples = 2048) {
  std::vector<double> out;
  double a = 0.0, ga = g(0.0);
  for (int i = 1; i <= samples; ++i) {
    const double b = kTwoPi * i / samples;
    const double gb = g(b);
    if (ga == 0.0) {
      out.push_back(a);
    } else if (ga * gb < 0.0) {
      double lo = a, hi = b, glo = ga;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    a = b;
    ga = gb;
  }
  return out;
}

/// eps-regularized PV of \int sum_m 1/t_m(phi)^2 for sampled functions t_m,
/// with zeros located numerically. Extra breakpoints mark kinks.
inline PvEstimate sampled_pv(const std::vector<std::function<double(double)>>& terms,
                             const std::vector<double>& kinks, double& scale_out) {
  std::vector<double> zeros, slopes;
  double amp = 0.0;
  for (const auto& t : terms) {
    for (int i = 0; i < 64; ++i) amp = std::max(amp, std::abs(t(kTwoPi * i / 64)));
    for (double z : scan_zeros(t)) {
      const double h = 1e-6;
      const double s = (t(z + h) - t(z - h)) / (2.0 * h);
      zeros.push_back(z);
      slopes.push_back(s);
    }
  }
  double scale = 0.0;
  for (double s : slopes) scale = std::max(scale, std::abs(s));
  if (scale == 0.0) scale = amp;
  for (double s : slopes)
    if (std::abs(s) <= 1e-8 * scale) throw DomainError("nucleus: repeated real zero");
  scale_out = scale;
  PvEstimate out;
  out.eps = default_eps_ladder(scale);
  for (double eps : out.eps) {
    const auto br = pv_breaks(zeros, slopes, eps, kinks);
    auto f = [&](double phi) {
      double s = 0.0;
      for (const auto& t : terms) s += re_inverse_square(t(phi), eps);
      return s;
    };
    out.regularized.push_back(quad::integrate_pieces(f, br, 1e-14 / (amp * amp), 1e-13).value);
  }
  out.value = quad::extrapolate_to_zero(out.eps, out.regularized);
  return out;
}

}  // namespace detail

/// Evaluates N(x, y). Families with an exact trigonometric difference use
/// pv_inverse_square on it. The parabola is sampled directly; its reported
/// value is the nucleus of the even-extended inversion,
/// \int (psi_x - psi_y)^-2 + (psi_x + psi_y)^-2, and `literal` holds the
/// first term alone.
inline NucleusReport nucleus_check(const GeometryFamily& g, Point2 x, Point2 y, double rel_tol = 1e-4) {
  g.require_domain(x);
  g.require_domain(y);
  if (x == y) throw DomainError("nucleus_check: x and y must differ");
  NucleusReport r;
  if (auto t = g.trig_difference(x, y)) {
    r.scale = pv_scale(*t);
    const auto est = pv_inverse_square_detail(*t, default_eps_ladder(r.scale));
    r.value = est.value;
    r.eps = est.eps;
    r.regularized = est.regularized;
  } else {
    r.sampled = true;
    auto px = [&](double phi) { return g.psi_unchecked(x, phi); };
    auto py = [&](double phi) { return g.psi_unchecked(y, phi); };
    // psi is only Lipschitz where the square root's argument vanishes.
    const std::vector<double> kinks{std::fmod(std::atan2(x.y, x.x) + 3.0 * kPi, kTwoPi),
                                    std::fmod(std::atan2(y.y, y.x) + 3.0 * kPi, kTwoPi)};
    std::vector<std::function<double(double)>> diff{[&](double p) { return px(p) - py(p); }};
    std::vector<std::function<double(double)>> both{diff[0], [&](double p) { return px(p) + py(p); }};
    double lit_scale = 0.0;
    r.literal = detail::sampled_pv(diff, kinks, lit_scale).value;
    const auto est = detail::sampled_pv(both, kinks, r.scale);
    r.value = est.value;
    r.eps = est.eps;
    r.regularized = est.regularized;
  }
  r.tolerance = rel_tol * std::max(1.0, r.scale * r.scale);
  r.pass = std::abs(r.value) <= r.tolerance;
  return r;
}

}  // namespace funkradon
