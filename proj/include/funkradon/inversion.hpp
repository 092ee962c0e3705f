#pragma once

// f(x) = -1/(4 pi^2 D(x)) (P) \int\int M f(lambda, phi) / (lambda - level(x, phi))^2 dlambda dphi,
// evaluated as a lambda filter G(l0, phi) = (P) \int g(lambda) / (lambda - l0)^2 dlambda
// followed by backprojection over phi.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funkradon/core.hpp"
#include "funkradon/field.hpp"
#include "funkradon/geometry.hpp"
#include "funkradon/parallel.hpp"
#include "funkradon/sinogram.hpp"
#include "funkradon/transform.hpp"

namespace funkradon {

/// D(x) = (1/2pi) \int dphi / |grad_g psi|^2 by the trapezoid rule.
inline double dcoef_quadrature(const GeometryFamily& g, Point2 x, int n_phi) {
  if (n_phi < 8) throw DomainError("dcoef_quadrature: n_phi must be at least 8");
  g.require_domain(x);
  double s = 0.0;
  for (int j = 0; j < n_phi; ++j) {
    const double gn = g.grad_norm(x, kTwoPi * j / n_phi);
    s += 1.0 / (gn * gn);
  }
  return s / n_phi;
}

/// Filtered data on a full-period phi grid (half-range and even-in-lambda
/// inputs are expanded first).
struct FilteredSinogram {
  GeometryFamily geometry;
  LambdaAxis lambda;
  PhiAxis phi;
  std::vector<double> data;  // phi-major, as Sinogram

  double at(int i, int j) const { return data[static_cast<std::size_t>(j) * lambda.n + i]; }
};

struct InvertOptions {
  int workers = 0;         ///< 0 = default_workers()
  bool flip_sign = false;  ///< deliberately wrong sign, for mutation testing
  bool focus_correction = true;  ///< hyperbola: treat the lambda = 0 cusp separately
};

namespace detail {

/// Families whose level(x, phi + pi) = -level(x, phi).
inline bool odd_under_half_turn(Family f) {
  return f == Family::radon || f == Family::funk || f == Family::hgeodesic || f == Family::equidistant;
}

/// Full-period, lambda-complete copy of `s` (expansion of [0, pi) data via
/// g(lambda, phi + pi) = g(-lambda, phi); even mirror for the parabola).
inline Sinogram expand(const Sinogram& s) {
  const double tol = 1e-9 * s.lambda.step();
  Sinogram cur = s;
  if (!cur.phi.full) {
    if (!odd_under_half_turn(cur.geometry.family()))
      throw DomainError(std::string(cur.geometry.tag()) + ": half-range phi data is not supported for this family");
    if (std::abs(cur.lambda.lo + cur.lambda.hi) > tol)
      throw DomainError("half-range data needs a lambda axis symmetric about 0");
    Sinogram full(cur.geometry, cur.kind, cur.lambda, {2 * cur.phi.n, true});
    const int n = cur.lambda.n;
    for (int j = 0; j < cur.phi.n; ++j)
      for (int i = 0; i < n; ++i) {
        full.at(i, j) = cur.at(i, j);
        full.at(n - 1 - i, j + cur.phi.n) = cur.at(i, j);
      }
    cur = std::move(full);
  }
  if (cur.geometry.even_in_lambda()) {
    const double d = cur.lambda.step();
    const int n = cur.lambda.n;
    int m;
    bool with_zero;
    if (std::abs(cur.lambda.lo) <= tol) {
      with_zero = true;
      m = 2 * n - 1;
    } else if (std::abs(cur.lambda.lo - 0.5 * d) <= tol) {
      with_zero = false;
      m = 2 * n;
    } else {
      throw DomainError(std::string(cur.geometry.tag()) +
                        ": lambda axis must start at 0 or at half a step so it can be mirrored to negative lambda");
    }
    Sinogram mir(cur.geometry, cur.kind, {-cur.lambda.hi, cur.lambda.hi, m}, cur.phi);
    for (int j = 0; j < cur.phi.n; ++j)
      for (int i = 0; i < n; ++i) {
        const int up = with_zero ? n - 1 + i : n + i;
        const int down = with_zero ? n - 1 - i : n - 1 - i;
        mir.at(up, j) = cur.at(i, j);
        mir.at(down, j) = cur.at(i, j);
      }
    cur = std::move(mir);
  }
  return cur;
}

/// G_i = sum_{j != i} g'_j / (j - i) + step * g''_i: trapezoid rule for
/// (P) \int g'(lambda) / (lambda - lambda_i) dlambda after subtracting
/// g'(lambda_i) over a symmetric window. g is extended by zero.
inline void filter_row(const double* g, int n, double step, double* out) {
  auto at = [&](int k) { return (k < 0 || k >= n) ? 0.0 : g[k]; };
  const int lo = -2, hi = n + 1;
  std::vector<double> d1(hi - lo + 1);
  for (int k = lo; k <= hi; ++k)
    d1[k - lo] = (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * step);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = lo; k <= hi; ++k)
      if (k != i) s += d1[k - lo] / static_cast<double>(k - i);
    const double d2 = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) / (12.0 * step * step);
    out[i] = s + step * d2;
  }
}

}  // namespace detail

/// G(lambda_0, phi) = (P) \int g(lambda, phi) / (lambda - lambda_0)^2 dlambda on the
/// lambda grid. Rejects data that do not vanish at the lambda ends.
inline FilteredSinogram pv_filter(const Sinogram& sino, const InvertOptions& opt = {}) {
  if (sino.kind != SinoKind::mphi) throw DomainError("pv_filter expects M-data (kind mphi); convert riemann data first");
  const Sinogram s = detail::expand(sino);
  const int n = s.lambda.n;
  const double peak = s.max_abs();
  for (int j = 0; j < s.phi.n; ++j)
    for (int i : {0, n - 1})
      if (std::abs(s.at(i, j)) > 1e-6 * peak)
        throw WindowingError("pv_filter: data do not vanish at the lambda boundary (lambda=" +
                             format_shortest(s.lambda[i]) + ", phi=" + format_shortest(s.phi[j]) + ", |g|=" +
                             format_shortest(std::abs(s.at(i, j))) + " > 1e-6 * max|g|); widen the lambda range");
  FilteredSinogram out{s.geometry, s.lambda, s.phi, std::vector<double>(s.data.size())};
  const int workers = opt.workers > 0 ? opt.workers : default_workers();
  parallel_for(s.phi.n, workers, [&](int j) {
    const std::size_t off = static_cast<std::size_t>(j) * n;
    detail::filter_row(&s.data[off], n, s.lambda.step(), &out.data[off]);
  });
  return out;
}

/// f(x) = -1/(4 pi^2 D(x)) (2 pi / n_phi) sum_j G(level(x, phi_j), phi_j),
/// with 4-point Lagrange interpolation in lambda. Points outside the
/// family's region are set to 0.
inline ScalarField backproject(const FilteredSinogram& fs, const GeometryFamily& g, const Grid& grid,
                               const InvertOptions& opt = {}) {
  if (!fs.phi.full) throw DomainError("backproject expects full-period data");
  ScalarField f(grid);
  const Region region = g.region();
  const int np = fs.phi.n;
  const int n = fs.lambda.n;
  std::vector<LevelSlice> slices;
  slices.reserve(np);
  for (int j = 0; j < np; ++j) slices.emplace_back(g, fs.phi[j]);
  const double d = fs.lambda.step();
  const double lo = fs.lambda.lo, hi = fs.lambda.hi;
  const double sign = opt.flip_sign ? 1.0 : -1.0;
  const int workers = opt.workers > 0 ? opt.workers : default_workers();
  parallel_for(grid.ny, workers, [&](int jy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Point2 x = grid.point(ix, jy);
      if (!region.contains(x) || !g.in_domain(x)) continue;
      double acc = 0.0;
      for (int j = 0; j < np; ++j) {
        const double l0 = slices[j].value(x);
        if (!(l0 >= lo - 1e-9 * d && l0 <= hi + 1e-9 * d))
          throw CoverageError("backproject: lambda=" + format_shortest(l0) + " needed at x=(" + format_shortest(x.x) +
                              ", " + format_shortest(x.y) + "), phi=" + format_shortest(fs.phi[j]) +
                              " lies outside the data range [" + format_shortest(lo) + ", " + format_shortest(hi) + "]");
        const double u = (l0 - lo) / d;
        const int i0 = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
        const double t = u - i0;  // stencil nodes at t = 0, 1, 2, 3
        const double w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        const double w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        const double w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        const double w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        const double* row = &fs.data[static_cast<std::size_t>(j) * n + i0];
        acc += w0 * row[0] + w1 * row[1] + w2 * row[2] + w3 * row[3];
      }
      const double D = g.dcoef_closed(x);
      f(ix, jy) = sign / (4.0 * kPi * kPi * D) * (kTwoPi / np) * acc;
    }
  });
  return f;
}

namespace detail {

// For the hyperbola, psi is not differentiable at the focus and every
// lambda = 0 curve runs through it. M f then has a lambda log|lambda| cusp at
// lambda = 0 of size f(focus) times the cusp of any bump centred there, which
// the difference filter cannot resolve. The multiple is fitted near lambda = 0
// against a reference bump, whose data are subtracted before filtering and
// whose values are added back afterwards. Gradient-order remainders vary like
// cos(phi) and drop out of the backprojection.
struct FocusCusp {
  double amplitude = 0.0;
  Phantom bump;
  std::vector<double> row;  // M bump on the lambda axis, the same for every phi
};

inline FocusCusp fit_focus_cusp(const Sinogram& s, const InvertOptions& opt) {
  FocusCusp out;
  const GeometryFamily& g = s.geometry;
  const double d = s.lambda.step();
  const int half = 4, degree = 2;
  std::vector<int> idx;
  for (int i = 0; i < s.lambda.n; ++i)
    if (std::abs(s.lambda[i]) <= half * d * (1.0 + 1e-9)) idx.push_back(i);
  const int m = static_cast<int>(idx.size());
  if (m < degree + 3) return out;

  // deliberately not the 0.15 * support width used by the acceptance phantoms
  out.bump = Phantom::gaussian({0.0, 0.0}, 0.2 * g.support_radius());
  out.row.assign(s.lambda.n, 0.0);
  ForwardOptions fo;
  fo.workers = opt.workers;
  forward_row(g, out.bump, {}, s.lambda, 0.0, SinoKind::mphi, fo, out.row.data());

  Eigen::MatrixXd V(m, degree + 1);
  Eigen::VectorXd vb(m);
  for (int r = 0; r < m; ++r) {
    const double u = s.lambda[idx[r]] / (half * d);
    for (int c = 0; c <= degree; ++c) V(r, c) = std::pow(u, c);
    vb(r) = out.row[idx[r]];
  }
  const auto qr = V.colPivHouseholderQr();
  auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v - V * qr.solve(v); };
  const Eigen::VectorXd qb = residual(vb);
  const double nb = qb.squaredNorm();
  if (!(nb > 0.0)) return out;
  double num = 0.0;
  Eigen::VectorXd v(m);
  for (int j = 0; j < s.phi.n; ++j) {
    for (int r = 0; r < m; ++r) v(r) = s.at(idx[r], j);
    num += qb.dot(residual(v));
  }
  out.amplitude = num / (s.phi.n * nb);
  return out;
}

}  // namespace detail

inline ScalarField invert(const Sinogram& sino, const Grid& grid, const InvertOptions& opt = {}) {
  if (sino.lambda.n < 4) throw DomainError("invert: need at least 4 lambda samples");
  if (opt.focus_correction && sino.kind == SinoKind::mphi && sino.geometry.family() == Family::hyperbola) {
    Sinogram s = detail::expand(sino);
    const auto cusp = detail::fit_focus_cusp(s, opt);
    if (cusp.amplitude != 0.0) {
      for (int j = 0; j < s.phi.n; ++j)
        for (int i = 0; i < s.lambda.n; ++i) s.at(i, j) -= cusp.amplitude * cusp.row[i];
      ScalarField f = backproject(pv_filter(s, opt), s.geometry, grid, opt);
      const Region region = s.geometry.region();
      const double sign = opt.flip_sign ? -1.0 : 1.0;
      for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
          if (region.contains(grid.point(i, j)) && s.geometry.in_domain(grid.point(i, j)))
            f(i, j) += sign * cusp.amplitude * cusp.bump(grid.point(i, j));
      return f;
    }
  }
  return backproject(pv_filter(sino, opt), sino.geometry, grid, opt);
}

/// Inversion of arc-length data: divide by mu(lambda), invert, divide by m(x).
inline ScalarField reconstruct_riemann(const Sinogram& sino, const Grid& grid, const InvertOptions& opt = {}) {
  ScalarField f = invert(riemann_to_mphi(sino), grid, opt);
  const Region region = sino.geometry.region();
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Point2 x = grid.point(i, j);
      if (region.contains(x) && sino.geometry.in_domain(x)) f(i, j) /= sino.geometry.weight_m(x);
    }
  return f;
}

}  // namespace funkradon
