#pragma once

// Real trigonometric polynomials t(phi) = sum_m a_m cos(m phi) + b_m sin(m phi),
// their zeros on the cylinder C / 2piZ, principal-value integrals of 1/t^2 and
// residue evaluation of integrals of s/t.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "funkradon/core.hpp"
#include "funkradon/quadrature.hpp"

namespace funkradon {

using Complex = std::complex<double>;

class TrigPoly {
 public:
  TrigPoly() : a_{0.0}, b_{0.0} {}

  /// cos-coefficients a_0..a_k and sin-coefficients b_1..b_k.
  TrigPoly(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
      : a_(std::move(cos_coeffs)) {
    if (a_.empty()) a_.push_back(0.0);
    if (sin_coeffs.size() + 1 > a_.size()) a_.resize(sin_coeffs.size() + 1, 0.0);
    b_.assign(a_.size(), 0.0);
    std::copy(sin_coeffs.begin(), sin_coeffs.end(), b_.begin() + 1);
    trim();
  }

  static TrigPoly constant(double c) { return TrigPoly({c}, {}); }
  /// c0 + c1 cos(phi) + s1 sin(phi)
  static TrigPoly first_order(double c0, double c1, double s1) {
    return TrigPoly({c0, c1}, {s1});
  }

  int order() const { return static_cast<int>(a_.size()) - 1; }
  double a(int m) const { return m <= order() ? a_[m] : 0.0; }
  double b(int m) const { return (m >= 1 && m <= order()) ? b_[m] : 0.0; }

  /// Largest coefficient magnitude.
  double norm() const {
    double n = 0.0;
    for (int m = 0; m <= order(); ++m) n = std::max({n, std::abs(a_[m]), std::abs(b_[m])});
    return n;
  }

  double operator()(double phi) const {
    double s = a_[0];
    for (int m = 1; m <= order(); ++m) s += a_[m] * std::cos(m * phi) + b_[m] * std::sin(m * phi);
    return s;
  }

  Complex operator()(Complex phi) const {
    Complex s = a_[0];
    for (int m = 1; m <= order(); ++m) {
      const Complex mp = static_cast<double>(m) * phi;
      s += a_[m] * std::cos(mp) + b_[m] * std::sin(mp);
    }
    return s;
  }

  TrigPoly derivative() const {
    std::vector<double> da(a_.size(), 0.0);
    std::vector<double> db(a_.size() > 1 ? a_.size() - 1 : 0, 0.0);
    for (int m = 1; m <= order(); ++m) {
      da[m] = m * b_[m];
      db[m - 1] = -m * a_[m];
    }
    return TrigPoly(std::move(da), std::move(db));
  }

  TrigPoly operator-(const TrigPoly& o) const { return combine(o, -1.0); }
  TrigPoly operator+(const TrigPoly& o) const { return combine(o, 1.0); }

 private:
  TrigPoly combine(const TrigPoly& o, double sign) const {
    const int k = std::max(order(), o.order());
    std::vector<double> ca(k + 1), cb(k);
    for (int m = 0; m <= k; ++m) ca[m] = a(m) + sign * o.a(m);
    for (int m = 1; m <= k; ++m) cb[m - 1] = b(m) + sign * o.b(m);
    return TrigPoly(std::move(ca), std::move(cb));
  }

  void trim() {
    while (a_.size() > 1 && a_.back() == 0.0 && b_.back() == 0.0) {
      a_.pop_back();
      b_.pop_back();
    }
  }

  std::vector<double> a_;
  std::vector<double> b_;  // b_[0] is unused and kept at zero
};

/// Reduces the real part of a complex angle into [0, 2pi).
inline Complex wrap_angle(Complex phi) {
  double re = std::fmod(phi.real(), kTwoPi);
  if (re < 0.0) re += kTwoPi;
  if (re >= kTwoPi) re -= kTwoPi;
  return {re, phi.imag()};
}

/// All 2k zeros of t in the cylinder, with multiplicity, as phi = re + i*im
/// with re in [0, 2pi). Uses z = exp(i phi): z^k t is a degree-2k polynomial
/// whose companion-matrix eigenvalues map back through phi = -i log z. Each
/// zero is then polished by Newton's method on t itself.
inline std::vector<Complex> roots(const TrigPoly& t) {
  const int k = t.order();
  if (k == 0) return {};
  const int n = 2 * k;
  // Coefficients c_j of z^j, j = 0..2k.
  std::vector<Complex> c(n + 1, Complex{0.0, 0.0});
  c[k] = t.a(0);
  for (int m = 1; m <= k; ++m) {
    c[k + m] = Complex{t.a(m), -t.b(m)} * 0.5;
    c[k - m] = Complex{t.a(m), t.b(m)} * 0.5;
  }
  if (std::abs(c[n]) == 0.0) throw DomainError("trigonometric polynomial has a zero leading harmonic");

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue solve failed");

  const TrigPoly dt = t.derivative();
  std::vector<Complex> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Complex z = solver.eigenvalues()[i];
    Complex phi{std::arg(z), -std::log(std::abs(z))};
    for (int it = 0; it < 4; ++it) {
      const Complex f = t(phi);
      const Complex d = dt(phi);
      if (std::abs(d) == 0.0) break;
      const Complex next = phi - f / d;
      if (!(std::abs(t(next)) < std::abs(f))) break;
      phi = next;
    }
    out.push_back(wrap_angle(phi));
  }
  std::sort(out.begin(), out.end(), [](Complex l, Complex r) {
    return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
  });
  return out;
}

/// Roots with |Im phi| < tol, as real angles in [0, 2pi), ascending.
inline std::vector<double> real_roots(const TrigPoly& t, double tol = 1e-8) {
  std::vector<double> out;
  for (Complex r : roots(t))
    if (std::abs(r.imag()) < tol) out.push_back(r.real());
  std::sort(out.begin(), out.end());
  return out;
}

/// True iff every zero is real (|Im| < tol) and simple (|t'| > tol * ||t||).
inline bool all_real_simple(const TrigPoly& t, double tol = 1e-8) {
  if (t.order() == 0) return false;
  const TrigPoly dt = t.derivative();
  const double scale = t.norm();
  for (Complex r : roots(t)) {
    if (std::abs(r.imag()) >= tol) return false;
    if (std::abs(dt(r.real())) <= tol * scale) return false;
  }
  return true;
}

/// Scale used to normalize the regularization: max |t'| over real zeros, or
/// ||t|| when t has no real zeros.
inline double pv_scale(const TrigPoly& t) {
  const TrigPoly dt = t.derivative();
  double s = 0.0;
  for (double r : real_roots(t)) s = std::max(s, std::abs(dt(r)));
  return s > 0.0 ? s : t.norm();
}

/// Default regularization ladder, relative to the scale: 1e-2 * 2^-j.
inline std::vector<double> default_eps_ladder(double scale, int terms = 6) {
  std::vector<double> eps(terms);
  for (int j = 0; j < terms; ++j) eps[j] = 1e-2 * scale * std::ldexp(1.0, -j);
  return eps;
}

/// Details of an epsilon-regularized principal-value evaluation.
struct PvEstimate {
  double value = 0.0;             ///< extrapolated limit eps -> 0
  std::vector<double> eps;        ///< regularization ladder used
  std::vector<double> regularized;///< Re integral at each eps
};

namespace detail {

inline void check_ladder(std::span<const double> eps) {
  if (eps.size() < 2) throw DomainError("eps sequence needs at least two entries");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw DomainError("eps sequence must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw DomainError("eps sequence must be strictly decreasing");
  }
}

/// Breakpoints on [0, 2pi] around the given real zeros: each zero plus a
/// geometric fan of offsets scaled by eps / |slope| so that the adaptive
/// integrator sees the eps-wide features on panel boundaries.
inline std::vector<double> pv_breaks(std::span<const double> zeros, std::span<const double> slopes,
                                     double eps, std::span<const double> extra = {}) {
  std::vector<double> br{0.0, kTwoPi};
  auto add = [&](double v) {
    double w = std::fmod(v, kTwoPi);
    if (w < 0) w += kTwoPi;
    br.push_back(w);
  };
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    add(zeros[i]);
    const double w = eps / std::max(std::abs(slopes[i]), 1e-300);
    for (double f : {1.0, 4.0, 16.0, 64.0}) {
      if (f * w < 0.5) {
        add(zeros[i] - f * w);
        add(zeros[i] + f * w);
      }
    }
  }
  for (double v : extra) add(v);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

/// Re 1/(t + i eps)^2 written in real arithmetic.
inline double re_inverse_square(double t, double eps) {
  const double t2 = t * t;
  const double e2 = eps * eps;
  const double d = t2 + e2;
  return (t2 - e2) / (d * d);
}

}  // namespace detail

/// Principal value Re \int_0^{2pi} dphi / (t(phi) + i eps)^2 as eps -> 0,
/// from adaptive quadrature at each eps of the (strictly decreasing) ladder
/// followed by polynomial extrapolation in eps. Rejects t with a repeated
/// real zero.
inline PvEstimate pv_inverse_square_detail(const TrigPoly& t, std::span<const double> eps_sequence) {
  detail::check_ladder(eps_sequence);
  if (t.order() == 0) {
    if (t.a(0) == 0.0) throw DomainError("pv_inverse_square: t is identically zero");
  }
  const TrigPoly dt = t.derivative();
  std::vector<double> zeros = t.order() > 0 ? real_roots(t) : std::vector<double>{};
  std::vector<double> slopes;
  const double tn = t.norm();
  for (double z : zeros) {
    const double s = dt(z);
    if (std::abs(s) <= 1e-8 * tn) throw DomainError("pv_inverse_square: repeated real zero");
    slopes.push_back(s);
  }
  for (std::size_t i = 1; i < zeros.size(); ++i)
    if (zeros[i] - zeros[i - 1] < 1e-9) throw DomainError("pv_inverse_square: repeated real zero");

  PvEstimate out;
  out.eps.assign(eps_sequence.begin(), eps_sequence.end());
  for (double eps : eps_sequence) {
    const auto br = detail::pv_breaks(zeros, slopes, eps);
    auto f = [&](double phi) { return detail::re_inverse_square(t(phi), eps); };
    // The integrand peaks at 1/eps^2 near zeros; tolerance is set relative to
    // the O(1/scale^2) size of the result.
    const double ref = 1.0 / (tn * tn);
    out.regularized.push_back(quad::integrate_pieces(f, br, 1e-14 * ref, 1e-13).value);
  }
  out.value = quad::extrapolate_to_zero(out.eps, out.regularized);
  return out;
}

inline double pv_inverse_square(const TrigPoly& t, std::span<const double> eps_sequence) {
  return pv_inverse_square_detail(t, eps_sequence).value;
}

/// \int_0^{2pi} s/t dphi by residues over the zeros of t in the upper
/// half-cylinder. Requires deg s <= deg t and no real zeros of t; for
/// deg s = deg t the pole of s/t dz/(iz) at z = 0 adds
/// 2pi (a_k(s) + i b_k(s)) / (a_k(t) + i b_k(t)).
inline double residue_integral(const TrigPoly& s, const TrigPoly& t, double real_tol = 1e-8) {
  if (t.order() == 0) throw DomainError("residue_integral: t must have positive order");
  if (s.order() > t.order()) throw DomainError("residue_integral: deg s must not exceed deg t");
  const TrigPoly dt = t.derivative();
  Complex sum{0.0, 0.0};
  for (Complex r : roots(t)) {
    if (std::abs(r.imag()) < real_tol) throw DomainError("residue_integral: t has a real zero");
    if (r.imag() > 0.0) sum += s(r) / dt(r);
  }
  double at_origin = 0.0;
  if (s.order() == t.order()) {
    const int k = t.order();
    at_origin = (kTwoPi * Complex{s.a(k), s.b(k)} / Complex{t.a(k), t.b(k)}).real();
  }
  return (Complex{0.0, kTwoPi} * sum).real() + at_origin;
}

}  // namespace funkradon
