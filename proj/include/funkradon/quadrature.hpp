#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace funkradon::quad {

/// Result of an adaptive integration.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1]; the Gauss weights are zero on the
// Kronrod-only nodes.
inline constexpr std::array<double, 8> kNodes = {
    0.000000000000000000000000000000000, 0.207784955007898467600689403773245,
    0.405845151377397166906606412076961, 0.586087235467691130294144845693013,
    0.741531185599394439863864773280788, 0.864864423359769072789712788640926,
    0.949107912342758524526189684047851, 0.991455371120812639206854697526329};
inline constexpr std::array<double, 8> kKronrod = {
    0.209482141084727828012999174891714, 0.204432940075298892414161999234649,
    0.190350578064785409913256402421014, 0.169004726639267902826583426598550,
    0.140653259715525918745189590510238, 0.104790010322250183839876322541518,
    0.063092092629978553290700663189204, 0.022935322010529224963732008058970};
inline constexpr std::array<double, 8> kGauss = {
    0.417959183673469387755102040816327, 0.0,
    0.381830050505118944950369775488975, 0.0,
    0.279705391489276667901467771423780, 0.0,
    0.129484966168869693270611432679082, 0.0};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = kKronrod[0] * fc;
  double g = kGauss[0] * fc;
  for (std::size_t i = 1; i < kNodes.size(); ++i) {
    const double dx = h * kNodes[i];
    const double s = f(c - dx) + f(c + dx);
    k += kKronrod[i] * s;
    g += kGauss[i] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Bisects the panel with the largest error estimate until the summed error
/// falls below max(abs_tol, rel_tol * |I|) or max_panels is reached.
template <class F>
Estimate integrate(const F& f, double a, double b, double abs_tol = 1e-13,
                   double rel_tol = 1e-12, int max_panels = 4000) {
  if (a == b) return {};
  std::priority_queue<detail::Panel> heap;
  detail::Panel first = detail::gk15(f, a, b);
  heap.push(first);
  double total = first.value;
  double err = first.error;
  int evals = 15;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         static_cast<int>(heap.size()) < max_panels) {
    detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    detail::Panel left = detail::gk15(f, worst.a, mid);
    detail::Panel right = detail::gk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to avoid drift from the running updates.
  double sum = 0.0;
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum, evals};
}

/// Integrates over [breaks.front(), breaks.back()] panel by panel.
/// `breaks` must be sorted ascending.
template <class F>
Estimate integrate_pieces(const F& f, std::span<const double> breaks,
                          double abs_tol = 1e-13, double rel_tol = 1e-12,
                          int max_panels = 4000) {
  Estimate out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] <= breaks[i]) continue;
    const Estimate e = integrate(f, breaks[i], breaks[i + 1], abs_tol, rel_tol,
                                 max_panels);
    out.value += e.value;
    out.error += e.error;
    out.evaluations += e.evaluations;
  }
  return out;
}

/// Polynomial (Richardson) extrapolation of values[i] = A(h[i]) to h = 0
/// via Neville's scheme. Assumes A(h) = A0 + c1 h + c2 h^2 + ...; the step
/// sequence may have arbitrary (distinct) ratios.
inline double extrapolate_to_zero(std::span<const double> h,
                                  std::span<const double> values) {
  if (h.size() != values.size() || h.empty()) {
    throw std::invalid_argument("extrapolate_to_zero: size mismatch");
  }
  std::vector<double> p(values.begin(), values.end());
  const std::size_t n = p.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      // Evaluate the interpolant through points i..i+m at 0.
      p[i] = (h[i] * p[i + 1] - h[i + m] * p[i]) / (h[i] - h[i + m]);
    }
  }
  return p[0];
}

/// Five-point Gauss-Legendre rule on [0, 1].
struct GaussLegendre5 {
  static constexpr std::array<double, 5> nodes = {
      0.046910077030668003601186560850304, 0.230765344947158454481842789649896,
      0.5, 0.769234655052841545518157210350104,
      0.953089922969331996398813439149696};
  static constexpr std::array<double, 5> weights = {
      0.118463442528094543757132020359959, 0.239314335249683234020645757417819,
      0.284444444444444444444444444444444, 0.239314335249683234020645757417819,
      0.118463442528094543757132020359959};
};

/// Trapezoid rule for a 2*pi-periodic function on n equispaced nodes.
template <class F>
double periodic_mean(const F& f, int n) {
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += f(2.0 * std::numbers::pi * j / n);
  return s / n;
}

}  // namespace funkradon::quad
