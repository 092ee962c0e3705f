#pragma once

// Acceptance checks 1-8, shared by the acceptance test binary and the CLI
// `selftest` command. `fast` runs reduced sample counts and resolutions.

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "funkradon/field.hpp"
#include "funkradon/geometry.hpp"
#include "funkradon/inversion.hpp"
#include "funkradon/kernel.hpp"
#include "funkradon/phantom.hpp"
#include "funkradon/quadrature.hpp"
#include "funkradon/sinogram.hpp"
#include "funkradon/transform.hpp"
#include "funkradon/trigpoly.hpp"

namespace funkradon::acceptance {

struct Config {
  bool fast = false;
  bool flip_sign = false;  // mutation: wrong backprojection sign
  int workers = 1;
  std::function<void(const std::string&)> log;  // progress lines, optional
};

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;

  std::string line() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.1f s)", seconds);
    return std::string(pass ? "PASS" : "FAIL") + " criterion " + std::to_string(id) + " [" + name + "]: " + detail + buf;
  }
};

namespace detail {

inline void say(const Config& c, const std::string& s) {
  if (c.log) c.log(s);
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Uniform sample of the family's region (disc or annulus).
inline Point2 sample_region(const GeometryFamily& g, std::mt19937_64& rng, double shrink = 0.98) {
  const Region r = g.region();
  const double lo = std::max(r.inner, 1e-3 * r.outer) / shrink, hi = r.outer * shrink;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rad = std::sqrt(lo * lo + (hi * hi - lo * lo) * u(rng));
  const double th = kTwoPi * u(rng);
  return {rad * std::cos(th), rad * std::sin(th)};
}

template <class F>
Result timed(int id, const char* name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  r.id = id;
  r.name = name;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

/// Families exercised by the nucleus and normalizer checks.
inline std::vector<GeometryFamily> kernel_families() {
  return {GeometryFamily::radon(1.0),          GeometryFamily::funk(1.0),
          GeometryFamily::hgeodesic(0.8),      GeometryFamily::equidistant(0.8),
          GeometryFamily::ellipse(1.2, 0.8, 0.56), GeometryFamily::hyperbola(2.0, 1.0),
          GeometryFamily::cormack(2, 2.0, 0.2), GeometryFamily::cormack(3, 2.0, 0.2),
          GeometryFamily::parabola(2.0, 0.2)};
}

inline Result nucleus_vanishing(const Config& cfg) {
  return detail::timed(1, "nucleus vanishing", [&](Result& r) {
    const int pairs = cfg.fast ? 10 : 100;
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    std::string worst_fam;
    int failures = 0, total = 0;
    for (const auto& g : kernel_families()) {
      double fam_worst = 0.0;
      for (int k = 0; k < pairs; ++k) {
        const Point2 x = detail::sample_region(g, rng), y = detail::sample_region(g, rng);
        const NucleusReport n = nucleus_check(g, x, y, 1e-4);
        const double ratio = std::abs(n.value) / n.tolerance;
        fam_worst = std::max(fam_worst, ratio);
        ++total;
        if (!n.pass) ++failures;
      }
      detail::say(cfg, "  nucleus " + g.descriptor() + ": max |N|/tol = " + detail::fmt("%.3g", fam_worst));
      if (fam_worst > worst) {
        worst = fam_worst;
        worst_fam = g.descriptor();
      }
    }
    r.pass = failures == 0;
    r.detail = std::to_string(total) + " pairs, " + std::to_string(failures) + " over tolerance, worst |N|/tol = " +
               detail::fmt("%.3g", worst) + " (" + worst_fam + ")";
  });
}

inline Result normalizer_identity(const Config& cfg) {
  return detail::timed(2, "normalizer identity", [&](Result& r) {
    std::mt19937_64 rng(7);
    auto fams = kernel_families();
    fams.push_back(GeometryFamily::ellipse(1.0, 1.0, 0.7));
    double worst = 0.0;
    std::string worst_fam;
    for (const auto& g : fams) {
      for (int k = 0; k < 20; ++k) {
        const Point2 x = detail::sample_region(g, rng);
        const double a = g.dcoef_closed(x), b = dcoef_quadrature(g, x, 256);
        const double rel = std::abs(a - b) / std::abs(a);
        if (rel > worst) {
          worst = rel;
          worst_fam = g.descriptor();
        }
      }
    }
    (void)cfg;
    r.pass = worst <= 1e-8;
    r.detail = std::to_string(20 * fams.size()) + " points, max rel diff = " + detail::fmt("%.3g", worst) + " (" +
               worst_fam + ")";
  });
}

inline Result residue_formula(const Config& cfg) {
  return detail::timed(3, "residue integral", [&](Result& r) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    auto check = [&](const TrigPoly& s, const TrigPoly& t, double expect) {
      const double got = residue_integral(s, t);
      worst = std::max(worst, std::abs(got - expect) / std::max(std::abs(expect), 1e-300));
    };
    for (int k = 0; k < 50; ++k) {
      const int ord = 1 + k % 4;
      std::vector<double> a(ord + 1), b(ord);
      double mass = 0.0;
      for (int m = 1; m <= ord; ++m) {
        a[m] = u(rng);
        b[m - 1] = u(rng);
        mass += std::abs(a[m]) + std::abs(b[m - 1]);
      }
      a[0] = (u(rng) > 0 ? 1.0 : -1.0) * mass * (1.1 + 0.5 * (1.0 + u(rng)));
      const TrigPoly t(a, b);
      const int sord = k % (ord + 1);
      std::vector<double> sa(sord + 1), sb(sord);
      for (double& v : sa) v = u(rng);
      for (double& v : sb) v = u(rng);
      const TrigPoly s(sa, sb);
      const double direct =
          quad::integrate([&](double p) { return s(p) / t(p); }, 0.0, kTwoPi, 1e-15, 1e-14, 100000).value;
      check(s, t, direct);
    }
    for (double y : {0.5, 1.0, 2.0}) {
      const TrigPoly t({1.0 + 0.5 * y * y, 0.0, 0.5 * y * y}, {0.0, 0.0});
      check(TrigPoly::constant(1.0), t, kTwoPi / std::sqrt(1.0 + y * y));
    }
    (void)cfg;
    r.pass = worst <= 1e-10;
    r.detail = "53 integrals, max rel error = " + detail::fmt("%.3g", worst);
  });
}

inline Result forward_exactness(const Config& cfg) {
  return detail::timed(4, "forward exactness", [&](Result& r) {
    ForwardOptions fo;
    fo.workers = cfg.workers;
    const auto radon1 = GeometryFamily::radon(1.0);
    const Phantom disc = Phantom::disc({0.0, 0.0}, 1.0);
    double chord_err = 0.0;
    const LambdaAxis la50{-0.98, 0.98, 50};
    const Sinogram sd = forward_mphi(disc, radon1, la50, {4, true}, fo);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 50; ++i)
        chord_err = std::max(chord_err, std::abs(sd.at(i, j) - 2.0 * std::sqrt(1.0 - la50[i] * la50[i])));

    const double sg = 0.2;
    const auto radon15 = GeometryFamily::radon(1.5);
    const Phantom gauss = Phantom::gaussian({0.0, 0.0}, sg);
    const LambdaAxis lg{-1.2, 1.2, 50};
    const Sinogram sgau = forward_mphi(gauss, radon15, lg, {cfg.fast ? 2 : 6, true}, fo);
    double gauss_err = 0.0;
    for (int j = 0; j < sgau.phi.n; ++j)
      for (int i = 0; i < lg.n; ++i) {
        const double l = lg[i];
        const double expect = sg * std::sqrt(kTwoPi) * std::exp(-l * l / (2.0 * sg * sg));
        gauss_err = std::max(gauss_err, std::abs(sgau.at(i, j) - expect));
      }
    r.pass = chord_err <= 1e-6 && gauss_err <= 1e-8;
    r.detail = "disc chord max err = " + detail::fmt("%.3g", chord_err) + ", gaussian projection max err = " +
               detail::fmt("%.3g", gauss_err);
  });
}

struct RoundTripCase {
  GeometryFamily geometry;
  Phantom phantom;
  double limit;
};

/// Round-trip cases: Gaussian of sigma = 0.15 * support, centred, for the
/// disc families; the punctured-plane families use bumps of sigma 0.15 away
/// from the excluded disc (two of them, Z_2-symmetric, for cormack k = 2).
inline std::vector<RoundTripCase> round_trip_cases() {
  auto centred = [](const GeometryFamily& g) { return Phantom::gaussian({0.0, 0.0}, 0.15 * g.support_radius()); };
  std::vector<RoundTripCase> v;
  const auto radon = GeometryFamily::radon(1.0);
  const auto ellipse = GeometryFamily::ellipse(1.0, 1.0, 0.7);
  const auto hyper = GeometryFamily::hyperbola(2.0, 1.0);
  const auto equi = GeometryFamily::equidistant(0.7);
  const auto hgeo = GeometryFamily::hgeodesic(0.8);
  const auto para = GeometryFamily::parabola(2.0, 0.2);
  const auto corm = GeometryFamily::cormack(2, 2.0, 0.2);
  const auto funk = GeometryFamily::funk(1.0);
  v.push_back({radon, centred(radon), 0.03});
  v.push_back({ellipse, centred(ellipse), 0.03});
  v.push_back({hyper, centred(hyper), 0.03});
  v.push_back({equi, centred(equi), 0.05});
  v.push_back({hgeo, centred(hgeo), 0.05});
  v.push_back({para, Phantom::gaussian({1.1, 0.0}, 0.15), 0.05});
  v.push_back({corm, Phantom::parse("gauss:1.1,0,0.15,1;gauss:-1.1,0,0.15,1"), 0.05});
  v.push_back({funk, centred(funk), 0.05});
  return v;
}

struct Resolution {
  int n_lambda, n_phi, grid;
};

inline LambdaAxis default_lambda_axis(const GeometryFamily& g, int n) {
  const Interval lr = g.lambda_range();
  if (g.even_in_lambda()) return LambdaAxis::half_offset(lr.hi, n);
  return {lr.lo, lr.hi, n};
}

/// rel_l2 of invert(forward(f)) against f on the centred grid.
inline double round_trip_error(const RoundTripCase& c, Resolution res, const Config& cfg, double* seconds = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  ForwardOptions fo;
  fo.workers = cfg.workers;
  const Sinogram s = forward_mphi(c.phantom, c.geometry, default_lambda_axis(c.geometry, res.n_lambda),
                                  {res.n_phi, true}, fo);
  const Grid grid = Grid::centered(res.grid, c.geometry.support_radius());
  const ScalarField rec = invert(s, grid, {cfg.workers, cfg.flip_sign});
  if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rel_l2(rec, rasterize(c.phantom, grid));
}

inline Resolution criterion5_resolution(bool fast) {
  return fast ? Resolution{129, 90, 65} : Resolution{513, 360, 129};
}

inline Result round_trip(const Config& cfg) {
  return detail::timed(5, "round-trip reconstruction", [&](Result& r) {
    const Resolution res = criterion5_resolution(cfg.fast);
    bool ok = true;
    std::string det;
    for (const auto& c : round_trip_cases()) {
      double sec = 0.0;
      const double e = round_trip_error(c, res, cfg, &sec);
      const bool pass = e <= c.limit && (cfg.fast || sec <= 90.0);
      ok = ok && pass;
      const std::string item = std::string(c.geometry.tag()) + " " + detail::fmt("%.3g", e) + "/" +
                               detail::fmt("%.2g", c.limit) + " " + detail::fmt("%.1fs", sec);
      detail::say(cfg, "  round trip " + c.geometry.descriptor() + " [" + c.phantom.descriptor() + "]: rel_l2 = " +
                           detail::fmt("%.4g", e) + ", " + detail::fmt("%.1f s", sec) + (pass ? "" : "  <-- FAIL"));
      det += (det.empty() ? "" : "; ") + item;
    }
    r.pass = ok;
    r.detail = "grid " + std::to_string(res.grid) + ", n_phi " + std::to_string(res.n_phi) + ", n_lambda " +
               std::to_string(res.n_lambda) + ": " + det;
  });
}

inline Result convergence(const Config& cfg) {
  return detail::timed(6, "resolution convergence", [&](Result& r) {
    const Resolution base = cfg.fast ? Resolution{65, 45, 33} : Resolution{257, 180, 65};
    auto cases = round_trip_cases();
    std::vector<RoundTripCase> use{cases[0]};
    if (!cfg.fast) use.push_back(cases[1]);
    bool ok = true;
    std::string det;
    for (const auto& c : use) {
      std::vector<double> errs;
      for (int level = 0; level < 3; ++level) {
        const int m = 1 << level;
        const Resolution res{(base.n_lambda - 1) * m + 1, base.n_phi * m, (base.grid - 1) * m + 1};
        errs.push_back(round_trip_error(c, res, cfg));
      }
      const bool mono = errs[1] <= errs[0] && errs[2] <= errs[1];
      ok = ok && mono;
      det += (det.empty() ? "" : "; ") + std::string(c.geometry.tag()) + " " + detail::fmt("%.3g", errs[0]) + " -> " +
             detail::fmt("%.3g", errs[1]) + " -> " + detail::fmt("%.3g", errs[2]);
      detail::say(cfg, "  convergence " + c.geometry.descriptor() + ": " + det);
    }
    r.pass = ok;
    r.detail = det;
  });
}

inline Result half_range(const Config& cfg) {
  return detail::timed(7, "half-range consistency", [&](Result& r) {
    const Resolution res = criterion5_resolution(cfg.fast);
    const auto c = round_trip_cases()[0];
    ForwardOptions fo;
    fo.workers = cfg.workers;
    const LambdaAxis la = default_lambda_axis(c.geometry, res.n_lambda);
    const Sinogram full = forward_mphi(c.phantom, c.geometry, la, {res.n_phi, true}, fo);
    const Sinogram half = forward_mphi(c.phantom, c.geometry, la, {res.n_phi / 2, false}, fo);
    const Grid grid = Grid::centered(res.grid, c.geometry.support_radius());
    const InvertOptions io{cfg.workers, cfg.flip_sign};
    const ScalarField a = invert(half, grid, io);
    const ScalarField b = invert(full, grid, io);
    const double d = rel_l2(a, b);
    const double e = rel_l2(a, rasterize(c.phantom, grid));
    r.pass = d <= 1e-6 && e <= c.limit;
    r.detail = "rel_l2(half, full) = " + detail::fmt("%.3g", d) + ", half-range error vs phantom = " +
               detail::fmt("%.3g", e);
  });
}

inline Result format_round_trip(const Config& cfg) {
  return detail::timed(8, "format round-trip", [&](Result& r) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Sinogram s(GeometryFamily::parse("ellipse:e1=1.2,e2=0.8,support=0.7"), SinoKind::riemann, {0.01, 3.61, 37},
               {11, true});
    for (double& v : s.data) v = u(rng) * std::pow(10.0, 40.0 * u(rng));
    s.data[0] = 0.0;
    s.data[1] = -0.0;
    s.data[2] = 5e-324;
    s.data[3] = 1.7976931348623157e308;
    std::stringstream a;
    write_fkr1(a, s);
    const Sinogram s2 = read_fkr1(a);
    bool ok = s2.data.size() == s.data.size() && s2.geometry.descriptor() == s.geometry.descriptor() &&
              s2.kind == s.kind && s2.lambda == s.lambda && s2.phi == s.phi;
    for (std::size_t k = 0; ok && k < s.data.size(); ++k)
      ok = std::bit_cast<std::uint64_t>(s.data[k]) == std::bit_cast<std::uint64_t>(s2.data[k]);
    std::stringstream a2;
    write_fkr1(a2, s2);
    ok = ok && a2.str() == a.str();

    ScalarField f(Grid{7, 5, -0.3, 0.1, 0.1});
    for (double& v : f.values()) v = u(rng) * std::pow(10.0, 20.0 * u(rng));
    std::stringstream b;
    write_f64grid(b, f);
    const ScalarField f2 = read_f64grid(b);
    bool ok2 = f2.grid() == f.grid();
    for (std::size_t k = 0; ok2 && k < f.values().size(); ++k)
      ok2 = std::bit_cast<std::uint64_t>(f.values()[k]) == std::bit_cast<std::uint64_t>(f2.values()[k]);
    (void)cfg;
    r.pass = ok && ok2;
    r.detail = std::string("FKR1 ") + (ok ? "bit-identical" : "MISMATCH") + ", F64GRID " +
               (ok2 ? "bit-identical" : "MISMATCH");
  });
}

inline std::vector<Result> run_all(const Config& cfg, const std::function<void(const Result&)>& on_result = {}) {
  std::vector<Result> out;
  for (auto fn : {nucleus_vanishing, normalizer_identity, residue_formula, forward_exactness, round_trip, convergence,
                  half_range, format_round_trip}) {
    out.push_back(fn(cfg));
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace funkradon::acceptance
