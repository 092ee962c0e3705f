// funkradon command-line tool: forward, invert, kernel-check, dcoef, selftest.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "funkradon/acceptance.hpp"
#include "funkradon/funkradon.hpp"

namespace fr = funkradon;

namespace {

constexpr int kOk = 0, kVerifyFail = 1, kUsage = 2, kNumeric = 3;

std::string g6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw fr::UsageError("cannot open '" + path + "' for writing");
  return os;
}

struct Common {
  int workers = fr::default_workers();
};

int cmd_forward(const std::string& geom_s, const std::string& phantom_s, int nl, int np, bool half, bool riemann,
                double step, const std::string& out, const Common& c) {
  const auto g = fr::GeometryFamily::parse(geom_s);
  const auto f = fr::Phantom::parse(phantom_s);
  if (nl < 8 || np < 8) throw fr::UsageError("--nlambda and --nphi must be at least 8");
  if (f.support_radius() > g.support_radius())
    std::cerr << "warning: phantom support radius " << g6(f.support_radius()) << " exceeds the geometry support "
              << g6(g.support_radius()) << "\n";
  const fr::LambdaAxis la = fr::acceptance::default_lambda_axis(g, nl);
  fr::ForwardOptions fo;
  fo.workers = c.workers;
  fo.step = step;
  const fr::Sinogram s = fr::forward(f, g, la, {np, !half}, riemann ? fr::SinoKind::riemann : fr::SinoKind::mphi, fo);
  auto os = open_out(out);
  fr::write_fkr1(os, s);
  std::cout << "geometry   " << g.descriptor() << "\n"
            << "kind       " << fr::kind_name(s.kind) << "\n"
            << "lambda     [" << g6(la.lo) << ", " << g6(la.hi) << "] x " << la.n << "\n"
            << "phi        " << np << (half ? " over [0, pi)" : " over [0, 2pi)") << "\n"
            << "max entry  " << g6(s.max_abs()) << "\n"
            << "wrote      " << out << "\n";
  return kOk;
}

int cmd_invert(const std::string& in, int grid_n, double extent, const std::string& out, std::string pgm,
               const std::string& phantom_s, bool riemann, const Common& c) {
  std::ifstream is(in);
  if (!is) throw fr::UsageError("cannot open '" + in + "'");
  const fr::Sinogram s = fr::read_fkr1(is);
  if (riemann && s.kind != fr::SinoKind::riemann)
    throw fr::UsageError("--riemann given but '" + in + "' holds " + std::string(fr::kind_name(s.kind)) + " data");
  if (grid_n < 8) throw fr::UsageError("--grid must be at least 8");
  if (extent <= 0.0) extent = s.geometry.support_radius();
  const fr::Grid grid = fr::Grid::centered(grid_n, extent);
  const fr::InvertOptions io{c.workers, false};
  const fr::ScalarField rec =
      s.kind == fr::SinoKind::riemann ? fr::reconstruct_riemann(s, grid, io) : fr::invert(s, grid, io);
  {
    auto os = open_out(out);
    fr::write_f64grid(os, rec);
  }
  if (pgm.empty()) {
    pgm = out;
    const auto dot = pgm.find_last_of('.');
    if (dot != std::string::npos && pgm.find('/', dot) == std::string::npos) pgm.erase(dot);
    pgm += ".pgm";
  }
  {
    auto os = open_out(pgm, true);
    fr::write_pgm(os, rec);
  }
  std::cout << "geometry   " << s.geometry.descriptor() << "\n"
            << "path       " << (s.kind == fr::SinoKind::riemann ? "riemann (divide by mu, invert, divide by m)" : "mphi")
            << "\n"
            << "grid       " << grid_n << " x " << grid_n << " over [" << g6(-extent) << ", " << g6(extent) << "]^2\n"
            << "wrote      " << out << ", " << pgm << "\n";
  if (!phantom_s.empty()) {
    const auto f = fr::Phantom::parse(phantom_s);
    const auto ref = fr::rasterize(f, grid);
    std::cout << "rel_l2     " << g6(fr::rel_l2(rec, ref)) << "\n"
              << "linf       " << g6(fr::linf(rec, ref)) << "\n";
  }
  return kOk;
}

int cmd_kernel_check(const std::string& geom_s, int pairs, unsigned long long seed, double tol, bool verbose) {
  const auto g = fr::GeometryFamily::parse(geom_s);
  if (pairs < 1) throw fr::UsageError("--pairs must be positive");
  std::mt19937_64 rng(seed);
  std::cout << "geometry " << g.descriptor() << ", " << pairs << " random pairs, tolerance " << g6(tol)
            << " * max(1, scale^2)\n";
  const bool support_ok = g.support_condition_holds();
  if (!support_ok) {
    const double sup = 2.0 * g.support_radius() / std::min(g.params().e1, g.params().e2);
    std::cout << "warning: support condition ||y+x||*_e < 2 is violated for this region (sup ||x+y||*_e = "
              << g6(sup) << "); zeros of psi(x,.)-psi(y,.) need not be real and simple, N may not vanish\n";
  }
  double worst = 0.0, worst_ratio = 0.0;
  int fails = 0;
  for (int k = 0; k < pairs; ++k) {
    const fr::Point2 x = fr::acceptance::detail::sample_region(g, rng);
    const fr::Point2 y = fr::acceptance::detail::sample_region(g, rng);
    std::string status;
    try {
      const auto r = fr::nucleus_check(g, x, y, tol);
      worst = std::max(worst, std::abs(r.value));
      worst_ratio = std::max(worst_ratio, std::abs(r.value) / r.tolerance);
      if (!r.pass) ++fails;
      if (verbose || !r.pass) {
        std::cout << "pair " << k << " x=(" << g6(x.x) << "," << g6(x.y) << ") y=(" << g6(y.x) << "," << g6(y.y)
                  << ") N_eps=[";
        for (std::size_t i = 0; i < r.regularized.size(); ++i)
          std::cout << (i ? " " : "") << g6(r.regularized[i]);
        std::cout << "] N=" << g6(r.value) << " scale=" << g6(r.scale);
        if (r.literal) std::cout << " one-lift N=" << g6(*r.literal);
        std::cout << (r.pass ? " ok" : " FAIL") << "\n";
      }
    } catch (const fr::DomainError& e) {
      ++fails;
      std::cout << "pair " << k << " x=(" << g6(x.x) << "," << g6(x.y) << ") y=(" << g6(y.x) << "," << g6(y.y)
                << ") FAIL: " << e.what() << "\n";
    }
  }
  std::cout << "max |N| = " << g6(worst) << ", max |N|/tol = " << g6(worst_ratio) << ", " << fails << " of " << pairs
            << " pairs over tolerance\n";
  const bool pass = fails == 0;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  if (!pass && !support_ok)
    std::cout << "note: the region violates the support condition ||y+x||*_e < 2 (support must be < min(e1, e2))\n";
  return pass ? kOk : kVerifyFail;
}

int cmd_dcoef(const std::string& geom_s, const std::string& points_s, int nphi, int random_n) {
  const auto g = fr::GeometryFamily::parse(geom_s);
  std::vector<fr::Point2> pts;
  if (!points_s.empty()) {
    std::size_t pos = 0;
    while (pos <= points_s.size()) {
      std::size_t end = points_s.find(';', pos);
      if (end == std::string::npos) end = points_s.size();
      const std::string item = points_s.substr(pos, end - pos);
      const auto comma = item.find(',');
      auto x = comma == std::string::npos ? std::nullopt : fr::parse_double(item.substr(0, comma));
      auto y = comma == std::string::npos ? std::nullopt : fr::parse_double(item.substr(comma + 1));
      if (!x || !y) throw fr::ParseError("expected x,y in '" + item + "'", pos);
      pts.push_back({*x, *y});
      if (end == points_s.size()) break;
      pos = end + 1;
    }
  }
  std::mt19937_64 rng(1);
  for (int k = 0; k < random_n; ++k) pts.push_back(fr::acceptance::detail::sample_region(g, rng));
  std::cout << "geometry " << g.descriptor() << ", quadrature n_phi = " << nphi << "\n";
  std::printf("%14s %14s %20s %20s %12s\n", "x1", "x2", "closed form", "quadrature", "rel diff");
  double worst = 0.0;
  for (const auto& p : pts) {
    const double a = g.dcoef_closed(p), b = fr::dcoef_quadrature(g, p, nphi);
    const double rel = std::abs(a - b) / std::abs(a);
    worst = std::max(worst, rel);
    std::printf("%14.8g %14.8g %20.14g %20.14g %12.3g\n", p.x, p.y, a, b, rel);
  }
  std::cout << "max rel diff " << g6(worst) << "\n";
  return kOk;
}

int cmd_selftest(bool fast, const std::string& mutate, const Common& c) {
  fr::acceptance::Config cfg;
  cfg.fast = fast;
  cfg.workers = c.workers;
  if (!mutate.empty()) {
    if (mutate != "sign-flip") throw fr::UsageError("unknown mutation '" + mutate + "'");
    cfg.flip_sign = true;
  }
  cfg.log = [](const std::string& s) { std::cout << s << std::endl; };
  bool all = true;
  fr::acceptance::run_all(cfg, [&](const fr::acceptance::Result& r) {
    all = all && r.pass;
    std::cout << r.line() << std::endl;
  });
  std::cout << (all ? "selftest PASS" : "selftest FAIL") << std::endl;
  return all ? kOk : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Funk-Radon transform toolkit"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--workers", common.workers, "worker threads (default: FUNKRADON_WORKERS or hardware threads)")
      ->check(CLI::Range(1, 256));

  std::string geom, phantom, out, in, pgm, points, mutate;
  int nl = 513, np = 360, grid_n = 129, pairs = 100, nphi_d = 256, random_n = 5;
  double extent = 0.0, tol = 1e-4, step = 0.0;
  unsigned long long seed = 1;
  bool half = false, riemann = false, verbose = false, fast = false;

  auto* fwd = app.add_subcommand("forward", "sample the transform of a phantom into an FKR1 file");
  fwd->add_option("--geometry", geom, "geometry descriptor, e.g. radon:support=1")->required();
  fwd->add_option("--phantom", phantom, "phantom descriptor, e.g. gauss:0,0,0.2,1")->required();
  fwd->add_option("--nlambda", nl, "lambda samples")->capture_default_str();
  fwd->add_option("--nphi", np, "phi samples")->capture_default_str();
  fwd->add_flag("--half", half, "sample phi over [0, pi) only");
  fwd->add_flag("--riemann", riemann, "write arc-length data R f instead of M f");
  fwd->add_option("--step", step, "initial tracing step (default: from the phantom scale)");
  fwd->add_option("--out", out, "output FKR1 path")->required();

  auto* inv = app.add_subcommand("invert", "reconstruct from an FKR1 file");
  inv->add_option("--in", in, "input FKR1 path")->required();
  inv->add_option("--grid", grid_n, "grid samples per side")->capture_default_str();
  inv->add_option("--extent", extent, "half-width of the square grid (default: geometry support)");
  inv->add_option("--out", out, "output F64GRID path")->required();
  inv->add_option("--pgm", pgm, "PGM preview path (default: output path with .pgm)");
  inv->add_option("--phantom", phantom, "phantom descriptor to compare against");
  inv->add_flag("--riemann", riemann, "input holds arc-length data (checked against the file)");

  auto* kc = app.add_subcommand("kernel-check", "check that the nucleus N(x,y) vanishes at random pairs");
  kc->add_option("--geometry", geom, "geometry descriptor")->required();
  kc->add_option("--pairs", pairs, "number of random pairs")->capture_default_str();
  kc->add_option("--seed", seed, "random seed")->capture_default_str();
  kc->add_option("--tol", tol, "relative tolerance")->capture_default_str();
  kc->add_flag("--verbose", verbose, "print every pair");

  auto* dc = app.add_subcommand("dcoef", "compare closed-form and quadrature normalizers D(x)");
  dc->add_option("--geometry", geom, "geometry descriptor")->required();
  dc->add_option("--points", points, "points x,y;x,y;...");
  dc->add_option("--random", random_n, "additional random points in the region")->capture_default_str();
  dc->add_option("--nphi", nphi_d, "quadrature nodes")->capture_default_str();

  auto* st = app.add_subcommand("selftest", "run the acceptance checks");
  st->add_flag("--fast", fast, "reduced sample counts and resolutions");
  st->add_option("--mutate", mutate)->group("");  // hidden: mutation sanity check

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (fwd->parsed()) return cmd_forward(geom, phantom, nl, np, half, riemann, step, out, common);
    if (inv->parsed()) return cmd_invert(in, grid_n, extent, out, pgm, phantom, riemann, common);
    if (kc->parsed()) return cmd_kernel_check(geom, pairs, seed, tol, verbose);
    if (dc->parsed()) {
      if (nphi_d < 8) throw fr::UsageError("--nphi must be at least 8");
      return cmd_dcoef(geom, points, nphi_d, random_n);
    }
    if (st->parsed()) return cmd_selftest(fast, mutate, common);
  } catch (const fr::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fr::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
