#pragma once

// Forward model: M f(lambda, phi) = \int_{F(lambda,phi)} f ds / |grad psi| by
// predictor-corrector tracing of the level sets of psi(., phi).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "funkradon/core.hpp"
#include "funkradon/geometry.hpp"
#include "funkradon/parallel.hpp"
#include "funkradon/phantom.hpp"
#include "funkradon/quadrature.hpp"
#include "funkradon/sinogram.hpp"

namespace funkradon {

/// x -> level(x, phi) and its gradient for one fixed phi, with the angle
/// dependent constants hoisted out.
class LevelSlice {
 public:
  LevelSlice(const GeometryFamily& g, double phi)
      : fam_(g.family()), e_(unit(phi)), eps_(g.params().eps), k_(g.params().k) {
    if (fam_ == Family::ellipse) src_ = g.source(phi);
    if (fam_ == Family::cormack) rot_ = std::polar(1.0, -phi);
  }

  double value(Point2 x) const { return eval(x, nullptr); }

  /// Level value; writes the gradient of the level function if `grad`.
  double eval(Point2 x, Point2* grad) const {
    switch (fam_) {
      case Family::radon:
        if (grad) *grad = e_;
        return dot(x, e_);
      case Family::funk:
        if (grad) *grad = -e_;
        return -dot(x, e_);
      case Family::hgeodesic:
      case Family::equidistant: {
        const double s = fam_ == Family::hgeodesic ? 1.0 : -1.0;
        const double q = 1.0 + s * norm2(x);
        const double u = dot(x, e_);
        if (grad) *grad = e_ * (2.0 / q) - x * (s * 4.0 * u / (q * q));
        return 2.0 * u / q;
      }
      case Family::ellipse: {
        const Point2 d = x - src_;
        if (grad) *grad = d * 2.0;
        return norm2(d);
      }
      case Family::hyperbola: {
        const double r = norm(x);
        if (grad) *grad = (r > 0.0 ? x * (1.0 / r) : Point2{}) - e_ * eps_;
        return r - eps_ * dot(x, e_);
      }
      case Family::parabola: {
        const double r = norm(x);
        const double w = std::max(0.0, r + dot(x, e_));
        if (grad) {
          if (r == 0.0) {
            *grad = {};
          } else {
            const Point2 v = x * (1.0 / r) + e_;
            const double nv = norm(v);
            *grad = nv > 0.0 ? v * (1.0 / (nv * std::sqrt(2.0 * r))) : perp(e_) * (1.0 / std::sqrt(2.0 * r));
          }
        }
        return std::sqrt(w);
      }
      case Family::cormack: {
        const std::complex<double> z{x.x, x.y};
        std::complex<double> zk1{1.0, 0.0};
        for (int m = 1; m < k_; ++m) zk1 *= z;
        const std::complex<double> f = rot_ * zk1 * z;
        if (grad) {
          const std::complex<double> c = static_cast<double>(k_) * rot_ * zk1;
          *grad = {c.real(), -c.imag()};
        }
        return f.real();
      }
    }
    return 0.0;
  }

 private:
  Family fam_;
  Point2 e_;
  Point2 src_{};
  std::complex<double> rot_{1.0, 0.0};
  double eps_;
  int k_;
};

/// Annulus inner <= |x| <= outer intersected with the disc |x - c| <= radius.
struct ClipRegion {
  double inner = 0.0;
  double outer = 1.0;
  Point2 window_center{};
  double window_radius = std::numeric_limits<double>::infinity();

  bool contains(Point2 p) const {
    const double r = norm(p);
    return r >= inner && r <= outer && norm(p - window_center) <= window_radius;
  }

  static ClipRegion of(const GeometryFamily& g) { return {g.trace_exclusion(), g.support_radius()}; }
};

struct Polyline {
  std::vector<Point2> pts;
  bool closed = false;
};

struct TraceSettings {
  double max_turn = 0.15;  // radians of tangent rotation per step
  int max_newton = 50;
  int max_vertices = 2000000;
  int seed_cells = 64;
};

/// Traces every component of {x in region : level(x, phi) = lambda}.
///
/// A seed grid over the region's bounding box stores, per grid edge, the
/// range of the level function (edges with an interior extremum are split
/// at it by golden-section search, so each piece is monotone and is crossed
/// at most once). Components are followed from unvisited crossings; the
/// edges a traced component crosses are marked so they do not seed again.
class LevelSetTracer {
 public:
  LevelSetTracer(const GeometryFamily& g, double phi, ClipRegion clip, TraceSettings ts = {})
      : g_(&g), slice_(g, phi), clip_(clip), ts_(ts) {
    build_seed_grid();
  }

  const LevelSlice& slice() const { return slice_; }
  const ClipRegion& clip() const { return clip_; }

  /// Precomputes, for each lambda of `axis`, the candidate seed pieces.
  void bucket(const LambdaAxis& axis) {
    buckets_.assign(axis.n, {});
    const double d = axis.step();
    for (int s = 0; s < static_cast<int>(pieces_.size()); ++s) {
      const Piece& p = pieces_[s];
      const double lo = std::min(p.la, p.lb), hi = std::max(p.la, p.lb);
      const int i0 = std::max(0, static_cast<int>(std::ceil((lo - axis.lo) / d - 1e-9)));
      const int i1 = std::min(axis.n - 1, static_cast<int>(std::floor((hi - axis.lo) / d + 1e-9)));
      for (int i = i0; i <= i1; ++i) buckets_[i].push_back(s);
    }
  }

  /// Traces at lambda = axis[index] using the buckets from bucket().
  std::vector<Polyline> trace_bucketed(int index, double lambda, double step) const {
    return trace_impl(lambda, step, &buckets_.at(index));
  }

  std::vector<Polyline> trace(double lambda, double step) const { return trace_impl(lambda, step, nullptr); }

  double newton_tol(double lambda) const { return 1e-12 * (1.0 + std::abs(lambda)); }

  /// Newton projection along the gradient onto level lambda.
  bool project(Point2& x, double lambda, double max_move) const {
    const Point2 x0 = x;
    const double tol = newton_tol(lambda);
    for (int it = 0; it < ts_.max_newton; ++it) {
      Point2 gr;
      const double r = slice_.eval(x, &gr) - lambda;
      if (std::abs(r) <= tol) return true;
      const double g2 = norm2(gr);
      if (!(g2 > 0.0) || !std::isfinite(g2) || !std::isfinite(r)) return false;
      const Point2 dx = gr * (r / g2);
      x = x - dx;
      if (norm(x - x0) > max_move) return false;
      if (norm(dx) <= 1e-15 * (1.0 + norm(x))) return std::abs(slice_.value(x) - lambda) <= 100.0 * tol;
    }
    return false;
  }

 private:
  struct Piece {
    Point2 a, b;
    double la, lb;
  };
  struct Seg {
    Point2 a, b;
    double tol;
  };

  Point2 node(int i, int j) const { return {x0_ + i * hc_, y0_ + j * hc_}; }
  int hedge(int i, int j) const { return j * n_ + i; }
  int vedge(int i, int j) const { return (n_ + 1) * n_ + i * n_ + j; }

  void build_seed_grid() {
    n_ = std::max(4, ts_.seed_cells);
    const double R = clip_.outer;
    double bx0 = -R, bx1 = R, by0 = -R, by1 = R;
    if (std::isfinite(clip_.window_radius)) {
      bx0 = std::max(bx0, clip_.window_center.x - clip_.window_radius);
      bx1 = std::min(bx1, clip_.window_center.x + clip_.window_radius);
      by0 = std::max(by0, clip_.window_center.y - clip_.window_radius);
      by1 = std::min(by1, clip_.window_center.y + clip_.window_radius);
    }
    empty_ = !(bx1 > bx0 && by1 > by0);
    if (empty_) return;
    const double side = std::max(bx1 - bx0, by1 - by0);
    hc_ = side / n_ * (1.0 + 1e-9);
    // A slightly shifted origin keeps grid nodes off the symmetry centre,
    // where several families are singular.
    x0_ = 0.5 * (bx0 + bx1) - 0.5 * n_ * hc_ + 1e-7 * hc_;
    y0_ = 0.5 * (by0 + by1) - 0.5 * n_ * hc_ + 2e-7 * hc_;

    const int nn = n_ + 1;
    std::vector<double> val(nn * nn);
    std::vector<Point2> grad(nn * nn);
    std::vector<char> ok(nn * nn);
    const double excl = 0.5 * g_->trace_exclusion();
    for (int j = 0; j < nn; ++j)
      for (int i = 0; i < nn; ++i) {
        const Point2 p = node(i, j);
        const int k = j * nn + i;
        ok[k] = g_->in_domain(p) && norm(p) >= excl;
        if (ok[k]) {
          val[k] = slice_.eval(p, &grad[k]);
          ok[k] = std::isfinite(val[k]) && std::isfinite(grad[k].x) && std::isfinite(grad[k].y);
        }
      }
    // Conservative "edge touches the region" test: the bounding disc of the
    // edge meets the annulus and the window.
    auto near_region = [&](Point2 a, Point2 b) {
      const Point2 m = (a + b) * 0.5;
      const double r = 0.5 * norm(b - a);
      const double rm = norm(m);
      return rm - r <= clip_.outer && rm + r >= clip_.inner &&
             norm(m - clip_.window_center) - r <= clip_.window_radius;
    };
    const int nedges = 2 * (n_ + 1) * n_;
    first_.assign(nedges, -1);
    split_.assign(nedges, -1.0);
    auto add_edge = [&](int id, int ka, int kb, Point2 a, Point2 b) {
      if (!ok[ka] || !ok[kb] || !near_region(a, b)) return;
      const Point2 d = b - a;
      const double ga = dot(grad[ka], d), gb = dot(grad[kb], d);
      first_[id] = static_cast<int>(pieces_.size());
      if (ga * gb < 0.0) {
        const bool is_max = ga > 0.0;
        double lo = 0.0, hi = 1.0;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = hi - gr * (hi - lo), e = lo + gr * (hi - lo);
        double fc = slice_.value(a + d * c), fe = slice_.value(a + d * e);
        for (int it = 0; it < 40; ++it) {
          if ((fc > fe) == is_max) {
            hi = e;
            e = c;
            fe = fc;
            c = hi - gr * (hi - lo);
            fc = slice_.value(a + d * c);
          } else {
            lo = c;
            c = e;
            fc = fe;
            e = lo + gr * (hi - lo);
            fe = slice_.value(a + d * e);
          }
        }
        const double s = 0.5 * (lo + hi);
        const Point2 m = a + d * s;
        const double lm = slice_.value(m);
        split_[id] = s;
        pieces_.push_back({a, m, val[ka], lm});
        pieces_.push_back({m, b, lm, val[kb]});
      } else {
        pieces_.push_back({a, b, val[ka], val[kb]});
      }
    };
    for (int j = 0; j < nn; ++j)
      for (int i = 0; i < n_; ++i)
        add_edge(hedge(i, j), j * nn + i, j * nn + i + 1, node(i, j), node(i + 1, j));
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < n_; ++j)
        add_edge(vedge(i, j), j * nn + i, (j + 1) * nn + i, node(i, j), node(i, j + 1));
  }

  // Per-call scratch state.
  struct Work {
    std::vector<char> marked;
    std::vector<std::vector<int>> cells;
    std::vector<int> touched;
    std::vector<Seg> segs;
  };

  void mark_piece(Work& w, int edge, double frac) const {
    const int f = first_[edge];
    if (f < 0) return;
    w.marked[(split_[edge] >= 0.0 && frac > split_[edge]) ? f + 1 : f] = 1;
  }

  void mark_segment(Work& w, Point2 p, Point2 q) const {
    // vertical grid lines
    {
      const double xa = std::min(p.x, q.x), xb = std::max(p.x, q.x);
      const int i0 = static_cast<int>(std::ceil((xa - x0_) / hc_)), i1 = static_cast<int>(std::floor((xb - x0_) / hc_));
      for (int i = std::max(i0, 0); i <= std::min(i1, n_); ++i) {
        const double x = x0_ + i * hc_;
        if (q.x == p.x) break;
        const double t = (x - p.x) / (q.x - p.x);
        const double fj = (p.y + t * (q.y - p.y) - y0_) / hc_;
        const int j = static_cast<int>(std::floor(fj));
        if (j >= 0 && j < n_) mark_piece(w, vedge(i, j), fj - j);
      }
    }
    {
      const double ya = std::min(p.y, q.y), yb = std::max(p.y, q.y);
      const int j0 = static_cast<int>(std::ceil((ya - y0_) / hc_)), j1 = static_cast<int>(std::floor((yb - y0_) / hc_));
      for (int j = std::max(j0, 0); j <= std::min(j1, n_); ++j) {
        const double y = y0_ + j * hc_;
        if (q.y == p.y) break;
        const double t = (y - p.y) / (q.y - p.y);
        const double fi = (p.x + t * (q.x - p.x) - x0_) / hc_;
        const int i = static_cast<int>(std::floor(fi));
        if (i >= 0 && i < n_) mark_piece(w, hedge(i, j), fi - i);
      }
    }
  }

  int cell_of(double v, double origin) const {
    return std::clamp(static_cast<int>(std::floor((v - origin) / hc_)), 0, n_ - 1);
  }

  void insert_segment(Work& w, const Seg& s) const {
    const int id = static_cast<int>(w.segs.size());
    w.segs.push_back(s);
    const int i0 = cell_of(std::min(s.a.x, s.b.x) - s.tol, x0_), i1 = cell_of(std::max(s.a.x, s.b.x) + s.tol, x0_);
    const int j0 = cell_of(std::min(s.a.y, s.b.y) - s.tol, y0_), j1 = cell_of(std::max(s.a.y, s.b.y) + s.tol, y0_);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        auto& c = w.cells[j * n_ + i];
        if (c.empty()) w.touched.push_back(j * n_ + i);
        c.push_back(id);
      }
  }

  static double seg_distance(Point2 p, Point2 a, Point2 b) {
    const Point2 d = b - a;
    const double l2 = norm2(d);
    const double t = l2 > 0.0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
    return norm(p - (a + d * t));
  }

  bool already_traced(const Work& w, Point2 p) const {
    for (int id : w.cells[cell_of(p.y, y0_) * n_ + cell_of(p.x, x0_)]) {
      const Seg& s = w.segs[id];
      if (seg_distance(p, s.a, s.b) <= s.tol) return true;
    }
    return false;
  }

  /// Point where level(a + s (b - a)) = lambda on a monotone piece (Illinois).
  Point2 piece_crossing(const Piece& pc, double lambda) const {
    const Point2 d = pc.b - pc.a;
    double s0 = 0.0, s1 = 1.0, f0 = pc.la - lambda, f1 = pc.lb - lambda;
    if (f0 == 0.0) return pc.a;
    if (f1 == 0.0) return pc.b;
    const double tol = newton_tol(lambda);
    int side = 0;
    double s = 0.5;
    for (int it = 0; it < 100; ++it) {
      s = (s0 * f1 - s1 * f0) / (f1 - f0);
      if (!(s > s0 && s < s1)) s = 0.5 * (s0 + s1);
      const double fs = slice_.value(pc.a + d * s) - lambda;
      if (std::abs(fs) <= tol || s1 - s0 < 1e-16) break;
      if ((fs < 0.0) == (f0 < 0.0)) {
        s0 = s;
        f0 = fs;
        if (side == -1) f1 *= 0.5;
        side = -1;
      } else {
        s1 = s;
        f1 = fs;
        if (side == 1) f0 *= 0.5;
        side = 1;
      }
    }
    return pc.a + d * s;
  }

  Point2 tangent(Point2 x, int dir) const {
    Point2 gr;
    slice_.eval(x, &gr);
    const double n = norm(gr);
    if (!(n > 0.0) || !std::isfinite(n)) throw TracingError("level-set tracing hit a critical point of psi");
    return perp(gr) * (dir / n);
  }

  /// Last inside point on the curve between inside p and outside q.
  Point2 clip_boundary(Point2 p, Point2 q, double lambda) const {
    double lo = 0.0, hi = 1.0;
    Point2 best = p;
    const double len = norm(q - p);
    for (int it = 0; it < 60 && (hi - lo) * len > 1e-13 * (1.0 + clip_.outer); ++it) {
      const double mid = 0.5 * (lo + hi);
      Point2 m = p + (q - p) * mid;
      if (!project(m, lambda, 2.0 * len)) break;
      if (clip_.contains(m)) {
        lo = mid;
        best = m;
      } else {
        hi = mid;
      }
    }
    return best;
  }

  /// Follows the curve from `start` in direction dir; returns true if it
  /// closes on itself.
  bool march(Point2 start, double lambda, int dir, double step, std::vector<Point2>& out) const {
    out.assign(1, start);
    Point2 p = start;
    Point2 T = tangent(p, dir);
    const Point2 T0 = T;
    double h = step;
    const double hmin = step * 1e-9;
    const double cos_max = std::cos(ts_.max_turn);
    const double cos_grow = std::cos(ts_.max_turn / 3.0);
    auto shrink = [&](const char* why) {
      h *= 0.5;
      if (h < hmin)
        throw TracingError(std::string("level-set tracing stalled (") + why + ") at lambda=" +
                           format_shortest(lambda) + " near (" + format_shortest(p.x) + ", " +
                           format_shortest(p.y) + ")");
    };
    while (true) {
      if (static_cast<int>(out.size()) > ts_.max_vertices) throw TracingError("level-set tracing: too many vertices");
      if (out.size() >= 3) {
        const Point2 d = start - p;
        const double dist = norm(d);
        if (dist <= h && dot(d, T) > 0.0 && dot(T, T0) > cos_max) {
          out.push_back(start);
          return true;
        }
      }
      Point2 q = p + T * h;
      if (!project(q, lambda, 2.0 * h)) {
        shrink("Newton projection failed");
        continue;
      }
      const Point2 dq = q - p;
      const double len = norm(dq);
      Point2 Tq;
      try {
        Tq = tangent(q, dir);
      } catch (const TracingError&) {
        shrink("critical point");
        continue;
      }
      const double c = dot(T, Tq);
      if (c < cos_max || len > 1.5 * h || len < 0.5 * h || dot(dq, T) <= 0.0) {
        shrink("step rejected");
        continue;
      }
      if (!clip_.contains(q)) {
        const Point2 b = clip_boundary(p, q, lambda);
        if (!(b == p)) out.push_back(b);
        return false;
      }
      out.push_back(q);
      p = q;
      T = Tq;
      if (c > cos_grow) h = std::min(1.5 * h, step);
    }
  }

  void register_polyline(Work& w, const Polyline& pl) const {
    const auto& v = pl.pts;
    const std::size_t m = v.size();
    if (m < 2) return;
    auto turn = [&](std::size_t k) -> double {  // tangent change at vertex k
      if (k == 0 || k + 1 >= m) {
        if (!pl.closed) return ts_.max_turn;
        const Point2 a = v[1] - v[0], b = v[m - 1] - v[m - 2];
        return std::acos(std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0));
      }
      const Point2 a = v[k] - v[k - 1], b = v[k + 1] - v[k];
      return std::acos(std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0));
    };
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double len = norm(v[k + 1] - v[k]);
      const double ang = std::max(turn(k), turn(k + 1));
      insert_segment(w, {v[k], v[k + 1], 2.0 * len * ang / 8.0 + 1e-9 * (1.0 + clip_.outer)});
      mark_segment(w, v[k], v[k + 1]);
    }
  }

  std::vector<Polyline> trace_impl(double lambda, double step, const std::vector<int>* candidates) const {
    if (!(step > 0.0)) throw DomainError("trace step must be positive");
    std::vector<Polyline> out;
    if (empty_) return out;
    Work w;
    w.marked.assign(pieces_.size(), 0);
    w.cells.resize(static_cast<std::size_t>(n_) * n_);
    std::vector<int> all;
    if (!candidates) {
      for (int s = 0; s < static_cast<int>(pieces_.size()); ++s) {
        const Piece& p = pieces_[s];
        if (std::min(p.la, p.lb) <= lambda && lambda <= std::max(p.la, p.lb)) all.push_back(s);
      }
      candidates = &all;
    }
    std::vector<Point2> fwd, bwd;
    for (int s : *candidates) {
      if (w.marked[s]) continue;
      const Piece& pc = pieces_[s];
      const Point2 seed = piece_crossing(pc, lambda);
      w.marked[s] = 1;
      if (!clip_.contains(seed)) continue;
      if (std::abs(slice_.value(seed) - lambda) > 1e-10 * (1.0 + std::abs(lambda))) continue;
      if (already_traced(w, seed)) continue;
      Polyline pl;
      if (march(seed, lambda, +1, step, fwd)) {
        pl.pts = std::move(fwd);
        pl.closed = true;
      } else {
        march(seed, lambda, -1, step, bwd);
        pl.pts.assign(bwd.rbegin(), bwd.rend());
        pl.pts.insert(pl.pts.end(), fwd.begin() + 1, fwd.end());
      }
      register_polyline(w, pl);
      out.push_back(std::move(pl));
    }
    return out;
  }

  const GeometryFamily* g_;
  LevelSlice slice_;
  ClipRegion clip_;
  TraceSettings ts_;
  bool empty_ = false;
  int n_ = 64;
  double hc_ = 1.0, x0_ = 0.0, y0_ = 0.0;
  std::vector<Piece> pieces_;
  std::vector<int> first_;
  std::vector<double> split_;
  std::vector<std::vector<int>> buckets_;
};

/// The level curve {psi(x, phi) = -lambda} (for the ellipse family
/// {psi = lambda}) within `region`, one polyline per connected component.
inline std::vector<Polyline> trace_curve(const GeometryFamily& g, double lambda, double phi, ClipRegion region,
                                         double step) {
  LevelSetTracer tr(g, phi, region);
  return tr.trace(lambda, step);
}

// ---------------------------------------------------------------------------
// Curve quadrature

namespace detail {

/// \int over the traced curves of f * weight, with per-segment 5-point
/// Gauss-Legendre nodes on the chord projected back onto the curve along
/// the chord normal. On the curve, ds / |grad L| = |chord| dt / |grad L . n|.
inline double integrate_curves(const GeometryFamily& g, const LevelSetTracer& tr, const std::vector<Polyline>& curves,
                               double lambda, const Phantom& f, SinoKind kind, double reach_sigmas = 8.0) {
  const LevelSlice& sl = tr.slice();
  const bool funk = g.family() == Family::funk;
  const double tol = tr.newton_tol(lambda);
  const auto& comps = f.components();
  double total = 0.0;
  for (const Polyline& pl : curves) {
    for (std::size_t k = 0; k + 1 < pl.pts.size(); ++k) {
      const Point2 a = pl.pts[k], b = pl.pts[k + 1];
      const Point2 d = b - a;
      const double len = norm(d);
      if (len == 0.0) continue;
      const Point2 mid = (a + b) * 0.5;
      bool relevant = false;
      for (const auto& c : comps)
        if (norm(mid - c.center) <= c.reach(reach_sigmas) + 0.5 * len) {
          relevant = true;
          break;
        }
      if (!relevant) continue;
      const Point2 n = perp(d) * (1.0 / len);
      double seg = 0.0;
      for (std::size_t q = 0; q < quad::GaussLegendre5::nodes.size(); ++q) {
        const Point2 base = a + d * quad::GaussLegendre5::nodes[q];
        double s = 0.0;
        Point2 x = base, gr;
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
          x = base + n * s;
          const double r = sl.eval(x, &gr) - lambda;
          if (std::abs(r) <= tol) {
            ok = true;
            break;
          }
          const double gn = dot(gr, n);
          if (gn == 0.0 || !std::isfinite(gn)) break;
          s -= r / gn;
          if (std::abs(s) > len) break;
        }
        if (!ok) {
          sl.eval(x, &gr);
          if (!(std::abs(sl.value(x) - lambda) <= 100.0 * tol))
            throw TracingError("curve quadrature: node projection failed at lambda=" + format_shortest(lambda));
        }
        const double gn = std::abs(dot(gr, n));
        double w = f(x);
        if (kind == SinoKind::mphi) {
          if (funk) w *= g.area_density(x);
          w /= gn;
        } else {
          const double gl = norm(gr);
          w *= gl / gn;
          if (funk) w *= g.line_factor(x, perp(gr) * (1.0 / gl));
        }
        seg += quad::GaussLegendre5::weights[q] * w;
      }
      total += seg * len;
    }
  }
  return total;
}

/// Closed-form contribution of exact indicator discs (radon lines, ellipse
/// circles); throws for families without one.
inline double exact_disc_value(const GeometryFamily& g, const Component& c, double lambda, double phi, SinoKind kind) {
  if (g.family() == Family::radon) {
    const double dist = std::abs(lambda - dot(c.center, unit(phi)));
    return dist < c.size ? c.amp * 2.0 * std::sqrt(c.size * c.size - dist * dist) : 0.0;
  }
  if (g.family() == Family::ellipse) {
    if (!(lambda > 0.0)) return 0.0;
    const double rho = std::sqrt(lambda);
    const double D = norm(c.center - g.source(phi));
    const double r = c.size;
    double arc;
    if (D + rho <= r) arc = kTwoPi * rho;
    else if (D >= rho + r || rho >= D + r) arc = 0.0;
    else arc = 2.0 * rho * std::acos(std::clamp((rho * rho + D * D - r * r) / (2.0 * rho * D), -1.0, 1.0));
    return c.amp * (kind == SinoKind::mphi ? arc / (2.0 * rho) : arc);
  }
  throw DomainError(std::string(g.tag()) +
                    ": exact indicator discs need a closed form; give the disc a mollification width");
}

}  // namespace detail

struct ForwardOptions {
  double step = 0.0;      ///< initial max vertex spacing; 0 = from the phantom's feature scale
  bool refine = true;     ///< halve the step until successive values agree
  double rel_tol = 1e-8;
  int max_halvings = 8;
  int workers = 0;        ///< 0 = default_workers()
  TraceSettings trace{};
};

inline double default_forward_step(const GeometryFamily& g, const Phantom& f) {
  const double s = f.empty() ? g.support_radius() : f.feature_scale();
  return std::min(0.5 * s, 0.125 * g.support_radius());
}

namespace detail {

inline ClipRegion forward_clip(const GeometryFamily& g, const Phantom& smooth) {
  ClipRegion clip = ClipRegion::of(g);
  if (!smooth.empty()) {
    auto [c, r] = smooth.bounding_disc(8.0);
    clip.window_center = c;
    clip.window_radius = r;
  }
  return clip;
}

inline void split_phantom(const Phantom& f, Phantom& smooth, std::vector<Component>& exact) {
  std::vector<Component> sm;
  for (const auto& c : f.components()) (c.exact_indicator() ? exact : sm).push_back(c);
  smooth = Phantom(std::move(sm));
}

/// One row (fixed phi) of forward data.
inline void forward_row(const GeometryFamily& g, const Phantom& smooth, const std::vector<Component>& exact,
                        const LambdaAxis& la, double phi, SinoKind kind, const ForwardOptions& opt, double* row) {
  for (int i = 0; i < la.n; ++i) row[i] = 0.0;
  for (const auto& c : exact)
    for (int i = 0; i < la.n; ++i) row[i] += detail::exact_disc_value(g, c, la[i], phi, kind);
  if (smooth.empty()) return;
  LevelSetTracer tr(g, phi, forward_clip(g, smooth), opt.trace);
  tr.bucket(la);
  const double step0 = opt.step > 0.0 ? opt.step : default_forward_step(g, smooth);
  // absolute floor: near-tangent clipped curves carry roundoff-level values
  const double floor = smooth.max_amplitude() * smooth.feature_scale();
  for (int i = 0; i < la.n; ++i) {
    const double lam = la[i];
    double h = step0;
    double val = integrate_curves(g, tr, tr.trace_bucketed(i, lam, h), lam, smooth, kind);
    if (opt.refine) {
      bool converged = false;
      for (int r = 0; r < opt.max_halvings; ++r) {
        h *= 0.5;
        const double next = integrate_curves(g, tr, tr.trace_bucketed(i, lam, h), lam, smooth, kind);
        const double diff = std::abs(next - val);
        val = next;
        if (diff <= opt.rel_tol * std::max(std::abs(val), floor)) {
          converged = true;
          break;
        }
      }
      if (!converged)
        throw TracingError("forward: step refinement did not converge at lambda=" + format_shortest(lam) +
                           ", phi=" + format_shortest(phi));
    }
    if (!std::isfinite(val))
      throw DomainError("forward: non-finite value at lambda=" + format_shortest(lam) + ", phi=" + format_shortest(phi));
    row[i] += val;
  }
}

}  // namespace detail

/// Samples M f (kind = mphi) or the arc-length transform R f (kind =
/// riemann) on the (lambda, phi) grid. Cormack data are divided by k: one
/// sheet of the Z_k quotient.
inline Sinogram forward(const Phantom& f, const GeometryFamily& g, LambdaAxis la, PhiAxis pa, SinoKind kind,
                        const ForwardOptions& opt = {}) {
  Sinogram s(g, kind, la, pa);
  Phantom smooth;
  std::vector<Component> exact;
  detail::split_phantom(f, smooth, exact);
  const int workers = opt.workers > 0 ? opt.workers : default_workers();
  parallel_for(pa.n, workers, [&](int j) {
    detail::forward_row(g, smooth, exact, la, pa[j], kind, opt, &s.data[static_cast<std::size_t>(j) * la.n]);
  });
  const double q = g.quotient_multiplicity();
  if (q != 1.0)
    for (double& v : s.data) v /= q;
  return s;
}

inline Sinogram forward_mphi(const Phantom& f, const GeometryFamily& g, LambdaAxis la, PhiAxis pa,
                             const ForwardOptions& opt = {}) {
  return forward(f, g, la, pa, SinoKind::mphi, opt);
}

inline Sinogram forward_riemann(const Phantom& f, const GeometryFamily& g, LambdaAxis la, PhiAxis pa,
                                const ForwardOptions& opt = {}) {
  return forward(f, g, la, pa, SinoKind::riemann, opt);
}

/// Single transform value, for checks.
inline double forward_value(const Phantom& f, const GeometryFamily& g, double lambda, double phi,
                            SinoKind kind = SinoKind::mphi, const ForwardOptions& opt = {}) {
  Phantom smooth;
  std::vector<Component> exact;
  detail::split_phantom(f, smooth, exact);
  const LambdaAxis la{lambda, lambda + 1.0, 2};
  double row[2];
  detail::forward_row(g, smooth, exact, la, phi, kind, opt, row);
  return row[0] / g.quotient_multiplicity();
}

/// Rf = mu(lambda) M(m f): divides each entry by mu(lambda). The result is
/// M data of m f.
inline Sinogram riemann_to_mphi(const Sinogram& s) {
  if (s.kind != SinoKind::riemann) throw DomainError("riemann_to_mphi expects riemann data");
  if (!s.geometry.factorizable())
    throw FactorizationUnavailable(std::string(s.geometry.tag()) + ": |grad psi| does not factor as m(x) mu(lambda)");
  Sinogram out = s;
  out.kind = SinoKind::mphi;
  for (int i = 0; i < s.lambda.n; ++i) {
    const double mu = s.geometry.weight_mu(s.lambda[i]);
    for (int j = 0; j < s.phi.n; ++j) out.at(i, j) = s.at(i, j) / mu;
  }
  return out;
}

}  // namespace funkradon
