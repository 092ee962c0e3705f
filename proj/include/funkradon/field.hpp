#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "funkradon/core.hpp"
#include "funkradon/format.hpp"

namespace funkradon {

/// Uniform Cartesian sample grid: point(i, j) = (x0 + i h, y0 + j h).
struct Grid {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;

  /// n x n samples spanning [-extent, extent]^2 (end points included).
  static Grid centered(int n, double extent) {
    if (n < 2) throw DomainError("grid needs at least 2 samples per side");
    if (!(extent > 0.0)) throw DomainError("grid extent must be positive");
    const double h = 2.0 * extent / (n - 1);
    return {n, n, -extent, -extent, h};
  }

  Point2 point(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  bool operator==(const Grid&) const = default;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(Grid g) : grid_(g), v_(g.size(), 0.0) {}
  ScalarField(Grid g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    if (v_.size() != g.size()) throw DomainError("field value count does not match grid");
  }

  const Grid& grid() const { return grid_; }
  double& operator()(int i, int j) { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  double operator()(int i, int j) const { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  /// Sum of values times cell area.
  double integral() const {
    double s = 0.0;
    for (double v : v_) s += v;
    return s * grid_.h * grid_.h;
  }

 private:
  Grid grid_;
  std::vector<double> v_;
};

// F64GRID text: header `F64GRID nx ny x0 y0 h`, then ny rows (j ascending) of
// nx values in shortest round-trip decimal form.

inline void write_f64grid(std::ostream& os, const ScalarField& f) {
  const Grid& g = f.grid();
  os << "F64GRID " << g.nx << ' ' << g.ny << ' ' << format_shortest(g.x0) << ' ' << format_shortest(g.y0)
     << ' ' << format_shortest(g.h) << '\n';
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) os << ' ';
      os << format_shortest(f(i, j));
    }
    os << '\n';
  }
}

namespace detail {

inline std::string next_token(std::istream& is, std::size_t& count, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw ParseError(std::string("unexpected end of input while reading ") + what, count);
  ++count;
  return tok;
}

inline double token_double(std::istream& is, std::size_t& count, const char* what) {
  const std::string tok = next_token(is, count, what);
  auto v = parse_double(tok);
  if (!v || !std::isfinite(*v)) throw ParseError(std::string("invalid ") + what + " '" + tok + "'", count);
  return *v;
}

inline long long token_int(std::istream& is, std::size_t& count, const char* what) {
  const std::string tok = next_token(is, count, what);
  auto v = parse_int(tok);
  if (!v) throw ParseError(std::string("invalid ") + what + " '" + tok + "'", count);
  return *v;
}

}  // namespace detail

/// Reads an F64GRID stream; ParseError positions count whitespace tokens.
inline ScalarField read_f64grid(std::istream& is) {
  std::size_t count = 0;
  if (detail::next_token(is, count, "magic") != "F64GRID") throw ParseError("missing F64GRID magic", 0);
  Grid g;
  const long long nx = detail::token_int(is, count, "nx");
  const long long ny = detail::token_int(is, count, "ny");
  if (nx < 1 || ny < 1 || nx > 100000 || ny > 100000) throw ParseError("grid dimensions out of range", count);
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  g.x0 = detail::token_double(is, count, "x0");
  g.y0 = detail::token_double(is, count, "y0");
  g.h = detail::token_double(is, count, "h");
  if (!(g.h > 0.0)) throw ParseError("grid spacing must be positive", count);
  std::vector<double> v(g.size());
  for (double& x : v) x = detail::token_double(is, count, "value");
  std::string extra;
  if (is >> extra) throw ParseError("trailing data after grid values", count + 1);
  return ScalarField(g, std::move(v));
}

/// 8-bit binary PGM, min-max normalized, top row = largest y.
inline void write_pgm(std::ostream& os, const ScalarField& f) {
  const Grid& g = f.grid();
  double lo = 0.0, hi = 0.0;
  if (!f.values().empty()) {
    auto [mn, mx] = std::minmax_element(f.values().begin(), f.values().end());
    lo = *mn;
    hi = *mx;
  }
  os << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(g.nx));
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      const double s = hi > lo ? (f(i, j) - lo) / (hi - lo) : 0.0;
      row[i] = static_cast<unsigned char>(std::lround(std::clamp(s, 0.0, 1.0) * 255.0));
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace funkradon
