#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "funkradon/core.hpp"
#include "funkradon/format.hpp"
#include "funkradon/geometry.hpp"

namespace funkradon {

/// Uniform axis with n >= 2 samples from lo to hi inclusive.
struct LambdaAxis {
  double lo = -1.0;
  double hi = 1.0;
  int n = 2;

  double step() const { return (hi - lo) / (n - 1); }
  double operator[](int i) const { return i == n - 1 ? hi : lo + i * step(); }
  bool operator==(const LambdaAxis&) const = default;

  /// Half-offset axis over (0, top]: first sample at step/2, so that the
  /// even mirror image is uniform without repeating lambda = 0.
  static LambdaAxis half_offset(double top, int n) {
    const double d = top / (n - 0.5);
    return {0.5 * d, top, n};
  }
};

/// Angles phi_j = j * period / n, period 2pi (full) or pi (half).
struct PhiAxis {
  int n = 8;
  bool full = true;

  double period() const { return full ? kTwoPi : kPi; }
  double operator[](int j) const { return period() * j / n; }
  bool operator==(const PhiAxis&) const = default;
};

enum class SinoKind { mphi, riemann };

inline std::string_view kind_name(SinoKind k) { return k == SinoKind::mphi ? "mphi" : "riemann"; }

/// Transform samples on a (lambda, phi) grid, stored phi-major.
struct Sinogram {
  GeometryFamily geometry;
  SinoKind kind = SinoKind::mphi;
  LambdaAxis lambda;
  PhiAxis phi;
  std::vector<double> data;  // data[j * lambda.n + i] at (lambda_i, phi_j)

  Sinogram(GeometryFamily g, SinoKind k, LambdaAxis la, PhiAxis pa)
      : geometry(std::move(g)), kind(k), lambda(la), phi(pa),
        data(static_cast<std::size_t>(la.n) * static_cast<std::size_t>(pa.n), 0.0) {
    if (la.n < 2 || !(la.hi > la.lo)) throw DomainError("lambda axis needs n >= 2 and lo < hi");
    if (pa.n < 1) throw DomainError("phi axis needs at least one sample");
  }

  double& at(int i, int j) { return data[static_cast<std::size_t>(j) * lambda.n + i]; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(j) * lambda.n + i]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
  }
};

// FKR1 text format:
//   FKR1
//   <geometry descriptor>
//   <kind> <n_lambda> <n_phi> <lambda_min> <lambda_max> <full|half>
//   n_phi rows of n_lambda values

inline void write_fkr1(std::ostream& os, const Sinogram& s) {
  os << "FKR1\n" << s.geometry.descriptor() << '\n';
  os << kind_name(s.kind) << ' ' << s.lambda.n << ' ' << s.phi.n << ' ' << format_shortest(s.lambda.lo) << ' '
     << format_shortest(s.lambda.hi) << ' ' << (s.phi.full ? "full" : "half") << '\n';
  for (int j = 0; j < s.phi.n; ++j) {
    for (int i = 0; i < s.lambda.n; ++i) {
      if (i) os << ' ';
      os << format_shortest(s.at(i, j));
    }
    os << '\n';
  }
}

/// Reads FKR1; ParseError positions are 1-based line numbers.
inline Sinogram read_fkr1(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> std::string& {
    if (!std::getline(is, line)) throw ParseError("unexpected end of FKR1 input", lineno + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  if (next() != "FKR1") throw ParseError("missing FKR1 magic", 1);
  GeometryFamily geom = [&] {
    const std::string desc = next();
    try {
      return GeometryFamily::parse(desc);
    } catch (const ParseError& e) {
      throw ParseError(std::string("bad geometry descriptor: ") + e.what(), 2);
    }
  }();
  std::istringstream hdr(next());
  std::string kind, lo_s, hi_s, full_s;
  long long nl = 0, np = 0;
  hdr >> kind >> nl >> np >> lo_s >> hi_s >> full_s;
  std::string extra;
  if (!hdr || (hdr >> extra)) throw ParseError("malformed FKR1 header line", 3);
  SinoKind k;
  if (kind == "mphi") k = SinoKind::mphi;
  else if (kind == "riemann") k = SinoKind::riemann;
  else throw ParseError("unknown sinogram kind '" + kind + "'", 3);
  if (nl < 2 || np < 1 || nl > 10000000 / std::max<long long>(np, 1))
    throw ParseError("sinogram dimensions out of range", 3);
  auto lo = parse_double(lo_s), hi = parse_double(hi_s);
  if (!lo || !hi || !(*hi > *lo)) throw ParseError("invalid lambda range", 3);
  if (full_s != "full" && full_s != "half") throw ParseError("phi coverage must be 'full' or 'half'", 3);
  Sinogram s(geom, k, {*lo, *hi, static_cast<int>(nl)}, {static_cast<int>(np), full_s == "full"});
  for (int j = 0; j < s.phi.n; ++j) {
    const std::string& row = next();
    std::size_t pos = 0;
    int i = 0;
    while (pos < row.size()) {
      if (row[pos] == ' ') {
        ++pos;
        continue;
      }
      std::size_t end = row.find(' ', pos);
      if (end == std::string::npos) end = row.size();
      if (i >= s.lambda.n) throw ParseError("too many values in row", lineno);
      auto v = parse_double(std::string_view(row).substr(pos, end - pos));
      if (!v || !std::isfinite(*v)) throw ParseError("invalid value '" + row.substr(pos, end - pos) + "'", lineno);
      s.at(i++, j) = *v;
      pos = end;
    }
    if (i != s.lambda.n) throw ParseError("expected " + std::to_string(s.lambda.n) + " values in row", lineno);
  }
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw ParseError("trailing data after sinogram", lineno);
  }
  return s;
}

}  // namespace funkradon
