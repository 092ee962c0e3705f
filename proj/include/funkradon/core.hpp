#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace funkradon {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Point2 operator-() const { return {-x, -y}; }
  constexpr bool operator==(const Point2&) const = default;
};

inline constexpr Point2 operator*(double s, Point2 p) { return p * s; }
inline constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline constexpr double norm2(Point2 p) { return p.x * p.x + p.y * p.y; }
inline constexpr Point2 perp(Point2 p) { return {-p.y, p.x}; }

/// Unit vector e(phi) = (cos phi, sin phi).
inline Point2 unit(double phi) { return {std::cos(phi), std::sin(phi)}; }

/// Closed interval on the real line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double length() const { return hi - lo; }
};

// Error categories map onto CLI exit codes: usage/parse errors -> 2,
// numerical failures (coverage, tracing, windowing) -> 3.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class ParseError : public UsageError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : UsageError(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Input outside a family's domain, or otherwise violating a precondition.
class DomainError : public UsageError {
 public:
  using UsageError::UsageError;
};

class FactorizationUnavailable : public UsageError {
 public:
  using UsageError::UsageError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class TracingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CoverageError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class WindowingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace funkradon
