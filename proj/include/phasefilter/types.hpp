#pragma once

#include <charconv>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace phasefilter {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Phase-space point xi = (u + i v)/sqrt(2) in canonical coordinates (hbar = 1),
// measure d^2 xi = d(Re xi) d(Im xi).
struct PhasePoint {
  double re = 0.0;
  double im = 0.0;

  constexpr PhasePoint() = default;
  constexpr PhasePoint(double r, double i) : re(r), im(i) {}
  // implicit on purpose: complex amplitudes are the natural literal form
  constexpr PhasePoint(cplx z) : re(z.real()), im(z.imag()) {}

  constexpr cplx z() const { return {re, im}; }
  double norm2() const { return re * re + im * im; }
  double abs() const { return std::hypot(re, im); }
  bool finite() const { return std::isfinite(re) && std::isfinite(im); }
};

// (u, v) = sqrt(2) (Re xi, Im xi); the only place this mapping lives.
struct CanonicalCoords {
  double u;
  double v;
};

inline CanonicalCoords to_canonical(PhasePoint p) {
  return {std::sqrt(2.0) * p.re, std::sqrt(2.0) * p.im};
}

inline PhasePoint from_canonical(CanonicalCoords c) {
  return {c.u / std::sqrt(2.0), c.v / std::sqrt(2.0)};
}

// ---------------------------------------------------------------------------
// errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct PhysicalityError : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  using Error::Error;
};

struct TruncationError : Error {
  using Error::Error;
};

struct UnsupportedRouteError : Error {
  using Error::Error;
};

struct SamplerError : Error {
  using Error::Error;
};

// s-ordered distribution does not exist as a function (integrand does not decay)
struct SingularPqdError : Error {
  double s;
  double tail;
  SingularPqdError(double order, double tail_magnitude, const std::string& what)
      : Error(what), s(order), tail(tail_magnitude) {}
};

// regularized P requested with a filter that cannot tame the state
struct FilterTooWeakError : Error {
  double tail;
  FilterTooWeakError(double tail_magnitude, const std::string& what)
      : Error(what), tail(tail_magnitude) {}
};

struct UnphysicalFilterError : Error {
  using Error::Error;
};

struct SearchError : Error {
  double best_width;
  SearchError(double best, const std::string& what) : Error(what), best_width(best) {}
};

// shortest decimal form that reads back to the same double
inline std::string format_number(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline void require_finite(PhasePoint p, const char* what) {
  if (!p.finite()) throw DomainError(std::string(what) + ": non-finite phase-space point");
}

}  // namespace phasefilter
