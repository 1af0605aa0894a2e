#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace amwave {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// error taxonomy shared by all modules; `kind` is stable for CLI exit-code mapping
enum class ErrorKind {
  Domain,
  OutsideCone,
  StepFailure,
  AccposiFailed,
  SignatureViolation,
  DecayFitFailure,
  NonFiniteValue,
  FlowDrift,
  CertificationTimeout,
  EventDetectionFailure,
  DegeneratePoint,
  Size,
  Resolution,
  Frame,
  SolveFailure,
  PowerIterationStall,
  CflViolation,
  NonProductForm,
  Mass,
  NotConverged,
  IllConditioned,
  Config,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  ErrorKind kind;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

inline void require(bool ok, ErrorKind k, const std::string& msg) {
  if (!ok) fail(k, msg);
}

inline double sq(double a) { return a * a; }

// <x> = (1 + |x|^2)^{1/2}
inline double jap(double s) { return std::sqrt(1.0 + s * s); }
inline double jap(const Vec2& x) { return std::sqrt(1.0 + x.squaredNorm()); }

// phase-space point (x = (t,y), xi = (tau,eta))
struct PhasePoint {
  Vec2 x;
  Vec2 xi;
};

// xi-tilde = (1/2) d_xi p0 = (-tau, eta)
inline Vec2 xi_tilde(const Vec2& xi) { return Vec2(-xi[0], xi[1]); }

// p0(xi) = -tau^2 + eta^2
inline double p0(const Vec2& xi) { return -sq(xi[0]) + sq(xi[1]); }

// cos(x, xi-tilde); requires x != 0, xi != 0
inline double beta0(const Vec2& x, const Vec2& xi) {
  const Vec2 v = xi_tilde(xi);
  const double nx = x.norm(), nv = v.norm();
  require(nx > 0.0 && nv > 0.0, ErrorKind::DegeneratePoint, "beta0 at x=0 or xi=0");
  return x.dot(v) / (nx * nv);
}

inline bool finite(double v) { return std::isfinite(v); }

template <typename Derived>
bool finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace amwave
