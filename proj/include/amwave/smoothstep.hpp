#pragma once

#include "amwave/common.hpp"

namespace amwave {

// C^2 quintic smoothstep: S(0)=0, S(1)=1, S'=S''=0 at both ends
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double smoothstep_d(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return t * t * (30.0 + t * (-60.0 + 30.0 * t));
}

// chi: 1 on (-inf,1], 0 on [2,inf), monotone C^2 with chi' <= 0
inline double chi_cut(double t) { return 1.0 - smoothstep(t - 1.0); }
inline double chi_cut_d(double t) { return -smoothstep_d(t - 1.0); }

// chi_R(s) = chi(s/R), chibar_R = 1 - chi_R
inline double chi_R(double s, double R) { return chi_cut(s / R); }
inline double chi_R_d(double s, double R) { return chi_cut_d(s / R) / R; }
inline double chibar_R(double s, double R) { return 1.0 - chi_R(s, R); }
inline double chibar_R_d(double s, double R) { return -chi_R_d(s, R); }

// plateau window: 1 on [a+w, b-w], 0 outside [a, b]
inline double window_plateau(double s, double a, double b, double w) {
  if (s <= a || s >= b) return 0.0;
  double up = smoothstep((s - a) / w);
  double dn = smoothstep((b - s) / w);
  return up * dn;
}

// transition profiles in beta used by the cutoff families.
// rho_in: 1 on beta <= -1+eps, 0 on beta >= -1+2eps, rho_in' <= 0.
struct BetaProfile {
  double lo, hi;  // transition interval [lo, hi]
  bool descending;
  double operator()(double b) const {
    double t = (b - lo) / (hi - lo);
    return descending ? 1.0 - smoothstep(t) : smoothstep(t);
  }
  double deriv(double b) const {
    double t = (b - lo) / (hi - lo);
    double d = smoothstep_d(t) / (hi - lo);
    return descending ? -d : d;
  }
};

inline BetaProfile rho_in_profile(double eps) { return {-1.0 + eps, -1.0 + 2.0 * eps, true}; }
inline BetaProfile rho_out_profile(double eps) { return {1.0 - 2.0 * eps, 1.0 - eps, false}; }

// mid profile: 0 below beta1-2eps, 1 on [beta1-eps, beta2+eps], 0 above beta2+2eps
struct MidProfile {
  double b1, b2, eps;
  double operator()(double b) const {
    double up = smoothstep((b - (b1 - 2.0 * eps)) / eps);
    double dn = 1.0 - smoothstep((b - (b2 + eps)) / eps);
    return up * dn;
  }
  double deriv(double b) const {
    double up = smoothstep((b - (b1 - 2.0 * eps)) / eps);
    double dn = 1.0 - smoothstep((b - (b2 + eps)) / eps);
    double dup = smoothstep_d((b - (b1 - 2.0 * eps)) / eps) / eps;
    double ddn = -smoothstep_d((b - (b2 + eps)) / eps) / eps;
    return dup * dn + up * ddn;
  }
};

}  // namespace amwave
