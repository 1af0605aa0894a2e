#pragma once

#include <optional>
#include <vector>

#include "amwave/halton.hpp"
#include "amwave/metric.hpp"

namespace amwave {

// phase-space regions used by the weight, cutoff and radiation estimates;
// field-based kinds test beta, mass-shell kinds test beta0 and are field-free
enum class RegionKind {
  Incoming,          // |x|>=R, |xi|>=r, beta <= -1+eps
  Outgoing,          // |x|>=R, |xi|>=r, beta >= 1-eps
  Mid,               // |x|>=R, |xi|>=r, beta in [s1, s2]
  Shell,             // |x|>=R, |xi|>=r, |beta - s1| <= margin band
  FreeIncoming,      // |x|>=R, xi != 0, beta0 < -1+eps
  FreeOutgoing,      // |x|>=R, xi != 0, beta0 > 1-eps
  MassShellIncoming, // FreeIncoming and |p0+m0^2| < eps|xi|^2
  MassShellOutgoing, // FreeOutgoing and |p0+m0^2| < eps|xi|^2
};

struct RegionSpec {
  RegionKind kind = RegionKind::Incoming;
  double eps = 0.1;
  double r = 1.0;
  double R = 1.0;
  double s1 = 0.0, s2 = 0.0;  // beta band for Mid / value for Shell
  double m0 = 1.0;
  double margin = 1e-12;

  void validate() const {
    require(eps > 0.0 && eps < 1.0, ErrorKind::Config, "region eps must lie in (0,1)");
    require(r > 0.0 && R >= 1.0, ErrorKind::Config, "region needs r > 0 and R >= 1");
    require(s1 <= s2, ErrorKind::Config, "region beta band needs s1 <= s2");
    if (kind == RegionKind::MassShellIncoming || kind == RegionKind::MassShellOutgoing)
      require(m0 > 0.0, ErrorKind::Config, "mass-shell region needs m0 > 0");
  }
};

inline bool field_free(RegionKind k) {
  return k == RegionKind::FreeIncoming || k == RegionKind::FreeOutgoing ||
         k == RegionKind::MassShellIncoming || k == RegionKind::MassShellOutgoing;
}

inline bool region_contains(const RegionSpec& s, const InverseMetricField* f,
                            const PhasePoint& pt) {
  const double ax = pt.x.norm(), axi = pt.xi.norm();
  const double m = s.margin;
  if (ax < s.R - m) return false;
  if (field_free(s.kind)) {
    if (axi <= m) return false;
    const double b0 = beta0(pt.x, pt.xi);
    switch (s.kind) {
      case RegionKind::FreeIncoming:
        return b0 < -1.0 + s.eps - m;
      case RegionKind::FreeOutgoing:
        return b0 > 1.0 - s.eps + m;
      case RegionKind::MassShellIncoming:
        return b0 < -1.0 + s.eps - m &&
               std::abs(p0(pt.xi) + sq(s.m0)) < s.eps * pt.xi.squaredNorm() - m;
      case RegionKind::MassShellOutgoing:
        return b0 > 1.0 - s.eps + m &&
               std::abs(p0(pt.xi) + sq(s.m0)) < s.eps * pt.xi.squaredNorm() - m;
      default:
        return false;
    }
  }
  require(f != nullptr, ErrorKind::Config, "field-based region membership needs a field");
  if (axi < s.r - m) return false;
  const double b = beta(*f, pt);
  switch (s.kind) {
    case RegionKind::Incoming:
      return b <= -1.0 + s.eps + m;
    case RegionKind::Outgoing:
      return b >= 1.0 - s.eps - m;
    case RegionKind::Mid:
      return b >= s.s1 - m && b <= s.s2 + m;
    case RegionKind::Shell:
      return std::abs(b - s.s1) <= std::max(m, 1e-9);
    default:
      return false;
  }
}

// solves beta(x, xi(theta)) = target on the unit xi circle by scan + bisection
inline std::optional<double> xi_angle_for_beta(const InverseMetricField& f, const Vec2& x,
                                               double target, int scan = 256) {
  auto bt = [&](double th) {
    return beta(f, {x, Vec2(std::cos(th), std::sin(th))}) - target;
  };
  double prev = bt(0.0);
  for (int i = 1; i <= scan; ++i) {
    const double th = 2.0 * pi * i / scan;
    const double cur = bt(th);
    if (prev == 0.0) return 2.0 * pi * (i - 1) / scan;
    if (prev * cur < 0.0) {
      double lo = 2.0 * pi * (i - 1) / scan, hi = th;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (bt(lo) * bt(mid) <= 0.0 ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = cur;
  }
  return std::nullopt;
}

// constructive samples of a field-based region: radius and |xi| log-uniform,
// beta placed by angle root finding, then re-checked by the predicate
inline std::vector<PhasePoint> sample_region(const RegionSpec& s, const InverseMetricField& f,
                                             long count, unsigned seed = 1,
                                             double radial_factor = 8.0) {
  s.validate();
  require(!field_free(s.kind), ErrorKind::Config, "sample_region drives field-based kinds");
  double blo, bhi;
  switch (s.kind) {
    case RegionKind::Incoming:
      blo = -1.0 + 1e-6;
      bhi = -1.0 + s.eps;
      break;
    case RegionKind::Outgoing:
      blo = 1.0 - s.eps;
      bhi = 1.0 - 1e-6;
      break;
    case RegionKind::Mid:
      blo = s.s1;
      bhi = s.s2;
      break;
    case RegionKind::Shell:
      blo = bhi = s.s1;
      break;
    default:
      fail(ErrorKind::Config, "unsupported region kind");
  }
  std::vector<PhasePoint> out;
  out.reserve(count);
  HaltonStream hs(seed, 4);
  double u[4];
  long tries = 0;
  while (static_cast<long>(out.size()) < count) {
    require(++tries < 50 * count + 1000, ErrorKind::Domain, "region sampler starved");
    hs.next(u);
    const double ax = s.R * std::pow(radial_factor, u[0]);
    const double xa = 2.0 * pi * u[1];
    const Vec2 x = ax * Vec2(std::cos(xa), std::sin(xa));
    const double target = blo + (bhi - blo) * u[2];
    const auto th = xi_angle_for_beta(f, x, target);
    if (!th) continue;
    const double nxi = s.r * std::pow(radial_factor, u[3]);
    const PhasePoint pt{x, nxi * Vec2(std::cos(*th), std::sin(*th))};
    if (!region_contains(s, &f, pt)) continue;
    out.push_back(pt);
  }
  return out;
}

// constructive samples of the mass-shell incoming/outgoing region intersected
// with a time half-space {sign_t * t >= 0}; every point is re-checked by the
// membership predicate
inline std::vector<PhasePoint> sample_mass_shell(const RegionSpec& s, long count, int sign_t,
                                                 unsigned seed = 1, double radial_factor = 8.0) {
  s.validate();
  require(s.kind == RegionKind::MassShellIncoming || s.kind == RegionKind::MassShellOutgoing,
          ErrorKind::Config, "sample_mass_shell drives mass-shell kinds");
  const bool incoming = (s.kind == RegionKind::MassShellIncoming);
  std::vector<PhasePoint> out;
  out.reserve(count);
  HaltonStream hs(seed, 7);
  double u[7];
  long tries = 0;
  while (static_cast<long>(out.size()) < count) {
    require(++tries < 400 * count + 1000, ErrorKind::Domain, "mass-shell sampler starved");
    hs.next(u);
    const double eta = (u[0] < 0.5 ? -1.0 : 1.0) * s.m0 * std::pow(radial_factor, 2.0 * u[1] - 1.0);
    const double w = sq(eta) + sq(s.m0);
    // |tau^2 - w| < eps |xi|^2 solved exactly for tau^2 = w (1 + v)
    const double vp = s.eps * (1.0 + sq(eta) / w) / (1.0 + s.eps);
    const double vm = s.eps * (1.0 + sq(eta) / w) / (1.0 - s.eps);
    const double v = (-vp + (vp + std::min(vm, 4.0)) * u[2]) * (1.0 - 1e-9);
    const double tau = (u[3] < 0.5 ? -1.0 : 1.0) * std::sqrt(w * (1.0 + v));
    const Vec2 xi(tau, eta);
    const Vec2 dir = xi_tilde(xi).normalized() * (incoming ? -1.0 : 1.0);
    // cos cap around dir: cos offset uniform in (1-eps, 1]
    const double c = 1.0 - s.eps * u[4] * (1.0 - 1e-9);
    const double ang = std::atan2(dir[1], dir[0]) + (u[5] < 0.5 ? -1.0 : 1.0) * std::acos(c);
    const double ax = s.R * std::pow(radial_factor, u[6]);
    const PhasePoint pt{ax * Vec2(std::cos(ang), std::sin(ang)), xi};
    if (sign_t * pt.x[0] < 0.0) continue;
    if (!region_contains(s, nullptr, pt)) continue;
    out.push_back(pt);
  }
  return out;
}

struct EllipticityReport {
  double c1 = 0.0;  // min of (-sign) tau / |xi|
  double c2 = 0.0;  // min of (-sign) t / |x|
  double c3 = 0.0;  // min of |tau - sign*sqrt(eta^2+m0^2)| / (1+|xi|)
  bool pass = false;
  double eps_threshold = 0.0;  // largest eps for which the constants stay positive
  long samples = 0;
};

namespace detail {
inline EllipticityReport ellipticity_at(double eps, double R, double m0, long count,
                                        unsigned seed) {
  RegionSpec s;
  s.kind = RegionKind::MassShellIncoming;
  s.eps = eps;
  s.R = R;
  s.m0 = m0;
  EllipticityReport rep;
  rep.c1 = rep.c2 = rep.c3 = std::numeric_limits<double>::infinity();
  for (int sign : {+1, -1}) {
    // region intersected with {-sign * t >= 0}; claims carry the matching sign
    const auto pts = sample_mass_shell(s, count / 2, -sign, seed + (sign > 0 ? 0 : 1000));
    for (const PhasePoint& pt : pts) {
      const double t = pt.x[0], tau = pt.xi[0], eta = pt.xi[1];
      const double nxi = pt.xi.norm(), nx = pt.x.norm();
      rep.c1 = std::min(rep.c1, -sign * tau / nxi);
      rep.c2 = std::min(rep.c2, -sign * t / nx);
      rep.c3 = std::min(rep.c3, std::abs(tau - sign * std::sqrt(sq(eta) + sq(m0))) / (1.0 + nxi));
      ++rep.samples;
    }
  }
  rep.pass = rep.c1 > 0.0 && rep.c2 > 0.0 && rep.c3 > 0.0;
  return rep;
}
}  // namespace detail

// constants of the incoming-region ellipticity bound for D_t -+ sqrt(-lap+m0^2),
// with the smallness threshold in eps located by bisection
inline EllipticityReport incoming_ellipticity_check(double eps, double R, double m0,
                                                    long sample_count, unsigned seed = 1) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::Config, "eps must lie in (0,1)");
  EllipticityReport rep = detail::ellipticity_at(eps, R, m0, sample_count, seed);
  double lo = 0.0, hi = 1.0 - 1e-6;
  const long probe = std::min<long>(sample_count, 2000);
  for (int it = 0; it < 20; ++it) {
    const double mid = 0.5 * (lo + hi);
    (detail::ellipticity_at(mid, R, m0, probe, seed).pass ? lo : hi) = mid;
  }
  rep.eps_threshold = lo;
  return rep;
}

}  // namespace amwave
