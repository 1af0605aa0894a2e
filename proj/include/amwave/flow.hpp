#pragma once

#include <functional>
#include <vector>

#include "amwave/halton.hpp"
#include "amwave/metric.hpp"

namespace amwave {

struct FlowOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double drift_tol = 1e-9;  // allowed |p - p_seed|, relative to (1 + |xi_seed|^2)
  double h_init = 1e-3;
  double h_max = 0.5;
  long max_steps = 400000;
};

// Dormand-Prince 5(4). Observer is called after every accepted step and may
// return false to stop early (event detection).
template <int N, class Rhs, class Obs>
inline void rk45(Rhs rhs, Eigen::Matrix<double, N, 1> y, double t0, double t1,
                 const FlowOptions& o, Obs observer) {
  using St = Eigen::Matrix<double, N, 1>;
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  double t = t0;
  double h = std::min(o.h_init, std::abs(t1 - t0)) * dir;
  St k1 = rhs(t, y);
  long steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > o.max_steps) fail(ErrorKind::StepFailure, "rk45 step budget exhausted");
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    const St k2 = rhs(t + h / 5.0, y + h * (k1 / 5.0));
    const St k3 = rhs(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const St k4 =
        rhs(t + 4.0 * h / 5.0, y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    const St k5 = rhs(t + 8.0 * h / 9.0,
                      y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                               64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    const St k6 = rhs(t + h, y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                      46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                      5103.0 / 18656.0 * k5));
    const St y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                           2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    const St k7 = rhs(t + h, y5);
    const St y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 + 393.0 / 640.0 * k4 -
                           92097.0 / 339200.0 * k5 + 187.0 / 2100.0 * k6 + k7 / 40.0);
    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      const double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
    }
    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      if (!observer(t, y)) return;
    }
    const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
    h *= fac;
    if (std::abs(h) > o.h_max) h = o.h_max * dir;
    require(std::abs(h) > 1e-14, ErrorKind::StepFailure,
            "rk45 step underflow at t=" + std::to_string(t));
  }
}

inline Eigen::Vector4d pack(const PhasePoint& p) {
  Eigen::Vector4d y;
  y << p.x[0], p.x[1], p.xi[0], p.xi[1];
  return y;
}
inline PhasePoint unpack(const Eigen::Vector4d& y) {
  return {Vec2(y[0], y[1]), Vec2(y[2], y[3])};
}

struct FlowSample {
  double t;
  PhasePoint z;
};

struct PhaseTrajectory {
  std::vector<FlowSample> samples;  // includes the seed at t0
  double p_seed = 0.0;
  double max_drift = 0.0;  // max |p(z) - p_seed| over samples
};

namespace detail {
template <class Obs>
inline void flow_once(const InverseMetricField& f, const PhasePoint& seed, double t0, double t1,
                      const FlowOptions& o, Obs obs) {
  auto rhs = [&f](double, const Eigen::Vector4d& y) {
    const HamiltonField h = hamilton_field(f, unpack(y));
    Eigen::Vector4d d;
    d << h.dx[0], h.dx[1], h.dxi[0], h.dxi[1];
    return d;
  };
  rk45<4>(rhs, pack(seed), t0, t1, o, obs);
}
}  // namespace detail

// integrates the Hamilton flow with p-drift control: if the conserved symbol
// drifts past drift_tol the run is repeated at tighter tolerance
template <class Obs>
inline double integrate_flow_observed(const InverseMetricField& f, const PhasePoint& seed,
                                      double t0, double t1, FlowOptions o, Obs obs) {
  const double p_seed = eval_symbol(f, seed);
  const double scale = 1.0 + seed.xi.squaredNorm();
  for (int attempt = 0; attempt < 3; ++attempt) {
    double drift = 0.0;
    bool stopped = false;
    detail::flow_once(f, seed, t0, t1, o, [&](double t, const Eigen::Vector4d& y) {
      const PhasePoint z = unpack(y);
      drift = std::max(drift, std::abs(eval_symbol(f, z) - p_seed));
      if (!obs(t, z)) {
        stopped = true;
        return false;
      }
      return true;
    });
    if (drift <= o.drift_tol * scale || stopped) return drift;
    o.rtol *= 1e-2;
    o.atol *= 1e-2;
  }
  fail(ErrorKind::FlowDrift, "symbol drift exceeds tolerance after refinement");
}

inline PhaseTrajectory integrate_flow(const InverseMetricField& f, const PhasePoint& seed,
                                      double t0, double t1, const FlowOptions& o = {}) {
  PhaseTrajectory tr;
  tr.p_seed = eval_symbol(f, seed);
  tr.samples.push_back({t0, seed});
  tr.max_drift = integrate_flow_observed(f, seed, t0, t1, o, [&](double t, const PhasePoint& z) {
    tr.samples.push_back({t, z});
    return true;
  });
  return tr;
}

// endpoint of the flow map Phi_t
inline PhasePoint flow_map(const InverseMetricField& f, const PhasePoint& seed, double t,
                           const FlowOptions& o = {}) {
  if (t == 0.0) return seed;
  PhasePoint out = seed;
  integrate_flow_observed(f, seed, 0.0, t, o, [&](double, const PhasePoint& z) {
    out = z;
    return true;
  });
  return out;
}

struct ConvexityReport {
  double R0 = 0.0;      // radius past which H_p^2 |x|^2 is positive on the unit shell
  double C_conv = 0.0;  // min of H_p^2 |x|^2 / |xi|^2 over |x| >= R0 shells
  std::vector<std::pair<double, double>> shell_min;  // (radius, min value)
};

inline ConvexityReport check_convexity(const InverseMetricField& f, double R_max, int n_shell = 24,
                                       int n_angle = 32) {
  ConvexityReport rep;
  for (int k = 0; k < n_shell; ++k) {
    const double r = R_max * (k + 1) / n_shell;
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_angle; ++i)
      for (int j = 0; j < n_angle; ++j) {
        const double a = 2.0 * pi * i / n_angle, b = 2.0 * pi * j / n_angle;
        const PhasePoint pt{r * Vec2(std::cos(a), std::sin(a)), Vec2(std::cos(b), std::sin(b))};
        m = std::min(m, hp2_absx2(f, pt));
      }
    rep.shell_min.push_back({r, m});
  }
  // smallest radius from which every shell outward is positive
  double R0 = -1.0;
  for (int k = static_cast<int>(rep.shell_min.size()) - 1; k >= 0; --k) {
    if (rep.shell_min[k].second > 0.0)
      R0 = rep.shell_min[k].first;
    else
      break;
  }
  require(R0 > 0.0, ErrorKind::CertificationTimeout, "no convexity radius below R_max");
  rep.R0 = R0;
  rep.C_conv = std::numeric_limits<double>::infinity();
  for (auto& [r, m] : rep.shell_min)
    if (r >= R0) rep.C_conv = std::min(rep.C_conv, m);
  return rep;
}

// xi angles on the unit shell with |p(x, xi(theta))| <= lam, found by a scan
// plus bisection onto the null directions of the quadratic form
inline std::vector<double> energy_shell_angles(const InverseMetricField& f, const Vec2& x,
                                               double lam, int per_arc = 6, int scan = 720) {
  std::vector<double> hit;
  auto pth = [&](double th) { return eval_symbol(f, {x, Vec2(std::cos(th), std::sin(th))}); };
  double prev = pth(0.0);
  std::vector<double> roots;
  for (int i = 1; i <= scan; ++i) {
    const double th = 2.0 * pi * i / scan;
    const double cur = pth(th);
    if (prev == 0.0 || prev * cur < 0.0) {
      double lo = 2.0 * pi * (i - 1) / scan, hi = th;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pth(lo) * pth(mid) <= 0.0 ? hi : lo) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  for (double th0 : roots) {
    hit.push_back(th0);
    // widen around the root while |p| stays below lam
    for (int s = 1; s <= per_arc; ++s) {
      for (double sgn : {-1.0, 1.0}) {
        const double th = th0 + sgn * s * 0.01;
        if (std::abs(pth(th)) < lam) hit.push_back(th);
      }
    }
  }
  return hit;
}

struct NontrappingCertificate {
  double lambda0 = 0.0;
  double T = 0.0;  // unit-shell escape horizon
  double R = 0.0;
  double R0 = 0.0;
  double C_conv = 0.0;
  long seed_count = 0;
  double max_escape_time = 0.0;
};

struct CertifyOptions {
  double lambda0_init = 0.1;
  double T_max = 200.0;
  int n_xshell = 8;
  int n_xangle = 16;
  int n_xiarc = 6;  // seeds kept around each null direction
  int max_bisect = 6;
  FlowOptions flow;
};

// escape event: |z| beyond the convexity radius with outward radial motion in
// the direction of integration; convexity then keeps |z| growing forever
inline bool escaped(const InverseMetricField& f, const PhasePoint& z, double R_esc, double dir) {
  if (z.x.norm() < R_esc) return false;
  const Vec2 v = 2.0 * (f.g(z.x) * z.xi);
  return dir * z.x.dot(v) >= 0.0;
}

inline NontrappingCertificate certify_nontrapping(const InverseMetricField& f, double R,
                                                  const CertifyOptions& co = {}) {
  const ConvexityReport conv = check_convexity(f, std::max(2.0 * R, 10.0));
  const double R_esc = std::max(R, conv.R0);
  double lam = co.lambda0_init;

  for (int pass = 0; pass <= co.max_bisect; ++pass) {
    std::vector<PhasePoint> seeds;
    for (int sr = 0; sr <= co.n_xshell; ++sr) {
      const double r = R * sr / co.n_xshell;
      const int na = (sr == 0) ? 1 : co.n_xangle;
      for (int ia = 0; ia < na; ++ia) {
        const double a = 2.0 * pi * ia / na;
        const Vec2 x = r * Vec2(std::cos(a), std::sin(a));
        for (double th : energy_shell_angles(f, x, lam, co.n_xiarc))
          seeds.push_back({x, Vec2(std::cos(th), std::sin(th))});
      }
    }

    double worst = 0.0;
    bool timeout = false;
    for (const PhasePoint& seed : seeds) {
      for (double dir : {1.0, -1.0}) {
        bool done = false;
        integrate_flow_observed(f, seed, 0.0, dir * co.T_max, co.flow,
                                [&](double t, const PhasePoint& z) {
                                  if (escaped(f, z, R_esc, dir)) {
                                    worst = std::max(worst, std::abs(t));
                                    done = true;
                                    return false;
                                  }
                                  return true;
                                });
        if (!done) {
          timeout = true;
          break;
        }
      }
      if (timeout) break;
    }
    if (!timeout) {
      NontrappingCertificate c;
      c.lambda0 = lam;
      c.max_escape_time = worst;
      c.T = 1.05 * worst;
      c.R = R_esc;
      c.R0 = conv.R0;
      c.C_conv = conv.C_conv;
      c.seed_count = static_cast<long>(seeds.size());
      return c;
    }
    lam *= 0.5;
  }
  fail(ErrorKind::CertificationTimeout, "seeds failed to escape for every tried lambda0");
}

// first backward time at which the trajectory is outside R and beta-incoming
inline double past_incoming_time(const InverseMetricField& f, const PhasePoint& seed, double eps,
                                 double R, double T_max = 500.0, const FlowOptions& o = {}) {
  double hit = -1.0;
  integrate_flow_observed(f, seed, 0.0, -T_max, o, [&](double t, const PhasePoint& z) {
    if (z.x.norm() > R && beta(f, z) < -1.0 + eps) {
      hit = std::abs(t);
      return false;
    }
    return true;
  });
  require(hit > 0.0, ErrorKind::EventDetectionFailure, "no past-incoming crossing before T_max");
  return hit;
}

}  // namespace amwave
