#pragma once

#include "amwave/regions.hpp"

namespace amwave {

// lambda = <xi>^{k-1/2} <delta xi>^{-|k|-N-1} <x>^{l+1/2} <delta x>^{-kappa}
struct WeightSpec {
  double k = 0.0;
  double l = 0.0;
  double kappa = 1.0;
  double N = 1.0;
  double delta = 0.0;  // regularization strength in [0, 1]

  void validate() const {
    require(kappa > 0.0 && N > 0.0, ErrorKind::Config, "weight needs kappa, N > 0");
    require(delta >= 0.0 && delta <= 1.0, ErrorKind::Config, "weight delta must lie in [0,1]");
  }
};

inline double weight_lambda(const WeightSpec& s, const PhasePoint& pt) {
  s.validate();
  return std::pow(jap(pt.xi), s.k - 0.5) *
         std::pow(jap(s.delta * pt.xi.norm()), -std::abs(s.k) - s.N - 1.0) *
         std::pow(jap(pt.x), s.l + 0.5) * std::pow(jap(s.delta * pt.x.norm()), -s.kappa);
}

// H_p(lambda^2) from the closed-form gradient of lambda^2
inline double hp_weight(const InverseMetricField& f, const WeightSpec& s, const PhasePoint& pt) {
  s.validate();
  const double lam2 = sq(weight_lambda(s, pt));
  const double d2 = sq(s.delta);
  const Vec2 dlog_x =
      ((2.0 * s.l + 1.0) / (1.0 + pt.x.squaredNorm()) -
       2.0 * s.kappa * d2 / (1.0 + d2 * pt.x.squaredNorm())) *
      pt.x;
  const Vec2 dlog_xi =
      ((2.0 * s.k - 1.0) / (1.0 + pt.xi.squaredNorm()) -
       2.0 * (std::abs(s.k) + s.N + 1.0) * d2 / (1.0 + d2 * pt.xi.squaredNorm())) *
      pt.xi;
  const HamiltonField h = hamilton_field(f, pt);
  return lam2 * (h.dx.dot(dlog_x) + h.dxi.dot(dlog_xi));
}

struct WeightBoundReport {
  double constant = 0.0;  // extremal value of -+ H_p(lambda^2) <x> / (<xi> lambda^2)
  bool pass = false;
  long samples = 0;
  double worst_delta = 0.0;
  PhasePoint worst{};
};

enum class WeightBoundCase {
  UpperAnywhere,   // H_p lambda^2 <=  C1 (<xi>/<x>) lambda^2 for |xi| >= r
  DecayIncoming,   // H_p lambda^2 <= -C2 (<xi>/<x>) lambda^2 on the incoming region
  DecayOutgoing,   // H_p lambda^2 <= -C3 (<xi>/<x>) lambda^2 on the outgoing region
};

// sampled extremum of the weight-derivative ratio over a region and over a
// sweep of regularization strengths; the bound constants must be uniform in
// delta, so the reported constant is the worst over the sweep
inline WeightBoundReport verify_weight_bound(const InverseMetricField& f, WeightSpec spec,
                                             WeightBoundCase cs, const RegionSpec& region,
                                             long sample_count, unsigned seed = 1) {
  if (cs == WeightBoundCase::DecayIncoming)
    require(spec.l > -0.5 && 2.0 * spec.l + 1.0 - 2.0 * spec.kappa > 0.0, ErrorKind::Domain,
            "incoming decay bound needs l > -1/2 and 2l+1 > 2 kappa");
  if (cs == WeightBoundCase::DecayOutgoing)
    require(spec.l < -0.5, ErrorKind::Domain, "outgoing decay bound needs l < -1/2");

  const double deltas[] = {0.0, 0.25, 0.5, 1.0};
  WeightBoundReport rep;
  const bool upper = (cs == WeightBoundCase::UpperAnywhere);
  rep.constant = upper ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity();
  for (double d : deltas) {
    spec.delta = d;
    std::vector<PhasePoint> pts;
    if (upper) {
      // whole space with |xi| >= r: radius spread around the region scales
      HaltonStream hs(seed, 4);
      double u[4];
      for (long i = 0; i < sample_count; ++i) {
        hs.next(u);
        const double ax = 40.0 * region.R * u[0];
        const double xa = 2.0 * pi * u[1];
        const double nxi = region.r * std::pow(8.0, u[2]);
        const double ba = 2.0 * pi * u[3];
        pts.push_back({ax * Vec2(std::cos(xa), std::sin(xa)),
                       nxi * Vec2(std::cos(ba), std::sin(ba))});
      }
    } else {
      pts = sample_region(region, f, sample_count, seed);
    }
    for (const PhasePoint& pt : pts) {
      const double lam2 = sq(weight_lambda(spec, pt));
      const double ratio = hp_weight(f, spec, pt) * jap(pt.x) / (jap(pt.xi) * lam2);
      ++rep.samples;
      const double val = upper ? ratio : -ratio;
      const bool better = upper ? (val > rep.constant) : (val < rep.constant);
      if (better) {
        rep.constant = val;
        rep.worst = pt;
        rep.worst_delta = d;
      }
    }
  }
  rep.pass = upper ? std::isfinite(rep.constant) : rep.constant > 0.0;
  return rep;
}

}  // namespace amwave
