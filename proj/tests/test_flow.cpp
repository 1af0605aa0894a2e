#include <catch2/catch_amalgamated.hpp>

#include "amwave/flow.hpp"

using namespace amwave;

namespace {
MetricParams bump_params(double amp = 0.1) {
  MetricParams p;
  p.amplitude = amp;
  p.center = Vec2(1.0, -2.0);
  p.width = 2.0;
  p.mu = 1.5;
  return p;
}
}  // namespace

TEST_CASE("flat null geodesics are straight lines") {
  const InverseMetricField flat = make_flat();
  const PhasePoint seed{Vec2(0.0, 0.0), Vec2(1.0, 1.0)};
  const PhaseTrajectory tr = integrate_flow(flat, seed, 0.0, 3.0);
  REQUIRE(tr.samples.size() > 2);
  for (const FlowSample& s : tr.samples) {
    CHECK((s.z.x - Vec2(-2.0 * s.t, 2.0 * s.t)).norm() < 1e-9);
    CHECK((s.z.xi - seed.xi).norm() < 1e-12);
  }
}

TEST_CASE("symbol is conserved along trajectories") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const PhasePoint seed{Vec2(0.5, 0.5), Vec2(1.1, 0.9)};
  FlowOptions o;
  const PhaseTrajectory tr = integrate_flow(f, seed, 0.0, 10.0, o);
  CHECK(tr.max_drift <= o.drift_tol * (1.0 + seed.xi.squaredNorm()));
  CHECK(tr.samples.front().z.x == seed.x);
  CHECK(tr.samples.front().z.xi == seed.xi);
}

TEST_CASE("flow scaling law in xi") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const PhasePoint seed{Vec2(0.2, -0.4), Vec2(0.8, 1.3)};
  for (double lam : {2.0, 0.5}) {
    const PhasePoint a = flow_map(f, {seed.x, lam * seed.xi}, 1.5);
    const PhasePoint b = flow_map(f, seed, lam * 1.5);
    CHECK((a.x - b.x).norm() < 1e-7);
    CHECK((a.xi - lam * b.xi).norm() < 1e-7);
  }
}

TEST_CASE("self-convergence against a tighter tolerance run") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const PhasePoint seed{Vec2(0.0, 1.0), Vec2(1.0, -0.7)};
  FlowOptions coarse;
  coarse.rtol = 1e-8;
  coarse.atol = 1e-10;
  FlowOptions fine;
  fine.rtol = 1e-10;
  fine.atol = 1e-12;
  const PhasePoint a = flow_map(f, seed, 6.0, coarse);
  const PhasePoint b = flow_map(f, seed, 6.0, fine);
  CHECK((a.x - b.x).norm() + (a.xi - b.xi).norm() < 10.0 * 1e-6);
}

TEST_CASE("convexity radius on flat and bump fields") {
  const ConvexityReport flat = check_convexity(make_flat(), 10.0, 8, 12);
  CHECK(flat.C_conv == Catch::Approx(8.0).epsilon(1e-12));
  CHECK(flat.R0 == Catch::Approx(10.0 / 8).epsilon(1e-12));

  const ConvexityReport bump = check_convexity(make_perturbed_minkowski(bump_params()), 20.0);
  CHECK(bump.R0 > 0.0);
  CHECK(bump.C_conv > 0.0);
}

TEST_CASE("radius is nondecreasing after an outward crossing") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const ConvexityReport conv = check_convexity(f, 20.0);
  const PhasePoint seed{Vec2(0.3, 0.1), Vec2(1.0, 0.95)};
  const PhaseTrajectory tr = integrate_flow(f, seed, 0.0, 30.0);
  double prev = -1.0;
  bool crossed = false;
  for (const FlowSample& s : tr.samples) {
    const double r = s.z.x.norm();
    if (crossed) CHECK(r >= prev - 1e-9);
    if (!crossed && r >= conv.R0 && escaped(f, s.z, conv.R0, 1.0)) crossed = true;
    prev = r;
  }
  CHECK(crossed);
}

TEST_CASE("flat certification escapes on straight lines") {
  CertifyOptions co;
  co.n_xshell = 4;
  co.n_xangle = 8;
  co.n_xiarc = 2;
  const NontrappingCertificate cert = certify_nontrapping(make_flat(), 10.0, co);
  CHECK(cert.lambda0 == Catch::Approx(co.lambda0_init));
  CHECK(cert.seed_count > 50);
  // slowest unit-shell seed needs about (2 R_esc) / min|v| with |v| ~ 2
  CHECK(cert.max_escape_time < 25.0);
  CHECK(cert.T > cert.max_escape_time);
}

TEST_CASE("bump certification passes with finite horizon") {
  CertifyOptions co;
  co.n_xshell = 3;
  co.n_xangle = 6;
  co.n_xiarc = 1;
  const NontrappingCertificate cert =
      certify_nontrapping(make_perturbed_minkowski(bump_params()), 8.0, co);
  CHECK(cert.T > 0.0);
  CHECK(cert.R >= 8.0);
  CHECK(cert.C_conv > 0.0);
}

TEST_CASE("tight time budget reports a certification timeout") {
  CertifyOptions co;
  co.n_xshell = 3;
  co.n_xangle = 6;
  co.n_xiarc = 1;
  co.T_max = 2.0;  // below the transit time of any interior seed
  co.max_bisect = 1;
  CHECK_THROWS_MATCHES(certify_nontrapping(make_perturbed_minkowski(bump_params(0.4)), 8.0, co),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.kind == ErrorKind::CertificationTimeout;
                       }));
}

TEST_CASE("past incoming crossing on the flat field") {
  const InverseMetricField flat = make_flat();
  const PhasePoint seed{Vec2(0.0, 0.0), Vec2(1.0, 1.0)};
  FlowOptions o;
  o.h_max = 0.05;  // event located at sample resolution
  const double T = past_incoming_time(flat, seed, 0.1, 5.0, 500.0, o);
  // backward ray z(-T) = (2T, -2T) is exactly antiparallel to xi-tilde
  CHECK(T == Catch::Approx(5.0 / (2.0 * std::sqrt(2.0))).epsilon(0.25));
  CHECK(beta0(Vec2(2.0 * T, -2.0 * T), seed.xi) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("past incoming time grows with stricter parameters") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const PhasePoint seed{Vec2(0.5, 0.2), Vec2(1.0, 0.9)};
  const double loose = past_incoming_time(f, seed, 0.5, 5.0);
  const double strict = past_incoming_time(f, seed, 0.01, 50.0);
  CHECK(loose <= strict);
}
