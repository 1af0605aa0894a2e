#include <catch2/catch_amalgamated.hpp>

#include "amwave/escape.hpp"

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

EscapeParams base_params() {
  EscapeParams p;
  p.M = 4.0;
  p.L = 1.0;
  p.delta = 0.5;
  p.lambda0 = 0.1;
  p.T = 20.0;
  return p;
}
}  // namespace

TEST_CASE("radial weight integral matches numeric quadrature") {
  const EscapeFunction q(make_flat(), base_params());
  const double s = 3.0, delta = 0.5;
  double num = 0.0;
  const long n = 200000;
  const double hh = (2.0 * s - 1.0) / n;
  for (long i = 0; i < n; ++i) {
    const double r = 1.0 + (i + 0.5) * hh;
    num += hh * std::pow(r, -1.0 - delta);
  }
  CHECK(q.radial_integral(s) == Catch::Approx(num).epsilon(1e-9));
}

TEST_CASE("construction rejects exponents outside the decay window") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  auto is_domain = Catch::Matchers::Predicate<Error>(
      [](const Error& e) { return e.kind == ErrorKind::Domain; });
  EscapeParams p = base_params();
  p.delta = 0.75;  // 2*delta == mu
  CHECK_THROWS_MATCHES(EscapeFunction(f, p), Error, is_domain);
  p.delta = 0.0;
  CHECK_THROWS_MATCHES(EscapeFunction(f, p), Error, is_domain);
}

TEST_CASE("cone membership guards evaluation") {
  const EscapeFunction q(make_flat(), base_params());
  auto outside = Catch::Matchers::Predicate<Error>(
      [](const Error& e) { return e.kind == ErrorKind::OutsideCone; });
  // below the frequency floor
  CHECK_THROWS_MATCHES(q.q2({Vec2(3.0, 1.0), Vec2(0.3, 0.3)}), Error, outside);
  // too far off the characteristic set: |p| = 4 >= lambda0 |xi|^2
  CHECK_THROWS_MATCHES(q.q2({Vec2(3.0, 1.0), Vec2(2.0, 0.0)}), Error, outside);
  CHECK(q.in_cone({Vec2(3.0, 1.0), Vec2(1.0, 1.0)}));
}

TEST_CASE("far field reduces to the radial part") {
  // beyond 4M both the flow term and its prefactor vanish identically
  const EscapeParams p = base_params();
  const EscapeFunction qf(make_flat(), p);
  const PhasePoint pt{Vec2(20.0, 5.0), Vec2(1.0, 1.0)};
  REQUIRE(pt.x.norm() >= 4.0 * p.M);
  CHECK(qf.q2(pt) == 0.0);
  const double expect =
      p.L * beta0(pt.x, pt.xi) * (1.0 - std::pow(2.0 * pt.x.norm(), -p.delta)) / p.delta;
  CHECK(qf.q(pt) == Catch::Approx(expect).epsilon(1e-14));

  const EscapeFunction qb(make_perturbed_minkowski(bump_params()), p);
  CHECK(qb.q2(pt) == 0.0);
}

TEST_CASE("escape function is frequency-scale invariant") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const EscapeFunction q(f, base_params());
  std::vector<PhasePoint> pts;
  for (const Vec2& x : {Vec2(2.0, 1.0), Vec2(-6.0, 3.0)}) {
    const auto angles = energy_shell_angles(f, x, 0.05, 1);
    REQUIRE_FALSE(angles.empty());
    pts.push_back({x, 1.3 * Vec2(std::cos(angles[0]), std::sin(angles[0]))});
  }
  for (const PhasePoint& pt : pts) {
    REQUIRE(q.in_cone(pt));
    const PhasePoint scaled{pt.x, 2.0 * pt.xi};
    CHECK(q.q(scaled) == Catch::Approx(q.q(pt)).margin(1e-12));
  }
}

TEST_CASE("monotone along the flow on the flat characteristic set") {
  // at the certified weight L the bracket is positive, so q must grow along
  // every characteristic; the default L = 1 is known to fail in the band
  // between 2M and 4M where the quadrature prefactor turns on
  const InverseMetricField f = make_flat();
  CertifyOptions co;
  co.n_xshell = 4;
  co.n_xangle = 8;
  co.n_xiarc = 2;
  const NontrappingCertificate cert = certify_nontrapping(f, 10.0, co);
  const EscapeFunction q = build_escape_function(f, cert, 0.5, 4.0, 120);
  const PhasePoint seed{Vec2(7.0, -7.2), Vec2(1.0, 1.0)};
  REQUIRE(q.in_cone(seed));
  double prev = -std::numeric_limits<double>::infinity();
  double first = 0.0, last = 0.0;
  for (int i = 0; i <= 36; ++i) {
    const double t = -3.0 + 0.25 * i;
    const PhasePoint z = flow_map(f, seed, t);
    const double val = q.q(z);
    CHECK(val > prev - 1e-10);
    prev = val;
    if (i == 0) first = val;
    last = val;
  }
  CHECK(last > first + 0.1);
}

TEST_CASE("bracket oracles agree with flow differencing") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const EscapeFunction q(f, base_params());
  std::vector<PhasePoint> pts;
  for (const Vec2& x : {Vec2(2.5, 0.5), Vec2(-5.0, 4.0), Vec2(9.0, -9.0)}) {
    const auto angles = energy_shell_angles(f, x, 0.05, 1);
    REQUIRE_FALSE(angles.empty());
    pts.push_back({x, 1.2 * Vec2(std::cos(angles[0]), std::sin(angles[0]))});
  }
  for (const PhasePoint& pt : pts) {
    REQUIRE(q.in_cone(pt));
    const double exact = q.params().L * q.hp_q1(pt) + q.hp_q2_exact(pt);
    const double diff = q.hp_q_differenced(pt);
    CHECK(exact == Catch::Approx(diff).margin(1e-6 * (1.0 + std::abs(exact))));
  }
}

TEST_CASE("values stay inside the a priori bound") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const EscapeParams p = base_params();
  const EscapeFunction q(f, p);
  const double cap = p.L / p.delta + 1.5 * p.T;
  HaltonStream hs(9, 3);
  double u[3];
  long n = 0;
  while (n < 60) {
    hs.next(u);
    const Vec2 x = 16.0 * std::sqrt(u[0]) * Vec2(std::cos(2.0 * pi * u[1]), std::sin(2.0 * pi * u[1]));
    const auto angles = energy_shell_angles(f, x, 0.05, 1);
    if (angles.empty()) continue;
    const PhasePoint pt{x, (1.0 + u[2]) * Vec2(std::cos(angles[0]), std::sin(angles[0]))};
    if (!q.in_cone(pt)) continue;
    ++n;
    CHECK(std::abs(q.q(pt)) <= cap);
  }
}

TEST_CASE("bracket inequality certified on the flat cone") {
  const InverseMetricField f = make_flat();
  CertifyOptions co;
  co.n_xshell = 4;
  co.n_xangle = 8;
  co.n_xiarc = 2;
  const NontrappingCertificate cert = certify_nontrapping(f, 10.0, co);
  const EscapeFunction q = build_escape_function(f, cert, 0.5, 4.0, 120);
  const EscapeInequalityReport rep =
      verify_escape_inequality(q, 2.0 * std::max(cert.R, 8.0), 80, 2);
  CHECK(rep.pass);
  CHECK(rep.C1 > 0.0);
  CHECK(q.params().L >= 1.0);
}

TEST_CASE("bracket inequality certified on the perturbed cone") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  CertifyOptions co;
  co.n_xshell = 3;
  co.n_xangle = 6;
  co.n_xiarc = 1;
  const NontrappingCertificate cert = certify_nontrapping(f, 10.0, co);
  const EscapeFunction q = build_escape_function(f, cert, 0.5, 4.0, 80);
  const EscapeInequalityReport rep =
      verify_escape_inequality(q, 2.0 * std::max(cert.R, 8.0), 60, 3);
  CHECK(rep.pass);
  CHECK(rep.C1 > 0.0);
}
