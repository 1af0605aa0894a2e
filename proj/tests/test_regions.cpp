#include <catch2/catch_amalgamated.hpp>

#include "amwave/cutoffs.hpp"
#include "amwave/weights.hpp"

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

TEST_CASE("xi angle root finding hits the beta target") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const Vec2 x(5.0, -3.0);
  for (double target : {-0.95, -0.3, 0.0, 0.7}) {
    const auto th = xi_angle_for_beta(f, x, target);
    REQUIRE(th.has_value());
    const PhasePoint pt{x, Vec2(std::cos(*th), std::sin(*th))};
    CHECK(beta(f, pt) == Catch::Approx(target).margin(1e-9));
  }
}

TEST_CASE("region sampler output satisfies the membership predicate") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  RegionSpec s;
  s.kind = RegionKind::Mid;
  s.s1 = -0.6;
  s.s2 = -0.1;
  s.r = 1.0;
  s.R = 6.0;
  const auto pts = sample_region(s, f, 200, 3);
  REQUIRE(pts.size() == 200);
  for (const PhasePoint& pt : pts) {
    CHECK(region_contains(s, &f, pt));
    const double b = beta(f, pt);
    CHECK(b >= s.s1 - 1e-9);
    CHECK(b <= s.s2 + 1e-9);
  }
  // deterministic for a fixed seed
  const auto again = sample_region(s, f, 200, 3);
  CHECK((again[17].x - pts[17].x).norm() == 0.0);
  CHECK((again[17].xi - pts[17].xi).norm() == 0.0);
}

TEST_CASE("mass shell sampler stays on the shell and inside the cap") {
  RegionSpec s;
  s.kind = RegionKind::MassShellIncoming;
  s.eps = 0.05;
  s.R = 1.0;
  s.m0 = 1.0;
  const auto fwd = sample_mass_shell(s, 300, +1, 5);
  REQUIRE(fwd.size() == 300);
  for (const PhasePoint& pt : fwd) {
    CHECK(region_contains(s, nullptr, pt));
    CHECK(pt.x[0] >= 0.0);
    CHECK(std::abs(p0(pt.xi) + 1.0) < s.eps * pt.xi.squaredNorm());
    CHECK(beta0(pt.x, pt.xi) < -1.0 + s.eps);
    // the tight cap couples the time half-space to the sign of tau
    CHECK(pt.xi[0] > 0.0);
  }
  const auto bwd = sample_mass_shell(s, 300, -1, 5);
  for (const PhasePoint& pt : bwd) {
    CHECK(pt.x[0] <= 0.0);
    CHECK(pt.xi[0] < 0.0);
  }
}

TEST_CASE("on-shell forward-time point is excluded by the direction cap") {
  // tau on the +mass shell with t <= 0 forces x parallel to xi-tilde, beta0 = +1
  const double eta = 0.8, tau = std::sqrt(eta * eta + 1.0);
  const Vec2 xi(tau, eta);
  const PhasePoint pt{3.0 * Vec2(-tau, eta), xi};  // t = -3 tau <= 0
  CHECK(beta0(pt.x, pt.xi) == Catch::Approx(1.0).margin(1e-12));
  RegionSpec s;
  s.kind = RegionKind::MassShellIncoming;
  s.eps = 0.05;
  s.R = 1.0;
  s.m0 = 1.0;
  CHECK_FALSE(region_contains(s, nullptr, pt));
}

TEST_CASE("incoming ellipticity constants") {
  SECTION("small eps yields positive constants") {
    const EllipticityReport rep = incoming_ellipticity_check(0.05, 1.0, 1.0, 2000);
    CHECK(rep.pass);
    CHECK(rep.c1 > 0.0);
    CHECK(rep.c2 > 0.0);
    CHECK(rep.c3 > 0.0);
    CHECK(rep.eps_threshold > 0.05);
    CHECK(rep.eps_threshold < 1.0);
  }
  SECTION("wide cap violates the bounds") {
    const EllipticityReport rep = incoming_ellipticity_check(0.9, 1.0, 1.0, 2000);
    CHECK_FALSE(rep.pass);
  }
}

TEST_CASE("weight reduces to the plain Sobolev weight at delta zero") {
  WeightSpec s;
  s.k = 1.3;
  s.l = -0.7;
  s.kappa = 0.4;
  s.N = 2.0;
  s.delta = 0.0;
  const PhasePoint pt{Vec2(1.5, -2.5), Vec2(0.3, 2.1)};
  const double expected = std::pow(jap(pt.xi), s.k - 0.5) * std::pow(jap(pt.x), s.l + 0.5);
  CHECK(weight_lambda(s, pt) == Catch::Approx(expected).epsilon(1e-15));
}

TEST_CASE("weight bracket matches the flat closed form") {
  // flat, delta = 0: H_p lambda^2 = (2l+1) lambda^2 x.v / <x>^2 with v = 2 xi-tilde
  const InverseMetricField flat = make_flat();
  WeightSpec s;
  s.k = 0.8;
  s.l = 0.6;
  s.kappa = 0.3;
  s.N = 1.0;
  s.delta = 0.0;
  const PhasePoint pt{Vec2(3.0, 1.0), Vec2(0.5, -1.2)};
  const double lam2 = sq(weight_lambda(s, pt));
  const double expected =
      lam2 * (2.0 * s.l + 1.0) * pt.x.dot(2.0 * xi_tilde(pt.xi)) / (1.0 + pt.x.squaredNorm());
  CHECK(hp_weight(flat, s, pt) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("weight decay bounds on the asymptotic regions") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  RegionSpec reg;
  reg.r = 1.0;
  reg.R = 30.0;
  reg.eps = 0.2;

  WeightSpec win;
  win.k = 1.0;
  win.l = 0.5;
  win.kappa = 0.4;
  win.N = 1.0;

  SECTION("incoming region decays for l above -1/2") {
    reg.kind = RegionKind::Incoming;
    const WeightBoundReport rep =
        verify_weight_bound(f, win, WeightBoundCase::DecayIncoming, reg, 500);
    CHECK(rep.pass);
    CHECK(rep.constant > 0.0);
  }
  SECTION("outgoing region decays for l below -1/2") {
    reg.kind = RegionKind::Outgoing;
    WeightSpec wout = win;
    wout.l = -1.0;
    const WeightBoundReport rep =
        verify_weight_bound(f, wout, WeightBoundCase::DecayOutgoing, reg, 500);
    CHECK(rep.pass);
    CHECK(rep.constant > 0.0);
  }
  SECTION("global upper bound is finite") {
    reg.kind = RegionKind::Incoming;
    const WeightBoundReport rep =
        verify_weight_bound(f, win, WeightBoundCase::UpperAnywhere, reg, 500);
    CHECK(rep.pass);
    CHECK(std::isfinite(rep.constant));
  }
  SECTION("violated preconditions are rejected") {
    reg.kind = RegionKind::Incoming;
    WeightSpec bad = win;
    bad.l = -1.0;
    CHECK_THROWS_MATCHES(verify_weight_bound(f, bad, WeightBoundCase::DecayIncoming, reg, 10),
                         Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.kind == ErrorKind::Domain;
                         }));
  }
}

TEST_CASE("accposi positivity") {
  SECTION("flat field constant near the closed form") {
    const AccposiReport rep = verify_accposi(make_flat(), 0.1, 10.0, 2000);
    CHECK(rep.pass);
    // min of |v| (1 - beta^2) <x>/|x| over the band is 2 (1 - 0.81)
    CHECK(rep.C4 > 0.3);
    CHECK(rep.C4 < 0.5);
  }
  SECTION("bump field positive at moderate radius") {
    const AccposiReport rep = verify_accposi(make_perturbed_minkowski(bump_params()), 0.1, 10.0);
    CHECK(rep.pass);
  }
}

TEST_CASE("cutoff families satisfy the bracket inequality") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());

  SECTION("mid case with a negative band needs no radius term") {
    CutoffParams p;
    p.cs = CutoffCase::Mid;
    p.beta1 = -0.5;
    p.beta2 = -0.2;
    p.eps = 0.05;
    p.r = 1.0;
    p.R = 8.0;
    const auto [fam, rep] = build_cutoff_family(f, p, 1500);
    CHECK(rep.pass);
    CHECK(rep.violations == 0);
    CHECK(fam.M() >= 1.0);
    const auto pts = sample_region(fam.outer_region(), f, 50, 11);
    for (const PhasePoint& pt : pts) CHECK(fam.b2(pt) == 0.0);
  }

  SECTION("incoming case needs only the frequency term") {
    CutoffParams p;
    p.cs = CutoffCase::In;
    p.eps = 0.1;
    p.r = 1.0;
    p.R = 12.0;
    const auto [fam, rep] = build_cutoff_family(f, p, 1500);
    CHECK(rep.pass);
    CHECK(rep.violations == 0);
    // elliptic (identically one) on the inner region
    for (const PhasePoint& pt : sample_region(fam.inner_region(), f, 50, 13)) {
      CHECK(fam.a(pt) == Catch::Approx(1.0).margin(1e-12));
      CHECK(fam.b1(pt) == 0.0);
    }
  }

  SECTION("outgoing case holds with the edge and radius terms") {
    CutoffParams p;
    p.cs = CutoffCase::Out;
    p.eps = 0.1;
    p.r = 1.0;
    p.R = 8.0;
    const auto [fam, rep] = build_cutoff_family(f, p, 1500);
    CHECK(rep.pass);
    CHECK(rep.violations == 0);
  }

  SECTION("support containment on a broad sample") {
    CutoffParams p;
    p.cs = CutoffCase::Mid;
    p.beta1 = -0.4;
    p.beta2 = 0.3;
    p.eps = 0.05;
    p.r = 1.0;
    p.R = 8.0;
    const auto [fam, rep] = build_cutoff_family(f, p, 1000);
    CHECK(rep.pass);
    const RegionSpec outer = fam.outer_region();
    HaltonStream hs(17, 4);
    double u[4];
    for (int i = 0; i < 2000; ++i) {
      hs.next(u);
      const PhasePoint pt{Vec2(60.0 * u[0] - 30.0, 60.0 * u[1] - 30.0),
                          Vec2(8.0 * u[2] - 4.0, 8.0 * u[3] - 4.0)};
      if (pt.x.norm() < 1e-6 || pt.xi.norm() < 1e-6) continue;
      if (fam.a(pt) != 0.0) {
        RegionSpec loose = outer;
        loose.margin = 1e-7;
        CHECK(region_contains(loose, &f, pt));
      }
    }
  }
}
