#include <catch2/catch_amalgamated.hpp>

#include "amwave/halton.hpp"
#include "amwave/metric.hpp"

using namespace amwave;

namespace {

// Richardson-extrapolated central difference
double fd(const std::function<double(double)>& f, double h = 1e-4) {
  auto d = [&](double s) { return (f(s) - f(-s)) / (2.0 * s); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

Vec2 fd_grad(const std::function<double(const Vec2&)>& f, const Vec2& x) {
  Vec2 g;
  for (int i = 0; i < 2; ++i) {
    Vec2 e = Vec2::Zero();
    e[i] = 1.0;
    g[i] = fd([&](double s) { return f(x + s * e); });
  }
  return g;
}

// numeric H_p F from finite-difference gradients of F and the analytic field
double fd_hp(const InverseMetricField& f, const std::function<double(const PhasePoint&)>& F,
             const PhasePoint& pt) {
  const HamiltonField h = hamilton_field(f, pt);
  const Vec2 dFx = fd_grad([&](const Vec2& x) { return F({x, pt.xi}); }, pt.x);
  const Vec2 dFxi = fd_grad([&](const Vec2& xi) { return F({pt.x, xi}); }, pt.xi);
  return h.dx.dot(dFx) + h.dxi.dot(dFxi);
}

MetricParams bump_params(double amp = 0.1) {
  MetricParams p;
  p.amplitude = amp;
  p.center = Vec2(1.0, -2.0);
  p.width = 2.0;
  p.mu = 1.5;
  p.v_amplitude = 0.05;
  return p;
}

}  // namespace

TEST_CASE("bump profile derivatives match finite differences") {
  BumpProfile b;
  b.center = Vec2(0.5, -1.0);
  b.width = 1.7;
  b.mu = 1.3;
  const Vec2 x(2.0, 0.7);
  const Vec2 g = fd_grad([&](const Vec2& y) { return b.eval(y); }, x);
  CHECK((b.grad(x) - g).norm() < 1e-9);
  for (int i = 0; i < 2; ++i) {
    Vec2 e = Vec2::Zero();
    e[i] = 1.0;
    const Vec2 row = fd_grad([&](const Vec2& y) { return b.grad(y)[i]; }, x);
    CHECK((b.hess(x).row(i).transpose() - row).norm() < 1e-8);
  }
}

TEST_CASE("symbol is quadratic in xi and recovers Minkowski values") {
  const InverseMetricField flat = make_flat();
  const PhasePoint pt{Vec2(0.3, -0.2), Vec2(1.2, 0.7)};
  CHECK(eval_symbol(flat, pt) == Catch::Approx(p0(pt.xi)).margin(1e-15));
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  for (double lam : {2.0, 0.5, -3.0}) {
    const PhasePoint sc{pt.x, lam * pt.xi};
    CHECK(eval_symbol(f, sc) == Catch::Approx(lam * lam * eval_symbol(f, pt)).epsilon(1e-14));
  }
}

TEST_CASE("metric derivative tensors match finite differences") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const Vec2 x(1.4, -0.6);
  const auto dg = f.dg(x);
  for (int m = 0; m < 2; ++m)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double num = fd([&](double s) {
          Vec2 y = x;
          y[m] += s;
          return f.g(y)(i, j);
        });
        CHECK(dg[m](i, j) == Catch::Approx(num).margin(1e-9));
        for (int mm = 0; mm < 2; ++mm) {
          const double num2 = fd([&](double s) {
            Vec2 y = x;
            y[mm] += s;
            return f.dg(y)[m](i, j);
          });
          CHECK(f.d2g(x, m, mm)(i, j) == Catch::Approx(num2).margin(1e-8));
        }
      }
  const Vec2 gV = fd_grad([&](const Vec2& y) { return f.V(y); }, x);
  CHECK((f.dV(x) - gV).norm() < 1e-9);
}

TEST_CASE("hamilton field matches symbol gradients") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const PhasePoint pt{Vec2(0.8, 1.1), Vec2(-0.9, 1.4)};
  const HamiltonField h = hamilton_field(f, pt);
  const Vec2 dpxi = fd_grad([&](const Vec2& xi) { return eval_symbol(f, {pt.x, xi}); }, pt.xi);
  const Vec2 dpx = fd_grad([&](const Vec2& x) { return eval_symbol(f, {x, pt.xi}); }, pt.x);
  CHECK((h.dx - dpxi).norm() < 1e-9);
  CHECK((h.dxi + dpx).norm() < 1e-9);
  CHECK((grad_x_symbol(f, pt) - dpx).norm() < 1e-9);
}

TEST_CASE("flat beta bracket closed form") {
  const InverseMetricField flat = make_flat();
  const PhasePoint pt{Vec2(3.0, -1.0), Vec2(0.7, 1.9)};
  const double b0 = beta0(pt.x, pt.xi);
  CHECK(beta(flat, pt) == Catch::Approx(b0).margin(1e-14));
  const Vec2 v = 2.0 * xi_tilde(pt.xi);
  const double expected = v.norm() / pt.x.norm() * (1.0 - b0 * b0);
  CHECK(hp_beta(flat, pt) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("beta bracket matches finite differences on the bump field") {
  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  for (const PhasePoint& pt : {PhasePoint{Vec2(2.5, 1.0), Vec2(1.0, 0.3)},
                               PhasePoint{Vec2(-4.0, 2.0), Vec2(-0.5, 1.2)}}) {
    const double num = fd_hp(f, [&](const PhasePoint& q) { return beta(f, q); }, pt);
    CHECK(hp_beta(f, pt) == Catch::Approx(num).margin(1e-7));
  }
}

TEST_CASE("double bracket of |x|^2") {
  const InverseMetricField flat = make_flat();
  const PhasePoint pt{Vec2(1.0, 2.0), Vec2(0.4, -1.3)};
  CHECK(hp2_absx2(flat, pt) == Catch::Approx(8.0 * pt.xi.squaredNorm()).epsilon(1e-13));

  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const auto first = [&](const PhasePoint& q) { return 2.0 * q.x.dot(2.0 * (f.g(q.x) * q.xi)); };
  for (const PhasePoint& p : {PhasePoint{Vec2(1.5, -0.7), Vec2(1.0, 0.2)},
                              PhasePoint{Vec2(0.4, 0.9), Vec2(-0.8, 1.1)}}) {
    CHECK(hp2_absx2(f, p) == Catch::Approx(fd_hp(f, first, p)).margin(1e-6));
  }
}

TEST_CASE("conjugate symbol values and bracket") {
  CHECK(conjugate_symbol({Vec2(0.0, 0.0), Vec2(1.0, 2.0)}) == 0.0);
  CHECK(conjugate_symbol({Vec2(1.0, 0.0), Vec2(1.0, 0.0)}) == Catch::Approx(-0.5));
  HaltonStream hs(3, 4);
  double u[4];
  for (int i = 0; i < 200; ++i) {
    hs.next(u);
    const PhasePoint pt{Vec2(8.0 * u[0] - 4.0, 8.0 * u[1] - 4.0),
                        Vec2(4.0 * u[2] - 2.0, 4.0 * u[3] - 2.0)};
    CHECK(std::abs(conjugate_symbol(pt)) <= pt.x.norm() + 1e-14);
  }

  // flat bracket: H_{p0} a = 2|xi|^2 / (1 + |xi|^2)
  const InverseMetricField flat = make_flat();
  const PhasePoint pt{Vec2(2.0, -3.0), Vec2(0.9, 1.7)};
  const double expected = 2.0 * pt.xi.squaredNorm() / (1.0 + pt.xi.squaredNorm());
  CHECK(hp_conjugate_symbol(flat, pt) == Catch::Approx(expected).epsilon(1e-13));

  const InverseMetricField f = make_perturbed_minkowski(bump_params());
  const double num = fd_hp(f, [](const PhasePoint& q) { return conjugate_symbol(q); }, pt);
  CHECK(hp_conjugate_symbol(f, pt) == Catch::Approx(num).margin(1e-8));
}

TEST_CASE("symbol decay verification") {
  SECTION("flat field gives exactly zero") {
    const DecayReport rep = verify_symbol_decay(make_flat(), 1.5, 20.0, 17);
    CHECK(rep.C == 0.0);
    CHECK(rep.pass);
  }
  SECTION("constant scales linearly in the amplitude") {
    const DecayReport a = verify_symbol_decay(make_perturbed_minkowski(bump_params(0.05)), 1.5);
    const DecayReport b = verify_symbol_decay(make_perturbed_minkowski(bump_params(0.1)), 1.5);
    CHECK(b.C / a.C == Catch::Approx(2.0).epsilon(1e-10));
    CHECK(a.pass);
    CHECK(b.pass);
  }
  SECTION("overclaimed decay order fails the enlargement check") {
    const DecayReport rep = verify_symbol_decay(make_perturbed_minkowski(bump_params()), 2.6);
    CHECK_FALSE(rep.pass);
    CHECK(rep.C_enlarged > rep.C);
  }
}

TEST_CASE("signature guard rejects overdriven bumps") {
  MetricParams p = bump_params(10.0);
  CHECK_THROWS_MATCHES(make_perturbed_minkowski(p), Error, Catch::Matchers::Predicate<Error>(
      [](const Error& e) { return e.kind == ErrorKind::SignatureViolation; }));
}

TEST_CASE("product form flag follows the ty pattern") {
  MetricParams p = bump_params();
  CHECK(make_perturbed_minkowski(p).product_form());
  p.pattern_ty = 0.3;
  const InverseMetricField f = make_perturbed_minkowski(p);
  CHECK_FALSE(f.product_form());
  CHECK_THROWS_MATCHES(f.c2(Vec2(1.0, 1.0)), Error, Catch::Matchers::Predicate<Error>(
      [](const Error& e) { return e.kind == ErrorKind::NonProductForm; }));
}

TEST_CASE("lapse and spatial coefficient reduce to one on the flat field") {
  const InverseMetricField flat = make_flat();
  CHECK(flat.c2(Vec2(0.4, -2.0)) == Catch::Approx(1.0));
  CHECK(flat.hh(Vec2(0.4, -2.0)) == Catch::Approx(1.0));
}
