#pragma once

#include <array>

#include "amwave/common.hpp"

namespace amwave {

// algebraic bump (1 + |x-c|^2/w^2)^{-mu/2}: smooth, peak 1 at c, exact
// <x>^{-mu} tail, closed-form first and second derivatives
struct BumpProfile {
  Vec2 center{0.0, 0.0};
  double width = 2.0;
  double mu = 1.5;

  double eval(const Vec2& x) const {
    const double u = 1.0 + (x - center).squaredNorm() / sq(width);
    return std::pow(u, -0.5 * mu);
  }
  Vec2 grad(const Vec2& x) const {
    const Vec2 d = x - center;
    const double u = 1.0 + d.squaredNorm() / sq(width);
    return (-mu / sq(width)) * std::pow(u, -0.5 * mu - 1.0) * d;
  }
  Mat2 hess(const Vec2& x) const {
    const Vec2 d = x - center;
    const double w2 = sq(width);
    const double u = 1.0 + d.squaredNorm() / w2;
    const double a = std::pow(u, -0.5 * mu - 1.0);
    const double b = std::pow(u, -0.5 * mu - 2.0);
    Mat2 h = (-mu / w2) * a * Mat2::Identity();
    h += (mu * (mu + 2.0) / sq(w2)) * b * (d * d.transpose());
    return h;
  }
};

// inverse metric g^{jk} = g0^{jk} + amplitude * pattern * bump(x) on R^{1+1},
// signature (-,+); potential V = v_amplitude * v_bump(x)
struct InverseMetricField {
  double amplitude = 0.0;
  Mat2 pattern = Mat2::Zero();  // symmetric perturbation pattern
  BumpProfile bump;
  double v_amplitude = 0.0;
  BumpProfile v_bump;

  double mu() const { return bump.mu; }
  bool product_form() const { return pattern(0, 1) == 0.0; }
  bool is_flat() const { return amplitude == 0.0 && v_amplitude == 0.0; }

  static Mat2 minkowski() {
    Mat2 g0;
    g0 << -1.0, 0.0, 0.0, 1.0;
    return g0;
  }

  Mat2 g(const Vec2& x) const { return minkowski() + (amplitude * bump.eval(x)) * pattern; }

  // d_m g^{jk}, m = 0 (t), 1 (y)
  std::array<Mat2, 2> dg(const Vec2& x) const {
    const Vec2 gr = amplitude * bump.grad(x);
    return {gr[0] * pattern, gr[1] * pattern};
  }

  // d_i d_j g^{jk}
  Mat2 d2g(const Vec2& x, int i, int j) const {
    const Mat2 h = amplitude * bump.hess(x);
    return h(i, j) * pattern;
  }

  double V(const Vec2& x) const { return v_amplitude * v_bump.eval(x); }
  Vec2 dV(const Vec2& x) const { return v_amplitude * v_bump.grad(x); }
  Mat2 d2V(const Vec2& x) const { return v_amplitude * v_bump.hess(x); }

  // product-form coefficients, metric -c^2 dt^2 + h dy^2
  double c2(const Vec2& x) const {
    require(product_form(), ErrorKind::NonProductForm, "lapse needs a product-form metric");
    return -1.0 / g(x)(0, 0);
  }
  double hh(const Vec2& x) const {
    require(product_form(), ErrorKind::NonProductForm, "spatial factor needs product form");
    return 1.0 / g(x)(1, 1);
  }
};

struct MetricParams {
  double amplitude = 0.1;
  double mu = 1.5;
  Vec2 center{0.0, 0.0};
  double width = 2.0;
  double pattern_tt = 1.0;
  double pattern_yy = 1.0;
  double pattern_ty = 0.0;  // nonzero breaks product form
  double v_amplitude = 0.0;
  double v_width = 2.0;
};

inline InverseMetricField make_flat() { return InverseMetricField{}; }

// signature check at one point: timelike t-direction and Lorentzian determinant
inline bool signature_ok(const InverseMetricField& f, const Vec2& x) {
  const Mat2 g = f.g(x);
  return g(0, 0) < 0.0 && g.determinant() < 0.0;
}

// builds the field and validates signature on a lattice covering the bump
inline InverseMetricField make_perturbed_minkowski(const MetricParams& p) {
  require(p.mu > 0.0 && p.width > 0.0, ErrorKind::Domain, "mu and width must be positive");
  InverseMetricField f;
  f.amplitude = p.amplitude;
  f.pattern << p.pattern_tt, p.pattern_ty, p.pattern_ty, p.pattern_yy;
  f.bump = BumpProfile{p.center, p.width, p.mu};
  f.v_amplitude = p.v_amplitude;
  f.v_bump = BumpProfile{p.center, p.v_width, p.mu};

  const double X = std::max(6.0 * p.width, 20.0) + p.center.norm();
  const int n = 41;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x(-X + 2.0 * X * i / (n - 1), -X + 2.0 * X * j / (n - 1));
      if (!signature_ok(f, x))
        fail(ErrorKind::SignatureViolation,
             "signature violated at (" + std::to_string(x[0]) + "," + std::to_string(x[1]) + ")");
    }
  return f;
}

// p(x,xi) = sum g^{jk} xi_j xi_k
inline double eval_symbol(const InverseMetricField& f, const PhasePoint& pt) {
  return pt.xi.dot(f.g(pt.x) * pt.xi);
}

// (d_xi p, -d_x p): the Hamilton vector field of p
struct HamiltonField {
  Vec2 dx;   // d_xi p = 2 g xi
  Vec2 dxi;  // -d_x p
};

inline Vec2 grad_x_symbol(const InverseMetricField& f, const PhasePoint& pt) {
  const auto d = f.dg(pt.x);
  return Vec2(pt.xi.dot(d[0] * pt.xi), pt.xi.dot(d[1] * pt.xi));
}

inline HamiltonField hamilton_field(const InverseMetricField& f, const PhasePoint& pt) {
  return {2.0 * (f.g(pt.x) * pt.xi), -grad_x_symbol(f, pt)};
}

// H_p F from the phase-space gradient of F
inline double hp_scalar(const InverseMetricField& f, const PhasePoint& pt, const Vec2& dF_x,
                        const Vec2& dF_xi) {
  const HamiltonField h = hamilton_field(f, pt);
  return h.dx.dot(dF_x) + h.dxi.dot(dF_xi);
}

// beta = x . d_xi p / (|x| |d_xi p|)
inline double beta(const InverseMetricField& f, const PhasePoint& pt) {
  const Vec2 v = 2.0 * (f.g(pt.x) * pt.xi);
  const double nx = pt.x.norm(), nv = v.norm();
  require(nx > 0.0 && nv > 0.0, ErrorKind::DegeneratePoint, "beta at x=0 or d_xi p=0");
  return pt.x.dot(v) / (nx * nv);
}

// analytic H_p beta; needs only first derivatives of g
inline double hp_beta(const InverseMetricField& f, const PhasePoint& pt) {
  const Mat2 g = f.g(pt.x);
  const auto d = f.dg(pt.x);
  const Vec2 v = 2.0 * (g * pt.xi);
  const double nx = pt.x.norm(), nv = v.norm();
  require(nx > 0.0 && nv > 0.0, ErrorKind::DegeneratePoint, "hp_beta at degenerate point");
  // beta as a function of x (direct) and v(x,xi)
  const Vec2 db_dx_direct = v / (nx * nv) - (pt.x.dot(v) / (nx * nx * nx * nv)) * pt.x;
  const Vec2 db_dv = pt.x / (nx * nv) - (pt.x.dot(v) / (nx * nv * nv * nv)) * v;

  // dv_j/dx_m = 2 (d_m g xi)_j ; dv_j/dxi_m = 2 g^{jm}
  Vec2 db_dx;
  for (int m = 0; m < 2; ++m) db_dx[m] = db_dx_direct[m] + db_dv.dot(2.0 * (d[m] * pt.xi));
  const Vec2 db_dxi = 2.0 * (g * db_dv);
  return hp_scalar(f, pt, db_dx, db_dxi);
}

// H_p^2 |x|^2 = 2|v|^2 + 4 sum_m v_m (x . d_m g xi) - 4 (d_x p) . (g x)
inline double hp2_absx2(const InverseMetricField& f, const PhasePoint& pt) {
  const Mat2 g = f.g(pt.x);
  const auto d = f.dg(pt.x);
  const Vec2 v = 2.0 * (g * pt.xi);
  const Vec2 dxp = grad_x_symbol(f, pt);
  double cross = 0.0;
  for (int m = 0; m < 2; ++m) cross += v[m] * pt.x.dot(d[m] * pt.xi);
  return 2.0 * v.squaredNorm() + 4.0 * cross - 4.0 * dxp.dot(g * pt.x);
}

// a(x,xi) = x . xi-tilde / (1 + |xi|^2), the Mourre conjugate symbol
inline double conjugate_symbol(const PhasePoint& pt) {
  return pt.x.dot(xi_tilde(pt.xi)) / (1.0 + pt.xi.squaredNorm());
}

inline double hp_conjugate_symbol(const InverseMetricField& f, const PhasePoint& pt) {
  const double den = 1.0 + pt.xi.squaredNorm();
  const Vec2 xt = xi_tilde(pt.xi);
  const Vec2 da_dx = xt / den;
  // d/dtau (x.xi-tilde) = -t, d/deta = y
  const Vec2 num_dxi(-pt.x[0], pt.x[1]);
  const Vec2 da_dxi = num_dxi / den - (2.0 * pt.x.dot(xt) / sq(den)) * pt.xi;
  return hp_scalar(f, pt, da_dx, da_dxi);
}

struct DecayReport {
  double C = 0.0;           // sup |d^a (g - g0)| <x>^{mu+|a|}, |a| <= 2, and same for V
  double C_enlarged = 0.0;  // same sup on the doubled lattice
  double rel_change = 0.0;
  bool pass = false;
};

// sampled symbol-class constant for the claimed decay order
inline DecayReport verify_symbol_decay(const InverseMetricField& f, double mu_claimed,
                                       double extent = 20.0, int n_per_axis = 17) {
  const Mat2 g0 = InverseMetricField::minkowski();
  auto sup_on = [&](double X) {
    double C = 0.0;
    for (int i = 0; i < n_per_axis; ++i)
      for (int j = 0; j < n_per_axis; ++j) {
        const Vec2 x(-X + 2.0 * X * i / (n_per_axis - 1), -X + 2.0 * X * j / (n_per_axis - 1));
        const double w0 = std::pow(jap(x), mu_claimed);
        const double w1 = std::pow(jap(x), mu_claimed + 1.0);
        const double w2 = std::pow(jap(x), mu_claimed + 2.0);
        const Mat2 dev = f.g(x) - g0;
        const auto d1 = f.dg(x);
        C = std::max(C, dev.cwiseAbs().maxCoeff() * w0);
        C = std::max(C, d1[0].cwiseAbs().maxCoeff() * w1);
        C = std::max(C, d1[1].cwiseAbs().maxCoeff() * w1);
        for (int a = 0; a < 2; ++a)
          for (int b = a; b < 2; ++b)
            C = std::max(C, f.d2g(x, a, b).cwiseAbs().maxCoeff() * w2);
        C = std::max(C, std::abs(f.V(x)) * w0);
        C = std::max(C, f.dV(x).cwiseAbs().maxCoeff() * w1);
        C = std::max(C, f.d2V(x).cwiseAbs().maxCoeff() * w2);
        require(finite(C), ErrorKind::NonFiniteValue, "non-finite decay constant");
      }
    return C;
  };
  DecayReport r;
  r.C = sup_on(extent);
  r.C_enlarged = sup_on(2.0 * extent);
  r.rel_change = (r.C > 0.0) ? std::abs(r.C_enlarged - r.C) / r.C : 0.0;
  r.pass = r.rel_change <= 0.20;
  return r;
}

}  // namespace amwave
