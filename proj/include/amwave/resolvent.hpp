#pragma once

#include <Eigen/SparseLU>

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "amwave/gabor.hpp"
#include "amwave/grid.hpp"
#include "amwave/halton.hpp"
#include "amwave/metric.hpp"
#include "amwave/regions.hpp"
#include "amwave/spectral.hpp"

namespace amwave {

// complex absorbing potential W(x) = eta ((|x|-R0)+ / (L-R0))^exponent,
// the numerical outgoing-boundary surrogate for the -i0 limit
struct CapSpec {
  double R0 = 0.0;
  double eta = 1.0;
  double exponent = 2.0;

  void validate(const SpacetimeGrid& g) const {
    const double L = std::min(g.L_t, g.L_y);
    require(eta >= 0.0 && exponent > 0.0, ErrorKind::Config, "cap needs eta >= 0, exponent > 0");
    require(eta == 0.0 || (R0 > 0.0 && R0 < L), ErrorKind::Config,
            "cap onset must sit inside the domain");
  }
};

inline CapSpec default_cap(const SpacetimeGrid& g, double onset_frac = 0.7, double eta = 1.0) {
  return CapSpec{onset_frac * std::min(g.L_t, g.L_y), eta, 2.0};
}

inline double cap_value(const CapSpec& c, const SpacetimeGrid& g, const Vec2& x) {
  if (c.eta == 0.0) return 0.0;
  const double L = std::min(g.L_t, g.L_y);
  const double s = (x.norm() - c.R0) / (L - c.R0);
  return s > 0.0 ? c.eta * std::pow(s, c.exponent) : 0.0;
}

inline Eigen::VectorXd cap_diagonal(const CapSpec& c, const SpacetimeGrid& g) {
  c.validate(g);
  Eigen::VectorXd w(g.n());
  for (int it = 0; it < g.N_t; ++it)
    for (int iy = 0; iy < g.N_y; ++iy) w[g.index(it, iy)] = cap_value(c, g, g.node(it, iy));
  return w;
}

// factorization of M = P - i cap_sign W - z; P is real symmetric, so M is
// complex symmetric and adjoint solves reuse the same factorization
class ShiftedSolver {
public:
  ShiftedSolver(const GridOperator& P, const CapSpec& cap, Cd z, double cap_sign = 1.0)
      : grid_(P.grid) {
    require(P.hermitian, ErrorKind::Config, "shifted solver expects a Hermitian assembly");
    double max_imag = 0.0;
    for (int k = 0; k < P.mat.outerSize(); ++k)
      for (SpMat::InnerIterator it(P.mat, k); it; ++it)
        max_imag = std::max(max_imag, std::abs(it.value().imag()));
    require(max_imag <= 1e-12, ErrorKind::Config, "shifted solver expects real coefficients");

    const Eigen::VectorXd w = cap_diagonal(cap, grid_);
    mat_ = P.mat;
    std::vector<Trip> shift;
    shift.reserve(static_cast<size_t>(grid_.n()));
    for (long i = 0; i < grid_.n(); ++i)
      shift.emplace_back(i, i, -Cd(0.0, cap_sign) * w[i] - z);
    SpMat d(grid_.n(), grid_.n());
    d.setFromTriplets(shift.begin(), shift.end());
    mat_ += d;
    mat_.makeCompressed();
    lu_.compute(mat_);
    require(lu_.info() == Eigen::Success, ErrorKind::SolveFailure,
            "sparse factorization of the shifted operator failed");
  }

  const SpacetimeGrid& grid() const { return grid_; }
  const SpMat& matrix() const { return mat_; }

  Eigen::VectorXcd solve_vec(const Eigen::VectorXcd& f) const {
    Eigen::VectorXcd u = lu_.solve(f);
    require(lu_.info() == Eigen::Success, ErrorKind::SolveFailure, "triangular solve failed");
    return u;
  }

  GridFunction solve(const GridFunction& f) const {
    require(grid_.same_layout(f.grid), ErrorKind::Size, "grid mismatch in solve");
    GridFunction u(grid_);
    u.v = solve_vec(f.v);
    return u;
  }

  // M^dagger u = f via conj(M u' = conj f), valid because M^T = M
  GridFunction solve_adjoint(const GridFunction& f) const {
    require(grid_.same_layout(f.grid), ErrorKind::Size, "grid mismatch in adjoint solve");
    GridFunction u(grid_);
    u.v = solve_vec(f.v.conjugate()).conjugate();
    return u;
  }

private:
  SpacetimeGrid grid_;
  SpMat mat_;
  Eigen::SparseLU<SpMat> lu_;
};

// u with (P_h - i cap_sign W - z) u = f, residual-checked
inline GridFunction solve_resolvent(const GridOperator& P, const CapSpec& cap, Cd z,
                                    const GridFunction& f, double cap_sign = 1.0) {
  require(z.imag() != 0.0 || cap.eta > 0.0, ErrorKind::Domain,
          "resolvent solve needs Im z != 0 or an active cap");
  f.require_finite();
  GridFunction zero(P.grid);
  if (f.v.norm() == 0.0) return zero;
  const ShiftedSolver s(P, cap, z, cap_sign);
  GridFunction u = s.solve(f);
  const double res = (s.matrix() * u.v - f.v).norm() / f.v.norm();
  require(res <= 1e-10, ErrorKind::SolveFailure,
          "shifted system nearly singular: relative residual " + std::to_string(res) +
              ", amplification " + std::to_string(u.v.norm() / f.v.norm()));
  return u;
}

struct PowerIterOptions {
  int max_iter = 400;
  double tol = 1e-3;
  unsigned seed = 7;
};

namespace detail {
inline Eigen::VectorXcd random_unit(long n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(n);
  for (long i = 0; i < n; ++i) v[i] = Cd(nd(rng), nd(rng));
  return v / v.norm();
}

// largest singular value of T from the normal-operator power iteration;
// apply_t / apply_tadj map vectors through T and T^dagger
template <class F, class G>
double operator_norm(long n, F&& apply_t, G&& apply_tadj, const PowerIterOptions& po) {
  Eigen::VectorXcd v = random_unit(n, po.seed);
  double prev = 0.0;
  for (int k = 0; k < po.max_iter; ++k) {
    Eigen::VectorXcd w = apply_tadj(apply_t(v));
    const double nu = w.norm();
    require(nu > 0.0, ErrorKind::PowerIterationStall, "power iteration collapsed to zero");
    v = w / nu;
    if (k > 0 && std::abs(nu - prev) <= po.tol * nu) return std::sqrt(nu);
    prev = nu;
  }
  fail(ErrorKind::PowerIterationStall,
       "power iteration did not settle: last estimates " + std::to_string(std::sqrt(prev)));
  return 0.0;
}
}  // namespace detail

// || <x>^{-s} (P - iW - z)^{-1} <x>^{-s} ||
inline double weighted_resolvent_norm(const GridOperator& P, const CapSpec& cap, Cd z, double s,
                                      const PowerIterOptions& po = {}) {
  const ShiftedSolver solver(P, cap, z);
  const SpacetimeGrid& g = P.grid;
  Eigen::VectorXd d(g.n());
  for (int it = 0; it < g.N_t; ++it)
    for (int iy = 0; iy < g.N_y; ++iy)
      d[g.index(it, iy)] = std::pow(jap(g.node(it, iy)), -s);
  auto weight = [&](const Eigen::VectorXcd& v) {
    return Eigen::VectorXcd(d.cast<Cd>().asDiagonal() * v);
  };
  return detail::operator_norm(
      g.n(),
      [&](const Eigen::VectorXcd& v) { return weight(solver.solve_vec(weight(v))); },
      [&](const Eigen::VectorXcd& v) {
        return weight(solver.solve_vec(weight(v).conjugate()).conjugate());
      },
      po);
}

struct ResolventSweep {
  double lambda = 0.0;
  double s = 0.0;
  std::vector<double> eps;
  std::vector<double> norms;
  double holder_exponent = 0.0;
  bool stabilized = false;
  bool below_lap_weight = false;  // s <= 1/2: stabilization not expected in theory
};

inline ResolventSweep lap_sweep(const GridOperator& P, const CapSpec& cap, double lambda,
                                double s, const std::vector<double>& eps_list,
                                const PowerIterOptions& po = {}) {
  require(lambda != 0.0, ErrorKind::Domain, "lap sweep excludes zero energy");
  require(eps_list.size() >= 3, ErrorKind::Config, "lap sweep needs at least three epsilons");
  for (size_t i = 0; i < eps_list.size(); ++i) {
    require(eps_list[i] > 0.0, ErrorKind::Config, "epsilons must be positive");
    if (i) require(eps_list[i] < eps_list[i - 1], ErrorKind::Config, "epsilons must decrease");
  }
  ResolventSweep sweep;
  sweep.lambda = lambda;
  sweep.s = s;
  sweep.eps = eps_list;
  sweep.below_lap_weight = s <= 0.5;
  for (double e : eps_list)
    sweep.norms.push_back(weighted_resolvent_norm(P, cap, Cd(lambda, e), s, po));

  const size_t n = sweep.norms.size();
  double worst = 0.0;
  for (size_t i = n - 3; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      worst = std::max(worst, std::abs(sweep.norms[i] - sweep.norms[j]) /
                                  std::max(sweep.norms[i], sweep.norms[j]));
  sweep.stabilized = worst < 0.05;

  std::vector<double> lx, ly;
  for (size_t i = 0; i + 1 < n; ++i) {
    const double d = std::abs(sweep.norms[i + 1] - sweep.norms[i]);
    const double h = sweep.eps[i] - sweep.eps[i + 1];
    if (d > 0.0 && h > 0.0) {
      lx.push_back(std::log(h));
      ly.push_back(std::log(d));
    }
  }
  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= lx.size();
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
      num += (lx[i] - mx) * (ly[i] - my);
      den += sq(lx[i] - mx);
    }
    sweep.holder_exponent = den > 0.0 ? num / den : 0.0;
  }
  return sweep;
}

// flat-space reference: periodic resolvent diagonal in the DFT basis, same
// weighted norm by power iteration
inline double periodic_lap_oracle(const SpacetimeGrid& g, double lambda, double s, double eps,
                                  double m0sq = 0.0, const PowerIterOptions& po = {}) {
  g.validate();
  auto dsym = [&](const Vec2& xi) {
    const double th = 2.0 * std::sin(0.5 * xi[0] * g.h_t()) / g.h_t();
    const double yh = 2.0 * std::sin(0.5 * xi[1] * g.h_y()) / g.h_y();
    return -sq(th) + sq(yh) + m0sq;
  };
  Eigen::VectorXd d(g.n());
  for (int it = 0; it < g.N_t; ++it)
    for (int iy = 0; iy < g.N_y; ++iy)
      d[g.index(it, iy)] = std::pow(jap(g.node(it, iy)), -s);
  auto apply = [&](const Eigen::VectorXcd& v, bool adjoint) {
    GridFunction u(g);
    u.v = d.cast<Cd>().asDiagonal() * v;
    u = apply_fourier_multiplier(u, [&](const Vec2& xi) {
      const Cd den(dsym(xi) - lambda, -eps);
      return adjoint ? 1.0 / std::conj(den) : 1.0 / den;
    });
    return Eigen::VectorXcd(d.cast<Cd>().asDiagonal() * u.v);
  };
  return detail::operator_norm(
      g.n(), [&](const Eigen::VectorXcd& v) { return apply(v, false); },
      [&](const Eigen::VectorXcd& v) { return apply(v, true); }, po);
}

inline WindowSpec plateau_window(double a, double b, const std::string& name = "phi") {
  require(a < b, ErrorKind::Config, "window interval is empty");
  const double q = 0.25 * (b - a);
  auto phi = [a, b, q](double s) {
    if (s <= a || s >= b) return 0.0;
    if (s < a + q) return smoothstep((s - a) / q);
    if (s > b - q) return smoothstep((b - s) / q);
    return 1.0;
  };
  return WindowSpec{phi, name};
}

// i[X, Y] as a sparse operator
inline GridOperator commutator_i(const GridOperator& X, const GridOperator& Y) {
  require(X.grid.same_layout(Y.grid), ErrorKind::Size, "commutator needs one grid");
  GridOperator c;
  c.grid = X.grid;
  c.mat = Cd(0.0, 1.0) * (X.mat * Y.mat - Y.mat * X.mat).eval();
  c.annotation = "i[" + X.annotation + "," + Y.annotation + "]";
  c.herm_defect = hermitian_defect(c.mat);
  c.hermitian = c.herm_defect <= 1e-8;
  return c;
}

// conjugate operator Op_h(x . xi_tilde / (1 + |xi|^2))
inline GridOperator conjugate_operator(const SpacetimeGrid& g) {
  return quantize_weyl(
      [](const Vec2& x, const Vec2& xi) { return Cd(conjugate_symbol({x, xi})); }, g, "A");
}

struct MourreOptions {
  int c_samples = 6000;
  unsigned seed = 1;
  double phi_floor = 0.1;     // eigenvectors kept in the compression subspace
  double xi_cap_frac = 0.75;  // sampled |xi| bound as a fraction of pi/h
  double slack = 0.5;         // derived threshold = slack * sampled minimum
};

struct MourreReport {
  Eigen::VectorXd eigenvalues;  // compressed commutator spectrum, ascending
  double c = 0.0;               // derived positive threshold
  double c_sampled_min = 0.0;   // sampled min of the symbol bracket on the window shell
  double threshold = 0.0;       // c * min phi^2 over the subspace
  int count_below = 0;
  int subspace_dim = 0;
};

inline MourreReport mourre_experiment(const GridOperator& P, const GridOperator& A,
                                      const InverseMetricField& f, double lam1, double lam2,
                                      const MourreOptions& mo = {}) {
  require(P.grid.n() <= 6400, ErrorKind::Size, "mourre experiment needs a dense-eig size grid");
  require(P.grid.same_layout(A.grid), ErrorKind::Size, "operators live on different grids");
  require(P.hermitian && A.hermitian, ErrorKind::Config, "mourre experiment needs Hermitian ops");
  require(lam1 < lam2, ErrorKind::Config, "window interval is empty");

  MourreReport rep;
  const SpacetimeGrid& g = P.grid;
  const double xc = mo.xi_cap_frac * pi / std::max(g.h_t(), g.h_y());
  HaltonStream hs(mo.seed, 4);
  double cmin = std::numeric_limits<double>::infinity();
  int kept = 0;
  double u[4];
  for (int i = 0; i < mo.c_samples; ++i) {
    hs.next(u);
    const Vec2 x((2.0 * u[0] - 1.0) * g.L_t, (2.0 * u[1] - 1.0) * g.L_y);
    const Vec2 xi((2.0 * u[2] - 1.0) * xc, (2.0 * u[3] - 1.0) * xc);
    if (xi.norm() < 1e-2) continue;
    const double p = eval_symbol(f, {x, xi});
    if (p < lam1 || p > lam2) continue;
    cmin = std::min(cmin, hp_conjugate_symbol(f, {x, xi}));
    ++kept;
  }
  require(kept >= 50, ErrorKind::Config, "too few samples landed on the energy window");
  rep.c_sampled_min = cmin;
  rep.c = mo.slack * cmin;

  Eigen::MatrixXcd dense(P.mat);
  dense = Cd(0.5) * (dense + dense.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  require(es.info() == Eigen::Success, ErrorKind::SolveFailure, "eigendecomposition failed");

  const WindowSpec phi = plateau_window(lam1, lam2);
  std::vector<long> keep;
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    if (phi.phi(es.eigenvalues()[i]) >= mo.phi_floor) keep.push_back(i);
  rep.subspace_dim = static_cast<int>(keep.size());
  if (keep.empty()) return rep;

  Eigen::MatrixXcd Vs(g.n(), keep.size());
  Eigen::VectorXd ph(keep.size());
  for (size_t j = 0; j < keep.size(); ++j) {
    Vs.col(j) = es.eigenvectors().col(keep[j]);
    ph[j] = phi.phi(es.eigenvalues()[keep[j]]);
  }
  const Eigen::MatrixXcd CV =
      Cd(0.0, 1.0) * (P.mat * (A.mat * Vs) - A.mat * (P.mat * Vs));
  Eigen::MatrixXcd B = ph.asDiagonal() * (Vs.adjoint() * CV) * ph.asDiagonal();
  B = Cd(0.5) * (B + B.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bs(B);
  require(bs.info() == Eigen::Success, ErrorKind::SolveFailure, "compression eig failed");
  rep.eigenvalues = bs.eigenvalues();
  rep.threshold = rep.c * sq(ph.minCoeff());
  rep.count_below = static_cast<int>((rep.eigenvalues.array() < rep.threshold).count());
  return rep;
}

struct FitOptions {
  int trials = 24;
  unsigned seed = 3;
  double cut_R = 4.0;  // phase-space cutoff radius in the regularizer
};

struct InequalityFit {
  double C_coarse = 0.0;
  double C_fine = 0.0;
  bool stable = false;
  double growth() const { return C_coarse > 0.0 ? C_fine / C_coarse : 0.0; }
};

// random trial with complex Gaussian spectrum restricted to the resolvable
// band (top quarter of frequencies per axis removed)
inline GridFunction random_band_limited(const SpacetimeGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  GridFunction u(g);
  for (int kt = 0; kt < g.N_t; ++kt)
    for (int ky = 0; ky < g.N_y; ++ky) {
      const int dt = std::min(kt, g.N_t - kt), dy = std::min(ky, g.N_y - ky);
      if (dt > (3 * g.N_t) / 8 || dy > (3 * g.N_y) / 8) continue;
      u.v[g.index(kt, ky)] = Cd(nd(rng), nd(rng));
    }
  detail::fft2(g, u.v, true);
  u.v /= u.v.norm() * std::sqrt(g.h_t() * g.h_y());
  return u;
}

namespace detail {
inline double subelliptic_fit_on_grid(const InverseMetricField& f, const SpacetimeGrid& g,
                                      Cd z, double k, double l, const FitOptions& fo) {
  const GridOperator P = assemble_P(f, g);
  const GridOperator LR = quantize_weyl(
      [&](const Vec2& x, const Vec2& xi) {
        return Cd(chi_cut(std::sqrt(x.squaredNorm() + xi.squaredNorm()) / fo.cut_R));
      },
      g, "Op(a_R)");
  std::mt19937_64 rng(fo.seed);
  const double im = std::abs(z.imag());
  double best = 0.0;
  for (int t = 0; t < fo.trials; ++t) {
    const GridFunction u = random_band_limited(g, rng);
    const GridFunction lu = LR.apply(u);
    GridFunction pu = P.apply(u);
    pu.v -= z * u.v;
    const double lhs = im * sq(weighted_norm(lu, k, l, 0.0));
    const double rhs =
        sq(weighted_norm(pu, k, l, 0.0)) / im + sq(weighted_norm(u, k + 0.5, l - 0.5, 0.0));
    best = std::max(best, lhs / rhs);
  }
  return best;
}

inline double local_compactness_fit_on_grid(const InverseMetricField& f,
                                            const SpacetimeGrid& g, double delta,
                                            const FitOptions& fo) {
  const GridOperator P = assemble_P(f, g);
  const ShiftedSolver solver(P, CapSpec{}, Cd(0.0, 1.0));
  std::mt19937_64 rng(fo.seed);
  double best = 0.0;
  for (int t = 0; t < fo.trials; ++t) {
    const GridFunction src = random_band_limited(g, rng);
    const GridFunction u = solver.solve(src);
    const double lhs = weighted_norm(u, 0.5, -0.5 * (1.0 + delta), 0.0);
    const double rhs = P.apply(u).norm2() + u.norm2();
    best = std::max(best, lhs / rhs);
  }
  return best;
}
}  // namespace detail

// fits the smallest C in the commutator-regularization inequality and checks
// stability under one resolution doubling
inline InequalityFit subelliptic_test(const InverseMetricField& f, const SpacetimeGrid& g,
                                      Cd z, double k, double l, const FitOptions& fo = {}) {
  require(z.imag() != 0.0, ErrorKind::Domain, "subelliptic fit needs Im z != 0");
  g.validate();
  InequalityFit fit;
  fit.C_coarse = detail::subelliptic_fit_on_grid(f, g, z, k, l, fo);
  const SpacetimeGrid g2{g.L_t, g.L_y, 2 * g.N_t, 2 * g.N_y};
  fit.C_fine = detail::subelliptic_fit_on_grid(f, g2, z, k, l, fo);
  fit.stable = std::abs(fit.C_fine - fit.C_coarse) <= 0.25 * std::max(fit.C_coarse, fit.C_fine);
  return fit;
}

// fits C in the weighted local-compactness inequality; refinement doubles the
// domain at fixed resolution to probe the far-field weight
inline InequalityFit local_compactness_test(const InverseMetricField& f,
                                            const SpacetimeGrid& g, double delta,
                                            const FitOptions& fo = {}) {
  require(delta >= 0.0, ErrorKind::Domain, "weight parameter must be nonnegative");
  g.validate();
  InequalityFit fit;
  fit.C_coarse = detail::local_compactness_fit_on_grid(f, g, delta, fo);
  const SpacetimeGrid g2{2.0 * g.L_t, 2.0 * g.L_y, 2 * g.N_t, 2 * g.N_y};
  fit.C_fine = detail::local_compactness_fit_on_grid(f, g2, delta, fo);
  fit.stable = std::abs(fit.C_fine - fit.C_coarse) <= 0.25 * std::max(fit.C_coarse, fit.C_fine);
  return fit;
}

struct SchwartzDiagnostic {
  std::vector<double> orders;
  std::vector<double> coarse;  // ||<x>^N <D>^N u|| per order on the base grid
  std::vector<double> fine;    // same on the doubled-resolution grid
  bool stable = false;
  double rel_tol = 0.15;
};

inline SchwartzDiagnostic schwartz_preservation_diagnostic(
    const InverseMetricField& f, const SpacetimeGrid& g, const CapSpec& cap, Cd z,
    const std::function<Cd(const Vec2&)>& source, const std::vector<double>& orders,
    double rel_tol = 0.15) {
  require(z.imag() != 0.0, ErrorKind::Domain, "diagnostic needs Im z != 0");
  SchwartzDiagnostic d;
  d.orders = orders;
  d.rel_tol = rel_tol;
  for (int pass = 0; pass < 2; ++pass) {
    const SpacetimeGrid gg =
        pass == 0 ? g : SpacetimeGrid{g.L_t, g.L_y, 2 * g.N_t, 2 * g.N_y};
    const GridOperator P = assemble_P(f, gg);
    const GridFunction u = solve_resolvent(P, cap, z, sample_grid(gg, source));
    for (double N : orders)
      (pass == 0 ? d.coarse : d.fine).push_back(weighted_norm(u, N, N, 0.0));
  }
  d.stable = true;
  for (size_t i = 0; i < d.orders.size(); ++i) {
    const double m = std::max(d.coarse[i], d.fine[i]);
    if (m > 0.0 && std::abs(d.coarse[i] - d.fine[i]) > rel_tol * m) d.stable = false;
  }
  return d;
}

struct RadiationReport {
  std::vector<double> radii;
  std::vector<double> in_mass;   // normalized incoming-region mass per radius
  std::vector<double> out_mass;  // outgoing-region control
  bool in_decreasing = false;
  bool out_decreasing = false;
  double total = 0.0;
};

// probes the outgoing solve at z = -m0^2 + i eps_im: the weighted solution
// should have little and shrinking phase-space mass on the incoming shell
inline RadiationReport radiation_condition_test(const InverseMetricField& f,
                                                const SpacetimeGrid& g, const CapSpec& cap,
                                                double m0,
                                                const std::function<Cd(const Vec2&)>& source,
                                                double delta,
                                                const std::vector<double>& radii,
                                                double eps_im = 0.05, double sigma = 1.0,
                                                double region_eps = 0.4) {
  require(m0 > 0.0, ErrorKind::Domain, "radiation test needs m0 > 0");
  require(radii.size() >= 3, ErrorKind::Config, "radiation test needs three radii");
  const GridOperator P = assemble_P(f, g);
  const GridFunction u =
      solve_resolvent(P, cap, Cd(-sq(m0), eps_im), sample_grid(g, source));
  GridFunction w = u;
  for (int it = 0; it < g.N_t; ++it)
    for (int iy = 0; iy < g.N_y; ++iy)
      w.at(it, iy) *= std::pow(jap(g.node(it, iy)), 0.5 - delta);

  RadiationReport rep;
  rep.radii = radii;
  rep.total = gabor_total_mass(w, sigma);
  require(rep.total >= 0.0, ErrorKind::NonFiniteValue, "mass must be nonnegative");
  if (rep.total == 0.0) {
    rep.in_mass.assign(radii.size(), 0.0);
    rep.out_mass.assign(radii.size(), 0.0);
    return rep;
  }
  for (double R : radii) {
    RegionSpec spec;
    spec.eps = region_eps;
    spec.R = R;
    spec.m0 = m0;
    spec.kind = RegionKind::MassShellIncoming;
    rep.in_mass.push_back(gabor_mass(w, sigma, f, spec) / rep.total);
    spec.kind = RegionKind::MassShellOutgoing;
    rep.out_mass.push_back(gabor_mass(w, sigma, f, spec) / rep.total);
  }
  auto decreasing = [](const std::vector<double>& v) {
    for (size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i + 1] >= v[i]) return false;
    return true;
  };
  rep.in_decreasing = decreasing(rep.in_mass);
  rep.out_decreasing = decreasing(rep.out_mass);
  return rep;
}

}  // namespace amwave
