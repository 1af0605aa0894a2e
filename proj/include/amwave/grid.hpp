#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <unsupported/Eigen/FFT>

#include "amwave/metric.hpp"

namespace amwave {

using Cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Cd>;
using Trip = Eigen::Triplet<Cd>;

// uniform periodic-layout lattice on [-L_t, L_t) x [-L_y, L_y); Dirichlet
// truncation drops stencil references outside the box
struct SpacetimeGrid {
  double L_t = 10.0, L_y = 10.0;
  int N_t = 32, N_y = 32;

  void validate() const {
    require(N_t >= 8 && N_y >= 8 && N_t % 2 == 0 && N_y % 2 == 0, ErrorKind::Config,
            "grid needs even point counts of at least 8");
    require(L_t > 0.0 && L_y > 0.0, ErrorKind::Config, "grid needs positive half-lengths");
  }

  double h_t() const { return 2.0 * L_t / N_t; }
  double h_y() const { return 2.0 * L_y / N_y; }
  long n() const { return static_cast<long>(N_t) * N_y; }
  long index(int it, int iy) const { return static_cast<long>(it) * N_y + iy; }
  double t_of(int it) const { return -L_t + it * h_t(); }
  double y_of(int iy) const { return -L_y + iy * h_y(); }
  Vec2 node(int it, int iy) const { return Vec2(t_of(it), y_of(iy)); }

  // signed frequency of FFT bin k along each axis
  double freq_t(int k) const { return (pi / L_t) * (k < N_t / 2 ? k : k - N_t); }
  double freq_y(int k) const { return (pi / L_y) * (k < N_y / 2 ? k : k - N_y); }

  bool same_layout(const SpacetimeGrid& o) const {
    return L_t == o.L_t && L_y == o.L_y && N_t == o.N_t && N_y == o.N_y;
  }
};

struct GridFunction {
  SpacetimeGrid grid;
  Eigen::VectorXcd v;

  GridFunction() = default;
  explicit GridFunction(const SpacetimeGrid& g) : grid(g), v(Eigen::VectorXcd::Zero(g.n())) {}

  Cd& at(int it, int iy) { return v[grid.index(it, iy)]; }
  Cd at(int it, int iy) const { return v[grid.index(it, iy)]; }
  void require_finite() const {
    for (long i = 0; i < v.size(); ++i)
      require(std::isfinite(v[i].real()) && std::isfinite(v[i].imag()),
              ErrorKind::NonFiniteValue, "grid function has a non-finite entry");
  }
  // discrete L2 norm with the cell measure
  double norm2() const { return std::sqrt(grid.h_t() * grid.h_y()) * v.norm(); }
};

template <class F>
GridFunction sample_grid(const SpacetimeGrid& g, F&& fn) {
  GridFunction u(g);
  for (int it = 0; it < g.N_t; ++it)
    for (int iy = 0; iy < g.N_y; ++iy) u.at(it, iy) = fn(g.node(it, iy));
  return u;
}

struct GridOperator {
  SpacetimeGrid grid;
  SpMat mat;
  std::string annotation;
  bool hermitian = false;
  double herm_defect = 0.0;

  GridFunction apply(const GridFunction& u) const {
    require(grid.same_layout(u.grid), ErrorKind::Size, "operator and function grids differ");
    GridFunction out(grid);
    out.v = mat * u.v;
    return out;
  }
};

// max-norm deviation from Hermitian symmetry
inline double hermitian_defect(const SpMat& m) {
  SpMat d = SpMat(m.adjoint()) - m;
  double worst = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

// metric density |det g_lower|^{1/2} from the inverse metric
inline double density_rho(const InverseMetricField& f, const Vec2& x) {
  const double det = f.g(x).determinant();
  require(det < 0.0, ErrorKind::SignatureViolation, "inverse metric determinant must be negative");
  return 1.0 / std::sqrt(-det);
}

// flux coefficients a^{mu nu} = rho g^{mu nu} of the divergence form
inline Mat2 flux_coeff(const InverseMetricField& f, const Vec2& x) {
  return density_rho(f, x) * f.g(x);
}

namespace detail {
// forward difference along one axis mapping nodes to edges, Dirichlet ghosts
inline SpMat edge_difference(const SpacetimeGrid& g, bool along_t) {
  const int N = along_t ? g.N_t : g.N_y;
  const double h = along_t ? g.h_t() : g.h_y();
  const long rows = along_t ? static_cast<long>(g.N_t + 1) * g.N_y
                            : static_cast<long>(g.N_y + 1) * g.N_t;
  std::vector<Trip> trips;
  trips.reserve(2 * rows);
  long e = 0;
  if (along_t) {
    for (int ie = 0; ie <= N; ++ie)
      for (int iy = 0; iy < g.N_y; ++iy, ++e) {
        if (ie < N) trips.emplace_back(e, g.index(ie, iy), Cd(1.0 / h));
        if (ie > 0) trips.emplace_back(e, g.index(ie - 1, iy), Cd(-1.0 / h));
      }
  } else {
    for (int it = 0; it < g.N_t; ++it)
      for (int ie = 0; ie <= N; ++ie, ++e) {
        if (ie < N) trips.emplace_back(e, g.index(it, ie), Cd(1.0 / h));
        if (ie > 0) trips.emplace_back(e, g.index(it, ie - 1), Cd(-1.0 / h));
      }
  }
  SpMat D(rows, g.n());
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

// centered difference on nodes with Dirichlet ghosts; exactly antisymmetric
inline SpMat centered_difference(const SpacetimeGrid& g, bool along_t) {
  const int N = along_t ? g.N_t : g.N_y;
  const double h = along_t ? g.h_t() : g.h_y();
  std::vector<Trip> trips;
  trips.reserve(2 * g.n());
  for (int it = 0; it < g.N_t; ++it)
    for (int iy = 0; iy < g.N_y; ++iy) {
      const long row = g.index(it, iy);
      const int i = along_t ? it : iy;
      if (i + 1 < N)
        trips.emplace_back(row, along_t ? g.index(it + 1, iy) : g.index(it, iy + 1),
                           Cd(0.5 / h));
      if (i - 1 >= 0)
        trips.emplace_back(row, along_t ? g.index(it - 1, iy) : g.index(it, iy - 1),
                           Cd(-0.5 / h));
    }
  SpMat D(g.n(), g.n());
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

inline SpMat diagonal(const SpacetimeGrid& g, const std::vector<double>& d) {
  std::vector<Trip> trips;
  trips.reserve(d.size());
  for (long i = 0; i < static_cast<long>(d.size()); ++i) trips.emplace_back(i, i, Cd(d[i]));
  SpMat m(d.size(), d.size());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}
}  // namespace detail

// divergence-form assembly of P conjugated to the flat inner product:
// P1 = rho^{-1/2} (-d_mu a^{mu nu} d_nu) rho^{-1/2} + V with half-point fluxes
// on the diagonal terms and a symmetrized centered product on the cross term
inline GridOperator assemble_P(const InverseMetricField& f, const SpacetimeGrid& g) {
  g.validate();
  if (!f.is_flat()) {
    double w = std::numeric_limits<double>::infinity();
    if (f.amplitude != 0.0) w = std::min(w, f.bump.width);
    if (f.v_amplitude != 0.0) w = std::min(w, f.v_bump.width);
    require(w / g.h_t() >= 8.0 && w / g.h_y() >= 8.0, ErrorKind::Resolution,
            "grid must resolve the bump with at least 8 points per width");
  }

  // diagonal flux terms: K_aa = D_a^T diag(a^{aa} at edge midpoints) D_a
  const SpMat Dt = detail::edge_difference(g, true);
  const SpMat Dy = detail::edge_difference(g, false);
  std::vector<double> att, ayy;
  att.reserve((g.N_t + 1) * g.N_y);
  for (int ie = 0; ie <= g.N_t; ++ie)
    for (int iy = 0; iy < g.N_y; ++iy)
      att.push_back(flux_coeff(f, Vec2(g.t_of(ie) - 0.5 * g.h_t(), g.y_of(iy)))(0, 0));
  ayy.reserve(g.N_t * (g.N_y + 1));
  for (int it = 0; it < g.N_t; ++it)
    for (int ie = 0; ie <= g.N_y; ++ie)
      ayy.push_back(flux_coeff(f, Vec2(g.t_of(it), g.y_of(ie) - 0.5 * g.h_y()))(1, 1));
  SpMat K = SpMat(Dt.adjoint()) * detail::diagonal(g, att) * Dt +
            SpMat(Dy.adjoint()) * detail::diagonal(g, ayy) * Dy;

  // cross term: -(Dc_t a^{ty} Dc_y + Dc_y a^{ty} Dc_t), antisymmetric factors
  std::vector<double> aty(g.n());
  bool has_cross = false;
  for (int it = 0; it < g.N_t; ++it)
    for (int iy = 0; iy < g.N_y; ++iy) {
      const double val = flux_coeff(f, g.node(it, iy))(0, 1);
      aty[g.index(it, iy)] = val;
      if (val != 0.0) has_cross = true;
    }
  if (has_cross) {
    const SpMat Ct = detail::centered_difference(g, true);
    const SpMat Cy = detail::centered_difference(g, false);
    const SpMat B = detail::diagonal(g, aty);
    K -= Ct * B * Cy + Cy * B * Ct;
  }

  // unitary metric-density reduction and the potential
  std::vector<double> rs(g.n()), vv(g.n());
  for (int it = 0; it < g.N_t; ++it)
    for (int iy = 0; iy < g.N_y; ++iy) {
      const Vec2 x = g.node(it, iy);
      rs[g.index(it, iy)] = 1.0 / std::sqrt(density_rho(f, x));
      vv[g.index(it, iy)] = f.V(x);
    }
  const SpMat Ds = detail::diagonal(g, rs);
  GridOperator op;
  op.grid = g;
  op.mat = Ds * K * Ds + detail::diagonal(g, vv);
  op.mat.prune([](const auto&, const auto&, const Cd& v) { return v != Cd(0.0); });
  op.annotation = "P1";
  op.herm_defect = hermitian_defect(op.mat);
  op.hermitian = op.herm_defect <= 1e-12;
  return op;
}

}  // namespace amwave
