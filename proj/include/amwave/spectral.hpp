#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "amwave/grid.hpp"
#include "amwave/smoothstep.hpp"

namespace amwave {

namespace detail {
// in-place 2D FFT over the grid layout (t-major rows, y contiguous)
inline void fft2(const SpacetimeGrid& g, Eigen::VectorXcd& v, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<Cd> in(std::max(g.N_t, g.N_y)), out(std::max(g.N_t, g.N_y));
  for (int it = 0; it < g.N_t; ++it) {
    in.assign(g.N_y, Cd(0.0));
    for (int iy = 0; iy < g.N_y; ++iy) in[iy] = v[g.index(it, iy)];
    out.resize(g.N_y);
    if (inverse)
      fft.inv(out, in);
    else
      fft.fwd(out, in);
    for (int iy = 0; iy < g.N_y; ++iy) v[g.index(it, iy)] = out[iy];
  }
  for (int iy = 0; iy < g.N_y; ++iy) {
    in.assign(g.N_t, Cd(0.0));
    for (int it = 0; it < g.N_t; ++it) in[it] = v[g.index(it, iy)];
    out.resize(g.N_t);
    if (inverse)
      fft.inv(out, in);
    else
      fft.fwd(out, in);
    for (int it = 0; it < g.N_t; ++it) v[g.index(it, iy)] = out[it];
  }
}
}  // namespace detail

// applies the Fourier multiplier m(xi) on the periodic frequency lattice
inline GridFunction apply_fourier_multiplier(const GridFunction& u,
                                             const std::function<Cd(const Vec2&)>& m) {
  GridFunction w = u;
  detail::fft2(u.grid, w.v, false);
  for (int kt = 0; kt < u.grid.N_t; ++kt)
    for (int ky = 0; ky < u.grid.N_y; ++ky)
      w.v[u.grid.index(kt, ky)] *= m(Vec2(u.grid.freq_t(kt), u.grid.freq_y(ky)));
  detail::fft2(u.grid, w.v, true);
  return w;
}

// smooth boundary taper: one inside, a small floor at the edge; the ramp
// occupies the outer frac-fraction of each half-length
inline double boundary_taper(double s, double L, double frac, double floor_val = 1e-3) {
  if (frac <= 0.0) return 1.0;
  const double r = (std::abs(s) / L - (1.0 - frac)) / frac;
  if (r <= 0.0) return 1.0;
  return floor_val + (1.0 - floor_val) * (1.0 - smoothstep(std::min(r, 1.0)));
}

// norm of <D>^k (<x>^l u) with the multiplier applied after an optional taper
// that suppresses periodic wrap-around of non-periodic data
inline double weighted_norm(const GridFunction& u, double k, double l, double taper_frac = 0.1) {
  const SpacetimeGrid& g = u.grid;
  GridFunction w = u;
  for (int it = 0; it < g.N_t; ++it)
    for (int iy = 0; iy < g.N_y; ++iy) {
      const Vec2 x = g.node(it, iy);
      w.at(it, iy) *= std::pow(jap(x), l) * boundary_taper(x[0], g.L_t, taper_frac) *
                      boundary_taper(x[1], g.L_y, taper_frac);
    }
  detail::fft2(g, w.v, false);
  double acc = 0.0;
  for (int kt = 0; kt < g.N_t; ++kt)
    for (int ky = 0; ky < g.N_y; ++ky) {
      const double mult = std::pow(jap(Vec2(g.freq_t(kt), g.freq_y(ky))), k);
      acc += sq(mult) * std::norm(w.v[g.index(kt, ky)]);
    }
  return std::sqrt(g.h_t() * g.h_y() * acc / g.n());
}

using PhaseSymbol = std::function<Cd(const Vec2&, const Vec2&)>;

// discrete Weyl quantization: midpoint rule in x, DFT in xi, with the Nyquist
// bins averaged over both frequency signs so real symbols come out Hermitian;
// kernel entries below prune_tol of the per-midpoint peak are dropped
inline GridOperator quantize_weyl(const PhaseSymbol& a, const SpacetimeGrid& g,
                                  const std::string& name = "Op(a)",
                                  double prune_tol = 1e-12) {
  g.validate();
  const int Nt = g.N_t, Ny = g.N_y;
  double max_imag = 0.0;
  auto sym_eval = [&](const Vec2& m, int kt, int ky) {
    const double ft[2] = {g.freq_t(kt), -g.freq_t(kt)};
    const double fy[2] = {g.freq_y(ky), -g.freq_y(ky)};
    const int nt = (kt == Nt / 2) ? 2 : 1, ny = (ky == Ny / 2) ? 2 : 1;
    Cd acc(0.0);
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < ny; ++j) acc += a(m, Vec2(ft[i], fy[j]));
    const Cd val = acc / static_cast<double>(nt * ny);
    max_imag = std::max(max_imag, std::abs(val.imag()));
    return val;
  };

  std::vector<Trip> trips;
  Eigen::VectorXcd A(g.n());
  for (int st = 0; st <= 2 * Nt - 2; ++st) {
    const double mt = -g.L_t + 0.5 * st * g.h_t();
    for (int sy = 0; sy <= 2 * Ny - 2; ++sy) {
      const Vec2 m(mt, -g.L_y + 0.5 * sy * g.h_y());
      for (int kt = 0; kt < Nt; ++kt)
        for (int ky = 0; ky < Ny; ++ky) A[g.index(kt, ky)] = sym_eval(m, kt, ky);
      detail::fft2(g, A, true);  // B[d] = (1/n) sum_k A_k e^{i 2 pi k d / N}
      double peak = 0.0;
      for (long i = 0; i < A.size(); ++i) peak = std::max(peak, std::abs(A[i]));
      const double cut = prune_tol * peak;
      const int jt_lo = std::max(0, st - Nt + 1), jt_hi = std::min(Nt - 1, st);
      const int jy_lo = std::max(0, sy - Ny + 1), jy_hi = std::min(Ny - 1, sy);
      for (int jt = jt_lo; jt <= jt_hi; ++jt) {
        const int kt = st - jt;
        const int dt = ((jt - kt) % Nt + Nt) % Nt;
        for (int jy = jy_lo; jy <= jy_hi; ++jy) {
          const int ky = sy - jy;
          const int dy = ((jy - ky) % Ny + Ny) % Ny;
          const Cd val = A[g.index(dt, dy)];
          if (std::abs(val) <= cut) continue;
          trips.emplace_back(g.index(jt, jy), g.index(kt, ky), val);
        }
      }
    }
  }
  GridOperator op;
  op.grid = g;
  op.mat.resize(g.n(), g.n());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  op.annotation = name;
  op.herm_defect = hermitian_defect(op.mat);
  op.hermitian = (max_imag == 0.0) && op.herm_defect <= 1e-10;
  return op;
}

struct WindowSpec {
  std::function<double(double)> phi;
  std::string name = "phi";
};

// dense functional calculus phi(P) through the eigendecomposition
inline GridOperator spectral_window(const GridOperator& P, const WindowSpec& w,
                                    double prune_tol = 1e-13) {
  require(P.hermitian, ErrorKind::Config, "spectral window needs a Hermitian operator");
  require(P.grid.n() <= 6400, ErrorKind::Size,
          "dense spectral window capped at 6400 unknowns; use the Chebyshev path");
  Eigen::MatrixXcd dense(P.mat);
  dense = Cd(0.5) * (dense + dense.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  require(es.info() == Eigen::Success, ErrorKind::SolveFailure, "eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues();
  Eigen::VectorXd flam(lam.size());
  for (long i = 0; i < lam.size(); ++i) flam[i] = w.phi(lam[i]);
  Eigen::MatrixXcd out = es.eigenvectors() * flam.asDiagonal() *
                         es.eigenvectors().adjoint();
  const double peak = out.cwiseAbs().maxCoeff();
  std::vector<Trip> trips;
  for (long j = 0; j < out.cols(); ++j)
    for (long i = 0; i < out.rows(); ++i)
      if (std::abs(out(i, j)) > prune_tol * peak) trips.emplace_back(i, j, out(i, j));
  GridOperator op;
  op.grid = P.grid;
  op.mat.resize(P.grid.n(), P.grid.n());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  op.annotation = w.name + "(" + P.annotation + ")";
  op.herm_defect = hermitian_defect(op.mat);
  op.hermitian = op.herm_defect <= 1e-10;
  return op;
}

// Chebyshev filtering path: phi(P)u without the dense decomposition; the
// spectral interval comes from Gershgorin disks of the sparse matrix
inline GridFunction chebyshev_window_apply(const GridOperator& P, const WindowSpec& w,
                                           const GridFunction& u, int degree = 300) {
  require(P.hermitian, ErrorKind::Config, "Chebyshev filtering needs a Hermitian operator");
  require(degree >= 2, ErrorKind::Config, "Chebyshev degree must be at least 2");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int k = 0; k < P.mat.outerSize(); ++k) {
    double diag = 0.0, rad = 0.0;
    for (SpMat::InnerIterator it(P.mat, k); it; ++it) {
      if (it.row() == it.col())
        diag = it.value().real();
      else
        rad += std::abs(it.value());
    }
    lo = std::min(lo, diag - rad);
    hi = std::max(hi, diag + rad);
  }
  const double c = 0.5 * (hi + lo), r = 0.5 * (hi - lo) * (1.0 + 1e-12);

  const int M = 4 * degree;
  std::vector<double> coef(degree + 1, 0.0);
  for (int m = 0; m < M; ++m) {
    const double th = pi * (m + 0.5) / M;
    const double f = w.phi(c + r * std::cos(th));
    for (int k = 0; k <= degree; ++k) coef[k] += f * std::cos(k * th);
  }
  for (int k = 0; k <= degree; ++k) coef[k] *= (k == 0 ? 1.0 : 2.0) / M;

  // three-term recurrence in the scaled operator
  auto scaled_apply = [&](const Eigen::VectorXcd& x) {
    return Eigen::VectorXcd(((P.mat * x) - c * x) / r);
  };
  Eigen::VectorXcd tkm1 = u.v, tk = scaled_apply(u.v);
  Eigen::VectorXcd acc = coef[0] * tkm1 + coef[1] * tk;
  for (int k = 2; k <= degree; ++k) {
    Eigen::VectorXcd tkp1 = 2.0 * scaled_apply(tk) - tkm1;
    acc += coef[k] * tkp1;
    tkm1.swap(tk);
    tk.swap(tkp1);
  }
  GridFunction out(u.grid);
  out.v = acc;
  return out;
}

}  // namespace amwave
