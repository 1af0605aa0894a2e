#pragma once

#include <functional>
#include <vector>

#include "amwave/grid.hpp"
#include "amwave/regions.hpp"
#include "amwave/spectral.hpp"

namespace amwave {

using PhasePredicate = std::function<bool(const Vec2&, const Vec2&)>;

namespace detail {
// periodized 1D Gaussian on the interval of half-length L
inline double wrapped_gauss(double d, double L, double sigma) {
  double s = 0.0;
  for (int m = -2; m <= 2; ++m) s += std::exp(-sq(d + 2.0 * L * m) / (2.0 * sq(sigma)));
  return s;
}

inline std::vector<int> window_centers(int N, int stride) {
  std::vector<int> c;
  for (int i = 0; i < N; i += stride) c.push_back(i);
  return c;
}
}  // namespace detail

// phase-space mass of u inside the predicate region, from a Gabor frame of
// periodized Gaussians; the windows are normalized by the pointwise patch
// energy so the full-phase-space mass equals the squared grid norm exactly
inline double gabor_mass(const GridFunction& u, double sigma, const PhasePredicate& pred) {
  const SpacetimeGrid& g = u.grid;
  g.validate();
  u.require_finite();
  require(sigma >= 2.0 * std::max(g.h_t(), g.h_y()), ErrorKind::Domain,
          "gabor window must span at least two cells");
  const int st = std::max(1, static_cast<int>(std::floor(sigma / (2.0 * g.h_t()))));
  const int sy = std::max(1, static_cast<int>(std::floor(sigma / (2.0 * g.h_y()))));
  const std::vector<int> ct = detail::window_centers(g.N_t, st);
  const std::vector<int> cy = detail::window_centers(g.N_y, sy);

  auto axis_weights = [&](int N, double L, double h, const std::vector<int>& centers) {
    std::vector<std::vector<double>> w(centers.size(), std::vector<double>(N));
    for (size_t c = 0; c < centers.size(); ++c)
      for (int i = 0; i < N; ++i)
        w[c][i] = detail::wrapped_gauss((i - centers[c]) * h, L, sigma);
    return w;
  };
  const auto wt = axis_weights(g.N_t, g.L_t, g.h_t(), ct);
  const auto wy = axis_weights(g.N_y, g.L_y, g.h_y(), cy);

  std::vector<double> St(g.N_t, 0.0), Sy(g.N_y, 0.0);
  for (const auto& row : wt)
    for (int i = 0; i < g.N_t; ++i) St[i] += sq(row[i]);
  for (const auto& row : wy)
    for (int i = 0; i < g.N_y; ++i) Sy[i] += sq(row[i]);

  const double cell = g.h_t() * g.h_y() / g.n();
  double mass = 0.0;
  Eigen::VectorXcd v(g.n());
  for (size_t a = 0; a < ct.size(); ++a)
    for (size_t b = 0; b < cy.size(); ++b) {
      const Vec2 center = g.node(ct[a], cy[b]);
      for (int it = 0; it < g.N_t; ++it)
        for (int iy = 0; iy < g.N_y; ++iy)
          v[g.index(it, iy)] =
              u.v[g.index(it, iy)] * wt[a][it] * wy[b][iy] / std::sqrt(St[it] * Sy[iy]);
      detail::fft2(g, v, false);
      for (int kt = 0; kt < g.N_t; ++kt)
        for (int ky = 0; ky < g.N_y; ++ky) {
          if (!pred(center, Vec2(g.freq_t(kt), g.freq_y(ky)))) continue;
          mass += cell * std::norm(v[g.index(kt, ky)]);
        }
    }
  return mass;
}

inline double gabor_mass(const GridFunction& u, double sigma, const InverseMetricField& f,
                         const RegionSpec& spec) {
  return gabor_mass(u, sigma, [&](const Vec2& x, const Vec2& xi) {
    if (xi.squaredNorm() == 0.0) return false;
    return region_contains(spec, &f, PhasePoint{x, xi});
  });
}

inline double gabor_total_mass(const GridFunction& u, double sigma) {
  return gabor_mass(u, sigma, [](const Vec2&, const Vec2&) { return true; });
}

}  // namespace amwave
