#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "amwave/grid.hpp"

namespace amwave {

inline void write_grid_function_csv(const GridFunction& u, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Config, "cannot open " + path);
  out << "t,y,re,im\n" << std::setprecision(17);
  for (int it = 0; it < u.grid.N_t; ++it)
    for (int iy = 0; iy < u.grid.N_y; ++iy) {
      const Vec2 x = u.grid.node(it, iy);
      const Cd z = u.v[u.grid.index(it, iy)];
      out << x[0] << ',' << x[1] << ',' << z.real() << ',' << z.imag() << '\n';
    }
  require(out.good(), ErrorKind::Config, "write failed for " + path);
}

inline GridFunction read_grid_function_csv(const SpacetimeGrid& g, const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Config, "cannot open " + path);
  std::string line;
  std::getline(in, line);
  require(line == "t,y,re,im", ErrorKind::Config, "unexpected header in " + path);
  GridFunction u(g);
  long count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double t, y, re, im;
    char c;
    require(static_cast<bool>(row >> t >> c >> y >> c >> re >> c >> im), ErrorKind::Config,
            "bad row in " + path);
    require(count < g.n(), ErrorKind::Size, "too many rows for grid in " + path);
    const Vec2 x = g.node(static_cast<int>(count / g.N_y), static_cast<int>(count % g.N_y));
    require(std::abs(t - x[0]) + std::abs(y - x[1]) < 1e-9, ErrorKind::Config,
            "node mismatch in " + path);
    u.v[count++] = Cd(re, im);
  }
  require(count == g.n(), ErrorKind::Size, "row count does not match grid in " + path);
  return u;
}

inline void write_operator_triplets(const GridOperator& op, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Config, "cannot open " + path);
  out << "row,col,re,im\n" << std::setprecision(17);
  for (int k = 0; k < op.mat.outerSize(); ++k)
    for (SpMat::InnerIterator it(op.mat, k); it; ++it)
      out << it.row() << ',' << it.col() << ',' << it.value().real() << ','
          << it.value().imag() << '\n';
  require(out.good(), ErrorKind::Config, "write failed for " + path);
}

}  // namespace amwave
