#pragma once

#include <cstdint>

#include "amwave/common.hpp"

namespace amwave {

// radical-inverse Halton point in [0,1); deterministic, no state
inline double halton(std::uint64_t i, std::uint32_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

// low-discrepancy stream over [0,1)^dim; `seed` offsets the index so that
// independent calibration / verification samples never share points
class HaltonStream {
public:
  HaltonStream(std::uint64_t seed, int dim) : idx_(seed * 7919 + 1), dim_(dim) {}

  void next(double* out) {
    static constexpr std::uint32_t bases[8] = {2, 3, 5, 7, 11, 13, 17, 19};
    for (int d = 0; d < dim_; ++d) out[d] = halton(idx_, bases[d % 8]);
    ++idx_;
  }

private:
  std::uint64_t idx_;
  int dim_;
};

}  // namespace amwave
