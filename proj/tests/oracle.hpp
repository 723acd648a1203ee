#pragma once

// Brute-force references used to check closed forms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "ccf/geometry.hpp"

namespace oracle {

struct Extrema {
  double min = 0.0;
  double max = 0.0;
};

/// Min and max of f over a square lattice clipped to the disk plus an
/// equally dense ring of boundary points; about `points` evaluations.
inline Extrema grid_extrema(const std::function<double(ccf::Complex)>& f, const ccf::Disk& disk,
                            int points) {
  Extrema out{INFINITY, -INFINITY};
  auto visit = [&](ccf::Complex z) {
    const double y = f(z);
    out.min = std::min(out.min, y);
    out.max = std::max(out.max, y);
  };
  const int side = static_cast<int>(std::sqrt(points * 0.8));
  for (int i = 0; i <= side; ++i) {
    for (int j = 0; j <= side; ++j) {
      const ccf::Complex z = disk.center + disk.radius * ccf::Complex(2.0 * i / side - 1.0, 2.0 * j / side - 1.0);
      if (std::abs(z - disk.center) <= disk.radius) visit(z);
    }
  }
  const int ring = points / 5;
  for (int k = 0; k < ring; ++k) {
    const double a = 2.0 * std::numbers::pi * k / ring;
    visit(disk.center + disk.radius * ccf::Complex(std::cos(a), std::sin(a)));
  }
  return out;
}

/// |phi'(z)| for the Moebius map, evaluated directly.
inline double deriv_modulus(const ccf::MobiusMap& m, ccf::Complex z) {
  return std::abs(m.det()) / std::norm(m.c() * z + m.d());
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace oracle
