#pragma once

#include <complex>
#include <utility>

namespace ccf {

using Complex = std::complex<double>;

/// Closed disk {z : |z - center| <= radius}.
struct Disk {
  Complex center;
  double radius = 0.0;

  Disk(Complex c, double r);

  /// X = closed disk of center 1/2 and radius 1/2, the common domain of
  /// every map in the family.
  static Disk system_domain() { return Disk({0.5, 0.0}, 0.5); }

  bool contains(Complex z, double slack = 0.0) const {
    return std::abs(z - center) <= radius + slack;
  }
};

/// Extremes of |phi'| over a domain. For the system maps on X,
/// sup_norm <= 4/5.
struct DerivBounds {
  double inf_norm = 0.0;
  double sup_norm = 0.0;
};

/// Distance from p to the nearest and to the farthest point of D.
std::pair<double, double> disk_min_max_distance(Complex p, const Disk& d);

/// z -> (a z + b) / (c z + d), stored as a 2x2 matrix. Entries are kept
/// scaled by a power of two so that the largest magnitude lies in
/// [1/2, 1]; the scaling is exact and does not move any output.
class MobiusMap {
 public:
  MobiusMap(Complex a, Complex b, Complex c, Complex d);

  static MobiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }
  /// z -> 1 / (z + b), matrix rows (0, 1), (1, b).
  static MobiusMap letter(Complex b) { return {0.0, 1.0, 1.0, b}; }

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex c() const { return c_; }
  Complex d() const { return d_; }
  /// Tracked through compositions as a product, never recomputed from
  /// the entries, so long words do not lose it to cancellation.
  Complex det() const { return det_; }

  /// Pole -d/c. Only meaningful when c != 0.
  Complex pole() const { return -d_ / c_; }

 private:
  friend MobiusMap mobius_compose(const MobiusMap&, const MobiusMap&);
  MobiusMap(Complex a, Complex b, Complex c, Complex d, Complex det);
  void normalize();

  Complex a_, b_, c_, d_;
  Complex det_;
};

/// Matrix of m1 o m2. Throws NumericExhaustion when the product
/// determinant underflows.
MobiusMap mobius_compose(const MobiusMap& m1, const MobiusMap& m2);

/// Throws Precondition when z is the pole.
Complex mobius_apply(const MobiusMap& m, Complex z);

/// |phi'(z)| = |det| / |c z + d|^2 attains its extremes over a disk at the
/// points nearest to and farthest from the pole. Throws Precondition when
/// the pole lies in the closed disk.
DerivBounds mobius_deriv_bounds(const MobiusMap& m, const Disk& d);

}  // namespace ccf
