#include "ccf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccf/error.hpp"

namespace ccf {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::NumericExhaustion: return "numeric-exhaustion";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::NoSignChange: return "no-sign-change";
    case ErrorKind::DegenerateFit: return "degenerate-fit";
    case ErrorKind::Io: return "io";
    case ErrorKind::CheckFailed: return "check-failed";
  }
  return "unknown";
}

Disk::Disk(Complex c, double r) : center(c), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::Precondition, "disk radius must be positive");
  }
}

std::pair<double, double> disk_min_max_distance(Complex p, const Disk& d) {
  const double dist = std::abs(p - d.center);
  return {std::max(dist - d.radius, 0.0), dist + d.radius};
}

MobiusMap::MobiusMap(Complex a, Complex b, Complex c, Complex d)
    : a_(a), b_(b), c_(c), d_(d), det_(a * d - b * c) {
  normalize();
}

MobiusMap::MobiusMap(Complex a, Complex b, Complex c, Complex d, Complex det)
    : a_(a), b_(b), c_(c), d_(d), det_(det) {
  normalize();
}

void MobiusMap::normalize() {
  const double big = std::max({std::abs(a_.real()), std::abs(a_.imag()),
                               std::abs(b_.real()), std::abs(b_.imag()),
                               std::abs(c_.real()), std::abs(c_.imag()),
                               std::abs(d_.real()), std::abs(d_.imag())});
  if (!(big > 0.0) || !std::isfinite(big)) {
    throw Error(ErrorKind::NumericExhaustion, "Mobius matrix is zero or non-finite");
  }
  int exponent = 0;
  std::frexp(big, &exponent);
  // Largest component in [1/2, 1); the largest modulus is then in [1/2, sqrt 2),
  // so step once more when needed to land it in [1/2, 1].
  a_ = {std::ldexp(a_.real(), -exponent), std::ldexp(a_.imag(), -exponent)};
  b_ = {std::ldexp(b_.real(), -exponent), std::ldexp(b_.imag(), -exponent)};
  c_ = {std::ldexp(c_.real(), -exponent), std::ldexp(c_.imag(), -exponent)};
  d_ = {std::ldexp(d_.real(), -exponent), std::ldexp(d_.imag(), -exponent)};
  det_ = {std::ldexp(det_.real(), -2 * exponent), std::ldexp(det_.imag(), -2 * exponent)};
  const double mod = std::max({std::abs(a_), std::abs(b_), std::abs(c_), std::abs(d_)});
  if (mod > 1.0) {
    a_ *= 0.5;
    b_ *= 0.5;
    c_ *= 0.5;
    d_ *= 0.5;
    det_ *= 0.25;
  }
  if (det_ == Complex(0.0, 0.0) || !std::isfinite(std::abs(det_))) {
    throw Error(ErrorKind::NumericExhaustion, "Mobius determinant underflowed or is zero");
  }
}

MobiusMap mobius_compose(const MobiusMap& m1, const MobiusMap& m2) {
  return {m1.a() * m2.a() + m1.b() * m2.c(), m1.a() * m2.b() + m1.b() * m2.d(),
          m1.c() * m2.a() + m1.d() * m2.c(), m1.c() * m2.b() + m1.d() * m2.d(),
          m1.det() * m2.det()};
}

Complex mobius_apply(const MobiusMap& m, Complex z) {
  const Complex den = m.c() * z + m.d();
  if (den == Complex(0.0, 0.0)) {
    std::ostringstream os;
    os << "mobius_apply at the pole " << z;
    throw Error(ErrorKind::Precondition, os.str());
  }
  return (m.a() * z + m.b()) / den;
}

DerivBounds mobius_deriv_bounds(const MobiusMap& m, const Disk& d) {
  // |c z + d| = |c| |z - pole|, so |c| * dist(pole, D) = |c center + d| -+ |c| r.
  const double det = std::abs(m.det());
  const double center_term = std::abs(m.c() * d.center + m.d());
  const double spread = std::abs(m.c()) * d.radius;
  const double near = center_term - spread;
  if (!(near > 0.0)) {
    throw Error(ErrorKind::Precondition, "pole of the map lies in the closed disk");
  }
  const double far = center_term + spread;
  return {det / (far * far), det / (near * near)};
}

}  // namespace ccf
