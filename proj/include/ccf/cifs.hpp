#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccf/geometry.hpp"

namespace ccf {

/// A point tau = u + iv of A0 = {u >= 0, v >= 1}.
class Parameter {
 public:
  /// Throws Domain when (u, v) is outside A0.
  Parameter(double u, double v);

  double u() const { return u_; }
  double v() const { return v_; }
  Complex tau() const { return {u_, v_}; }
  bool interior() const { return u_ > 0.0 && v_ > 1.0; }

 private:
  double u_;
  double v_;
};

Parameter validate_parameter(double u, double v);

/// Lattice index (m, n), m, n >= 1, naming the map z -> 1/(z + m + n tau).
struct Letter {
  int m = 1;
  int n = 1;

  friend bool operator==(const Letter&, const Letter&) = default;
};

inline constexpr int kDefaultMaxWordLength = 16;

/// Finite sequence of letters; phi_w = phi_{w1} o ... o phi_{wk}.
class Word {
 public:
  explicit Word(std::vector<Letter> letters, int max_length = kDefaultMaxWordLength);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }

 private:
  std::vector<Letter> letters_;
};

/// Alphabet cutoff F(N): letters with m <= N and n <= N.
class Truncation {
 public:
  explicit Truncation(int n);

  int cutoff() const { return n_; }
  std::int64_t letter_count() const { return std::int64_t{n_} * n_; }
  bool contains(const Letter& l) const { return l.m <= n_ && l.n <= n_; }
  /// Letters in fixed row-major order: (1,1), (2,1), ..., (N,1), (1,2), ...
  std::vector<Letter> letters() const;

 private:
  int n_;
};

Complex letter_value(const Letter& l, const Parameter& tau);

MobiusMap word_map(const Word& w, const Parameter& tau);

/// Exact extremes of |phi_b'| over X: the pole -b sits at distance
/// |b + 1/2| - 1/2 from X.
DerivBounds letter_deriv_norm(const Letter& l, const Parameter& tau);

/// Same, from the complex letter value.
DerivBounds letter_deriv_norm(Complex b);

/// Outcome of one numeric lemma check.
struct CheckResult {
  std::string name;
  std::string inequality;
  double observed = 0.0;
  double bound = 0.0;
  bool passed = false;
};

/// Evidence that S_tau is a CIFS on X at a finite truncation.
struct GeometryReport {
  double tau_u = 0.0;
  double tau_v = 0.0;
  int cutoff = 0;
  int sample_count = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
  /// One `key=value` per line.
  std::string to_text() const;
};

/// Samples X with a seeded generator and checks: |z + b|^2 >= 5/4,
/// Lipschitz ratio <= 4/5, lattice gap |b - b'| >= 1 for all pairs,
/// and phi_b(X) inside X. Throws Precondition for sample_count < 2.
GeometryReport verify_geometry(const Parameter& tau, const Truncation& trunc,
                               int sample_count, std::uint64_t seed = 1);

/// Bounds C1 <= |z' + m + n tau_k|^2 / |z + m + n tau|^2 <= C2 valid for
/// z, z' in X and |u - u_k| <= 1, |v - v_k| <= v/3.
std::pair<double, double> ratio_constants(const Parameter& tau);

}  // namespace ccf
