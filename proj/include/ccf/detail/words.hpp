#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace ccf::detail {

/// Second row (c, d) of a prefix matrix, scaled by 2^-exponent.
struct Row {
  std::complex<double> c;
  std::complex<double> d;
  int exponent = 0;
};

/// Extends `row` by every word of length `depth_left` over `letters` and
/// calls visit(log_inf, log_sup) with the logs of the extremes of |phi_w'|
/// over X = B(1/2, 1/2).
template <typename Visit>
void descend(const std::vector<std::complex<double>>& letters, int depth_left, const Row& row,
             Visit& visit) {
  for (const auto beta : letters) {
    // [c d] * [[0 1] [1 beta]] = [d, c + d beta], multiplied out by hand to
    // skip the library's inf/nan recovery path.
    const double re = row.c.real() + row.d.real() * beta.real() - row.d.imag() * beta.imag();
    const double im = row.c.imag() + row.d.real() * beta.imag() + row.d.imag() * beta.real();
    Row next{row.d, {re, im}, row.exponent};
    if (depth_left == 1) {
      // |det| of the scaled matrix is 2^(-2 exponent); |c| times the
      // distance from the pole -d/c to X is |d + c/2| -+ |c|/2.
      const double centre = std::sqrt(std::norm(next.d + 0.5 * next.c));
      const double spread = 0.5 * std::sqrt(std::norm(next.c));
      const double log_det = -2.0 * next.exponent * std::numbers::ln2;
      visit(log_det - 2.0 * std::log(centre + spread), log_det - 2.0 * std::log(centre - spread));
    } else {
      const double big = std::max({std::abs(next.c.real()), std::abs(next.c.imag()),
                                   std::abs(next.d.real()), std::abs(next.d.imag())});
      int e = 0;
      std::frexp(big, &e);
      next.c = {std::ldexp(next.c.real(), -e), std::ldexp(next.c.imag(), -e)};
      next.d = {std::ldexp(next.d.real(), -e), std::ldexp(next.d.imag(), -e)};
      next.exponent += e;
      descend(letters, depth_left - 1, next, visit);
    }
  }
}

/// Runs `descend` over all words whose first letter index is congruent to
/// `worker` modulo `stride`.
template <typename Visit>
void visit_words(const std::vector<std::complex<double>>& letters, int level, int worker,
                 int stride, Visit& visit) {
  for (std::size_t i = static_cast<std::size_t>(worker); i < letters.size();
       i += static_cast<std::size_t>(stride)) {
    const Row start{{0.0, 0.0}, {1.0, 0.0}, 0};
    if (level == 1) {
      const std::vector<std::complex<double>> first{letters[i]};
      descend(first, 1, start, visit);
    } else {
      const Row row{start.d, start.c + start.d * letters[i], 0};
      descend(letters, level - 1, row, visit);
    }
  }
}

}  // namespace ccf::detail
