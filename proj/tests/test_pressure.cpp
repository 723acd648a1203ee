#include <doctest.h>

#include <cmath>
#include <random>

#include "ccf/error.hpp"
#include "ccf/pressure.hpp"
#include "oracle.hpp"

using namespace ccf;

namespace {

const Disk kX = Disk::system_domain();
const Parameter kI(0.0, 1.0);

/// Sum of sup^t over letters with max(m, n) in (cutoff, reach], exact
/// closed-form norms.
double direct_tail(const Parameter& tau, double t, int cutoff, int reach) {
  double total = 0.0;
  for (int n = 1; n <= reach; ++n) {
    for (int m = 1; m <= reach; ++m) {
      if (m <= cutoff && n <= cutoff) continue;
      total += std::pow(letter_deriv_norm(Letter{m, n}, tau).sup_norm, t);
    }
  }
  return total;
}

void all_words(int letters, int level, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> w(static_cast<std::size_t>(level), 0);
  for (;;) {
    fn(w);
    int i = level - 1;
    while (i >= 0 && ++w[static_cast<std::size_t>(i)] == letters) w[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
  }
}

}  // namespace

TEST_SUITE("single-letter series") {
  TEST_CASE("one letter at t = 1.5") {
    const auto [sup_sum, inf_sum] = psi1_partial(kI, 1.5, Truncation(1));
    const auto ref = oracle::grid_extrema([](Complex z) { return 1.0 / std::norm(z + Complex(1, 1)); },
                                          kX, 1000000);
    CHECK(oracle::rel_err(sup_sum, std::pow(ref.max, 1.5)) < 2e-3);
    CHECK(oracle::rel_err(inf_sum, std::pow(ref.min, 1.5)) < 2e-3);
    CHECK(sup_sum == doctest::Approx(0.452286).epsilon(5e-4));
    CHECK(inf_sum == doctest::Approx(0.081876).epsilon(5e-4));
  }

  TEST_CASE("t = 0 counts letters") {
    for (int n : {1, 4, 9}) {
      const auto [s, i] = psi1_partial(Parameter(1.0, 2.0), 0.0, Truncation(n));
      CHECK(s == doctest::Approx(n * n));
      CHECK(i == doctest::Approx(n * n));
    }
  }

  TEST_CASE("monotone in N and in t") {
    double prev_sup = 0.0;
    double prev_inf = 0.0;
    for (int n = 1; n <= 12; ++n) {
      const auto [s, i] = psi1_partial(kI, 1.3, Truncation(n));
      CHECK(s >= prev_sup);
      CHECK(i >= prev_inf);
      CHECK(i <= s);
      prev_sup = s;
      prev_inf = i;
    }
    CHECK(psi1_partial(kI, 1.2, Truncation(5)).first > psi1_partial(kI, 1.4, Truncation(5)).first);
  }
}

TEST_SUITE("tail bound") {
  TEST_CASE("diverges for t <= 1") {
    CHECK(psi1_tail_bound(kI, 1.0, Truncation(10)) == kInfinity);
    CHECK(psi1_tail_bound(kI, 0.5, Truncation(10)) == kInfinity);
    CHECK(psi1_tail_bound_blocks(kI, 1.0, Truncation(10)) == kInfinity);
  }

  TEST_CASE("tau = i, t = 1.2: dominates direct summation and decreases in N") {
    const double t = 1.2;
    const double tail50 = psi1_tail_bound(kI, t, Truncation(50));
    CHECK(std::isfinite(tail50));
    CHECK(direct_tail(kI, t, 50, 5000) <= tail50);
    double prev = kInfinity;
    for (int n : {10, 20, 50, 100, 200}) {
      const double tail = psi1_tail_bound(kI, t, Truncation(n));
      CHECK(tail < prev);
      prev = tail;
    }
  }

  TEST_CASE("large |tau| suppression") {
    const Parameter tau(1000.0, 1000.0);
    const double tail = psi1_tail_bound(tau, 1.1, Truncation(100));
    CHECK(tail < 1e-2);
    CHECK(direct_tail(tau, 1.1, 100, 3000) <= tail);
  }

  TEST_CASE("block estimate is itself an upper bound") {
    for (const Parameter tau : {kI, Parameter(1, 1), Parameter(2, 3)}) {
      for (double t : {1.1, 1.5, 2.0}) {
        const double direct = direct_tail(tau, t, 8, 1500);
        CHECK(direct <= psi1_tail_bound_blocks(tau, t, Truncation(8)));
        CHECK(psi1_tail_bound(tau, t, Truncation(8)) <= psi1_tail_bound_blocks(tau, t, Truncation(8)));
      }
    }
  }

  TEST_CASE("full series stays under the lattice estimate times the sup correction") {
    for (const Parameter tau : {kI, Parameter(1, 1), Parameter(2, 3)}) {
      for (double t : {1.2, 1.5, 2.0}) {
        const Truncation trunc(20);
        const double full = psi1_partial(tau, t, trunc).first + psi1_tail_bound(tau, t, trunc);
        // sup norm <= (|b| - 1)^-2 = |b|^-2 (|b|/(|b|-1))^2, worst at the smallest |b| = |1 + tau|
        const double smallest = std::abs(1.0 + tau.tau());
        const double correction = std::pow(smallest / (smallest - 1.0), 2 * t);
        CHECK(full <= correction * lattice_sum_upper_estimate(tau, t));
      }
    }
  }

  TEST_CASE("two-sided tail model brackets the direct sum") {
    const TailModel tail(kI, Truncation(10));
    for (double t : {1.3, 1.6, 2.0}) {
      const double partial = direct_tail(kI, t, 10, 3000);
      CHECK(tail.upper(t) >= partial);
      CHECK(tail.lower(t) <= tail.upper(t));
      CHECK(tail.lower(t) > 0.0);
    }
    CHECK(tail.upper(1.0) == kInfinity);
  }
}

TEST_SUITE("log spectrum") {
  TEST_CASE("binned sums bracket exact sums") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> logs(-30.0, 0.0);
    LogSpectrum spectrum;
    std::vector<double> values;
    for (int i = 0; i < 5000; ++i) {
      const double x = logs(gen);
      values.push_back(x);
      spectrum.add_upper(x);
      spectrum.add_lower(x);
    }
    for (double t : {0.5, 1.0, 1.7}) {
      double exact = 0.0;
      for (double x : values) exact += std::exp(t * x);
      CHECK(spectrum.upper_sum(t) >= exact);
      CHECK(spectrum.lower_sum(t) <= exact);
      CHECK(spectrum.upper_sum(t) <= exact * std::exp(t * LogSpectrum::kLogBin));
      CHECK(spectrum.lower_sum(t) >= exact * std::exp(-t * LogSpectrum::kLogBin));
    }
  }

  TEST_CASE("merge and subtract") {
    LogSpectrum a, b;
    a.add_upper(-1.0);
    a.add_upper(-2.0);
    b.add_upper(-2.0);
    a.subtract(b);
    CHECK(a.count() == 1);
    a.merge(b);
    CHECK(a.count() == 2);
  }

  TEST_CASE("positive logs rejected") { CHECK_THROWS_AS(LogSpectrum().add_upper(0.5), Error); }
}

TEST_SUITE("word sums") {
  TEST_CASE("level one reduces to the single-letter series") {
    for (double t : {0.7, 1.3, 2.0}) {
      const auto [lo, hi] = psi_n_bounds(kI, t, Truncation(6), 1);
      const auto [s, i] = psi1_partial(kI, t, Truncation(6));
      CHECK(hi == doctest::Approx(s).epsilon(1e-12));
      CHECK(lo == doctest::Approx(i).epsilon(1e-12));
    }
  }

  TEST_CASE("one letter twice at t = 1") {
    const auto [lo, hi] = psi_n_bounds(kI, 1.0, Truncation(1), 2);
    const auto m = word_map(Word({Letter{1, 1}, Letter{1, 1}}), kI);
    const auto ref = oracle::grid_extrema([&](Complex z) { return oracle::deriv_modulus(m, z); }, kX,
                                          1000000);
    CHECK(oracle::rel_err(hi, ref.max) < 1e-3);
    CHECK(oracle::rel_err(lo, ref.min) < 1e-3);
    CHECK(hi == doctest::Approx(0.205037).epsilon(1e-5));
  }

  TEST_CASE("submultiplicative") {
    for (const Parameter tau : {kI, Parameter(1, 2)}) {
      for (double t : {1.0, 1.5}) {
        const double one = psi_n_bounds(tau, t, Truncation(5), 1).second;
        const double two = psi_n_bounds(tau, t, Truncation(5), 2).second;
        const double three = psi_n_bounds(tau, t, Truncation(5), 3).second;
        CHECK(two <= one * one);
        CHECK(three <= two * one);
        CHECK(psi_n_bounds(tau, t, Truncation(5), 2).first <= two);
      }
    }
  }

  TEST_CASE("brute-force oracle inside the enclosure") {
    // Grid extremes of every word map bound the closed forms from inside.
    for (int cutoff = 1; cutoff <= 3; ++cutoff) {
      const auto letters = Truncation(cutoff).letters();
      for (int level = 1; level <= 3; ++level) {
        const double t = 1.4;
        double grid_lo = 0.0;
        double grid_hi = 0.0;
        all_words(static_cast<int>(letters.size()), level, [&](const std::vector<int>& idx) {
          std::vector<Letter> w;
          for (int k : idx) w.push_back(letters[static_cast<std::size_t>(k)]);
          const auto m = word_map(Word(w), kI);
          const auto ref = oracle::grid_extrema(
              [&](Complex z) { return oracle::deriv_modulus(m, z); }, kX, cutoff == 3 && level == 3 ? 20000 : 100000);
          grid_lo += std::pow(ref.min, t);
          grid_hi += std::pow(ref.max, t);
        });
        const auto [lo, hi] = psi_n_bounds(kI, t, Truncation(cutoff), level);
        CHECK(lo <= grid_lo);
        CHECK(grid_hi <= hi);
        CHECK(oracle::rel_err(hi, grid_hi) < 1e-2);
        CHECK(oracle::rel_err(lo, grid_lo) < 1e-2);
      }
    }
  }

  TEST_CASE("budget") {
    bool raised = false;
    try {
      psi_n_bounds(kI, 1.5, Truncation(10), 3, 1000);
    } catch (const Error& e) {
      raised = e.kind() == ErrorKind::Budget;
    }
    CHECK(raised);
  }

  TEST_CASE("parallel enumeration matches serial") {
    const auto serial = psi_n_bounds(Parameter(0.5, 1.5), 1.3, Truncation(7), 2, kDefaultWordBudget, 1);
    const auto parallel = psi_n_bounds(Parameter(0.5, 1.5), 1.3, Truncation(7), 2, kDefaultWordBudget, 3);
    CHECK(serial.first == doctest::Approx(parallel.first).epsilon(1e-13));
    CHECK(serial.second == doctest::Approx(parallel.second).epsilon(1e-13));
  }
}

TEST_SUITE("pressure bracket") {
  TEST_CASE("negative at t = 2 for tau = i") {
    const auto b = pressure_bracket(kI, 2.0, Truncation(40), 2);
    CHECK(b.p_hi < 0.0);
    CHECK(b.p_lo <= b.p_hi);
  }

  TEST_CASE("infinite at t = 1") {
    for (int n : {1, 2}) CHECK(pressure_bracket(kI, 1.0, Truncation(8), n).p_hi == kInfinity);
  }

  TEST_CASE("level doubling sharpens both sides") {
    for (const Parameter tau : {kI, Parameter(1, 1), Parameter(2, 3)}) {
      const PressureModel one(tau, Truncation(10), 1);
      const PressureModel two(tau, Truncation(10), 2);
      for (double t : {1.1, 1.3, 1.5, 1.8, 2.0}) {
        CHECK(two.at(t).p_lo >= one.at(t).p_lo);
        CHECK(two.at(t).p_hi <= one.at(t).p_hi + 1e-9);
      }
    }
  }

  TEST_CASE("strictly decreasing in t") {
    const PressureModel model(kI, Truncation(10), 2);
    double prev_lo = kInfinity;
    double prev_hi = kInfinity;
    for (double t = 1.05; t <= 2.5; t += 0.05) {
      const auto b = model.at(t);
      CHECK(b.p_lo < prev_lo);
      CHECK(b.p_hi < prev_hi);
      CHECK(b.p_lo <= b.p_hi);
      prev_lo = b.p_lo;
      prev_hi = b.p_hi;
    }
  }

  TEST_CASE("lower bound nondecreasing in N") {
    for (double t : {1.2, 1.5, 1.9}) {
      double prev = -kInfinity;
      for (int n : {5, 10, 20, 40}) {
        const double lo = PressureModel(kI, Truncation(n), 2).at(t).p_lo;
        CHECK(lo >= prev);
        prev = lo;
      }
    }
  }

  TEST_CASE("finite subsystem has no tail") {
    const auto model = PressureModel::finite(kI, Truncation(3).letters(), 2);
    CHECK_FALSE(model.has_tail());
    CHECK(model.letter_count() == 9);
    CHECK(std::isfinite(model.at(1.0).p_hi));
    CHECK(model.at(0.0).p_lo == doctest::Approx(std::log(9.0)).epsilon(1e-9));
  }

  TEST_CASE("model matches the one-shot bracket") {
    const auto a = PressureModel(kI, Truncation(6), 2).at(1.4);
    const auto b = pressure_bracket(kI, 1.4, Truncation(6), 2);
    CHECK(a.p_lo == b.p_lo);
    CHECK(a.p_hi == b.p_hi);
  }
}

TEST_SUITE("finiteness exponent") {
  TEST_CASE("tau = i, ten blocks") {
    const auto r = theta_diagnostic(kI, 10);
    CHECK(r.increasing);
    CHECK(r.increments_above_floor);
    CHECK(r.block_sizes_match);
    CHECK(r.slope > 0.0);
    CHECK(std::isfinite(r.tail_bound));
    CHECK(r.passed());
    REQUIRE(r.block_sizes.size() == 10);
    CHECK(r.block_sizes[0] == 1);
    CHECK(r.block_sizes[1] == 8);
    CHECK(r.block_sizes[2] == 40);
    for (std::size_t p = 0; p < r.increments.size(); ++p) CHECK(r.increments[p] >= r.increment_floor[p]);
  }

  TEST_CASE("block increments agree with direct summation") {
    const auto r = theta_diagnostic(kI, 6);
    // K'(p) = {max(m, n) <= 2^p - 1}
    double prev = 0.0;
    for (int p = 1; p <= 6; ++p) {
      const int reach = (1 << p) - 1;
      const double direct = psi1_partial(kI, 1.0, Truncation(reach)).first;
      CHECK(r.partial_sums[static_cast<std::size_t>(p - 1)] == doctest::Approx(direct).epsilon(1e-12));
      CHECK(r.increments[static_cast<std::size_t>(p - 1)] == doctest::Approx(direct - prev).epsilon(1e-9));
      prev = direct;
    }
  }

  TEST_CASE("needs three blocks") { CHECK_THROWS_AS(theta_diagnostic(kI, 2), Error); }
}
