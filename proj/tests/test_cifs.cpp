#include <doctest.h>

#include <random>

#include "ccf/cifs.hpp"
#include "ccf/error.hpp"
#include "oracle.hpp"

using namespace ccf;

namespace {
const Disk kX = Disk::system_domain();

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Usage;
}
}  // namespace

TEST_SUITE("parameter") {
  TEST_CASE("corner of A0") {
    const auto p = validate_parameter(0.0, 1.0);
    CHECK_FALSE(p.interior());
  }
  TEST_CASE("interior") { CHECK(validate_parameter(1.0, 2.0).interior()); }
  TEST_CASE("edges are not interior") {
    CHECK_FALSE(validate_parameter(0.0, 3.0).interior());
    CHECK_FALSE(validate_parameter(2.0, 1.0).interior());
  }
  TEST_CASE("outside A0") {
    CHECK(kind_of([] { validate_parameter(-0.1, 1.0); }) == ErrorKind::Domain);
    CHECK(kind_of([] { validate_parameter(0.0, 0.999); }) == ErrorKind::Domain);
    CHECK(kind_of([] { validate_parameter(NAN, 2.0); }) == ErrorKind::Domain);
  }
}

TEST_SUITE("alphabet") {
  TEST_CASE("letter values") {
    CHECK(letter_value({1, 1}, Parameter(0.0, 1.0)) == Complex(1.0, 1.0));
    CHECK(letter_value({2, 3}, Parameter(1.0, 1.0)) == Complex(5.0, 3.0));
  }

  TEST_CASE("letters need m, n >= 1") {
    CHECK_THROWS_AS(Word({Letter{0, 1}}), Error);
    CHECK_THROWS_AS(Word({Letter{1, -2}}), Error);
  }

  TEST_CASE("word length limits") {
    CHECK_THROWS_AS(Word({}), Error);
    CHECK_NOTHROW(Word(std::vector<Letter>(16, Letter{1, 1})));
    CHECK_THROWS_AS(Word(std::vector<Letter>(17, Letter{1, 1})), Error);
    CHECK_NOTHROW(Word(std::vector<Letter>(17, Letter{1, 1}), 20));
  }

  TEST_CASE("truncation") {
    const Truncation t(3);
    CHECK(t.letter_count() == 9);
    const auto letters = t.letters();
    REQUIRE(letters.size() == 9);
    CHECK(letters.front() == Letter{1, 1});
    CHECK(letters[1] == Letter{2, 1});
    CHECK(letters.back() == Letter{3, 3});
    CHECK(t.contains({3, 1}));
    CHECK_FALSE(t.contains({4, 1}));
    CHECK(kind_of([] { Truncation(0); }) == ErrorKind::Usage);
  }
}

TEST_SUITE("letter bounds") {
  TEST_CASE("1+i against grid search") {
    const auto b = letter_deriv_norm({1, 1}, Parameter(0.0, 1.0));
    const auto ref = oracle::grid_extrema([](Complex z) { return 1.0 / std::norm(z + Complex(1, 1)); },
                                          kX, 1000000);
    CHECK(oracle::rel_err(b.inf_norm, ref.min) < 1e-3);
    CHECK(oracle::rel_err(b.sup_norm, ref.max) < 1e-3);
    CHECK(b.inf_norm == doctest::Approx(0.188580).epsilon(1e-5));
    CHECK(b.sup_norm == doctest::Approx(0.589197).epsilon(1e-5));
  }

  TEST_CASE("2+i against grid search") {
    const auto b = letter_deriv_norm({2, 1}, Parameter(0.0, 1.0));
    const auto ref = oracle::grid_extrema([](Complex z) { return 1.0 / std::norm(z + Complex(2, 1)); },
                                          kX, 1000000);
    CHECK(oracle::rel_err(b.inf_norm, ref.min) < 1e-3);
    CHECK(oracle::rel_err(b.sup_norm, ref.max) < 1e-3);
    CHECK(b.inf_norm == doctest::Approx(0.098116).epsilon(1e-5));
    CHECK(b.sup_norm == doctest::Approx(0.208021).epsilon(1e-5));
  }

  TEST_CASE("100+i: ratio near one") {
    const auto b = letter_deriv_norm({100, 1}, Parameter(0.0, 1.0));
    const double delta = std::abs(Complex(100.5, 1.0)) - 0.5;
    CHECK(b.sup_norm / b.inf_norm == doctest::Approx(std::pow((delta + 1) / delta, 2)).epsilon(1e-12));
    CHECK(b.sup_norm / b.inf_norm == doctest::Approx(1.0201).epsilon(1e-4));
    CHECK(b.sup_norm < 2e-4);
    CHECK(b.inf_norm > 5e-5);
  }

  TEST_CASE("sampled values lie between the closed forms") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const Parameter tau : {Parameter(0, 1), Parameter(1, 1), Parameter(2, 3), Parameter(0.3, 7)}) {
      for (const auto& l : Truncation(6).letters()) {
        const Complex b = letter_value(l, tau);
        const auto bounds = letter_deriv_norm(l, tau);
        CHECK(bounds.sup_norm <= 0.8);
        for (int s = 0; s < 50; ++s) {
          const double r = 0.5 * std::sqrt(unit(gen));
          const double a = 2 * M_PI * unit(gen);
          const Complex z = Complex(0.5, 0.0) + r * Complex(std::cos(a), std::sin(a));
          const double value = 1.0 / std::norm(z + b);
          CHECK(value <= bounds.sup_norm * (1 + 1e-12));
          CHECK(value >= bounds.inf_norm * (1 - 1e-12));
        }
      }
    }
  }
}

TEST_SUITE("geometry suite") {
  TEST_CASE("tau = i, N = 5, 1000 samples") {
    const auto report = verify_geometry(Parameter(0.0, 1.0), Truncation(5), 1000);
    CHECK(report.passed());
    CHECK(report.checks.size() == 4);
    for (const auto& c : report.checks) CHECK_MESSAGE(c.passed, c.name);
  }

  TEST_CASE("adjacent letters are exactly one apart") {
    const auto report = verify_geometry(Parameter(0.0, 1.0), Truncation(2), 100);
    const auto it = std::find_if(report.checks.begin(), report.checks.end(),
                                 [](const CheckResult& c) { return c.name == "open_set"; });
    REQUIRE(it != report.checks.end());
    CHECK(it->observed == doctest::Approx(1.0));
  }

  TEST_CASE("text record") {
    const auto text = verify_geometry(Parameter(1.0, 1.0), Truncation(3), 50).to_text();
    CHECK(text.find("passed=true") != std::string::npos);
    CHECK(text.find("shift.observed=") != std::string::npos);
  }

  TEST_CASE("deterministic for a fixed seed") {
    const auto a = verify_geometry(Parameter(2.0, 3.0), Truncation(4), 500, 9).to_text();
    const auto b = verify_geometry(Parameter(2.0, 3.0), Truncation(4), 500, 9).to_text();
    CHECK(a == b);
  }

  TEST_CASE("needs two samples") {
    CHECK(kind_of([] { verify_geometry(Parameter(0, 1), Truncation(2), 1); }) == ErrorKind::Precondition);
  }
}

TEST_SUITE("ratio constants") {
  TEST_CASE("tau = i") {
    const auto [c1, c2] = ratio_constants(Parameter(0.0, 1.0));
    // (1/2) (min(1/3, (1/6)/3))^2 and max(9, 9/(1/4)) + (11/6)^2 / (1/4)
    CHECK(c1 == doctest::Approx(0.5 / 324.0).epsilon(1e-12));
    CHECK(c2 == doctest::Approx(36.0 + (121.0 / 36.0) * 4.0).epsilon(1e-12));
    CHECK(c1 == doctest::Approx(0.0015432).epsilon(1e-4));
    CHECK(c2 == doctest::Approx(49.4444).epsilon(1e-5));
  }

  TEST_CASE("identity ratio lies between the constants") {
    for (const Parameter tau : {Parameter(0, 1), Parameter(1, 2), Parameter(3, 1), Parameter(0.5, 9)}) {
      const auto [c1, c2] = ratio_constants(tau);
      CHECK(c1 > 0.0);
      CHECK(c1 <= 1.0);
      CHECK(c2 >= 1.0);
      CHECK(std::isfinite(c2));
    }
  }

  TEST_CASE("sampled neighbourhood ratios stay inside [C1, C2]") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const Parameter tau : {Parameter(0, 1), Parameter(1, 2), Parameter(2.5, 1.5)}) {
      const auto [c1, c2] = ratio_constants(tau);
      for (int s = 0; s < 20000; ++s) {
        auto disk_point = [&] {
          const double r = 0.5 * std::sqrt(unit(gen));
          const double a = 2 * M_PI * unit(gen);
          return Complex(0.5, 0.0) + r * Complex(std::cos(a), std::sin(a));
        };
        const double uk = std::max(0.0, tau.u() + (2 * unit(gen) - 1));
        const double vk = std::max(1.0, tau.v() + (2 * unit(gen) - 1) * tau.v() / 3);
        const int m = 1 + static_cast<int>(unit(gen) * 30);
        const int n = 1 + static_cast<int>(unit(gen) * 30);
        const Complex z = disk_point();
        const Complex zk = disk_point();
        const double ratio = std::norm(zk + double(m) + double(n) * Complex(uk, vk)) /
                             std::norm(z + double(m) + double(n) * tau.tau());
        CHECK(ratio >= c1);
        CHECK(ratio <= c2);
      }
    }
  }
}
