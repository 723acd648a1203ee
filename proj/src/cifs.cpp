#include "ccf/cifs.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ccf/error.hpp"

namespace ccf {

Parameter::Parameter(double u, double v) : u_(u), v_(v) {
  if (!std::isfinite(u) || !std::isfinite(v) || u < 0.0 || v < 1.0) {
    std::ostringstream os;
    os << "parameter " << u << (v < 0 ? "" : "+") << v
       << "i lies outside A0 (need u >= 0 and v >= 1)";
    throw Error(ErrorKind::Domain, os.str());
  }
}

Parameter validate_parameter(double u, double v) { return Parameter(u, v); }

Word::Word(std::vector<Letter> letters, int max_length) : letters_(std::move(letters)) {
  if (letters_.empty()) {
    throw Error(ErrorKind::Precondition, "a word has at least one letter");
  }
  if (static_cast<int>(letters_.size()) > max_length) {
    throw Error(ErrorKind::Precondition, "word longer than the configured maximum");
  }
  for (const auto& l : letters_) {
    if (l.m < 1 || l.n < 1) {
      throw Error(ErrorKind::Precondition, "letter indices start at 1");
    }
  }
}

Truncation::Truncation(int n) : n_(n) {
  if (n < 1) throw Error(ErrorKind::Usage, "truncation N must be >= 1");
}

std::vector<Letter> Truncation::letters() const {
  std::vector<Letter> out;
  out.reserve(static_cast<std::size_t>(letter_count()));
  for (int n = 1; n <= n_; ++n) {
    for (int m = 1; m <= n_; ++m) out.push_back({m, n});
  }
  return out;
}

Complex letter_value(const Letter& l, const Parameter& tau) {
  return Complex(l.m, 0.0) + static_cast<double>(l.n) * tau.tau();
}

MobiusMap word_map(const Word& w, const Parameter& tau) {
  MobiusMap acc = MobiusMap::letter(letter_value(w.letters().front(), tau));
  for (std::size_t i = 1; i < w.size(); ++i) {
    acc = mobius_compose(acc, MobiusMap::letter(letter_value(w.letters()[i], tau)));
  }
  return acc;
}

DerivBounds letter_deriv_norm(Complex b) {
  const double r = std::abs(b + 0.5);
  const double near = r - 0.5;
  const double far = r + 0.5;
  return {1.0 / (far * far), 1.0 / (near * near)};
}

DerivBounds letter_deriv_norm(const Letter& l, const Parameter& tau) {
  return letter_deriv_norm(letter_value(l, tau));
}

bool GeometryReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::string GeometryReport::to_text() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "tau_u=" << tau_u << "\n"
     << "tau_v=" << tau_v << "\n"
     << "N=" << cutoff << "\n"
     << "samples=" << sample_count << "\n";
  for (const auto& c : checks) {
    os << c.name << ".inequality=" << c.inequality << "\n"
       << c.name << ".observed=" << c.observed << "\n"
       << c.name << ".bound=" << c.bound << "\n"
       << c.name << ".passed=" << (c.passed ? "true" : "false") << "\n";
  }
  os << "passed=" << (passed() ? "true" : "false") << "\n";
  return os.str();
}

namespace {

std::vector<Complex> sample_domain(int count, std::uint64_t seed) {
  const Disk x = Disk::system_domain();
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double angle = 2.0 * std::numbers::pi * unit(gen);
    // Every fourth sample sits on the boundary circle, where extremes live.
    const double radius = (i % 4 == 0) ? x.radius : x.radius * std::sqrt(unit(gen));
    out.push_back(x.center + std::polar(radius, angle));
  }
  return out;
}

}  // namespace

GeometryReport verify_geometry(const Parameter& tau, const Truncation& trunc,
                               int sample_count, std::uint64_t seed) {
  if (sample_count < 2) {
    throw Error(ErrorKind::Precondition, "verify_geometry needs at least 2 samples");
  }
  constexpr double kSlack = 1e-9;
  const auto samples = sample_domain(sample_count, seed);
  const auto letters = trunc.letters();
  std::vector<Complex> values;
  values.reserve(letters.size());
  for (const auto& l : letters) values.push_back(letter_value(l, tau));

  const Disk x = Disk::system_domain();
  double min_shift = std::numeric_limits<double>::infinity();
  double max_lipschitz = 0.0;
  double max_image_offset = 0.0;
  for (const Complex b : values) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Complex z = samples[i];
      min_shift = std::min(min_shift, std::norm(z + b));
      const Complex image = 1.0 / (z + b);
      max_image_offset = std::max(max_image_offset, std::abs(image - x.center));
      const Complex w = samples[(i + 1) % samples.size()];
      const double gap = std::abs(z - w);
      if (gap > 0.0) {
        max_lipschitz = std::max(max_lipschitz, std::abs(image - 1.0 / (w + b)) / gap);
      }
    }
  }

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      min_gap = std::min(min_gap, std::abs(values[i] - values[j]));
    }
  }
  if (values.size() < 2) min_gap = 1.0;  // no pair to separate

  GeometryReport report;
  report.tau_u = tau.u();
  report.tau_v = tau.v();
  report.cutoff = trunc.cutoff();
  report.sample_count = sample_count;
  report.checks.push_back({"shift", "min |z+b|^2 >= 5/4 - 1e-9", min_shift, 1.25,
                           min_shift >= 1.25 - kSlack});
  report.checks.push_back({"contraction", "max |phi_b(z)-phi_b(z')|/|z-z'| <= 4/5 + 1e-9",
                           max_lipschitz, 0.8, max_lipschitz <= 0.8 + kSlack});
  report.checks.push_back({"open_set", "min |b-b'| >= 1 over distinct letters", min_gap,
                           1.0, min_gap >= 1.0 - kSlack});
  report.checks.push_back({"invariance", "max |phi_b(z)-1/2| <= 1/2 + 1e-9",
                           max_image_offset, 0.5, max_image_offset <= 0.5 + kSlack});
  return report;
}

std::pair<double, double> ratio_constants(const Parameter& tau) {
  const double u = tau.u();
  const double v = tau.v();
  const double spread = 2.0 + std::max(u, v);
  const double low = std::min(1.0 / spread, ((2.0 / 3.0) * v - 0.5) / spread);
  const double c1 = 0.5 * low * low;
  const double head = (2.0 + u + 1.0) * (2.0 + u + 1.0);
  const double c2 = std::max(head, head / (u * u + (v - 0.5) * (v - 0.5))) +
                    (0.5 + (4.0 / 3.0) * v) * (0.5 + (4.0 / 3.0) * v) /
                        ((v - 0.5) * (v - 0.5));
  return {c1, c2};
}

}  // namespace ccf
