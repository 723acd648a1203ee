#include "ccf/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "ccf/detail/words.hpp"
#include "ccf/error.hpp"

namespace ccf {

namespace {

std::vector<Complex> letter_values(const std::vector<Letter>& letters, const Parameter& tau) {
  std::vector<Complex> out;
  out.reserve(letters.size());
  for (const auto& l : letters) out.push_back(letter_value(l, tau));
  return out;
}

double sup_power(Complex b, double t) { return std::pow(letter_deriv_norm(b).sup_norm, t); }

/// sum_{k=1..n} C(n,k) a^(n-k) b^k = (a+b)^n - a^n without cancellation.
double mixed_power(double a, double b, int n) {
  if (b == 0.0) return 0.0;
  if (std::isinf(b)) return kInfinity;
  double total = 0.0;
  double binom = 1.0;
  for (int k = 1; k <= n; ++k) {
    binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
    total += binom * std::pow(a, n - k) * std::pow(b, k);
  }
  return total;
}

std::int64_t word_count(std::size_t letters, int level, std::int64_t budget) {
  double count = 1.0;
  for (int i = 0; i < level; ++i) count *= static_cast<double>(letters);
  if (count > static_cast<double>(budget)) return -1;
  return static_cast<std::int64_t>(count);
}

}  // namespace

// ---------------------------------------------------------------------------

std::pair<double, double> psi1_partial(const Parameter& tau, double t, const Truncation& trunc) {
  if (!(t >= 0.0)) throw Error(ErrorKind::Precondition, "psi1_partial needs t >= 0");
  double sum_sup = 0.0;
  double sum_inf = 0.0;
  for (const auto& l : trunc.letters()) {
    const DerivBounds db = letter_deriv_norm(l, tau);
    sum_sup += std::pow(db.sup_norm, t);
    sum_inf += std::pow(db.inf_norm, t);
  }
  return {sum_sup, sum_inf};
}

double lattice_sum_upper_estimate(const Parameter& tau, double t) {
  if (t <= 1.0) return kInfinity;
  const double tau2 = std::norm(tau.tau());
  double total = 0.0;
  for (int p = 1; p <= 4000; ++p) {
    const double scale = std::pow(4.0, p - 1);
    const double floor_term = std::min(1.0 + tau2 / scale, tau2);
    const double term = 3.0 * std::exp((p - 1) * std::log(4.0) * (1.0 - t) - t * std::log(floor_term));
    total += term;
    if (term < total * 1e-17) break;
  }
  return total;
}

double psi1_tail_bound_blocks(const Parameter& tau, double t, const Truncation& trunc) {
  if (t <= 1.0) return kInfinity;
  const int cutoff = trunc.cutoff();
  int p0 = 1;
  while (std::ldexp(1.0, p0 - 1) <= cutoff) ++p0;
  const int straggler_edge = static_cast<int>(std::ldexp(1.0, p0 - 1)) - 1;

  double total = 0.0;
  for (int n = 1; n <= straggler_edge; ++n) {
    for (int m = 1; m <= straggler_edge; ++m) {
      if (m <= cutoff && n <= cutoff) continue;
      total += sup_power(letter_value({m, n}, tau), t);
    }
  }

  // Block K(p): at most 3 * 4^(p-1) letters with |b| >= R_p, and
  // sup_norm <= (|b| - 1/2)^-2 since |b + 1/2| >= |b|.
  const double tau2 = std::norm(tau.tau());
  constexpr int kLastBlock = 1000;
  for (int p = p0; p <= kLastBlock; ++p) {
    const double log_scale = (p - 1) * std::log(4.0);
    const double floor_term = std::min(1.0 + tau2 * std::exp(-log_scale), tau2);
    const double log_radius = 0.5 * (log_scale + std::log(floor_term));
    const double gap = -std::log1p(-0.5 * std::exp(-log_radius));
    total += std::exp(std::log(3.0) + log_scale - 2.0 * t * (log_radius - gap));
  }
  // Past the last block: floor_term >= 1 and R_p - 1/2 >= 2^(p-1) (1 - 2^-kLastBlock),
  // leaving a geometric series of ratio 4^(1-t).
  const double ratio = std::pow(4.0, 1.0 - t);
  const double rest = 3.0 * std::exp(kLastBlock * std::log(4.0) * (1.0 - t)) / (1.0 - ratio);
  return total + rest;
}

double psi1_tail_bound(const Parameter& tau, double t, const Truncation& trunc) {
  if (t <= 1.0) return kInfinity;
  return TailModel(tau, trunc).upper(t);
}

// ---------------------------------------------------------------------------

void enumerate_words(const std::vector<Complex>& letters, int level, std::int64_t budget,
                     int jobs,
                     const std::function<void(int, double, double)>& visit) {
  if (level < 1) throw Error(ErrorKind::Precondition, "word level must be >= 1");
  if (letters.empty()) throw Error(ErrorKind::Precondition, "alphabet is empty");
  if (word_count(letters.size(), level, budget) < 0) {
    throw Error(ErrorKind::Budget,
                "word enumeration exceeds the budget; use a smaller N or level");
  }
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(letters.size())));

  auto run = [&](int worker) {
    auto sink = [&](double log_inf, double log_sup) { visit(worker, log_inf, log_sup); };
    detail::visit_words(letters, level, worker, jobs, sink);
  };
  if (jobs == 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) pool.emplace_back(run, w);
  for (auto& th : pool) th.join();
}

std::pair<double, double> psi_n_bounds(const Parameter& tau, double t, const Truncation& trunc,
                                       int level, std::int64_t budget, int jobs) {
  if (!(t >= 0.0)) throw Error(ErrorKind::Precondition, "psi_n_bounds needs t >= 0");
  const auto values = letter_values(trunc.letters(), tau);
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(values.size())));
  std::vector<double> lower(static_cast<std::size_t>(workers), 0.0);
  std::vector<double> upper(static_cast<std::size_t>(workers), 0.0);
  enumerate_words(values, level, budget, workers, [&](int w, double log_inf, double log_sup) {
    lower[static_cast<std::size_t>(w)] += std::exp(t * log_inf);
    upper[static_cast<std::size_t>(w)] += std::exp(t * log_sup);
  });
  double lo = 0.0;
  double hi = 0.0;
  for (int w = 0; w < workers; ++w) {
    lo += lower[static_cast<std::size_t>(w)];
    hi += upper[static_cast<std::size_t>(w)];
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------

void LogSpectrum::bump(std::vector<std::uint64_t>& bins, std::size_t index, std::uint64_t count) {
  if (index >= bins.size()) bins.resize(index + 1 + index / 4, 0);
  bins[index] += count;
}

void LogSpectrum::add_upper(double log_value, std::uint64_t count) {
  if (!(log_value <= 0.0)) {
    throw Error(ErrorKind::Precondition, "log spectrum holds values <= 1 only");
  }
  // Round the value up: k = floor(-x / bin). The bin is a power of two, so
  // the division is exact.
  bump(upper_, static_cast<std::size_t>(std::floor(-log_value / kLogBin)), count);
  count_ += count;
}

void LogSpectrum::add_lower(double log_value, std::uint64_t count) {
  if (!(log_value <= 0.0)) {
    throw Error(ErrorKind::Precondition, "log spectrum holds values <= 1 only");
  }
  bump(lower_, static_cast<std::size_t>(std::ceil(-log_value / kLogBin)), count);
}

void LogSpectrum::merge(const LogSpectrum& other) {
  if (upper_.size() < other.upper_.size()) upper_.resize(other.upper_.size(), 0);
  if (lower_.size() < other.lower_.size()) lower_.resize(other.lower_.size(), 0);
  for (std::size_t i = 0; i < other.upper_.size(); ++i) upper_[i] += other.upper_[i];
  for (std::size_t i = 0; i < other.lower_.size(); ++i) lower_[i] += other.lower_[i];
  count_ += other.count_;
}

void LogSpectrum::subtract(const LogSpectrum& other) {
  auto take = [](std::vector<std::uint64_t>& mine, const std::vector<std::uint64_t>& theirs) {
    for (std::size_t i = 0; i < theirs.size(); ++i) {
      if (theirs[i] == 0) continue;
      if (i >= mine.size() || mine[i] < theirs[i]) {
        throw Error(ErrorKind::Precondition, "subtracting entries that were never added");
      }
      mine[i] -= theirs[i];
    }
  };
  take(upper_, other.upper_);
  take(lower_, other.lower_);
  count_ -= other.count_;
}

double LogSpectrum::sum(const std::vector<std::uint64_t>& bins, double t) {
  double total = 0.0;
  const double step = -t * kLogBin;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (bins[k] != 0) total += static_cast<double>(bins[k]) * std::exp(step * static_cast<double>(k));
  }
  return total;
}

double LogSpectrum::upper_sum(double t) const { return sum(upper_, t); }
double LogSpectrum::lower_sum(double t) const { return sum(lower_, t); }

// ---------------------------------------------------------------------------

int default_band(int cutoff) { return std::max(2048, 2 * cutoff); }

LatticeSpectrum::LatticeSpectrum(const Parameter& tau, int band) : tau_(tau), band_(band) {
  if (band < 2) throw Error(ErrorKind::Precondition, "lattice band must be >= 2");
  for (int n = 1; n <= band; ++n) {
    for (int m = 1; m <= band; ++m) {
      const double r = std::abs(letter_value({m, n}, tau) + 0.5);
      letters_.add_upper(-2.0 * std::log(r - 0.5));
      letters_.add_lower(-2.0 * std::log(r + 0.5));
    }
  }
}

double LatticeSpectrum::beyond_upper(double t) const {
  if (t <= 1.0) return kInfinity;
  // Letters with max(m, n) > M own cells [m-1, m] x [n-1, n] inside
  // {max(x, y) >= M}, whose image under (x, y) -> x + y tau lies in the
  // sector of angle arg tau outside |z| >= M; sup_norm <= (|b| - 1/2)^-2.
  const double angle = std::arg(tau_.tau());
  const double s = band_ - 0.5;
  const double integral =
      std::pow(s, 2.0 - 2.0 * t) / (2.0 * t - 2.0) + 0.5 * std::pow(s, 1.0 - 2.0 * t) / (2.0 * t - 1.0);
  return angle / tau_.v() * integral;
}

double LatticeSpectrum::beyond_lower(double t) const {
  if (t <= 1.0) return kInfinity;
  // Letters (m, n) own cells [m, m+1] x [n, n+1]; those with |x + y tau| >=
  // (M+1)(1+|tau|) all have max(m, n) > M. Writing z = 1 + tau + w with w in
  // the sector gives inf_norm >= (|w| + |1+tau| + 1)^-2.
  const double angle = std::arg(tau_.tau());
  const double shift = std::abs(1.0 + tau_.tau());
  const double offset = 1.0 + shift;
  const double start = (band_ + 1.0) * (1.0 + std::abs(tau_.tau())) + shift + offset;
  const double integral = std::pow(start, 2.0 - 2.0 * t) / (2.0 * t - 2.0) -
                          offset * std::pow(start, 1.0 - 2.0 * t) / (2.0 * t - 1.0);
  return angle / tau_.v() * std::max(integral, 0.0);
}

// ---------------------------------------------------------------------------

namespace {

LogSpectrum truncation_letters(const Parameter& tau, const Truncation& trunc) {
  LogSpectrum spectrum;
  for (const auto& l : trunc.letters()) {
    const double r = std::abs(letter_value(l, tau) + 0.5);
    spectrum.add_upper(-2.0 * std::log(r - 0.5));
    spectrum.add_lower(-2.0 * std::log(r + 0.5));
  }
  return spectrum;
}

}  // namespace

TailModel::TailModel(std::shared_ptr<const LatticeSpectrum> lattice, const Truncation& trunc)
    : lattice_(std::move(lattice)), trunc_(trunc) {
  if (!lattice_ || lattice_->band() <= trunc.cutoff()) {
    throw Error(ErrorKind::Precondition, "tail band must extend beyond the truncation");
  }
  band_ = lattice_->letters();
  band_.subtract(truncation_letters(lattice_->tau(), trunc));
}

TailModel::TailModel(const Parameter& tau, const Truncation& trunc)
    : TailModel(std::make_shared<LatticeSpectrum>(tau, default_band(trunc.cutoff())), trunc) {}

double TailModel::upper(double t) const {
  if (t <= 1.0) return kInfinity;
  const double banded = band_.upper_sum(t) + lattice_->beyond_upper(t);
  return std::min(banded, psi1_tail_bound_blocks(lattice_->tau(), t, trunc_));
}

double TailModel::lower(double t) const {
  if (t <= 1.0) return kInfinity;
  return band_.lower_sum(t) + lattice_->beyond_lower(t);
}

// ---------------------------------------------------------------------------

PressureModel::PressureModel(const Parameter& tau, const std::vector<Letter>& letters, int level,
                             int cutoff, const EngineOptions& opts)
    : level_(level), cutoff_(cutoff), letter_count_(letters.size()),
      tail_in_lower_(opts.tail_in_lower) {
  const auto values = letter_values(letters, tau);
  const int workers = std::max(1, std::min<int>(opts.jobs, static_cast<int>(values.size())));
  std::vector<LogSpectrum> parts(static_cast<std::size_t>(workers));
  if (word_count(values.size(), level, opts.budget) < 0) {
    throw Error(ErrorKind::Budget,
                "word enumeration exceeds the budget; use a smaller N or level");
  }
  auto fill = [&](int w) {
    auto& part = parts[static_cast<std::size_t>(w)];
    auto sink = [&part](double log_inf, double log_sup) {
      part.add_upper(log_sup);
      part.add_lower(log_inf);
    };
    detail::visit_words(values, level, w, workers, sink);
  };
  if (workers == 1) {
    fill(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(fill, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& part : parts) words_.merge(part);
  enumerate_words(values, 1, opts.budget, 1, [&](int, double log_inf, double log_sup) {
    singles_.add_upper(log_sup);
    singles_.add_lower(log_inf);
  });
}

PressureModel::PressureModel(const Parameter& tau, const Truncation& trunc, int level,
                             const EngineOptions& opts,
                             std::shared_ptr<const LatticeSpectrum> lattice)
    : PressureModel(tau, trunc.letters(), level, trunc.cutoff(), opts) {
  if (!lattice) lattice = std::make_shared<LatticeSpectrum>(tau, default_band(trunc.cutoff()));
  tail_ = std::make_shared<TailModel>(std::move(lattice), trunc);
}

PressureModel PressureModel::finite(const Parameter& tau, std::vector<Letter> letters, int level,
                                    const EngineOptions& opts) {
  if (letters.empty()) throw Error(ErrorKind::Precondition, "finite subsystem needs letters");
  int cutoff = 0;
  for (const auto& l : letters) {
    if (l.m < 1 || l.n < 1) throw Error(ErrorKind::Precondition, "letter indices start at 1");
    cutoff = std::max({cutoff, l.m, l.n});
  }
  return PressureModel(tau, letters, level, cutoff, opts);
}

PressureBracket PressureModel::at(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorKind::Precondition, "pressure needs t >= 0");
  const int n = level_;
  const double tail_hi = tail_ ? tail_->upper(t) : 0.0;
  const double tail_lo = (tail_ && tail_in_lower_) ? tail_->lower(t) : 0.0;
  const double hi = words_.upper_sum(t) + mixed_power(singles_.upper_sum(t), tail_hi, n);
  const double lo = words_.lower_sum(t) + mixed_power(singles_.lower_sum(t), tail_lo, n);
  PressureBracket out;
  out.t = t;
  out.level = n;
  out.cutoff = cutoff_;
  out.p_hi = std::isinf(hi) ? kInfinity : std::log(hi) / n;
  out.p_lo = std::isinf(lo) ? kInfinity : std::log(lo) / n;
  return out;
}

PressureBracket pressure_bracket(const Parameter& tau, double t, const Truncation& trunc,
                                 int level, const EngineOptions& opts) {
  return PressureModel(tau, trunc, level, opts).at(t);
}

// ---------------------------------------------------------------------------

ThetaReport theta_diagnostic(const Parameter& tau, int p_max) {
  if (p_max < 3) throw Error(ErrorKind::Precondition, "theta_diagnostic needs p_max >= 3");
  if (p_max > 20) throw Error(ErrorKind::Budget, "theta_diagnostic supports p_max <= 20");
  ThetaReport report;
  const double modulus = std::abs(tau.tau());
  double running = 0.0;
  for (int p = 1; p <= p_max; ++p) {
    const int edge = (1 << p) - 1;
    const int inner = (1 << (p - 1)) - 1;
    double block = 0.0;
    std::int64_t size = 0;
    for (int n = 1; n <= edge; ++n) {
      for (int m = 1; m <= edge; ++m) {
        if (m <= inner && n <= inner) continue;
        block += letter_deriv_norm(letter_value({m, n}, tau)).sup_norm;
        ++size;
      }
    }
    running += block;
    report.block_sizes.push_back(size);
    report.increments.push_back(block);
    report.partial_sums.push_back(running);
    const double reach = std::ldexp(1.0, p) * (1.0 + modulus);
    report.increment_floor.push_back(std::ldexp(1.0, 2 * (p - 1)) / (reach * reach));
  }

  report.increasing = true;
  report.increments_above_floor = true;
  report.block_sizes_match = true;
  for (int i = 0; i < p_max; ++i) {
    const std::int64_t half = std::int64_t{1} << i;  // 2^(p-1)
    if (report.block_sizes[static_cast<std::size_t>(i)] != half * (3 * half - 2)) {
      report.block_sizes_match = false;
    }
    if (report.increments[static_cast<std::size_t>(i)] < report.increment_floor[static_cast<std::size_t>(i)]) {
      report.increments_above_floor = false;
    }
    if (i > 0 && !(report.partial_sums[static_cast<std::size_t>(i)] >
                   report.partial_sums[static_cast<std::size_t>(i - 1)])) {
      report.increasing = false;
    }
  }

  const double mean_p = (p_max + 1) / 2.0;
  double mean_s = 0.0;
  for (double s : report.partial_sums) mean_s += s;
  mean_s /= p_max;
  double sxy = 0.0;
  double sxx = 0.0;
  for (int i = 0; i < p_max; ++i) {
    const double dx = (i + 1) - mean_p;
    sxy += dx * (report.partial_sums[static_cast<std::size_t>(i)] - mean_s);
    sxx += dx * dx;
  }
  report.slope = sxy / sxx;
  report.tail_bound =
      psi1_tail_bound_blocks(tau, report.tail_exponent, Truncation((1 << p_max) - 1));
  return report;
}

}  // namespace ccf
