#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "ccf/cifs.hpp"

namespace ccf {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::int64_t kDefaultWordBudget = 100'000'000;

/// Two-sided value of a nonnegative series at exponent t. upper may be
/// infinite only for t <= 1.
struct SeriesValue {
  double lower = 0.0;
  double upper = 0.0;
  int cutoff = 0;
  double t = 0.0;
};

/// Enclosure P_lo <= P_tau(t) <= P_hi at one exponent.
struct PressureBracket {
  double t = 0.0;
  double p_lo = 0.0;
  double p_hi = 0.0;
  int level = 1;
  int cutoff = 0;
};

// ---------------------------------------------------------------------------
// Single-letter series.

/// {sum of sup_norm^t, sum of inf_norm^t} over the letters of F(N).
std::pair<double, double> psi1_partial(const Parameter& tau, double t, const Truncation& trunc);

/// Upper bound on the sum of sup_norm^t over letters outside F(N);
/// +inf for t <= 1.
double psi1_tail_bound(const Parameter& tau, double t, const Truncation& trunc);

/// The dyadic-block estimate alone: exact stragglers below the first
/// whole block plus 3 * 4^(p-1) letters per block K(p), each bounded via
/// |b|^2 >= 4^(p-1) * min(1 + |tau|^2 / 4^(p-1), |tau|^2).
double psi1_tail_bound_blocks(const Parameter& tau, double t, const Truncation& trunc);

/// Right side of the lattice-sum estimate
/// sum |b|^-2t <= 3 sum_p 4^((p-1)(1-t)) min(1 + |tau|^2/4^(p-1), |tau|^2)^-t.
double lattice_sum_upper_estimate(const Parameter& tau, double t);

// ---------------------------------------------------------------------------
// Word sums.

/// Calls visit(first_letter_index, log_inf, log_sup) for every word of
/// length `level` over `letters`, where log_inf and log_sup are the logs of
/// the extremes of |phi_w'| over X. Words are visited depth first in
/// lexicographic order; `jobs` > 1 splits the work by first letter.
/// Throws Budget when letters^level exceeds `budget`.
void enumerate_words(const std::vector<Complex>& letters, int level, std::int64_t budget,
                     int jobs,
                     const std::function<void(int worker, double log_inf, double log_sup)>& visit);

/// Sums of inf/sup norms^t over all words of length `level` in F(N)^level.
/// Returns {psi_lower, psi_upper}.
std::pair<double, double> psi_n_bounds(const Parameter& tau, double t, const Truncation& trunc,
                                       int level, std::int64_t budget = kDefaultWordBudget,
                                       int jobs = 1);

// ---------------------------------------------------------------------------
// Binned evaluation used by the solver.

/// Histogram of log-norms on a grid of width kLogBin. Upper entries are
/// rounded up to the grid and lower entries down, so sums evaluated from
/// the histogram stay rigorous on the side they bound.
class LogSpectrum {
 public:
  static constexpr double kLogBin = 1.0 / 4096.0;

  void add_upper(double log_value, std::uint64_t count = 1);
  void add_lower(double log_value, std::uint64_t count = 1);
  void merge(const LogSpectrum& other);
  /// Removes entries previously added; counts must not go negative.
  void subtract(const LogSpectrum& other);

  double upper_sum(double t) const;
  double lower_sum(double t) const;
  std::uint64_t count() const { return count_; }

 private:
  static void bump(std::vector<std::uint64_t>& bins, std::size_t index, std::uint64_t count);
  static double sum(const std::vector<std::uint64_t>& bins, double t);

  // Index k holds values exp(-k * kLogBin).
  std::vector<std::uint64_t> upper_;
  std::vector<std::uint64_t> lower_;
  std::uint64_t count_ = 0;
};

/// Letters with max(m, n) <= band, binned, plus closed-form integral
/// bounds for everything beyond the band.
class LatticeSpectrum {
 public:
  LatticeSpectrum(const Parameter& tau, int band);

  const Parameter& tau() const { return tau_; }
  int band() const { return band_; }
  const LogSpectrum& letters() const { return letters_; }

  /// Bounds on the sums of sup^t (upper) and inf^t (lower) over all
  /// letters with max(m, n) > band. Both infinite for t <= 1.
  double beyond_upper(double t) const;
  double beyond_lower(double t) const;

 private:
  Parameter tau_;
  int band_;
  LogSpectrum letters_;
};

/// Default band for the tail: exact letters up to max(m, n) <= 2048.
int default_band(int cutoff);

/// Two-sided bounds on the letter series outside F(N).
class TailModel {
 public:
  TailModel(std::shared_ptr<const LatticeSpectrum> lattice, const Truncation& trunc);
  TailModel(const Parameter& tau, const Truncation& trunc);

  /// min(block estimate, band + integral); +inf for t <= 1.
  double upper(double t) const;
  /// Band floor-binned sum plus integral lower bound; +inf for t <= 1.
  double lower(double t) const;

 private:
  std::shared_ptr<const LatticeSpectrum> lattice_;
  Truncation trunc_;
  LogSpectrum band_;  // letters in the band but outside F(N)
};

struct EngineOptions {
  std::int64_t budget = kDefaultWordBudget;
  int jobs = 1;
  /// Count the infinite tail in the lower bound via supermultiplicativity.
  bool tail_in_lower = true;
};

/// Pressure enclosure for one alphabet and word level; enumerates the
/// words once and then evaluates any t from histograms.
///
/// Infinite system truncated at F(N):
///   P_lo = (1/n) log(sum_{F^n} inf^t + (A_lo + L)^n - A_lo^n)
///   P_hi = (1/n) log(sum_{F^n} sup^t + (A_hi + T)^n - A_hi^n)
/// where A are the single-letter sums over F and T, L the tail bounds.
/// Finite subsystem: the same with T = L = 0.
class PressureModel {
 public:
  PressureModel(const Parameter& tau, const Truncation& trunc, int level,
                const EngineOptions& opts = {},
                std::shared_ptr<const LatticeSpectrum> lattice = nullptr);

  /// Finite subsystem spanned by `letters` (no tail).
  static PressureModel finite(const Parameter& tau, std::vector<Letter> letters, int level,
                              const EngineOptions& opts = {});

  PressureBracket at(double t) const;

  int level() const { return level_; }
  int cutoff() const { return cutoff_; }
  bool has_tail() const { return tail_ != nullptr; }
  std::size_t letter_count() const { return letter_count_; }

 private:
  PressureModel(const Parameter& tau, const std::vector<Letter>& letters, int level,
                int cutoff, const EngineOptions& opts);

  int level_;
  int cutoff_;
  std::size_t letter_count_ = 0;
  bool tail_in_lower_ = true;
  LogSpectrum words_;
  LogSpectrum singles_;
  std::shared_ptr<const TailModel> tail_;
};

PressureBracket pressure_bracket(const Parameter& tau, double t, const Truncation& trunc,
                                 int level, const EngineOptions& opts = {});

/// Evidence that the finiteness exponent is 1: block partial sums of the
/// t = 1 series over K'(p) grow without bound while the t > 1 series is
/// finite.
struct ThetaReport {
  std::vector<std::int64_t> block_sizes;      // |K(p)|, p = 1..p_max
  std::vector<double> partial_sums;           // sum over K'(p) of sup_norm
  std::vector<double> increments;             // block sums over K(p)
  std::vector<double> increment_floor;        // 4^(p-1) (2^p (1+|tau|))^-2
  double slope = 0.0;                         // least-squares slope of partial sums vs p
  double tail_exponent = 1.05;
  double tail_bound = 0.0;                    // psi1 tail at tail_exponent beyond K'(p_max)
  bool increasing = false;
  bool increments_above_floor = false;
  bool block_sizes_match = false;

  bool passed() const {
    return increasing && increments_above_floor && block_sizes_match && slope > 0.0 &&
           tail_bound < kInfinity;
  }
};

/// Throws Precondition for p_max < 3.
ThetaReport theta_diagnostic(const Parameter& tau, int p_max);

}  // namespace ccf
