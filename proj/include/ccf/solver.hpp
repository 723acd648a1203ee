#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccf/pressure.hpp"

namespace ccf {

/// Bumped whenever a change can move any computed bracket; part of every
/// cache key and artifact.
inline constexpr const char* kCodeVersion = "ccf-1.0.0";

struct SolverConfig {
  std::vector<int> cutoffs{10, 20, 40};
  std::vector<int> levels{1, 2, 3};
  double tolerance = 1e-3;
  std::int64_t budget = kDefaultWordBudget;
  double target_width = 0.05;
  int jobs = 1;
  bool tail_in_lower = true;

  /// Throws Usage for empty or decreasing schedules and nonpositive
  /// tolerances.
  void validate() const;
};

/// One (N, n) step of the refinement ladder.
struct Rung {
  int cutoff = 0;
  int level = 0;
  int evaluations = 0;  // pressure evaluations spent in both bisections
  double h_lo = 0.0;
  double h_hi = 0.0;
  double seconds = 0.0;
  bool hi_capped = false;  // P_hi(2) >= 0: h_hi is the a-priori cap 2
  bool cache_hit = false;
};

struct DimensionBracket {
  double h_lo = 0.0;
  double h_hi = 0.0;
  double tau_u = 0.0;
  double tau_v = 0.0;
  std::vector<Rung> ladder;
  /// (N, n) pairs dropped because N^(2n) exceeds the word budget.
  std::vector<std::pair<int, int>> skipped;
  bool converged = false;
  bool degenerate = false;

  double width() const { return h_hi - h_lo; }
  /// Convenience point estimate; the bracket is the result.
  double midpoint() const { return 0.5 * (h_lo + h_hi); }
};

struct BisectResult {
  double lo = 0.0;  // f(lo) > 0
  double hi = 0.0;  // f(hi) <= 0
  int evaluations = 0;

  double root() const { return 0.5 * (lo + hi); }
};

/// Bisection for a decreasing f with f(a) > 0 >= f(b). Midpoints follow
/// the fixed dyadic schedule of [a, b], so pointwise-ordered functions give
/// ordered results. Throws NoSignChange when the endpoints do not bracket.
BisectResult bisect_zero(const std::function<double(double)>& f, double a, double b, double tol);

/// Lookup/store of finished rungs keyed by (tau, N, n, tolerance, version).
class RungCache {
 public:
  virtual ~RungCache() = default;
  virtual std::optional<Rung> find(double u, double v, int cutoff, int level,
                                   double tolerance) = 0;
  virtual void store(double u, double v, const Rung& rung, double tolerance) = 0;
};

/// Solves each ladder rung for the full system S_tau truncated at F(N),
/// with the infinite tail carried by rigorous bounds. Rungs with
/// P_hi(2) >= 0 are capped at 2 and trigger one extra rung at 2N.
std::vector<Rung> refine_ladder(const Parameter& tau, const SolverConfig& cfg,
                                RungCache* cache = nullptr,
                                std::vector<std::pair<int, int>>* skipped = nullptr);

/// Intersection of all rung brackets. Search interval [1 + 1e-6, 2].
DimensionBracket dimension_bracket(const Parameter& tau, const SolverConfig& cfg,
                                   RungCache* cache = nullptr);

/// Dimension of the finite subsystem spanned by `letters` (no tail),
/// searched over [0, 2] for each level in cfg.levels. A single letter gives
/// a one-point limit set: reported as [0, 0] with the degenerate flag.
DimensionBracket finite_dimension_bracket(const Parameter& tau, const std::vector<Letter>& letters,
                                          const SolverConfig& cfg);

}  // namespace ccf
