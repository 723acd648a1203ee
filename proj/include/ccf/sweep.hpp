#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ccf/solver.hpp"

namespace ccf {

/// Axis-aligned rectangle [u0, u1] x [v0, v1] of parameters.
struct Region {
  double u0 = 0.0;
  double u1 = 0.0;
  double v0 = 1.0;
  double v1 = 1.0;
};

struct SweepCell {
  int iu = 0;
  int iv = 0;
  double u = 0.0;
  double v = 1.0;
  DimensionBracket bracket;
};

/// Lattice u0 + iu*step, v0 + iv*step over a region; cells are stored
/// with iu varying fastest.
struct SweepGrid {
  Region region;
  double step = 0.0;
  int nu = 0;
  int nv = 0;
  SolverConfig config;
  std::vector<SweepCell> cells;

  const SweepCell& at(int iu, int iv) const {
    return cells[static_cast<std::size_t>(iv * nu + iu)];
  }
  SweepCell& at(int iu, int iv) { return cells[static_cast<std::size_t>(iv * nu + iu)]; }
};

/// Lays out the lattice without computing anything. Throws Domain when
/// the region leaves A0 and Usage for a bad step or empty region.
SweepGrid make_grid(const Region& region, double step);

/// dimension_bracket at every lattice point. Cells run on cfg.jobs
/// workers; each cell solves single-threaded so results do not depend on
/// the worker count.
SweepGrid sweep_grid(const Region& region, double step, const SolverConfig& cfg,
                     RungCache* cache = nullptr,
                     const std::function<void(const SweepCell&)>& progress = {});

enum class CheckStatus { Pass, Fail, Inconclusive };

const char* to_string(CheckStatus status);

struct AnalysisCheck {
  std::string name;
  std::string inequality;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // part of rhs contributed by bracket widths or tolerance
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

struct AnalysisReport {
  std::string name;
  std::vector<AnalysisCheck> checks;
  /// Headline numbers (max jump, argmax, ...).
  std::vector<std::pair<std::string, double>> values;

  bool passed() const;        // no Fail entries
  bool inconclusive() const;  // no Fail, at least one Inconclusive
};

/// Every 4-adjacent pair: |mid(a) - mid(b)| <= slack + width(a) + width(b).
AnalysisReport continuity_check(const SweepGrid& grid, double slack);

/// At least one 4-adjacent pair whose brackets are disjoint.
AnalysisReport non_constancy_check(const SweepGrid& grid);

using BracketEvaluator = std::function<DimensionBracket(const Parameter&)>;

/// Mean-value inequality on the circle of `radius` about tau0 with k
/// equally spaced points:
///   mid(tau0) <= mean(mid(circle)) + width(tau0) + max width(circle).
/// Throws Domain when the closed disk leaves Int(A0), Precondition for k < 8.
AnalysisReport subharmonic_check(const Parameter& tau0, double radius, int k,
                                 const BracketEvaluator& evaluate);
AnalysisReport subharmonic_check(const Parameter& tau0, double radius, int k,
                                 const SolverConfig& cfg, RungCache* cache = nullptr);

/// The argmax of the cell midpoints should lie on u = 0 or v = 1. An
/// interior argmax whose bracket overlaps a boundary cell's bracket is
/// inconclusive; only a certified interior maximum fails. Throws
/// Precondition when the grid touches neither edge.
AnalysisReport boundary_max_check(const SweepGrid& grid);

/// Along tau = r * direction for increasing r: h_hi nonincreasing (within
/// the bisection tolerance), final h_hi <= 1 + eps, and the single-letter
/// upper series at 1 + eps below 1 at the largest magnitude.
AnalysisReport asymptotic_check(Complex direction, const std::vector<double>& magnitudes,
                                const SolverConfig& cfg, double eps,
                                RungCache* cache = nullptr);

}  // namespace ccf
