#include "ccf/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "ccf/error.hpp"

namespace ccf {

namespace {

int lattice_count(double lo, double hi, double step) {
  return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

std::string pair_name(const SweepCell& a, const SweepCell& b) {
  std::ostringstream os;
  os << "(" << a.u << "," << a.v << ")~(" << b.u << "," << b.v << ")";
  return os.str();
}

template <typename Fn>
void for_each_adjacent(const SweepGrid& grid, Fn&& fn) {
  for (int iv = 0; iv < grid.nv; ++iv) {
    for (int iu = 0; iu < grid.nu; ++iu) {
      if (iu + 1 < grid.nu) fn(grid.at(iu, iv), grid.at(iu + 1, iv));
      if (iv + 1 < grid.nv) fn(grid.at(iu, iv), grid.at(iu, iv + 1));
    }
  }
}

bool on_true_boundary(const SweepCell& c) { return c.u == 0.0 || c.v == 1.0; }

}  // namespace

SweepGrid make_grid(const Region& region, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorKind::Usage, "step must be positive");
  if (!(region.u0 <= region.u1) || !(region.v0 <= region.v1)) {
    throw Error(ErrorKind::Usage, "region must satisfy u0 <= u1 and v0 <= v1");
  }
  if (!(region.u0 >= 0.0) || !(region.v0 >= 1.0) || !std::isfinite(region.u1) ||
      !std::isfinite(region.v1)) {
    std::ostringstream os;
    os << "region [" << region.u0 << "," << region.u1 << "]x[" << region.v0 << "," << region.v1
       << "] leaves A0 = {u >= 0, v >= 1}";
    throw Error(ErrorKind::Domain, os.str());
  }
  SweepGrid grid;
  grid.region = region;
  grid.step = step;
  grid.nu = lattice_count(region.u0, region.u1, step);
  grid.nv = lattice_count(region.v0, region.v1, step);
  grid.cells.reserve(static_cast<std::size_t>(grid.nu) * static_cast<std::size_t>(grid.nv));
  for (int iv = 0; iv < grid.nv; ++iv) {
    for (int iu = 0; iu < grid.nu; ++iu) {
      SweepCell cell;
      cell.iu = iu;
      cell.iv = iv;
      cell.u = region.u0 + iu * step;
      cell.v = region.v0 + iv * step;
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

SweepGrid sweep_grid(const Region& region, double step, const SolverConfig& cfg, RungCache* cache,
                     const std::function<void(const SweepCell&)>& progress) {
  cfg.validate();
  SweepGrid grid = make_grid(region, step);
  grid.config = cfg;

  SolverConfig cell_cfg = cfg;
  cell_cfg.jobs = 1;
  const int workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(grid.cells.size())));

  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  std::exception_ptr failure;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.cells.size()) return;
      auto& cell = grid.cells[i];
      try {
        cell.bracket = dimension_bracket(Parameter(cell.u, cell.v), cell_cfg, cache);
      } catch (...) {
        std::lock_guard lock(report_mutex);
        if (!failure) failure = std::current_exception();
        next = grid.cells.size();
        return;
      }
      if (progress) {
        std::lock_guard lock(report_mutex);
        progress(cell);
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  if (failure) std::rethrow_exception(failure);
  return grid;
}

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

bool AnalysisReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const AnalysisCheck& c) { return c.status == CheckStatus::Fail; });
}

bool AnalysisReport::inconclusive() const {
  return passed() && std::any_of(checks.begin(), checks.end(), [](const AnalysisCheck& c) {
           return c.status == CheckStatus::Inconclusive;
         });
}

AnalysisReport continuity_check(const SweepGrid& grid, double slack) {
  if (!(slack >= 0.0)) throw Error(ErrorKind::Precondition, "slack must be >= 0");
  AnalysisReport report;
  report.name = "continuity";
  double max_jump = 0.0;
  int pairs = 0;
  for_each_adjacent(grid, [&](const SweepCell& a, const SweepCell& b) {
    ++pairs;
    const double jump = std::abs(a.bracket.midpoint() - b.bracket.midpoint());
    const double widths = a.bracket.width() + b.bracket.width();
    max_jump = std::max(max_jump, jump);
    if (jump > slack + widths) {
      AnalysisCheck c;
      c.name = "adjacent_jump " + pair_name(a, b);
      c.inequality = "|mid(a) - mid(b)| <= slack + width(a) + width(b)";
      c.lhs = jump;
      c.rhs = slack + widths;
      c.slack = widths;
      c.status = CheckStatus::Fail;
      report.checks.push_back(c);
    }
  });
  AnalysisCheck summary;
  summary.name = "max_adjacent_jump";
  summary.inequality = "every 4-adjacent pair: |mid(a) - mid(b)| <= slack + width(a) + width(b)";
  summary.lhs = max_jump;
  summary.rhs = slack;
  summary.status = report.checks.empty() ? CheckStatus::Pass : CheckStatus::Fail;
  summary.detail = std::to_string(report.checks.size()) + " of " + std::to_string(pairs) +
                   " pairs exceed their bound";
  report.checks.insert(report.checks.begin(), summary);
  report.values = {{"max_jump", max_jump}, {"pairs", pairs}, {"slack", slack}};
  return report;
}

AnalysisReport non_constancy_check(const SweepGrid& grid) {
  AnalysisReport report;
  report.name = "non_constancy";
  double best_gap = -kInfinity;
  std::string witness;
  int disjoint = 0;
  for_each_adjacent(grid, [&](const SweepCell& a, const SweepCell& b) {
    // Positive gap: the brackets are disjoint.
    const double gap = std::max(a.bracket.h_lo - b.bracket.h_hi, b.bracket.h_lo - a.bracket.h_hi);
    if (gap > 0.0) ++disjoint;
    if (gap > best_gap) {
      best_gap = gap;
      witness = pair_name(a, b);
    }
  });
  AnalysisCheck c;
  c.name = "disjoint_adjacent_pair";
  c.inequality = "max over 4-adjacent pairs of max(h_lo(a) - h_hi(b), h_lo(b) - h_hi(a)) > 0";
  c.lhs = best_gap;
  c.rhs = 0.0;
  c.status = disjoint > 0 ? CheckStatus::Pass : CheckStatus::Fail;
  c.detail = "best pair " + witness;
  report.checks.push_back(c);
  report.values = {{"disjoint_pairs", disjoint}, {"best_gap", best_gap}};
  return report;
}

AnalysisReport subharmonic_check(const Parameter& tau0, double radius, int k,
                                 const BracketEvaluator& evaluate) {
  if (k < 8) throw Error(ErrorKind::Precondition, "subharmonic check needs k >= 8");
  if (!(radius > 0.0)) throw Error(ErrorKind::Precondition, "radius must be positive");
  if (!(tau0.u() - radius > 0.0) || !(tau0.v() - radius > 1.0)) {
    std::ostringstream os;
    os << "disk of radius " << radius << " about " << tau0.u() << "+" << tau0.v()
       << "i leaves Int(A0)";
    throw Error(ErrorKind::Domain, os.str());
  }
  const auto center = evaluate(tau0);
  double mean = 0.0;
  double max_width = 0.0;
  for (int j = 0; j < k; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / k;
    const Parameter p(tau0.u() + radius * std::cos(angle), tau0.v() + radius * std::sin(angle));
    const auto b = evaluate(p);
    mean += b.midpoint();
    max_width = std::max(max_width, b.width());
  }
  mean /= k;

  AnalysisReport report;
  report.name = "subharmonic";
  AnalysisCheck c;
  c.name = "mean_value";
  c.inequality = "mid(center) <= mean(mid(circle)) + width(center) + max width(circle)";
  c.lhs = center.midpoint();
  c.slack = center.width() + max_width;
  c.rhs = mean + c.slack;
  c.status = c.lhs <= c.rhs ? CheckStatus::Pass : CheckStatus::Fail;
  report.checks.push_back(c);
  report.values = {{"center_mid", center.midpoint()},
                   {"circle_mean", mean},
                   {"center_width", center.width()},
                   {"max_circle_width", max_width},
                   {"radius", radius},
                   {"k", k}};
  return report;
}

AnalysisReport subharmonic_check(const Parameter& tau0, double radius, int k,
                                 const SolverConfig& cfg, RungCache* cache) {
  return subharmonic_check(tau0, radius, k, [&](const Parameter& p) {
    return dimension_bracket(p, cfg, cache);
  });
}

AnalysisReport boundary_max_check(const SweepGrid& grid) {
  if (!(grid.region.u0 == 0.0 || grid.region.v0 == 1.0)) {
    throw Error(ErrorKind::Precondition, "grid touches neither u = 0 nor v = 1");
  }
  if (grid.cells.empty()) throw Error(ErrorKind::Precondition, "grid is empty");

  const SweepCell* best = nullptr;
  const SweepCell* best_interior = nullptr;
  const SweepCell* best_boundary_hi = nullptr;  // largest h_hi on the true boundary
  for (const auto& c : grid.cells) {
    if (!best || c.bracket.midpoint() > best->bracket.midpoint()) best = &c;
    if (on_true_boundary(c)) {
      if (!best_boundary_hi || c.bracket.h_hi > best_boundary_hi->bracket.h_hi) best_boundary_hi = &c;
    } else if (!best_interior || c.bracket.midpoint() > best_interior->bracket.midpoint()) {
      best_interior = &c;
    }
  }

  AnalysisReport report;
  report.name = "boundary_max";
  AnalysisCheck c;
  c.name = "argmax_on_boundary";
  c.lhs = best->bracket.h_lo;
  c.rhs = best_boundary_hi->bracket.h_hi;
  if (on_true_boundary(*best)) {
    c.inequality = "argmax of midpoints has u = 0 or v = 1";
    c.status = CheckStatus::Pass;
  } else {
    // Interior argmax; certified only if it beats every boundary bracket.
    c.inequality = "h_lo(interior argmax) <= max h_hi over boundary cells";
    c.status = c.lhs <= c.rhs ? CheckStatus::Inconclusive : CheckStatus::Fail;
    c.detail = c.status == CheckStatus::Inconclusive ? "brackets overlap; refine"
                                                     : "certified interior maximum";
  }
  report.checks.push_back(c);
  report.values = {{"argmax_u", best->u},
                   {"argmax_v", best->v},
                   {"argmax_mid", best->bracket.midpoint()},
                   {"argmax_h_lo", best->bracket.h_lo},
                   {"argmax_h_hi", best->bracket.h_hi}};
  if (best_interior) report.values.emplace_back("runner_up_interior_mid", best_interior->bracket.midpoint());
  return report;
}

AnalysisReport asymptotic_check(Complex direction, const std::vector<double>& magnitudes,
                                const SolverConfig& cfg, double eps, RungCache* cache) {
  if (magnitudes.empty()) throw Error(ErrorKind::Precondition, "magnitude list is empty");
  for (std::size_t i = 1; i < magnitudes.size(); ++i) {
    if (!(magnitudes[i] > magnitudes[i - 1])) {
      throw Error(ErrorKind::Precondition, "magnitudes must be strictly increasing");
    }
  }
  if (!(eps > 0.0)) throw Error(ErrorKind::Precondition, "eps must be positive");
  if (!(std::abs(direction) > 0.0)) throw Error(ErrorKind::Precondition, "direction is zero");
  direction /= std::abs(direction);
  std::vector<Parameter> points;
  for (double r : magnitudes) points.emplace_back(r * direction.real(), r * direction.imag());

  const double t = 1.0 + eps;
  const Truncation series_cut(cfg.cutoffs.front());
  std::vector<double> h_hi;
  std::vector<double> series;
  for (const auto& p : points) {
    h_hi.push_back(dimension_bracket(p, cfg, cache).h_hi);
    series.push_back(psi1_partial(p, t, series_cut).first + psi1_tail_bound(p, t, series_cut));
  }

  AnalysisReport report;
  report.name = "asymptotic";
  AnalysisCheck mono;
  mono.name = "h_hi_nonincreasing";
  mono.inequality = "h_hi(r_{k+1}) <= h_hi(r_k) + tolerance";
  mono.slack = cfg.tolerance;
  mono.lhs = 0.0;
  for (std::size_t i = 1; i < h_hi.size(); ++i) mono.lhs = std::max(mono.lhs, h_hi[i] - h_hi[i - 1]);
  mono.rhs = cfg.tolerance;
  mono.detail = "lhs is the largest increase h_hi(r_{k+1}) - h_hi(r_k)";
  mono.status = mono.lhs <= mono.rhs ? CheckStatus::Pass : CheckStatus::Fail;
  report.checks.push_back(mono);

  AnalysisCheck last;
  last.name = "final_h_hi";
  last.inequality = "h_hi(r_max) <= 1 + eps";
  last.lhs = h_hi.back();
  last.rhs = t;
  last.status = last.lhs <= last.rhs ? CheckStatus::Pass : CheckStatus::Fail;
  report.checks.push_back(last);

  AnalysisCheck mech;
  mech.name = "single_letter_series";
  mech.inequality = "partial sup-series over F(N) + tail bound at t = 1 + eps < 1 at r_max";
  mech.lhs = series.back();
  mech.rhs = 1.0;
  mech.status = mech.lhs < mech.rhs ? CheckStatus::Pass : CheckStatus::Fail;
  report.checks.push_back(mech);

  AnalysisCheck decay;
  decay.name = "series_decreasing";
  decay.inequality = "series(r_{k+1}) < series(r_k)";
  decay.status = CheckStatus::Pass;
  decay.lhs = series.front();
  decay.rhs = series.back();
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (!(series[i] < series[i - 1])) decay.status = CheckStatus::Fail;
  }
  report.checks.push_back(decay);

  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    const auto tag = std::to_string(i);
    report.values.emplace_back("magnitude_" + tag, magnitudes[i]);
    report.values.emplace_back("h_hi_" + tag, h_hi[i]);
    report.values.emplace_back("series_" + tag, series[i]);
  }
  return report;
}

}  // namespace ccf
