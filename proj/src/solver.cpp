#include "ccf/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include "ccf/error.hpp"

namespace ccf {

namespace {

constexpr double kSearchFloor = 1.0 + 1e-6;
constexpr double kSearchCap = 2.0;

bool within_budget(int cutoff, int level, std::int64_t budget) {
  double words = 1.0;
  for (int i = 0; i < level; ++i) words *= static_cast<double>(cutoff) * cutoff;
  return words <= static_cast<double>(budget);
}

/// Bisects t -> P_lo and t -> P_hi over [floor, cap].
Rung solve_rung(const PressureModel& model, double floor, double cap, double tol) {
  Rung rung;
  rung.cutoff = model.cutoff();
  rung.level = model.level();

  auto lower = [&](double t) { return model.at(t).p_lo; };
  auto upper = [&](double t) { return model.at(t).p_hi; };

  // h_lo: P_lo(t) > 0 certifies P(t) > 0, hence h > t.
  const double lo_at_floor = lower(floor);
  const double lo_at_cap = lower(cap);
  rung.evaluations += 2;
  if (!(lo_at_floor > 0.0)) {
    rung.h_lo = floor;
  } else if (lo_at_cap > 0.0) {
    rung.h_lo = cap;
  } else {
    const auto res = bisect_zero(lower, floor, cap, tol);
    rung.h_lo = res.lo;
    rung.evaluations += res.evaluations;
  }

  // h_hi: P_hi(t) <= 0 certifies h <= t.
  const double hi_at_cap = upper(cap);
  const double hi_at_floor = upper(floor);
  rung.evaluations += 2;
  if (hi_at_cap > 0.0) {
    rung.h_hi = cap;
    rung.hi_capped = true;
  } else if (!(hi_at_floor > 0.0)) {
    rung.h_hi = floor;
  } else {
    const auto res = bisect_zero(upper, floor, cap, tol);
    rung.h_hi = res.hi;
    rung.evaluations += res.evaluations;
  }
  return rung;
}

DimensionBracket intersect(double u, double v, std::vector<Rung> ladder, double target) {
  DimensionBracket out;
  out.tau_u = u;
  out.tau_v = v;
  out.h_lo = -kInfinity;
  out.h_hi = kInfinity;
  for (const auto& r : ladder) {
    out.h_lo = std::max(out.h_lo, r.h_lo);
    out.h_hi = std::min(out.h_hi, r.h_hi);
  }
  if (out.h_lo > out.h_hi) {
    std::ostringstream os;
    os << "rung brackets do not intersect: [" << out.h_lo << ", " << out.h_hi << "]";
    throw Error(ErrorKind::CheckFailed, os.str());
  }
  out.ladder = std::move(ladder);
  out.converged = out.width() <= target;
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (cutoffs.empty() || levels.empty()) {
    throw Error(ErrorKind::Usage, "solver schedules must be non-empty");
  }
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end()) ||
      !std::is_sorted(levels.begin(), levels.end())) {
    throw Error(ErrorKind::Usage, "solver schedules must be nondecreasing");
  }
  if (cutoffs.front() < 1 || levels.front() < 1) {
    throw Error(ErrorKind::Usage, "N and n must be >= 1");
  }
  if (!(tolerance > 0.0)) throw Error(ErrorKind::Usage, "tolerance must be positive");
  if (budget < 1) throw Error(ErrorKind::Usage, "word budget must be positive");
  if (!(target_width > 0.0)) throw Error(ErrorKind::Usage, "target width must be positive");
}

BisectResult bisect_zero(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(a < b) || !(tol > 0.0)) {
    throw Error(ErrorKind::Precondition, "bisect_zero needs a < b and tol > 0");
  }
  const double fa = f(a);
  const double fb = f(b);
  BisectResult res;
  res.evaluations = 2;
  if (!(fa > 0.0) || !(fb <= 0.0)) {
    std::ostringstream os;
    os << "no sign change on [" << a << ", " << b << "]: f(a) " << (fa > 0.0 ? ">" : "<=")
       << " 0, f(b) " << (fb > 0.0 ? ">" : "<=") << " 0";
    throw Error(ErrorKind::NoSignChange, os.str());
  }
  res.lo = a;
  res.hi = b;
  while (res.hi - res.lo > tol) {
    const double mid = 0.5 * (res.lo + res.hi);
    if (mid <= res.lo || mid >= res.hi) break;
    ++res.evaluations;
    if (f(mid) > 0.0) {
      res.lo = mid;
    } else {
      res.hi = mid;
    }
  }
  return res;
}

std::vector<Rung> refine_ladder(const Parameter& tau, const SolverConfig& cfg, RungCache* cache,
                                std::vector<std::pair<int, int>>* skipped) {
  cfg.validate();
  EngineOptions opts;
  opts.budget = cfg.budget;
  opts.jobs = cfg.jobs;
  opts.tail_in_lower = cfg.tail_in_lower;

  std::vector<std::pair<int, int>> plan;
  for (int cutoff : cfg.cutoffs) {
    for (int level : cfg.levels) plan.emplace_back(cutoff, level);
  }

  // Cached rungs assume the default lower bound.
  if (!cfg.tail_in_lower) cache = nullptr;

  std::shared_ptr<const LatticeSpectrum> lattice;
  std::vector<Rung> ladder;
  bool escalated = false;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto [cutoff, level] = plan[i];
    if (!within_budget(cutoff, level, cfg.budget)) {
      if (skipped) skipped->emplace_back(cutoff, level);
      continue;
    }
    std::optional<Rung> hit;
    if (cache) hit = cache->find(tau.u(), tau.v(), cutoff, level, cfg.tolerance);
    Rung rung;
    if (hit) {
      rung = *hit;
      rung.cache_hit = true;
    } else {
      const auto start = std::chrono::steady_clock::now();
      const int band = default_band(std::max(cutoff, cfg.cutoffs.back()));
      if (!lattice || lattice->band() < band) {
        lattice = std::make_shared<LatticeSpectrum>(tau, band);
      }
      const PressureModel model(tau, Truncation(cutoff), level, opts, lattice);
      rung = solve_rung(model, kSearchFloor, kSearchCap, cfg.tolerance);
      rung.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (cache) cache->store(tau.u(), tau.v(), rung, cfg.tolerance);
    }
    ladder.push_back(rung);
    if (rung.hi_capped && !escalated && within_budget(2 * cutoff, level, cfg.budget)) {
      plan.emplace_back(2 * cutoff, level);
      escalated = true;
    }
  }
  return ladder;
}

DimensionBracket dimension_bracket(const Parameter& tau, const SolverConfig& cfg,
                                   RungCache* cache) {
  std::vector<std::pair<int, int>> skipped;
  auto ladder = refine_ladder(tau, cfg, cache, &skipped);
  if (ladder.empty()) {
    throw Error(ErrorKind::Budget, "no ladder rung fits the word budget");
  }
  auto out = intersect(tau.u(), tau.v(), std::move(ladder), cfg.target_width);
  out.skipped = std::move(skipped);
  return out;
}

DimensionBracket finite_dimension_bracket(const Parameter& tau, const std::vector<Letter>& letters,
                                          const SolverConfig& cfg) {
  cfg.validate();
  if (letters.empty()) throw Error(ErrorKind::Precondition, "finite subsystem needs letters");
  EngineOptions opts;
  opts.budget = cfg.budget;
  opts.jobs = cfg.jobs;
  std::vector<Rung> ladder;
  for (int level : cfg.levels) {
    double words = 1.0;
    for (int i = 0; i < level; ++i) words *= static_cast<double>(letters.size());
    if (words > static_cast<double>(cfg.budget)) continue;
    const auto start = std::chrono::steady_clock::now();
    const auto model = PressureModel::finite(tau, letters, level, opts);
    Rung rung = solve_rung(model, 0.0, kSearchCap, cfg.tolerance);
    rung.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ladder.push_back(rung);
  }
  if (ladder.empty()) throw Error(ErrorKind::Budget, "no level fits the word budget");
  auto out = intersect(tau.u(), tau.v(), std::move(ladder), cfg.target_width);
  // One map: the limit set is its fixed point and P(t) < 0 for all t > 0,
  // so both bisections stop at the floor 0.
  out.degenerate = letters.size() == 1;
  return out;
}

}  // namespace ccf
