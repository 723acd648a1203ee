// Command-line front end: dim, pressure, limitset, sweep, verify.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ccf/cifs.hpp"
#include "ccf/error.hpp"
#include "ccf/io.hpp"
#include "ccf/limitset.hpp"
#include "ccf/pressure.hpp"
#include "ccf/solver.hpp"
#include "ccf/sweep.hpp"

namespace fs = std::filesystem;
using namespace ccf;

namespace {

enum Exit { kOk = 0, kUsage = 2, kDomain = 3, kUnconverged = 4, kCheck = 5 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Precondition: return kUsage;
    case ErrorKind::Domain: return kDomain;
    case ErrorKind::Budget: return kUnconverged;
    default: return kCheck;
  }
}

/// Raw flag values; unset ones leave the config file (or defaults) alone.
struct Flags {
  std::optional<std::string> config, tau, region, cutoffs, levels, out, svg, cache_dir, t_grid;
  std::optional<double> step, tol, target_width;
  std::optional<std::int64_t> budget, random_count;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  int samples = 10000;
  int p_max = 12;
  bool binary = false;
  bool boxcount = false;
  bool no_cache = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags take precedence");
  app->add_option("--N", f.cutoffs, "letter cutoff(s), comma separated");
  app->add_option("--n", f.levels, "word level(s), comma separated");
  app->add_option("--tol", f.tol, "bisection tolerance in t");
  app->add_option("--budget", f.budget, "word enumeration budget");
  app->add_option("--target-width", f.target_width, "bracket width counted as converged");
  app->add_option("--cache-dir", f.cache_dir, std::string("rung cache directory (default $") + kCacheDirEnv + ")");
  app->add_flag("--no-cache", f.no_cache, "ignore the cache directory");
  app->add_option("--jobs", f.jobs, "worker threads");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--svg", f.svg, "SVG plot path");
}

RunConfig resolve(const std::string& command, const Flags& f) {
  RunConfig cfg;
  cfg.command = command;
  if (const char* env = std::getenv(kCacheDirEnv)) cfg.cache_dir = env;
  if (f.config) apply_json(Json::parse(read_file(*f.config), nullptr, true, true), cfg);
  if (f.tau) cfg.tau = *f.tau;
  if (f.region) cfg.region = *f.region;
  if (f.step) cfg.step = *f.step;
  if (f.cutoffs) cfg.solver.cutoffs = parse_int_list(*f.cutoffs);
  if (f.levels) cfg.solver.levels = parse_int_list(*f.levels);
  if (f.tol) cfg.solver.tolerance = *f.tol;
  if (f.budget) cfg.solver.budget = *f.budget;
  if (f.target_width) cfg.solver.target_width = *f.target_width;
  if (f.jobs) cfg.solver.jobs = *f.jobs;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.svg) cfg.svg = *f.svg;
  if (f.cache_dir) cfg.cache_dir = *f.cache_dir;
  if (f.no_cache) cfg.cache_dir.clear();
  if (f.random_count) cfg.random_count = *f.random_count;
  if (f.t_grid) cfg.t_grid = parse_double_list(*f.t_grid);
  if (command == "limitset") {
    if (f.cutoffs) cfg.cloud_cutoff = cfg.solver.cutoffs.front();
    if (f.levels) cfg.cloud_level = cfg.solver.levels.front();
  }
  if (command == "pressure") {
    if (f.cutoffs) cfg.pressure_cutoff = cfg.solver.cutoffs.front();
    if (f.levels) cfg.pressure_level = cfg.solver.levels.front();
  }
  if (cfg.solver.jobs < 1) throw Error(ErrorKind::Usage, "--jobs must be >= 1");
  cfg.solver.validate();
  return cfg;
}

Parameter require_tau(const RunConfig& cfg) {
  if (!cfg.tau) throw Error(ErrorKind::Usage, "--tau is required");
  return parse_tau(*cfg.tau);
}

std::unique_ptr<FileRungCache> open_cache(const RunConfig& cfg) {
  if (cfg.cache_dir.empty()) return nullptr;
  return std::make_unique<FileRungCache>(cfg.cache_dir);
}

void report_cache(const FileRungCache* cache) {
  if (cache) std::cout << "cache: " << cache->hits() << " hits, " << cache->misses() << " misses\n";
}

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.out) / name; }

int cmd_dim(const RunConfig& cfg) {
  const Parameter tau = require_tau(cfg);
  auto cache = open_cache(cfg);
  const auto bracket = dimension_bracket(tau, cfg.solver, cache.get());
  const Json echo = to_json(cfg);
  write_atomic(out_path(cfg, "dim_ladder.csv"), ladder_csv(bracket, echo));
  write_atomic(out_path(cfg, "dim.json"), artifact(echo, to_json(bracket)).dump(2) + "\n");
  for (const auto& r : bracket.ladder) {
    std::cout << "N=" << r.cutoff << " n=" << r.level << " [" << canonical_decimal(r.h_lo) << ", "
              << canonical_decimal(r.h_hi) << "]" << (r.cache_hit ? " (cached)" : "") << "\n";
  }
  for (const auto& [N, n] : bracket.skipped) {
    std::cout << "N=" << N << " n=" << n << " skipped (over word budget)\n";
  }
  std::cout << "h in [" << canonical_decimal(bracket.h_lo) << ", " << canonical_decimal(bracket.h_hi)
            << "] width " << canonical_decimal(bracket.width()) << " "
            << (bracket.converged ? "converged" : "unconverged") << "\n";
  report_cache(cache.get());
  return bracket.converged ? kOk : kUnconverged;
}

int cmd_pressure(const RunConfig& cfg) {
  const Parameter tau = require_tau(cfg);
  if (cfg.t_grid.empty()) throw Error(ErrorKind::Usage, "--t grid is empty");
  for (double t : cfg.t_grid) {
    if (!(t >= 0.0 && t <= 3.0)) throw Error(ErrorKind::Usage, "t values must lie in [0, 3]");
  }
  EngineOptions opts;
  opts.budget = cfg.solver.budget;
  opts.jobs = cfg.solver.jobs;
  opts.tail_in_lower = cfg.solver.tail_in_lower;
  const PressureModel model(tau, Truncation(cfg.pressure_cutoff), cfg.pressure_level, opts);
  std::vector<PressureBracket> rows;
  for (double t : cfg.t_grid) rows.push_back(model.at(t));
  const auto csv = pressure_csv(rows, to_json(cfg));
  write_atomic(out_path(cfg, "pressure.csv"), csv);
  std::cout << csv.substr(csv.find('\n') + 1);
  return kOk;
}

int cmd_limitset(const RunConfig& cfg, const Flags& f) {
  const Parameter tau = require_tau(cfg);
  const Truncation trunc(cfg.cloud_cutoff);
  const auto cloud = cfg.random_count > 0
                         ? generate_points(tau, trunc, cfg.cloud_level, CloudMode::Random,
                                           cfg.random_count, cfg.seed)
                         : generate_points(tau, trunc, cfg.cloud_level, CloudMode::Exhaustive,
                                           cfg.solver.budget, cfg.seed);
  const Json echo = to_json(cfg);
  {
    std::ostringstream os;
    os << csv_preamble(echo);
    write_cloud_csv(os, cloud);
    write_atomic(out_path(cfg, "limitset.csv"), os.str());
  }
  if (f.binary) {
    std::ostringstream os;
    write_cloud_binary(os, cloud);
    write_atomic(out_path(cfg, "limitset.ccf1"), os.str());
  }
  if (cfg.svg) write_atomic(*cfg.svg, svg_scatter(cloud));
  std::cout << cloud.points.size() << " points, max word derivative " << cloud.max_error << "\n";
  if (f.boxcount) {
    const auto fit = box_counting_dim(cloud, 0.01, 0.25, 8);
    std::ostringstream os;
    os << csv_preamble(echo);
    write_boxcount_csv(os, fit);
    write_atomic(out_path(cfg, "boxcount.csv"), os.str());
    std::cout << "box-count slope " << fit.slope << " r2 " << fit.r2 << "\n";
  }
  return kOk;
}

int cmd_sweep(const RunConfig& cfg) {
  if (!cfg.region) throw Error(ErrorKind::Usage, "--region is required");
  const Region region = parse_region(*cfg.region);
  make_grid(region, cfg.step);  // domain errors before any work
  auto cache = open_cache(cfg);
  const auto grid = sweep_grid(region, cfg.step, cfg.solver, cache.get(), [](const SweepCell& c) {
    std::cerr << "tau=" << format_tau(c.u, c.v) << " h in [" << c.bracket.h_lo << ", "
              << c.bracket.h_hi << "]\n";
  });
  const Json echo = to_json(cfg);
  write_atomic(out_path(cfg, "sweep.csv"), grid_csv(grid, echo));
  write_atomic(out_path(cfg, "sweep.json"), grid_json(grid, echo).dump(2) + "\n");
  if (cfg.svg) write_atomic(*cfg.svg, svg_heatmap(grid));

  Json reports = Json::array();
  reports.push_back(to_json(continuity_check(grid, 0.1)));
  reports.push_back(to_json(non_constancy_check(grid)));
  if (region.u0 == 0.0 || region.v0 == 1.0) reports.push_back(to_json(boundary_max_check(grid)));
  write_atomic(out_path(cfg, "analysis.json"), artifact(echo, reports).dump(2) + "\n");

  int unconverged = 0;
  for (const auto& c : grid.cells) unconverged += c.bracket.converged ? 0 : 1;
  std::cout << grid.cells.size() << " cells (" << grid.nu << " x " << grid.nv << "), "
            << unconverged << " flagged unconverged\n";
  for (const auto& r : reports) std::cout << r["name"].get<std::string>() << ": " << r["status"].get<std::string>() << "\n";
  report_cache(cache.get());
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const Flags& f) {
  const Parameter tau = require_tau(cfg);
  const int cutoff = cfg.solver.cutoffs.front();
  const auto geometry = verify_geometry(tau, Truncation(cutoff), f.samples, cfg.seed);
  const auto theta = theta_diagnostic(tau, f.p_max);
  const auto [c1, c2] = ratio_constants(tau);
  const bool ratio_ok = c1 > 0.0 && c1 <= 1.0 && c2 >= 1.0 && std::isfinite(c2);
  const auto xinf = verify_x_infinity(tau, {10, 100, 1000});

  std::cout << geometry.to_text();
  std::cout << "geometry " << (geometry.passed() ? "pass" : "fail") << "\n";
  std::cout << "theta slope=" << theta.slope << " tail_bound(" << theta.tail_exponent
            << ")=" << theta.tail_bound << " " << (theta.passed() ? "pass" : "fail") << "\n";
  std::cout << "ratio_constants C1=" << c1 << " C2=" << c2 << " " << (ratio_ok ? "pass" : "fail")
            << "\n";
  std::cout << "x_infinity s(1000)=" << xinf.reach.back() << " "
            << (xinf.passed() ? "pass" : "fail") << "\n";

  Json result = {{"geometry", to_json(geometry)},
                 {"theta", to_json(theta)},
                 {"ratio_constants", {{"C1", c1}, {"C2", c2}, {"passed", ratio_ok}}},
                 {"x_infinity", to_json(xinf)}};
  Json echo = to_json(cfg);
  echo["samples"] = f.samples;
  echo["p_max"] = f.p_max;
  write_atomic(out_path(cfg, "verify.json"), artifact(echo, result).dump(2) + "\n");
  const bool ok = geometry.passed() && theta.passed() && ratio_ok && xinf.passed();
  return ok ? kOk : kCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension brackets for complex continued fraction systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kCodeVersion);
  Flags f;

  auto* dim = app.add_subcommand("dim", "Hausdorff dimension bracket at one parameter");
  add_common(dim, f);
  dim->add_option("--tau", f.tau, "parameter a+bi");

  auto* pressure = app.add_subcommand("pressure", "pressure bracket curve");
  add_common(pressure, f);
  pressure->add_option("--tau", f.tau, "parameter a+bi");
  pressure->add_option("--t", f.t_grid, "exponents in [0, 3], comma separated");

  auto* limitset = app.add_subcommand("limitset", "limit set point cloud");
  add_common(limitset, f);
  limitset->add_option("--tau", f.tau, "parameter a+bi");
  limitset->add_option("--random", f.random_count, "number of random words (default: exhaustive)");
  limitset->add_flag("--binary", f.binary, "also write the CCF1 binary cloud");
  limitset->add_flag("--boxcount", f.boxcount, "box-counting estimate over scales 1/4 to 1/100");

  auto* sweep = app.add_subcommand("sweep", "dimension brackets over a parameter grid");
  add_common(sweep, f);
  sweep->add_option("--region", f.region, "u0,u1,v0,v1");
  sweep->add_option("--step", f.step, "lattice step");

  auto* verify = app.add_subcommand("verify", "geometry and series checks");
  add_common(verify, f);
  verify->add_option("--tau", f.tau, "parameter a+bi");
  verify->add_option("--samples", f.samples, "sample points for the geometry suite");
  verify->add_option("--p-max", f.p_max, "largest dyadic block for the series check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const RunConfig cfg = resolve(name, f);
    if (name == "dim") return cmd_dim(cfg);
    if (name == "pressure") return cmd_pressure(cfg);
    if (name == "limitset") return cmd_limitset(cfg, f);
    if (name == "sweep") return cmd_sweep(cfg);
    return cmd_verify(cfg, f);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Json::exception& e) {
    std::cerr << "error (usage): config: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheck;
  }
}
