#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ccf/cifs.hpp"
#include "ccf/limitset.hpp"
#include "ccf/pressure.hpp"
#include "ccf/solver.hpp"
#include "ccf/sweep.hpp"

namespace ccf {

using Json = nlohmann::ordered_json;

/// Environment variable naming the default cache directory.
inline constexpr const char* kCacheDirEnv = "CCF_CACHE_DIR";

// ---------------------------------------------------------------------------
// Literals.

/// Shortest decimal string that reads back to the same double.
std::string canonical_decimal(double x);

/// "a+bi" / "a-bi" with decimal components. Usage error when malformed,
/// Domain when outside A0.
Parameter parse_tau(const std::string& text);
std::string format_tau(double u, double v);

/// "u0,u1,v0,v1".
Region parse_region(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// ---------------------------------------------------------------------------
// Files.

/// Writes to a sibling temp file and renames over `path`. Io error with
/// the path on failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Append-only rung cache in `<dir>/rungs.tsv`. Keys are the canonical
/// decimal renderings of (tau_u, tau_v, N, n, tolerance) plus the code
/// version; values are stored as hex floats so hits reproduce the
/// computed rung bit for bit.
class FileRungCache : public RungCache {
 public:
  explicit FileRungCache(std::filesystem::path dir);

  std::optional<Rung> find(double u, double v, int cutoff, int level, double tolerance) override;
  void store(double u, double v, const Rung& rung, double tolerance) override;

  std::int64_t hits() const;
  std::int64_t misses() const;
  const std::filesystem::path& file() const { return file_; }

  static std::string key(double u, double v, int cutoff, int level, double tolerance);

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Rung> entries_;
  std::int64_t hits_ = 0;
  std::int64_t misses_ = 0;
};

// ---------------------------------------------------------------------------
// Run configuration.

struct RunConfig {
  std::string command;
  std::optional<std::string> tau;     // "a+bi"
  std::optional<std::string> region;  // "u0,u1,v0,v1"
  double step = 0.25;
  SolverConfig solver;
  std::string out = ".";
  std::optional<std::string> svg;
  std::string cache_dir;  // empty: no cache
  std::uint64_t seed = 1;
  // limitset
  int cloud_cutoff = 20;
  int cloud_level = 6;
  std::int64_t random_count = 0;  // 0: exhaustive
  // pressure
  std::vector<double> t_grid;
  int pressure_cutoff = 20;
  int pressure_level = 2;
};

Json to_json(const SolverConfig& cfg);
Json to_json(const RunConfig& cfg);
/// Fields missing from `doc` keep the values already in `cfg`. Usage error
/// on unknown keys or wrong types.
void apply_json(const Json& doc, RunConfig& cfg);

// ---------------------------------------------------------------------------
// Serialization.

Json to_json(const Rung& rung);
Json to_json(const DimensionBracket& bracket);
Json to_json(const AnalysisReport& report);
Json to_json(const GeometryReport& report);
Json to_json(const ThetaReport& report);
Json to_json(const XInfinityReport& report);

/// Artifact wrapper: {"code_version", "config", "result"}.
Json artifact(const Json& config, const Json& result);

/// Every CSV starts with "# <code version> <compact config JSON>".
std::string csv_preamble(const Json& config);

/// tau_u,tau_v,N,n,t_eval_count,h_lo,h_hi,seconds
std::string ladder_csv(const DimensionBracket& bracket, const Json& config);
/// u,v,h_lo,h_hi,N,n,seconds; N and n are the largest rung used.
std::string grid_csv(const SweepGrid& grid, const Json& config);
Json grid_json(const SweepGrid& grid, const Json& config);
/// t,P_lo,P_hi with "inf" for infinite entries.
std::string pressure_csv(const std::vector<PressureBracket>& rows, const Json& config);

std::string svg_scatter(const PointCloud& cloud);
/// Linear color map over midpoints; each cell carries its bracket as a title.
std::string svg_heatmap(const SweepGrid& grid);

}  // namespace ccf
