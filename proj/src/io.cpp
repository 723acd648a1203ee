#include "ccf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>
#include <unistd.h>

#include "ccf/error.hpp"

namespace ccf {

namespace fs = std::filesystem;

std::string canonical_decimal(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& text, const std::string& what) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(x)) {
    throw Error(ErrorKind::Usage, "malformed " + what + ": '" + text + "'");
  }
  return x;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::string hex_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double read_hex_double(const std::string& s) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw Error(ErrorKind::Io, "bad cache value '" + s + "'");
  return x;
}

Json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return canonical_decimal(x);
}

}  // namespace

Parameter parse_tau(const std::string& text) {
  static const std::regex form(R"(^\s*([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*([+-])\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*i\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, form)) {
    throw Error(ErrorKind::Usage, "tau must look like a+bi, got '" + text + "'");
  }
  const double u = parse_double(m[1].str(), "real part");
  double v = parse_double(m[3].str(), "imaginary part");
  if (m[2].str() == "-") v = -v;
  return Parameter(u, v);
}

std::string format_tau(double u, double v) {
  return canonical_decimal(u) + (v < 0 ? "-" : "+") + canonical_decimal(std::abs(v)) + "i";
}

Region parse_region(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw Error(ErrorKind::Usage, "region must be u0,u1,v0,v1");
  return {parse_double(parts[0], "u0"), parse_double(parts[1], "u1"),
          parse_double(parts[2], "v0"), parse_double(parts[3], "v1")};
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& p : split(text, ',')) {
    int x = 0;
    const auto res = std::from_chars(p.data(), p.data() + p.size(), x);
    if (p.empty() || res.ec != std::errc() || res.ptr != p.data() + p.size()) {
      throw Error(ErrorKind::Usage, "malformed integer list '" + text + "'");
    }
    out.push_back(x);
  }
  if (out.empty()) throw Error(ErrorKind::Usage, "empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_double(p, "number"));
  if (out.empty()) throw Error(ErrorKind::Usage, "empty number list");
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::Io, tmp.string() + ": cannot open for writing");
    os << content;
    os.flush();
    if (!os) {
      fs::remove(tmp, ec);
      throw Error(ErrorKind::Io, tmp.string() + ": write failed");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, path.string() + ": rename failed");
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, path.string() + ": cannot open");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------

FileRungCache::FileRungCache(fs::path dir) : file_(dir / "rungs.tsv") {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, dir.string() + ": " + ec.message());
  std::ifstream is(file_);
  std::string line;
  while (std::getline(is, line)) {
    const auto f = split(line, '\t');
    // key fields (6), then evaluations, h_lo, h_hi, seconds, capped
    if (f.size() != 11) continue;  // torn trailing line from an interrupted run
    Rung r;
    r.cutoff = std::stoi(f[3]);
    r.level = std::stoi(f[4]);
    r.evaluations = std::stoi(f[6]);
    r.h_lo = read_hex_double(f[7]);
    r.h_hi = read_hex_double(f[8]);
    r.seconds = read_hex_double(f[9]);
    r.hi_capped = f[10] == "1";
    std::string k = f[0];
    for (int i = 1; i < 6; ++i) k += '\t' + f[static_cast<std::size_t>(i)];
    entries_.emplace(std::move(k), r);
  }
}

std::string FileRungCache::key(double u, double v, int cutoff, int level, double tolerance) {
  return std::string(kCodeVersion) + '\t' + canonical_decimal(u) + '\t' + canonical_decimal(v) +
         '\t' + std::to_string(cutoff) + '\t' + std::to_string(level) + '\t' +
         canonical_decimal(tolerance);
}

std::optional<Rung> FileRungCache::find(double u, double v, int cutoff, int level,
                                        double tolerance) {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key(u, v, cutoff, level, tolerance));
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void FileRungCache::store(double u, double v, const Rung& rung, double tolerance) {
  std::lock_guard lock(mutex_);
  const auto k = key(u, v, rung.cutoff, rung.level, tolerance);
  if (!entries_.emplace(k, rung).second) return;  // entries are immutable
  std::ofstream os(file_, std::ios::app);
  if (!os) throw Error(ErrorKind::Io, file_.string() + ": cannot append");
  os << k << '\t' << rung.evaluations << '\t' << hex_double(rung.h_lo) << '\t'
     << hex_double(rung.h_hi) << '\t' << hex_double(rung.seconds) << '\t'
     << (rung.hi_capped ? 1 : 0) << '\n';
  os.flush();
  if (!os) throw Error(ErrorKind::Io, file_.string() + ": append failed");
}

std::int64_t FileRungCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::int64_t FileRungCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

// ---------------------------------------------------------------------------

Json to_json(const SolverConfig& cfg) {
  return {{"cutoffs", cfg.cutoffs},         {"levels", cfg.levels},
          {"tolerance", cfg.tolerance},     {"budget", cfg.budget},
          {"target_width", cfg.target_width}, {"tail_in_lower", cfg.tail_in_lower}};
}

Json to_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  if (cfg.tau) j["tau"] = *cfg.tau;
  if (cfg.region) j["region"] = *cfg.region;
  j["step"] = cfg.step;
  j["solver"] = to_json(cfg.solver);
  j["seed"] = cfg.seed;
  if (cfg.command == "limitset") {
    j["cloud_cutoff"] = cfg.cloud_cutoff;
    j["cloud_level"] = cfg.cloud_level;
    j["random_count"] = cfg.random_count;
  }
  if (cfg.command == "pressure") {
    j["t_grid"] = cfg.t_grid;
    j["pressure_cutoff"] = cfg.pressure_cutoff;
    j["pressure_level"] = cfg.pressure_level;
  }
  // Paths, cache and parallelism do not affect results and stay out of
  // the echo so equal computations give equal artifacts.
  return j;
}

void apply_json(const Json& doc, RunConfig& cfg) {
  if (!doc.is_object()) throw Error(ErrorKind::Usage, "config must be a JSON object");
  try {
    for (const auto& [k, val] : doc.items()) {
      if (k == "command") continue;
      if (k == "tau") cfg.tau = val.get<std::string>();
      else if (k == "region") cfg.region = val.get<std::string>();
      else if (k == "step") cfg.step = val.get<double>();
      else if (k == "out") cfg.out = val.get<std::string>();
      else if (k == "svg") cfg.svg = val.get<std::string>();
      else if (k == "cache_dir") cfg.cache_dir = val.get<std::string>();
      else if (k == "jobs") cfg.solver.jobs = val.get<int>();
      else if (k == "seed") cfg.seed = val.get<std::uint64_t>();
      else if (k == "cloud_cutoff") cfg.cloud_cutoff = val.get<int>();
      else if (k == "cloud_level") cfg.cloud_level = val.get<int>();
      else if (k == "random_count") cfg.random_count = val.get<std::int64_t>();
      else if (k == "t_grid") cfg.t_grid = val.get<std::vector<double>>();
      else if (k == "pressure_cutoff") cfg.pressure_cutoff = val.get<int>();
      else if (k == "pressure_level") cfg.pressure_level = val.get<int>();
      else if (k == "solver") {
        for (const auto& [sk, sv] : val.items()) {
          if (sk == "cutoffs") cfg.solver.cutoffs = sv.get<std::vector<int>>();
          else if (sk == "levels") cfg.solver.levels = sv.get<std::vector<int>>();
          else if (sk == "tolerance") cfg.solver.tolerance = sv.get<double>();
          else if (sk == "budget") cfg.solver.budget = sv.get<std::int64_t>();
          else if (sk == "target_width") cfg.solver.target_width = sv.get<double>();
          else if (sk == "tail_in_lower") cfg.solver.tail_in_lower = sv.get<bool>();
          else if (sk == "jobs") cfg.solver.jobs = sv.get<int>();
          else throw Error(ErrorKind::Usage, "unknown solver config key '" + sk + "'");
        }
      } else {
        throw Error(ErrorKind::Usage, "unknown config key '" + k + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Usage, std::string("config: ") + e.what());
  }
}

Json to_json(const Rung& r) {
  return {{"N", r.cutoff},          {"n", r.level},       {"evaluations", r.evaluations},
          {"h_lo", r.h_lo},         {"h_hi", r.h_hi},     {"hi_capped", r.hi_capped},
          {"cache_hit", r.cache_hit}, {"seconds", r.seconds}};
}

Json to_json(const DimensionBracket& b) {
  Json ladder = Json::array();
  for (const auto& r : b.ladder) ladder.push_back(to_json(r));
  Json skipped = Json::array();
  for (const auto& [N, n] : b.skipped) skipped.push_back({{"N", N}, {"n", n}});
  return {{"tau_u", b.tau_u},         {"tau_v", b.tau_v},   {"h_lo", b.h_lo},
          {"h_hi", b.h_hi},           {"width", b.width()}, {"midpoint", b.midpoint()},
          {"converged", b.converged}, {"degenerate", b.degenerate}, {"ladder", ladder},
          {"skipped", skipped}};
}

Json to_json(const AnalysisReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"inequality", c.inequality},
                      {"lhs", number_or_string(c.lhs)},
                      {"rhs", number_or_string(c.rhs)},
                      {"slack", c.slack},
                      {"status", to_string(c.status)},
                      {"detail", c.detail}});
  }
  Json values = Json::object();
  for (const auto& [k, v] : r.values) values[k] = number_or_string(v);
  const char* status = r.passed() ? (r.inconclusive() ? "inconclusive" : "pass") : "fail";
  return {{"name", r.name}, {"status", status}, {"checks", checks}, {"values", values}};
}

Json to_json(const GeometryReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"inequality", c.inequality},
                      {"observed", number_or_string(c.observed)},
                      {"bound", c.bound},
                      {"passed", c.passed}});
  }
  return {{"tau_u", r.tau_u},   {"tau_v", r.tau_v},   {"N", r.cutoff},
          {"samples", r.sample_count}, {"passed", r.passed()}, {"checks", checks}};
}

Json to_json(const ThetaReport& r) {
  return {{"block_sizes", r.block_sizes},
          {"partial_sums", r.partial_sums},
          {"increments", r.increments},
          {"increment_floor", r.increment_floor},
          {"slope", r.slope},
          {"tail_exponent", r.tail_exponent},
          {"tail_bound", number_or_string(r.tail_bound)},
          {"increasing", r.increasing},
          {"increments_above_floor", r.increments_above_floor},
          {"block_sizes_match", r.block_sizes_match},
          {"passed", r.passed()}};
}

Json to_json(const XInfinityReport& r) {
  return {{"cutoffs", r.cutoffs},
          {"reach", r.reach},
          {"origin_image", r.origin_image},
          {"strictly_decreasing", r.strictly_decreasing},
          {"below_inverse_cutoff", r.below_inverse_cutoff},
          {"passed", r.passed()}};
}

Json artifact(const Json& config, const Json& result) {
  return {{"code_version", kCodeVersion}, {"config", config}, {"result", result}};
}

std::string csv_preamble(const Json& config) {
  return std::string("# ") + kCodeVersion + " " + config.dump() + "\n";
}

namespace {

std::string csv_number(double x) { return canonical_decimal(x); }

std::pair<int, int> largest_rung(const DimensionBracket& b) {
  int N = 0;
  int n = 0;
  for (const auto& r : b.ladder) {
    N = std::max(N, r.cutoff);
    n = std::max(n, r.level);
  }
  return {N, n};
}

double total_seconds(const DimensionBracket& b) {
  double s = 0.0;
  for (const auto& r : b.ladder) s += r.seconds;
  return s;
}

}  // namespace

std::string ladder_csv(const DimensionBracket& b, const Json& config) {
  std::string out = csv_preamble(config);
  out += "tau_u,tau_v,N,n,t_eval_count,h_lo,h_hi,seconds\n";
  for (const auto& r : b.ladder) {
    out += csv_number(b.tau_u) + ',' + csv_number(b.tau_v) + ',' + std::to_string(r.cutoff) +
           ',' + std::to_string(r.level) + ',' + std::to_string(r.evaluations) + ',' +
           csv_number(r.h_lo) + ',' + csv_number(r.h_hi) + ',' + csv_number(r.seconds) + '\n';
  }
  return out;
}

std::string grid_csv(const SweepGrid& grid, const Json& config) {
  std::string out = csv_preamble(config);
  out += "u,v,h_lo,h_hi,N,n,seconds\n";
  for (const auto& c : grid.cells) {
    const auto [N, n] = largest_rung(c.bracket);
    out += csv_number(c.u) + ',' + csv_number(c.v) + ',' + csv_number(c.bracket.h_lo) + ',' +
           csv_number(c.bracket.h_hi) + ',' + std::to_string(N) + ',' + std::to_string(n) + ',' +
           csv_number(total_seconds(c.bracket)) + '\n';
  }
  return out;
}

Json grid_json(const SweepGrid& grid, const Json& config) {
  Json cells = Json::array();
  for (const auto& c : grid.cells) {
    Json j = to_json(c.bracket);
    j["iu"] = c.iu;
    j["iv"] = c.iv;
    cells.push_back(std::move(j));
  }
  Json result = {{"region", {grid.region.u0, grid.region.u1, grid.region.v0, grid.region.v1}},
                 {"step", grid.step},
                 {"nu", grid.nu},
                 {"nv", grid.nv},
                 {"solver", to_json(grid.config)},
                 {"cells", cells}};
  return artifact(config, result);
}

std::string pressure_csv(const std::vector<PressureBracket>& rows, const Json& config) {
  std::string out = csv_preamble(config);
  out += "t,P_lo,P_hi\n";
  for (const auto& r : rows) {
    out += csv_number(r.t) + ',' + csv_number(r.p_lo) + ',' + csv_number(r.p_hi) + '\n';
  }
  return out;
}

std::string svg_scatter(const PointCloud& cloud) {
  // X = closed disk about 1/2 of radius 1/2; frame [0,1] x [-1/2,1/2].
  constexpr double size = 800.0;
  constexpr double margin = 20.0;
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size + 2 * margin
     << "\" height=\"" << size + 2 * margin << "\">\n"
     << "<title>limit set tau=" << format_tau(cloud.tau_u, cloud.tau_v) << " N=" << cloud.cutoff
     << " n=" << cloud.level << " " << to_string(cloud.mode) << "</title>\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<circle cx=\"" << margin + size / 2 << "\" cy=\"" << margin + size / 2 << "\" r=\""
     << size / 2 << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n<g fill=\"#1f3b73\">\n";
  for (const auto& p : cloud.points) {
    const double x = margin + p.real() * size;
    const double y = margin + (0.5 - p.imag()) * size;
    os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"1\" height=\"1\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string svg_heatmap(const SweepGrid& grid) {
  constexpr double cell = 40.0;
  constexpr double margin = 50.0;
  double lo = kInfinity;
  double hi = -kInfinity;
  for (const auto& c : grid.cells) {
    lo = std::min(lo, c.bracket.midpoint());
    hi = std::max(hi, c.bracket.midpoint());
  }
  const double span = hi > lo ? hi - lo : 1.0;
  const double w = grid.nu * cell + 2 * margin;
  const double h = grid.nv * cell + 2 * margin;
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
     << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"10\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& c : grid.cells) {
    // Blue (low) to red (high).
    const double s = (c.bracket.midpoint() - lo) / span;
    const int red = static_cast<int>(std::lround(255 * s));
    const int blue = 255 - red;
    const double x = margin + c.iu * cell;
    const double y = margin + (grid.nv - 1 - c.iv) * cell;
    os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
       << "\" fill=\"rgb(" << red << ",64," << blue << ")\"><title>tau="
       << format_tau(c.u, c.v) << " h in [" << c.bracket.h_lo << ", " << c.bracket.h_hi
       << "]</title></rect>\n";
  }
  os << "<text x=\"" << margin << "\" y=\"" << h - 15 << "\">u: " << grid.region.u0 << " to "
     << grid.region.u1 << ", v: " << grid.region.v0 << " to " << grid.region.v1
     << ", midpoint range [" << lo << ", " << hi << "]</text>\n</svg>\n";
  return os.str();
}

}  // namespace ccf
