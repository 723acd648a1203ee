#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <unistd.h>

#include "ccf/error.hpp"
#include "ccf/io.hpp"

using namespace ccf;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Usage;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ccf_io_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    out.push_back(text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

TEST_SUITE("literals") {
  TEST_CASE("canonical decimal round trips") {
    CHECK(canonical_decimal(0.5) == "0.5");
    CHECK(canonical_decimal(1.0) == "1");
    CHECK(canonical_decimal(0.1) == "0.1");
    CHECK(canonical_decimal(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(canonical_decimal(-std::numeric_limits<double>::infinity()) == "-inf");
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
      const double x = d(gen);
      CHECK(std::stod(canonical_decimal(x)) == x);
    }
  }

  TEST_CASE("tau") {
    const auto p = parse_tau("0+1i");
    CHECK(p.u() == 0.0);
    CHECK(p.v() == 1.0);
    const auto q = parse_tau("1000.5+2.25i");
    CHECK(q.u() == 1000.5);
    CHECK(q.v() == 2.25);
    CHECK(format_tau(1.0, 2.5) == "1+2.5i");
    CHECK(kind_of([] { parse_tau("-1+1i"); }) == ErrorKind::Domain);
    CHECK(kind_of([] { parse_tau("1+0.5i"); }) == ErrorKind::Domain);
    CHECK(kind_of([] { parse_tau("i"); }) == ErrorKind::Usage);
    CHECK(kind_of([] { parse_tau("1,2"); }) == ErrorKind::Usage);
    CHECK(kind_of([] { parse_tau(""); }) == ErrorKind::Usage);
  }

  TEST_CASE("lists and regions") {
    CHECK(parse_int_list("10,20,40") == std::vector<int>{10, 20, 40});
    CHECK(parse_double_list("0.5,1,1.5") == std::vector<double>{0.5, 1.0, 1.5});
    const auto r = parse_region("0,2,1,3");
    CHECK(r.u0 == 0.0);
    CHECK(r.u1 == 2.0);
    CHECK(r.v0 == 1.0);
    CHECK(r.v1 == 3.0);
    CHECK(kind_of([] { parse_region("0,2,1"); }) == ErrorKind::Usage);
    CHECK(kind_of([] { parse_int_list("1,x"); }) == ErrorKind::Usage);
  }
}

TEST_SUITE("files") {
  TEST_CASE("atomic write replaces content") {
    TempDir dir;
    const auto file = dir.path / "a.txt";
    write_atomic(file, "first");
    write_atomic(file, "second");
    CHECK(read_file(file) == "second");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++entries;
    CHECK(entries == 1);  // no temp file left behind
  }

  TEST_CASE("io errors name the path") {
    TempDir dir;
    write_atomic(dir.path / "plain", "x");
    const auto bad = dir.path / "plain" / "x.txt";  // parent is a regular file
    try {
      write_atomic(bad, "x");
      FAIL("expected Io");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Io);
      CHECK(std::string(e.what()).find((dir.path / "plain").string()) != std::string::npos);
    }
    CHECK(kind_of([&] { read_file(bad); }) == ErrorKind::Io);
  }
}

TEST_SUITE("rung cache") {
  TEST_CASE("round trip is bitwise and survives reopening") {
    TempDir dir;
    Rung r;
    r.cutoff = 20;
    r.level = 2;
    r.evaluations = 44;
    r.h_lo = 1.0 + std::ldexp(1.0, -40) / 3.0;
    r.h_hi = std::nextafter(1.5, 2.0);
    r.seconds = 0.1234567;
    r.hi_capped = true;
    {
      FileRungCache cache(dir.path);
      CHECK_FALSE(cache.find(0.1, 1.0, 20, 2, 1e-6).has_value());
      cache.store(0.1, 1.0, r, 1e-6);
      CHECK(cache.misses() == 1);
    }
    FileRungCache cache(dir.path);
    const auto hit = cache.find(0.1, 1.0, 20, 2, 1e-6);
    REQUIRE(hit.has_value());
    CHECK(hit->h_lo == r.h_lo);
    CHECK(hit->h_hi == r.h_hi);
    CHECK(hit->seconds == r.seconds);
    CHECK(hit->evaluations == 44);
    CHECK(hit->hi_capped);
    CHECK(cache.hits() == 1);
    // other tolerance is a different key
    CHECK_FALSE(cache.find(0.1, 1.0, 20, 2, 1e-7).has_value());
    CHECK_FALSE(cache.find(0.1, 1.0, 20, 3, 1e-6).has_value());
  }

  TEST_CASE("torn trailing line is ignored") {
    TempDir dir;
    Rung r;
    r.cutoff = 5;
    r.level = 1;
    r.h_lo = 1.2;
    r.h_hi = 1.3;
    {
      FileRungCache cache(dir.path);
      cache.store(0.0, 1.0, r, 1e-6);
    }
    std::string text = read_file(dir.path / "rungs.tsv");
    text += "ccf-1.0.0\t0\t2\t5";
    write_atomic(dir.path / "rungs.tsv", text);
    FileRungCache cache(dir.path);
    CHECK(cache.find(0.0, 1.0, 5, 1, 1e-6).has_value());
    CHECK_FALSE(cache.find(0.0, 2.0, 5, 1, 1e-6).has_value());
  }

  TEST_CASE("keys use canonical decimals") {
    CHECK(FileRungCache::key(0.1, 1.0, 10, 2, 1e-6) == FileRungCache::key(0.1, 1.0, 10, 2, 1e-6));
    CHECK(FileRungCache::key(0.1, 1.0, 10, 2, 1e-6) != FileRungCache::key(0.1, 1.0, 10, 2, 1e-7));
    CHECK(FileRungCache::key(0.1, 1.0, 10, 2, 1e-6).find("0.1") != std::string::npos);
  }
}

TEST_SUITE("run config") {
  TEST_CASE("json overrides defaults, missing keys keep values") {
    RunConfig cfg;
    cfg.seed = 7;
    apply_json(Json::parse(R"({"tau":"1+2i","solver":{"cutoffs":[10,20],"tolerance":1e-5}})"), cfg);
    CHECK(*cfg.tau == "1+2i");
    CHECK(cfg.solver.cutoffs == std::vector<int>{10, 20});
    CHECK(cfg.solver.tolerance == 1e-5);
    CHECK(cfg.seed == 7);
    CHECK(cfg.solver.levels == SolverConfig{}.levels);
  }

  TEST_CASE("unknown keys and wrong types") {
    RunConfig cfg;
    CHECK(kind_of([&] { apply_json(Json::parse(R"({"colour":1})"), cfg); }) == ErrorKind::Usage);
    CHECK(kind_of([&] { apply_json(Json::parse(R"({"solver":{"N":3}})"), cfg); }) == ErrorKind::Usage);
    CHECK(kind_of([&] { apply_json(Json::parse(R"({"step":"big"})"), cfg); }) == ErrorKind::Usage);
    CHECK(kind_of([&] { apply_json(Json::parse("[1]"), cfg); }) == ErrorKind::Usage);
  }

  TEST_CASE("echo leaves out paths, cache and jobs") {
    RunConfig a;
    a.command = "dim";
    a.tau = "0+1i";
    RunConfig b = a;
    b.out = "/elsewhere";
    b.cache_dir = "/cache";
    b.solver.jobs = 8;
    CHECK(to_json(a).dump() == to_json(b).dump());
    const auto j = to_json(a);
    CHECK_FALSE(j.contains("out"));
    CHECK_FALSE(j.contains("cache_dir"));
    CHECK_FALSE(j["solver"].contains("jobs"));
  }
}

TEST_SUITE("serialization") {
  DimensionBracket sample_bracket() {
    DimensionBracket b;
    b.tau_u = 0.0;
    b.tau_v = 1.0;
    b.h_lo = 1.25;
    b.h_hi = 1.5;
    Rung r1;
    r1.cutoff = 10;
    r1.level = 1;
    r1.evaluations = 40;
    r1.h_lo = 1.2;
    r1.h_hi = 1.6;
    r1.seconds = 0.5;
    Rung r2 = r1;
    r2.cutoff = 20;
    r2.level = 2;
    r2.h_lo = 1.25;
    r2.h_hi = 1.5;
    b.ladder = {r1, r2};
    b.skipped = {{40, 3}};
    return b;
  }

  TEST_CASE("ladder csv") {
    const Json cfg = {{"command", "dim"}};
    const auto rows = lines(ladder_csv(sample_bracket(), cfg));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::string("# ") + kCodeVersion + " {\"command\":\"dim\"}");
    CHECK(rows[1] == "tau_u,tau_v,N,n,t_eval_count,h_lo,h_hi,seconds");
    CHECK(rows[2] == "0,1,10,1,40,1.2,1.6,0.5");
    CHECK(rows[3] == "0,1,20,2,40,1.25,1.5,0.5");
  }

  TEST_CASE("bracket json") {
    const auto j = to_json(sample_bracket());
    CHECK(j["h_lo"] == 1.25);
    CHECK(j["width"] == 0.25);
    CHECK(j["ladder"].size() == 2);
    CHECK(j["skipped"][0]["N"] == 40);
    const auto art = artifact(Json{{"x", 1}}, j);
    CHECK(art["code_version"] == kCodeVersion);
    CHECK(art["config"]["x"] == 1);
  }

  TEST_CASE("grid csv, json and heatmap") {
    auto grid = make_grid({0, 0.5, 1, 1.5}, 0.5);
    for (auto& c : grid.cells) c.bracket = sample_bracket();
    const Json cfg = {{"command", "sweep"}};
    const auto rows = lines(grid_csv(grid, cfg));
    REQUIRE(rows.size() == 6);
    CHECK(rows[1] == "u,v,h_lo,h_hi,N,n,seconds");
    CHECK(rows[2] == "0,1,1.25,1.5,20,2,1");
    CHECK(rows[3] == "0.5,1,1.25,1.5,20,2,1");
    const auto j = grid_json(grid, cfg);
    CHECK(j["result"]["cells"].size() == 4);
    CHECK(j["result"]["nu"] == 2);
    const auto svg = svg_heatmap(grid);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<title>") != std::string::npos);
  }

  TEST_CASE("pressure csv marks infinities") {
    PressureBracket inf_row;
    inf_row.t = 1.0;
    inf_row.p_lo = inf_row.p_hi = std::numeric_limits<double>::infinity();
    PressureBracket row;
    row.t = 2.0;
    row.p_lo = -0.5;
    row.p_hi = -0.25;
    const auto rows = lines(pressure_csv({inf_row, row}, Json::object()));
    REQUIRE(rows.size() == 4);
    CHECK(rows[1] == "t,P_lo,P_hi");
    CHECK(rows[2] == "1,inf,inf");
    CHECK(rows[3] == "2,-0.5,-0.25");
  }

  TEST_CASE("scatter svg has one mark per point") {
    PointCloud cloud;
    cloud.points = {Complex(0.5, 0.0), Complex(0.25, 0.1), Complex(0.75, -0.2)};
    const auto svg = svg_scatter(cloud);
    std::size_t marks = 0;
    for (std::size_t pos = svg.find("<rect"); pos != std::string::npos; pos = svg.find("<rect", pos + 1)) {
      ++marks;
    }
    CHECK(marks >= 3);
  }
}
