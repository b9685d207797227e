#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "config.hpp"
#include "doctest.h"
#include "hconv/errors.hpp"
#include "hconv/typeset.hpp"
#include "json.hpp"
#include "output.hpp"

namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "hconv");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return hconv::cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hconv_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find("\r\n", start)) != std::string::npos; start = pos + 2) {
    out.push_back(text.substr(start, pos - start));
  }
  return out;
}

// Small enough for a unit test, still exercising every scan stage.
const char* kSmallScan = R"({"scan.k": 3, "grid.points_x": 16, "grid.points_t": 32, "ladder.count": 3,
  "ladder.cells_per_delta": 4, "experiment.local_nodes": 8, "experiment.x_samples": 5,
  "norm.points_x": 6, "norm.points_t": 12, "norm.iterations": 3})";

}  // namespace

TEST_CASE("malformed or unknown config is a usage error with no output") {
  const auto dir = scratch("bad");
  const auto out = dir / "out";
  spit(dir / "broken.json", "{\"n\": 1,");
  CHECK(run({"scan", "--config", (dir / "broken.json").string(), "--out", out.string()}) == 2);
  spit(dir / "unknown.json", R"({"grid.pointz": 8})");
  CHECK(run({"scan", "--config", (dir / "unknown.json").string(), "--out", out.string()}) == 2);
  spit(dir / "typed.json", R"({"n": 1.5})");
  CHECK(run({"group-selftest", "--config", (dir / "typed.json").string(), "--out", out.string()}) == 2);
  spit(dir / "nested.json", R"({"phase": {"kind": "power"}})");
  CHECK(run({"group-selftest", "--config", (dir / "nested.json").string(), "--out", out.string()}) == 2);
  CHECK(run({"group-selftest", "--n", "0", "--out", out.string()}) == 2);
  CHECK(run({"no-such-command"}) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("flags override file keys and defaults follow n") {
  hconv::cli::Overrides flags;
  flags.n = 2;
  const auto c = hconv::cli::resolve_config(nlohmann::json{{"n", 1}, {"scan.k", 4}}, flags);
  CHECK(c.n == 2);
  CHECK(c.a.size() == 2);
  CHECK(c.scan_k == 4);
  CHECK(c.grid_points_x == 8);
  CHECK_FALSE(c.norm_bounds);
  auto d = c;
  d.workers = 7;
  d.out = "elsewhere";
  CHECK(d.hash() == c.hash());
  d.scan_k = 5;
  CHECK(d.hash() != c.hash());
  CHECK_THROWS_AS(hconv::cli::resolve_config(nlohmann::json{{"phase.a", {1.0}}}, flags), hconv::ConfigError);
  CHECK(hconv::cli::config_schema().size() == c.to_json().size());
}

TEST_CASE("verify-lemma6 with kmax 0 and nmax 1") {
  const auto out = scratch("transform") / "out";
  CHECK(run({"verify-lemma6", "--kmax", "0", "--nmax", "1", "--out", out.string()}) == 0);
  const auto rows = lines(slurp(out / "transform.csv"));
  REQUIRE(rows.size() == 42);
  CHECK(rows[0] == "n,k,xi,closed_re,closed_im,quadrature_re,quadrature_im,relerr");
  bool found = false;
  for (const auto& r : rows) {
    if (r.rfind("1,0,0,", 0) == 0) {
      found = true;
      CHECK(r.rfind("1,0,0,2,0,", 0) == 0);
    }
  }
  CHECK(found);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["status"] == "passed");
  CHECK(m["config"]["transform.kmax"] == 0);
  CHECK(m["outputs"].size() == 2);
}

TEST_CASE("group-selftest writes a passing manifest") {
  const auto out = scratch("group") / "out";
  CHECK(run({"group-selftest", "--out", out.string()}) == 0);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["command"] == "group-selftest");
  CHECK(m["checks"].size() == 3);
  for (const auto& ch : m["checks"]) CHECK(ch["pass"] == true);
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK_FALSE(fs::exists(out / "manifest.json.tmp"));
}

TEST_CASE("resolution failure leaves a failed manifest") {
  const auto dir = scratch("resolution");
  spit(dir / "coarse.json", R"({"ladder.cells_per_delta": 2})");
  const auto out = dir / "out";
  CHECK(run({"scaling", "--config", (dir / "coarse.json").string(), "--out", out.string()}) == 2);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["status"] == "failed");
  CHECK(m["exit_code"] == 2);
  CHECK(m["error"].get<std::string>().find("resolution") != std::string::npos);
}

TEST_CASE("scan output is byte-identical across reruns and worker counts") {
  const auto dir = scratch("scan");
  spit(dir / "small.json", kSmallScan);
  const auto cfg = (dir / "small.json").string();
  REQUIRE(run({"scan", "--config", cfg, "--out", (dir / "a").string()}) == 0);
  REQUIRE(run({"scan", "--config", cfg, "--workers", "3", "--out", (dir / "b").string()}) == 0);
  for (const char* f : {"scan.csv", "scan_plot.csv", "scan.json"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const auto rows = lines(slurp(dir / "a" / "scan.csv"));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == "ip,iq,fitted,predicted,norm_lb,inside_thm1,r2");
  const auto doc = nlohmann::json::parse(slurp(dir / "a" / "scan.json"));
  const auto tri = hconv::thm1_triangle(1);
  for (const auto& r : doc["results"]) {
    const hconv::TypePoint pt{r["ip"].get<double>(), r["iq"].get<double>()};
    CHECK(r["inside_thm1"] == hconv::contains(tri, pt));
    const bool interior = pt.ip > 0 && pt.ip < 1 && pt.iq > 0 && pt.iq < 1;
    CHECK(r["norm_lb"].is_null() != interior);
  }
}

TEST_CASE("power phase scan adds the second membership column") {
  const auto dir = scratch("power");
  spit(dir / "tiny.json", R"({"scan.k": 2, "ladder.count": 3, "experiment.x_samples": 3, "quadrature.nodes": 4})");
  const auto out = dir / "out";
  REQUIRE(run({"scan", "--n", "2", "--phase", "power", "--m", "2", "--config", (dir / "tiny.json").string(), "--out",
               out.string()}) == 0);
  const auto rows = lines(slurp(out / "scan.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "ip,iq,fitted,predicted,norm_lb,inside_thm1,inside_thm2,r2");
  const auto v = hconv::thm2_vertex(2, 2);
  CHECK(std::abs(v.ip - 0.8) < 1e-12);
  CHECK(std::abs(v.iq - 0.2) < 1e-12);
}

TEST_CASE("csv quoting and number formatting") {
  hconv::cli::Csv csv({"a", "b"});
  csv.add("x,y").add("say \"hi\"");
  csv.end_row();
  csv.add(0.1).add(std::numeric_limits<double>::quiet_NaN());
  csv.end_row();
  CHECK(csv.str() == "a,b\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n0.10000000000000001,nan\r\n");
  CHECK(csv.rows() == 2);
  CHECK_THROWS(csv.end_row());
}
