#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blowup/checksum.hpp"
#include "blowup/errors.hpp"
#include "blowup/problem_spec.hpp"
#include "blowup/run.hpp"
#include "oracles.hpp"

using namespace blowup;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("blowup_lab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string spec_error_path(const json& j) {
  try {
    parse_problem_spec(j);
  } catch (const SpecError& e) {
    return e.field_path();
  }
  return "<accepted>";
}

json base(const std::string& task) {
  return {{"schema_version", 1}, {"domain", {{"shape", "ball"}, {"resolution", 24}}}, {"task", task}};
}

RunReport run_spec(const json& j, const fs::path& dir, int threads = 1) {
  RunOptions o;
  o.out_dir = dir.string();
  o.threads = threads;
  o.verbosity = 0;
  return run(parse_problem_spec(j), o);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BLOWUP_LAB_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("spec round trip is idempotent") {
  json j = base("predict");
  j["domain"] = {{"shape", "box"}, {"lo", {-1, -0.5, -1}}, {"hi", {1, 0.5, 1}}, {"resolution", 32}};
  j["potential_a"] = {{"kind", "polynomial"}, {"c0", -1.0}, {"linear", {0.1, 0, 0}},
                      {"quadratic", {{1, 0, 0}, {0, 2, 0.5}, {0, 0.5, 0}}}};
  j["potential_V"] = {{"kind", "constant"}, {"value", -1}};
  j["params"] = {{"n", 2}, {"init", {{0.3, 0, 0}, {-0.3, 0, 0}}}, {"eps", {0.1, 0.01}}};
  const json once = to_json(parse_problem_spec(j));
  const json twice = to_json(parse_problem_spec(once));
  CHECK(once == twice);
  CHECK(once.dump() == twice.dump());
  CHECK(once["params"]["init"][1][0] == -0.3);

  json g = base("verify");
  std::vector<double> samples(24 * 24 * 24, 0.25);
  g["potential_a"] = {{"kind", "grid_samples"}, {"values", samples}, {"c0", -0.5}};
  const json gs = to_json(parse_problem_spec(g));
  CHECK(gs == to_json(parse_problem_spec(gs)));
  CHECK(parse_problem_spec(gs).potential_a(Point(0.1, 0.2, 0.3)) == doctest::Approx(-0.25));
}

TEST_CASE("spec errors name the field") {
  json j = base("verify");
  j.erase("schema_version");
  CHECK(spec_error_path(j) == "/");
  j = base("verify");
  j["schema_version"] = 7;
  CHECK(spec_error_path(j) == "/schema_version");
  j = base("verify");
  j["domain"]["resolution"] = 8;
  CHECK(spec_error_path(j) == "/domain/resolution");
  j["domain"]["resolution"] = 200;
  CHECK(spec_error_path(j) == "/domain/resolution");
  j = base("nonsense");
  CHECK(spec_error_path(j) == "/task");
  j = base("verify");
  j["params"] = {{"bogus", 1}};
  CHECK(spec_error_path(j) == "/params/bogus");
  j = base("predict");
  j["params"] = {{"n", 2}, {"init", {{0.1, 0, 0}, {1.5, 0, 0}}}};
  CHECK(spec_error_path(j) == "/params/init/1");
  j = base("green_eval");
  j["params"] = {{"sources", {{0.1, 0}}}};
  CHECK(spec_error_path(j) == "/params/sources/0");
  j = base("verify");
  j["potential_a"] = {{"kind", "grid_samples"}, {"values", {1, 2, 3}}};
  CHECK(spec_error_path(j) == "/potential_a/values");
  j = base("verify");
  j["potential_a"] = {{"kind", "expression"}, {"text", "sin(x)"}};
  CHECK(spec_error_path(j) == "/potential_a/text");
  j = base("verify");
  j["potential_a"] = {{"kind", "polynomial"}, {"quadratic", {{0, 1, 0}, {0, 0, 0}, {0, 0, 0}}}};
  CHECK(spec_error_path(j) == "/potential_a/quadratic");
  j = base("linearized");
  j["params"] = {{"liouville_tau", 0.5}};
  CHECK(spec_error_path(j) == "/params/liouville_tau");
  j = base("verify");
  j["outputs"] = {{"result", "../escape.json"}};
  CHECK(spec_error_path(j) == "/outputs/result");
}

TEST_CASE("robin map: center value, CSV shapes, manifest") {
  json j = base("robin_map");
  j["params"] = {{"probe_resolution", 5}};
  const fs::path dir = scratch("robin");
  const RunReport r = run_spec(j, dir, 2);
  CHECK(std::abs(r.result["result"]["center_phi"].get<double>() - 1 / (4 * oracle::pi)) < 1e-3);
  CHECK(lines(slurp(dir / "robin_map.csv")).size() == 1 + 125);
  CHECK(lines(slurp(dir / "robin_map_plane.csv")).size() == 1 + 25);
  REQUIRE(r.manifest.size() == 3);
  CHECK(r.manifest[0].file == "result.json");
  for (const ManifestEntry& e : r.manifest) {
    CHECK(sha256_file((dir / e.file).string()) == e.sha256);
    CHECK(fs::file_size(dir / e.file) == e.bytes);
  }
  const json report = json::parse(slurp(dir / "run_report.json"));
  CHECK(report["manifest"].size() == 3);
  CHECK(report["timings"].contains("solves"));
}

TEST_CASE("green slices have resolution^2 rows") {
  json j = base("green_eval");
  j["params"] = {{"sources", {{0.2, 0.1, 0.0}}}, {"probes", {{0, 0, 0}}}};
  const fs::path dir = scratch("green");
  const RunReport r = run_spec(j, dir);
  CHECK(lines(slurp(dir / "green_0_plane.csv")).size() == 1 + 24 * 24);
  const json& src = r.result["result"]["sources"][0];
  CHECK(src["phi"].get<double>() == doctest::Approx(oracle::ball_robin(Point(0.2, 0.1, 0))).epsilon(2e-3));
}

TEST_CASE("outputs are deterministic") {
  json j = base("find_config");
  j["potential_a"] = {{"kind", "constant"}, {"value", -1}};
  j["params"] = {{"tau0", 2.0}};
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const RunReport ra = run_spec(j, a, 1);
  run_spec(j, b, 3);
  CHECK(slurp(a / "result.json") == slurp(b / "result.json"));
  CHECK(slurp(a / "continuation_trace.csv") == slurp(b / "continuation_trace.csv"));
  CHECK(ra.result["result"]["tau"].get<double>() == doctest::Approx(oracle::pi * oracle::pi / 4).epsilon(1e-3));
}

TEST_CASE("mode CSVs have increasing radii") {
  json j = base("linearized");
  j["params"] = {{"k", {2}}, {"liouville_tau", 2.5}};
  const fs::path dir = scratch("modes");
  const RunReport r = run_spec(j, dir);
  CHECK(r.result["result"]["liouville"]["verdict"] == "only trivial solution");
  const auto rows = lines(slurp(dir / "mode_N3_k2_regular.csv"));
  REQUIRE(rows.size() > 100);
  double prev = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double r0 = std::stod(rows[i].substr(0, rows[i].find(',')));
    CHECK(r0 > prev);
    prev = r0;
  }
}

TEST_CASE("report check bookkeeping") {
  RunReport r;
  CHECK(r.all_checks_passed());
  r.checks.push_back({"a", true, 0, 1, ""});
  r.checks.push_back({"b", false, 2, 1, ""});
  CHECK_FALSE(r.all_checks_passed());
  const json j = r.to_json();
  CHECK(j["checks_passed"] == 1);
  CHECK(j["checks_failed"] == 1);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("exit");
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const json& j) {
    std::ofstream(dir / name) << j.dump();
    return (dir / name).string();
  };
  json v = base("verify");
  CHECK(run_cli("run --spec " + write("ok.json", v) + " --out-dir " + (dir / "o1").string()) == 0);

  json bad = base("verify");
  bad["domain"]["resolution"] = 4;
  CHECK(run_cli("run --spec " + write("bad.json", bad) + " --out-dir " + (dir / "o2").string()) == 2);
  CHECK(run_cli("run --out-dir x") == 2);

  json nc = base("green_eval");
  nc["potential_a"] = {{"kind", "constant"}, {"value", -20}};
  nc["params"] = {{"sources", {{0, 0, 0}}}};
  CHECK(run_cli("run --spec " + write("nc.json", nc) + " --out-dir " + (dir / "o3").string()) == 3);

  json lin = base("linearized");
  lin["params"] = {{"k", {2}}};
  std::ofstream(dir / "blocker") << "x";
  CHECK(run_cli("run --spec " + write("lin.json", lin) + " --out-dir " + (dir / "blocker" / "sub").string()) == 1);
}
