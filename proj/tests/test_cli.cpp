#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/report.hpp"
#include "bosegas/csv.hpp"
#include "bosegas/errors.hpp"

using namespace bosegas;
using namespace bosegas::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bosegas_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small(const json& extra = json::object()) {
  json j = {{"potential", {{"model", "soft_sphere"}, {"v0", 50.0}, {"radius", 0.2}}},
            {"N", {2, 3}},
            {"modes", 7},
            {"random_states", 3}};
  j.update(extra);
  return parse_config(j);
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys and bad types") {
  CHECK_NOTHROW(parse_config(json::object()));
  CHECK_THROWS_AS(parse_config({{"kapa", 0.04}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"potential", {{"vo", 1.0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"tolerances", {{"lanczoss", 1e-9}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"kappa", "small"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"N", {3, -1}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"kernel", "exact"}}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  const ExperimentConfig c = parse_config({{"N", 7}, {"comment", "x"}, {"alpha", 0.1}});
  CHECK(c.N == std::vector<long>{7});
  CHECK(c.check_config(7).alpha == 0.1);
  CHECK(parse_config(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("config range checks") {
  CHECK_THROWS_AS(small({{"kappa", 0.05}}).validate_many_body(), ConfigError);
  CHECK_NOTHROW(small({{"kappa", 0.05}}).validate_basic());
  CHECK_THROWS_AS(small({{"potential", {{"radius", 0.6}}}}).validate_basic(), ConfigError);
  CHECK_THROWS_AS(small({{"cutoff_factor", 0.0}}).validate_basic(), ConfigError);
  CHECK_THROWS_AS(small({{"modes", 8}}).fock_modes(), ConfigError);
}

TEST_CASE("CSV quoting and number formatting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_ivec({1, -2, 0}) == "1 -2 0");
}

TEST_CASE("git blob hashes") {
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("tables write CSV and JSON mirrors") {
  const fs::path dir = scratch("table");
  fs::create_directories(dir);
  Table t({"name", "value", "flag"});
  t.add({"a,b", 1.5, true});
  t.add({"c", std::numeric_limits<double>::quiet_NaN(), false});
  CHECK_THROWS_AS(t.add({1}), std::logic_error);
  std::vector<fs::path> files;
  t.write(dir, "t", files);
  CHECK(files.size() == 2);
  CHECK(slurp(dir / "t.csv") == "name,value,flag\r\n\"a,b\",1.5,true\r\nc,nan,false\r\n");
  const json j = json::parse(slurp(dir / "t.json"));
  CHECK(j.size() == 2);
  CHECK(j[0]["name"] == "a,b");
  CHECK(j[1]["value"] == "nan");
  fs::remove_all(dir);
}

TEST_CASE("scatter command") {
  const fs::path dir = scratch("scatter");
  std::ostringstream log;
  const CommandResult r = run_command("scatter", small(), dir, log);
  CHECK(r.exit_code == kOk);
  CHECK(r.content_hash.size() == 40);
  for (const char* f : {"scatter.csv", "scatter.json", "scatter_profile.csv", "manifest.json"})
    CHECK(fs::exists(dir / f));
  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["content_hash"] == r.content_hash);
  CHECK(m["command"] == "scatter");
  bool listed = false;
  for (const auto& f : m["files"])
    if (f["name"] == "scatter.csv") listed = f["blob"] == git_blob_hash_file(dir / "scatter.csv");
  CHECK(listed);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  std::ostringstream log;
  CHECK(run_command("nope", small(), scratch("nope"), log).exit_code == kConfig);
  CHECK(run_command("ed", small({{"kappa", 0.2}}), scratch("kappa"), log).exit_code == kConfig);
  CHECK(run_command("ed", small({{"N", {20}}, {"limits", {{"max_dim", 100}}}}), scratch("dim"), log)
            .exit_code == kResource);
  CHECK(run_command("scan", small(), scratch("scan"), log).exit_code == kConfig);
  fs::remove_all(scratch("nope"));
  fs::remove_all(scratch("kappa"));
  fs::remove_all(scratch("dim"));
  fs::remove_all(scratch("scan"));
}

TEST_CASE("ed and verify are deterministic") {
  std::ostringstream log;
  for (const char* cmd : {"ed", "verify"}) {
    const fs::path a = scratch(std::string(cmd) + "_a"), b = scratch(std::string(cmd) + "_b");
    const CommandResult ra = run_command(cmd, small(), a, log);
    const CommandResult rb = run_command(cmd, small({{"threads", 1}}), b, log);
    CHECK(ra.exit_code == kOk);
    CHECK(rb.exit_code == kOk);
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("twobody with a truncated kernel at zero coupling") {
  const fs::path dir = scratch("twobody");
  std::ostringstream log;
  const ExperimentConfig c = small({{"potential", {{"v0", 0.0}}},
                                    {"kappa", 0.05},
                                    {"alpha", 0.2},
                                    {"kernel", "truncated"},
                                    {"N", {4, 8}},
                                    {"cutoff_factor", 0.5},
                                    {"doubling_N", {4}}});
  const CommandResult r = run_command("twobody", c, dir, log);
  CHECK(r.exit_code == kOk);
  const json rows = json::parse(slurp(dir / "kernel_bounds.json"));
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row["sup_vren"] == 0.0);
    CHECK(row["sup_eta"] == 0.0);
  }
  CHECK(fs::exists(dir / "cutoff_doubling.csv"));
  fs::remove_all(dir);
}
