#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cowlab/cli.hpp"
#include "doctest.h"

namespace {

struct RunOutcome {
  int code = -1;
  std::string out;
  std::string err;
};

RunOutcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunOutcome r;
  r.code = cowlab::cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/" + name;
  std::ofstream f(path, std::ios::binary);
  f << content;
  return path;
}

const char* kConfigA = R"({"mu":0.06,"f":0.155,"t_B":0.9,"eta_det":0.22,
  "alpha_channel_db_per_km":0.1625})";

}  // namespace

TEST_CASE("number formatting is locale-free with 12 significant digits") {
  using cowlab::cli::format_number;
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5) == "-2.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1e-7).find('e') != std::string::npos);
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  // Round-trips to the same double.
  const double v = 0.0123456789012345;
  CHECK(std::stod(format_number(v)) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("byte digest of known strings") {
  using cowlab::cli::fnv1a_hex;
  // FNV-1a 64-bit reference vectors.
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
  CHECK(fnv1a_hex("x") != fnv1a_hex("y"));
}

TEST_CASE("grid specification parsing") {
  using cowlab::cli::grid_values;
  using cowlab::cli::parse_grid;
  const cowlab::cli::GridSpec g = parse_grid("-4:-1:7");
  CHECK(g.lo == doctest::Approx(-4.0));
  CHECK(g.hi == doctest::Approx(-1.0));
  CHECK(g.n == 7);
  const std::vector<double> v = grid_values(g);
  REQUIRE(static_cast<int>(v.size()) == 7);
  CHECK(v.front() == doctest::Approx(-4.0));
  CHECK(v.back() == doctest::Approx(-1.0));
  CHECK(v[3] == doctest::Approx(-2.5));

  const std::vector<double> single = grid_values(parse_grid("2:5:1"));
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(2.0));

  CHECK_THROWS_AS(parse_grid("1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1:2:x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("a:2:3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1:2:3:4"), std::invalid_argument);
  CHECK_THROWS_AS(grid_values(parse_grid("1:2:0")), std::invalid_argument);
  CHECK_THROWS_AS(grid_values(parse_grid("1:2:-3")), std::invalid_argument);
}

TEST_CASE("reference tables carry the expected rows") {
  const auto& t3 = cowlab::cli::reference_rows("table3");
  REQUIRE(t3.size() == 4);
  int attack_rows = 0;
  for (const auto& r : t3)
    if (r.label == "attack_reach") ++attack_rows;
  CHECK(attack_rows == 2);
  const auto& t4 = cowlab::cli::reference_rows("table4");
  REQUIRE(t4.size() == 2);
  CHECK(t4[0].label == "crossing_decoy");
  const auto& t5 = cowlab::cli::reference_rows("table5");
  REQUIRE(t5.size() == 2);
  CHECK_THROWS_AS(cowlab::cli::reference_rows("table9"),
                  std::invalid_argument);
}

TEST_CASE("config files hold one parameter object or an array of them") {
  const auto one = cowlab::cli::params_sets_from_json(kConfigA);
  REQUIRE(one.size() == 1);
  CHECK(one[0].mu == doctest::Approx(0.06));
  const auto two = cowlab::cli::params_sets_from_json(
      std::string("[") + kConfigA + "," + kConfigA + "]");
  REQUIRE(two.size() == 2);
  CHECK_THROWS_AS(cowlab::cli::params_sets_from_json("[]"),
                  std::invalid_argument);
  CHECK_THROWS_AS(cowlab::cli::params_sets_from_json("3"),
                  std::invalid_argument);
  CHECK_THROWS_AS(cowlab::cli::params_sets_from_json("{\"mu\":0.06}"),
                  std::invalid_argument);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"reproduce"}).code == 2);             // missing table and config
  CHECK(run({"reproduce", "table7", "--config", "x"}).code == 2);
  CHECK(run({"sweep", "fig6"}).code == 2);         // missing config and grid
  CHECK(run({"usd"}).code == 2);                   // missing mu
  const RunOutcome version = run({"--version"});
  CHECK(version.code == 0);
  CHECK(version.out.find("cowlab 1.0.0") != std::string::npos);
}

TEST_CASE("missing and malformed configs exit with code 2") {
  CHECK(run({"reproduce", "table3", "--config", "/nonexistent/path.json"})
            .code == 2);
  const std::string bad = write_temp("cowlab_bad.json", "{not json");
  CHECK(run({"reproduce", "table3", "--config", bad}).code == 2);
  const std::string wrong =
      write_temp("cowlab_wrong.json", "{\"mu\": 0.06, \"f\": 0.155}");
  CHECK(run({"reproduce", "table3", "--config", wrong}).code == 2);
  std::remove(bad.c_str());
  std::remove(wrong.c_str());
}

TEST_CASE("discrimination inspection command") {
  const RunOutcome three = run({"usd", "--mu", "0.1"});
  CHECK(three.code == 0);
  CHECK(three.out.find("\"q_s\"") != std::string::npos);
  CHECK(three.out.find("0.0951625") != std::string::npos);  // 1 - exp(-0.1)

  const RunOutcome tuned = run({"usd", "--mu", "0.1", "--zeta", "0.7"});
  CHECK(tuned.code == 0);
  CHECK(tuned.out.find("\"zeta\"") != std::string::npos);

  const RunOutcome four = run({"usd", "--mu", "0.1", "--four-state", "--fd",
                               "0.1", "--fv", "0.055"});
  CHECK(four.code == 0);
  CHECK(four.out.find("\"certificates\"") != std::string::npos);

  // Inconsistent flag combinations are usage errors.
  CHECK(run({"usd", "--mu", "0.1", "--four-state"}).code == 2);
  CHECK(run({"usd", "--mu", "0.1", "--fd", "0.1"}).code == 2);
  CHECK(run({"usd", "--mu", "0.1", "--four-state", "--fd", "0.1", "--fv",
             "0.055", "--zeta", "0.5"})
            .code == 2);
  CHECK(run({"usd", "--mu", "-1"}).code == 2);
}

TEST_CASE("sweep command on a small grid") {
  const std::string cfg = write_temp("cowlab_sweep_cfg.json", kConfigA);
  const RunOutcome r =
      run({"sweep", "fig6", "--config", cfg, "--grid", "-4:-3:3"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "log10_g_zero,log10_min_g_coin,log10_honest_g_coin");
  int rows = 0;
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 3);

  // Empty grids are usage errors.
  CHECK(run({"sweep", "fig6", "--config", cfg, "--grid", "-4:-3:0"}).code ==
        2);
  CHECK(run({"sweep", "fig12", "--config", cfg, "--grid", "-4:-3:3"}).code ==
        2);
  std::remove(cfg.c_str());
}

TEST_CASE("random self-check command") {
  const RunOutcome ok = run({"oracle-check", "--seed", "7", "--cases", "25"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("oracle-check OK") != std::string::npos);

  // Identical seeds give identical reports.
  const RunOutcome again = run({"oracle-check", "--seed", "7", "--cases", "25"});
  CHECK(again.out == ok.out);

  const RunOutcome fault =
      run({"oracle-check", "--seed", "7", "--cases", "25", "--inject-fault"});
  CHECK(fault.code == 1);
  CHECK(fault.out.find("FAILED") != std::string::npos);

  CHECK(run({"oracle-check", "--seed", "7", "--cases", "0"}).code == 2);
}
