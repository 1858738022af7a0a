#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

#ifndef RXL_CLI_PATH
#error "RXL_CLI_PATH must point at the built binary"
#endif

struct RunResult {
  int exit_code;
  json output;
  std::string raw;
};

RunResult run_cli(const std::string& args) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto out_path = dir / ("rxl_cli_out_" + std::to_string(::getpid()) + ".json");
  const std::string cmd =
      std::string(RXL_CLI_PATH) + " " + args + " > " + out_path.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::stringstream buf;
  buf << in.rdbuf();
  r.raw = buf.str();
  if (!r.raw.empty() && r.raw.front() == '{') {
    r.output = json::parse(r.raw, nullptr, false);
  }
  std::filesystem::remove(out_path);
  return r;
}

}  // namespace

TEST_CASE("test subcommand reports lambda, p-value and argmaxes") {
  const auto r = run_cli(
      "test --s 10 --g 3,2,2,3 --spec iid:p=1/2 --h0 \"killed == 0\" --threads 2");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.is_object());
  const auto& t = r.output["tests"][0];
  CHECK(t["lambda"].get<double>() >= 0.0);
  CHECK(t["lambda"].get<double>() <= 1.0);
  CHECK(t["p_value"].get<double>() > 0.0);
  CHECK(t["argmax_global_count"].get<int>() >= 1);
  CHECK(r.output.contains("runtime_ms"));
}

TEST_CASE("json report re-ingested as a job file reproduces the numbers") {
  const auto first = run_cli(
      "test --s 9 --g 2,2,2,3 --spec iid:p=1/3 --h0 \"saved >= 2\" --threads 2");
  REQUIRE(first.exit_code == 0);

  const auto dir = std::filesystem::temp_directory_path();
  const auto job_path = dir / "rxl_cli_job.json";
  json job;
  job["s"] = first.output["s"];
  job["g"] = first.output["g"];
  job["spec"] = first.output["spec"];
  job["h0"] = first.output["tests"][0]["h0"];
  std::ofstream(job_path) << job.dump();

  const auto second = run_cli("test --job " + job_path.string() + " --threads 2");
  REQUIRE(second.exit_code == 0);
  CHECK(second.output["tests"][0]["lambda"] == first.output["tests"][0]["lambda"]);
  CHECK(second.output["tests"][0]["p_value"] == first.output["tests"][0]["p_value"]);
  std::filesystem::remove(job_path);
}

TEST_CASE("ci subcommand inverts the test") {
  const auto r = run_cli(
      "ci --s 8 --g 4,0,1,3 --spec iid:p=1/2 --quantity killed --side lower "
      "--alpha 0.2 --threads 2");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output["ci"].contains("lower"));
  CHECK(r.output["ci"]["scanned"].size() >= 1);
}

TEST_CASE("table subcommand persists and is idempotent") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto cache = dir / "rxl_cli_table.rxlt";
  std::filesystem::remove(cache);

  const auto built =
      run_cli("table --s 8 --spec iid:p=1/2 --cache " + cache.string());
  REQUIRE(built.exit_code == 0);
  CHECK(built.output["cache"]["status"] == "built+saved");

  const auto again =
      run_cli("table --s 8 --spec iid:p=1/2 --cache " + cache.string());
  REQUIRE(again.exit_code == 0);
  CHECK(again.output["cache"]["status"] == "up-to-date");

  SUBCASE("mismatched cache refuses without --rebuild") {
    const auto clash =
        run_cli("table --s 9 --spec iid:p=1/2 --cache " + cache.string());
    CHECK(clash.exit_code == 3);
    const auto rebuilt = run_cli("table --s 9 --spec iid:p=1/2 --rebuild --cache " +
                                 cache.string());
    CHECK(rebuilt.exit_code == 0);
  }

  SUBCASE("test subcommand refuses a mismatched cache") {
    const auto r = run_cli("test --s 8 --g 2,2,2,2 --spec urn:m=4 --h0 \"killed == 0\" --cache " +
                           cache.string());
    CHECK(r.exit_code == 3);
  }

  std::filesystem::remove(cache);
}

TEST_CASE("input errors exit with code 2") {
  CHECK(run_cli("test --s 8 --spec iid:p=1/2 --h0 \"killed == 0\"").exit_code == 2);
  CHECK(run_cli("test --s 8 --g 2,2,2,2 --spec iid:p=7/2 --h0 \"killed == 0\"").exit_code == 2);
  CHECK(run_cli("test --s 8 --g 2,2,2,2 --spec iid:p=1/2 --h0 \"bogus == 0\"").exit_code == 2);
  CHECK(run_cli("ci --s 8 --g 2,2,2,2 --spec iid:p=1/2 --quantity bogus").exit_code == 2);
  CHECK(run_cli("test --s 8 --g 2,2,2,2 --spec urn:m=3 --h0 \"killed == 0\"").exit_code == 2);
  CHECK(run_cli("no-such-command").exit_code == 2);
}

TEST_CASE("bounds subcommand") {
  const auto r = run_cli("bounds --s 100 --g 35,15,15,35");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output["defier_share_lower_bound"] == "0");
  CHECK(r.output["complier_share_lower_bound"] == "2/5");
}

TEST_CASE("limited subcommand at a small sample size") {
  const auto r = run_cli(
      "limited --s 8 --shares 3/4,1/4 --spec iid:p=1/2 --h0 \"killed == 0\" --threads 2");
  REQUIRE(r.exit_code == 0);
  const double p = r.output["tests"][0]["p_value"].get<double>();
  CHECK(p > 0.0);
  CHECK(p <= 1.0);
}

TEST_CASE("asymptotic subcommand flags approximation and checks impossibility") {
  const auto r = run_cli("asymptotic --s 100 --g 35,15,15,35 --spec urn:m=50");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output["approximate"] == true);
  CHECK(r.output["population_mle"]["implied_average_effect"] == "2/5");
  CHECK(r.output["population_mle"]["zero_defier_maximizer_exists"] == true);
  CHECK(r.output["zero_defier_check"]["equal"] == true);
  CHECK(r.output["two_proportion_test"]["approximate"] == true);
}

TEST_CASE("mle-count subcommand") {
  const auto r = run_cli("mle-count --s 8 --spec iid:p=1/2 --exact --threads 2");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output["records"].get<int>() == 165);
  CHECK(r.output["multi_valued_argmax"].get<int>() > 0);
  CHECK(r.output["exact_ties"] == true);
}

TEST_CASE("oracle-check subcommand passes") {
  const auto r = run_cli("oracle-check --s 4");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output["failures"].get<int>() == 0);
  CHECK(r.output["comparisons"].get<int>() > 0);
}

TEST_CASE("csv and text formats") {
  const auto csv = run_cli(
      "test --s 6 --g 2,1,1,2 --spec iid:p=1/2 --h0 \"killed == 0\" --format csv");
  REQUIRE(csv.exit_code == 0);
  CHECK(csv.raw.rfind("field,value", 0) == 0);
  const auto text = run_cli(
      "test --s 6 --g 2,1,1,2 --spec iid:p=1/2 --h0 \"killed == 0\" --format text");
  REQUIRE(text.exit_code == 0);
  CHECK(text.raw.find("lambda") != std::string::npos);
}
