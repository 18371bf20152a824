#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = PRICELAB_CLI_PATH;

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return status == 0 ? 0 : 1;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_test_tmp") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

const char* kSmallRun = R"({
  "run": {"iterations": 3000, "rolling_window": 500, "seed": 21}
})";

}  // namespace

TEST_CASE("cli run writes its three artifacts deterministically") {
  const fs::path dir = fresh_dir("run");
  write_file(dir / "config.json", kSmallRun);

  const fs::path out_a = dir / "a";
  const fs::path out_b = dir / "b";
  REQUIRE(run_cli("run -c " + (dir / "config.json").string() + " -o " +
                  out_a.string() + " -q") == 0);
  REQUIRE(run_cli("run -c " + (dir / "config.json").string() + " -o " +
                  out_b.string() + " -q") == 0);

  for (const char* name : {"curve.csv", "result.json", "qtable.csv"}) {
    REQUIRE(fs::exists(out_a / name));
    CHECK(read_file(out_a / name) == read_file(out_b / name));
  }
  CHECK(lines_of(read_file(out_a / "curve.csv")).size() == 2502u);  // header + points
}

TEST_CASE("cli rejects malformed configs without leaving files") {
  const fs::path dir = fresh_dir("bad");
  write_file(dir / "config.json", R"({"run": {"speed": 9}})");
  const fs::path out = dir / "out";
  CHECK(run_cli("run -c " + (dir / "config.json").string() + " -o " +
                out.string() + " -q") != 0);
  CHECK((!fs::exists(out) || fs::is_empty(out)));

  write_file(dir / "syntax.json", "{nope");
  CHECK(run_cli("run -c " + (dir / "syntax.json").string() + " -o " +
                out.string() + " -q") != 0);
  CHECK(run_cli("run -c " + (dir / "missing.json").string() + " -o " +
                out.string() + " -q") != 0);
}

TEST_CASE("cli seed flag overrides the config file") {
  const fs::path dir = fresh_dir("seed");
  write_file(dir / "config.json", kSmallRun);
  const fs::path out = dir / "out";
  REQUIRE(run_cli("run -c " + (dir / "config.json").string() + " -o " +
                  out.string() + " --seed 777 -q") == 0);
  const std::string result = read_file(out / "result.json");
  CHECK(result.find("\"seed\": 777") != std::string::npos);
}

TEST_CASE("cli factorial emits the eight-cell table") {
  const fs::path dir = fresh_dir("factorial");
  write_file(dir / "config.json",
             R"({"run": {"iterations": 2000, "rolling_window": 500}})");
  const fs::path out = dir / "out";
  REQUIRE(run_cli("factorial -c " + (dir / "config.json").string() + " -o " +
                  out.string() + " --seeds 2 -q") == 0);
  const auto lines = lines_of(read_file(out / "factorial.csv"));
  REQUIRE(lines.size() == 9u);
  CHECK(lines[0] ==
        "action_space_size,state_space_size,update_method,mean_final_reward,"
        "std_final_reward,mean_total_reward,std_total_reward,"
        "mean_greedy_eval_reward,mean_convergence_iteration,n_seeds");
  int singles = 0, batches = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].find(",single,") != std::string::npos) ++singles;
    if (lines[i].find(",batch,") != std::string::npos) ++batches;
    CHECK(lines[i].back() == '2');  // n_seeds column
  }
  CHECK(singles == 4);
  CHECK(batches == 4);
}

TEST_CASE("cli oracle reports zero revenue at zero discount") {
  const fs::path dir = fresh_dir("oracle");
  write_file(dir / "config.json", R"({"oracle": {"mc_samples_per_cell": 2000}})");
  const fs::path out = dir / "out";
  REQUIRE(run_cli("oracle -c " + (dir / "config.json").string() + " -o " +
                  out.string() + " -q") == 0);
  REQUIRE(fs::exists(out / "oracle.json"));
  const auto lines = lines_of(read_file(out / "revenue_curves.csv"));
  REQUIRE(lines.size() == 1u + 7u * 10u);
  int zero_discount_rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (lines[i].find(",0.000000,") != std::string::npos) {
      ++zero_discount_rows;
      CHECK(lines[i].substr(lines[i].rfind(',') + 1) == "0.000000");
    }
  CHECK(zero_discount_rows == 7);
}

TEST_CASE("cli histogram counts sum to the sample count") {
  const fs::path dir = fresh_dir("histogram");
  const fs::path out = dir / "out";
  REQUIRE(run_cli("histogram -o " + out.string() + " -n 20000 -q") == 0);
  const auto lines = lines_of(read_file(out / "histogram.csv"));
  REQUIRE(lines.size() >= 2u);
  CHECK(lines[0] == "reward_value,count");
  long long total = 0;
  for (std::size_t i = 1; i < lines.size(); ++i)
    total += std::stoll(lines[i].substr(lines[i].find(',') + 1));
  CHECK(total == 20000);
  // failure mode: the zero bin carries mass whenever beta < 1
  CHECK(lines[1].substr(0, 9) == "0.000000,");
  CHECK(std::stoll(lines[1].substr(9)) > 0);
}

TEST_CASE("cli illustrate writes traces and the paired comparison") {
  const fs::path dir = fresh_dir("illustrate");
  write_file(dir / "config.json",
             R"({"run": {"iterations": 3000, "rolling_window": 500}})");
  const fs::path out = dir / "out";
  REQUIRE(run_cli("illustrate -c " + (dir / "config.json").string() + " -o " +
                  out.string() + " --seeds 3 -q") == 0);

  const std::string improvement = read_file(out / "improvement.json");
  CHECK(improvement.find("\"n_pairs\": 3") != std::string::npos);
  CHECK(improvement.find("\"mean_relative_improvement\"") != std::string::npos);
  CHECK(improvement.find("\"sign_test_p\"") != std::string::npos);

  for (const char* name : {"trace_single.csv", "trace_batch.csv"}) {
    const auto lines = lines_of(read_file(out / name));
    REQUIRE(lines.size() >= 2u);
    CHECK(lines[0] == "iteration,q_value,observed_reward,oracle_expectation");
    // the oracle column is the same constant on every row
    const std::string expectation =
        lines[1].substr(lines[1].rfind(',') + 1);
    for (std::size_t i = 2; i < lines.size(); ++i)
      REQUIRE(lines[i].substr(lines[i].rfind(',') + 1) == expectation);
  }
}
