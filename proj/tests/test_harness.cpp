#include "qdepth/harness.hpp"
#include "qdepth/records.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace qdepth;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qdepth_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmall = R"(# six small runs
model = ising
coupling = 1
n = 6
l = 1, 2, 3
seeds = 2
seed = 4
max_outer_cycles = 3
)";

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(kSmall);
  CHECK(c.model == Model::Ising);
  CHECK(c.couplings == std::vector<double>{1.0});
  CHECK(c.sizes == std::vector<int>{6});
  CHECK(c.depths.size() == 3);
  CHECK(c.seeds == 2);
  CHECK(c.optimizer.max_outer_cycles == 3);
  CHECK(expand_grid(c).size() == 6);

  const ExperimentConfig r = parse_config("model = xxz\ncoupling = 0.5\nn = 8, 10\nl = 1..n/2+2\n");
  REQUIRE(r.depths.size() == 1);
  CHECK(r.depths[0].last_for(8) == 6);
  CHECK(r.depths[0].last_for(10) == 7);
  CHECK(expand_grid(r).size() == 6 + 7);

  const ExperimentConfig again = parse_config(format_config(r));
  CHECK(expand_grid(again).size() == expand_grid(r).size());
}

TEST_CASE("config errors are listed one by one") {
  try {
    parse_config("model = ising\ncoupling = 1\nn = 7\nl = 1\nseeds = 0\nbogus = 3\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() >= 1);
  }
  try {
    parse_config("model = ising\ncoupling = 1\nn = 7\nl = -1\nseeds = 0\nworkers = 0\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() == 4);
  }
  CHECK_THROWS_AS(parse_config("model = ising\nmodel = xxz\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("model = ising\ncoupling = x\nn = 6\nl = 1\n"), ConfigError);
}

TEST_CASE("recipes parse") {
  for (const auto& name : recipe_names()) {
    const ExperimentConfig c = parse_config(recipe_config(name));
    CHECK(!expand_grid(c).empty());
  }
  CHECK_THROWS_AS(recipe_config("fig9"), std::invalid_argument);
}

TEST_CASE("cell seeds are distinct and stable") {
  const ExperimentConfig c = parse_config(kSmall);
  const auto cells = expand_grid(c);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      CHECK(cells[i].seed != cells[j].seed);
      CHECK(cells[i].run_id != cells[j].run_id);
    }
  }
  CHECK(cell_seed(4, Model::Ising, 1.0, 6, 2, 1) == cell_seed(4, Model::Ising, 1.0, 6, 2, 1));
}

TEST_CASE("csv and json round trips") {
  RunRecord r;
  r.run_id = "xxz_g0.5_n8_l3_r1";
  r.model = Model::Xxz;
  r.coupling = 0.5;
  r.n = 8;
  r.l = 3;
  r.wrap_cz = true;
  r.seed = std::numeric_limits<std::uint64_t>::max();
  r.energy = -13.123456789012345;
  r.e0 = -13.5;
  r.epsilon = 0.1 + 0.2;
  r.entropy_half = 0.6931471805599453;
  r.evaluations = 12345;
  r.cycles = 4;
  r.converged = true;
  r.wall_time = 1.25;

  const RunRecord c = parse_csv_row(to_csv_row(r));
  CHECK(to_csv_row(c) == to_csv_row(r));
  CHECK(c.epsilon == r.epsilon);
  CHECK(c.seed == r.seed);
  const RunRecord j = record_from_json(to_json(r));
  CHECK(to_csv_row(j) == to_csv_row(r));
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("malformed records report line numbers") {
  const fs::path dir = scratch("records");
  fs::create_directories(dir);
  RunRecord r;
  r.run_id = "ising_g1_n6_l1_r0";
  r.n = 6;
  r.l = 1;
  {
    std::ofstream out(dir / "bad.csv");
    out << kCsvHeader << '\n' << to_csv_row(r) << '\n' << "ising_g1,ising,1\n";
  }
  try {
    read_records(dir / "bad.csv");
    FAIL("expected a parse error");
  } catch (const RecordParseError& e) {
    CHECK(e.line() == 3);
  }
  { std::ofstream out(dir / "empty.csv"); }
  CHECK_THROWS_AS(read_records(dir / "empty.csv"), std::runtime_error);
  {
    std::ofstream out(dir / "header.csv");
    out << kCsvHeader << '\n';
  }
  CHECK_THROWS_AS(read_records(dir / "header.csv"), std::runtime_error);
  {
    std::ofstream out(dir / "bad.jsonl");
    out << to_json(r).dump() << "\n{\"run_id\": 3}\n";
  }
  try {
    read_records(dir / "bad.jsonl");
    FAIL("expected a parse error");
  } catch (const RecordParseError& e) {
    CHECK(e.line() == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("grid run, resume and determinism") {
  const fs::path a = scratch("grid_a");
  const fs::path b = scratch("grid_b");
  ExperimentConfig c = parse_config(kSmall);

  c.out = a;
  const RunSummary first = run_grid(c);
  CHECK(first.cells == 6);
  CHECK(first.executed == 6);
  CHECK(first.complete);
  const auto records = read_records(a / "results.csv");
  REQUIRE(records.size() == 6);
  for (const auto& r : records) {
    CHECK(!r.run_id.empty());
    CHECK(r.n == 6);
    CHECK(r.epsilon >= 0.0);
    CHECK(r.evaluations > 0);
    CHECK(r.energy >= r.e0 - 1e-9);
  }
  const auto from_json = read_records(a / "results.jsonl");
  REQUIRE(from_json.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) CHECK(to_csv_row(from_json[i]) == to_csv_row(records[i]));

  const std::string csv = slurp(a / "results.csv");
  const RunSummary again = run_grid(c);
  CHECK(again.executed == 0);
  CHECK(again.resumed == 6);
  CHECK(slurp(a / "results.csv") == csv);

  // interrupted after two runs, then resumed
  c.out = b;
  RunOptions stop;
  stop.max_new_runs = 2;
  const RunSummary part = run_grid(c, stop);
  CHECK(part.executed == 2);
  CHECK_FALSE(part.complete);
  const RunSummary rest = run_grid(c);
  CHECK(rest.executed == 4);
  CHECK(rest.resumed == 2);
  const auto resumed = read_records(b / "results.csv");
  REQUIRE(resumed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    RunRecord x = records[i], y = resumed[i];
    x.wall_time = y.wall_time = 0.0;
    CHECK(to_csv_row(x) == to_csv_row(y));
  }

  const auto report = analyze_records(records, a / "analysis");
  CHECK(report.contains("series"));
  CHECK(fs::exists(a / "analysis" / "report.json"));

  fs::remove_all(a);
  fs::remove_all(b);
}
