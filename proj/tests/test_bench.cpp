#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "cgmp/bench.hpp"
#include "cgmp/error.hpp"
#include "cgmp/ik.hpp"
#include "cgmp/scenario.hpp"
#include "support.hpp"

using namespace cgmp;

namespace {

RunRecord rec(const std::string& scenario, const std::string& planner, const std::string& target,
              bool success, double time, std::uint64_t iterations = 10) {
  RunRecord r;
  r.scenario = scenario;
  r.planner = planner;
  r.target = target;
  r.success = success;
  r.time_s = time;
  r.iterations = iterations;
  r.seed = iterations * 31 + static_cast<std::uint64_t>(time * 1000);
  r.final_dist = success ? 12.5 : 80.0;
  r.path_len = success ? 3.25 : 0.0;
  return r;
}

// Under-table levels 1 and 5, annotated as the CLI would, in one directory.
struct Annotated {
  test::TempDir dir{"bench"};
  std::vector<std::filesystem::path> manifests;

  Annotated() {
    const auto sc = generate_family(default_family_spec(Family::kUnderTable), test::robot(),
                                    make_gripper_mesh(), std::nullopt, 1);
    for (int level : {0, 4}) {
      const Scenario& s = sc[level];
      const auto manifest = dir.path / ("scenario_" + s.id + ".json");
      save_scenario(s, manifest);
      const AssembledScenario a = assemble(s);
      SamplerParams p;
      p.raw_budget = 5000;
      p.output_size = 60;
      const GraspSet g = generate_grasp_set({a.object, a.scene, a.gripper, "ball", s.id}, p,
                                            1000 + std::stoull(s.id));
      save_grasp_set(g, dir.path / s.grasps_file);
      IkSolutionSet ik = compute_ik_set(a.chain, a.scene, g, a.q_start, IkParams{});
      ik.scenario_id = s.id;
      save_ik_set(ik, dir.path / s.ik_file);
      manifests.push_back(manifest);
    }
  }
};

Annotated& annotated() {
  static Annotated a;
  return a;
}

std::string csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  write_records_csv(records, out);
  return out.str();
}

}  // namespace

TEST_CASE("trial seeds are deterministic and separate every coordinate") {
  const auto s = trial_seed(7, "011", kJPlusRrt, "any", 3);
  CHECK(s == trial_seed(7, "011", kJPlusRrt, "any", 3));
  CHECK(s != trial_seed(8, "011", kJPlusRrt, "any", 3));
  CHECK(s != trial_seed(7, "012", kJPlusRrt, "any", 3));
  CHECK(s != trial_seed(7, "011", kIkRrt, "any", 3));
  CHECK(s != trial_seed(7, "011", kJPlusRrt, "4", 3));
  CHECK(s != trial_seed(7, "011", kJPlusRrt, "any", 4));
}

TEST_CASE("path length sums joint-space segment norms") {
  Configuration a = Configuration::Zero(), b = a, c = a;
  b[0] = 3;
  b[1] = 4;
  c = b;
  c[8] = 1;
  CHECK(path_length({a, b, c}) == doctest::Approx(6.0));
  CHECK(path_length({a}) == 0.0);
  CHECK(path_length({}) == 0.0);
}

TEST_CASE("summary arithmetic") {
  std::vector<RunRecord> r;
  for (int i = 0; i < 10; ++i) r.push_back(rec("011", kJPlusRrt, "any", i < 7, 1.0 + i));
  auto rows = summarize(r);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].runs == 10);
  CHECK(rows[0].successes == 7);
  CHECK(rows[0].success_rate == 0.7);
  CHECK(rows[0].mean_time == doctest::Approx(5.5));
  CHECK(rows[0].std_time == doctest::Approx(std::sqrt(8.25)));

  rows = summarize({rec("011", kJPlusRrt, "any", true, 1.0), rec("011", kJPlusRrt, "any", true, 3.0)});
  CHECK(rows[0].mean_time == 2.0);
  CHECK(rows[0].std_time == 1.0);
}

TEST_CASE("summary rows per scenario and planner with IK facts") {
  std::vector<RunRecord> r{
      rec("021", kIkRrt, "3", true, 0.5),  rec("021", kIkRrt, "3", false, 2.0),
      rec("021", kIkRrt, "9", false, 2.0), rec("021", kIkRrt, "9", false, 2.0),
      rec("021", kIkRrt, "12", true, 0.1), rec("021", kJPlusRrt, "any", true, 0.3),
      rec("011", kJPlusRrt, "any", false, 2.0)};
  const std::vector<ScenarioMeta> meta{{"021", 200, 5, 0.4}, {"011", 200, std::nullopt, 0.0},
                                       {"025", 200, 0, 0.2}};
  const auto rows = summarize(r, meta);
  // 011 jplus, 021 ik, 021 jplus, 025 ik (no targets)
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].scenario == "011");
  CHECK(rows[1].planner == kIkRrt);
  CHECK(rows[1].runs == 5);
  CHECK(rows[1].success_rate == 0.4);
  CHECK(rows[1].reachable_targets == 2u);
  CHECK(rows[1].ik_count == 5u);
  CHECK(*rows[1].reachable_targets <= *rows[1].ik_count);
  CHECK(rows[1].grasp_count == 200u);
  CHECK(rows[2].planner == kJPlusRrt);
  CHECK(rows[3].scenario == "025");
  CHECK(rows[3].runs == 0);
  CHECK(rows[3].success_rate == 0.0);
  CHECK(rows[3].note == "no IK solutions");

  // Order of the records never matters.
  Rng rng(71);
  for (int i = 0; i < 20; ++i) {
    auto shuffled = r;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(summarize(shuffled, meta) == rows);
  }
  const std::string table = format_table(rows);
  CHECK(table.find("no IK solutions") != std::string::npos);
  CHECK(table.find("|G_ik|") != std::string::npos);
}

TEST_CASE("cumulative success curves") {
  const std::vector<RunRecord> r{rec("011", kJPlusRrt, "any", true, 1.0, 100),
                                 rec("011", kJPlusRrt, "any", true, 3.0, 300),
                                 rec("011", kJPlusRrt, "any", false, 4.0, 400),
                                 rec("011", kJPlusRrt, "any", false, 4.0, 400)};
  const auto c = cumulative_success_curve(r, CurveAxis::kTime, {0, 2, 4});
  REQUIRE(c.size() == 3);
  CHECK(c[0] == std::pair(0.0, 0.0));
  CHECK(c[1] == std::pair(2.0, 0.25));
  CHECK(c[2] == std::pair(4.0, 0.5));
  const auto it = cumulative_success_curve(r, CurveAxis::kIterations, {99, 100, 1000});
  CHECK(it[0].second == 0.0);
  CHECK(it[1].second == 0.25);
  CHECK(it[2].second == summarize(r)[0].success_rate);

  std::vector<RunRecord> failing(5, rec("011", kJPlusRrt, "any", false, 2.0));
  for (const auto& [x, y] : cumulative_success_curve(failing, CurveAxis::kTime, {0, 1, 10})) CHECK(y == 0.0);
  CHECK_THROWS_AS(cumulative_success_curve({}, CurveAxis::kTime, {1}), Error);

  Rng rng(72);
  std::vector<RunRecord> random;
  for (int i = 0; i < 50; ++i) random.push_back(rec("011", kJPlusRrt, "any", uniform01(rng) < 0.6, test::uniform(rng, 0, 10)));
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.5);
  const auto curve = cumulative_success_curve(random, CurveAxis::kTime, grid);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].second >= curve[i - 1].second);
  CHECK(curve.back().second == summarize(random)[0].success_rate);
}

TEST_CASE("records CSV round trip") {
  Rng rng(73);
  std::vector<RunRecord> r;
  for (int i = 0; i < 50; ++i) {
    RunRecord x = rec("0" + std::to_string(11 + i % 3), i % 2 ? kIkRrt : kJPlusRrt,
                      i % 2 ? std::to_string(i) : "any", i % 3 == 0, test::uniform(rng, 0, 100), i);
    x.seed = rng();
    x.path_len = test::uniform(rng, 0, 20);
    x.final_dist = test::uniform(rng, 0, 200);
    r.push_back(x);
  }
  const std::string text = csv(r);
  CHECK(text.rfind(std::string(kRecordsHeader) + "\n", 0) == 0);
  std::istringstream in(text);
  CHECK(read_records_csv(in, "mem") == r);

  std::istringstream bad(std::string(kRecordsHeader) + "\n011,jplus-rrt,1,any,maybe,1,1,1,1\n");
  try {
    read_records_csv(bad, "bad.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bad.csv:2") != std::string::npos);
  }
  std::istringstream header("scenario,planner\n");
  CHECK_THROWS_AS(read_records_csv(header, "h.csv"), Error);
}

TEST_CASE("benchmark run: counts, determinism and the empty IK set") {
  Annotated& a = annotated();
  BenchOptions o;
  o.planners = {kJPlusRrt};
  o.runs = 5;
  o.params.max_time = 10;
  o.base_seed = 3;
  const BenchResult r = run_benchmark({a.manifests[0]}, o);
  CHECK(r.errors.empty());
  REQUIRE(r.records.size() == 5);
  for (const auto& x : r.records) {
    CHECK(x.scenario == "021");
    CHECK(x.target == "any");
    CHECK(x.time_s <= o.params.max_time + 1.0);
    if (x.success) CHECK(x.final_dist <= o.params.d_goal);
  }
  CHECK(r.records[0].seed == trial_seed(3, "021", kJPlusRrt, "any", 0));

  o.jobs = 2;
  BenchResult again = run_benchmark({a.manifests[0]}, o);
  REQUIRE(again.records.size() == r.records.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    // Wall time is the only field allowed to differ.
    RunRecord x = again.records[i];
    x.time_s = r.records[i].time_s;
    CHECK(x == r.records[i]);
  }

  o.planners = {kIkRrt};
  o.runs = 2;
  const BenchResult ik = run_benchmark({a.manifests[1]}, o);
  CHECK(ik.records.empty());
  const auto rows = summarize(ik.records, ik.meta);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].success_rate == 0.0);
  CHECK(rows[0].note == "no IK solutions");
}

TEST_CASE("IK-RRT runs once per target and trial") {
  Annotated& a = annotated();
  const IkSolutionSet ik = load_ik_set(a.dir.path / "scenario_021_ik.json");
  REQUIRE_FALSE(ik.solutions.empty());
  BenchOptions o;
  o.planners = {kIkRrt};
  o.runs = 2;
  o.params.max_time = 5;
  const BenchResult r = run_benchmark({a.manifests[0]}, o);
  CHECK(r.records.size() == 2 * ik.solutions.size());
  const auto rows = summarize(r.records, r.meta);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ik_count == ik.solutions.size());
  CHECK(*rows[0].reachable_targets <= ik.solutions.size());
}

TEST_CASE("missing annotations become error records and the run continues") {
  Annotated& a = annotated();
  test::TempDir other("bench_missing");
  const Scenario s = load_scenario(a.manifests[0]);
  Scenario bare = s;
  bare.id = "031";
  save_scenario(bare, other.path / "scenario_031.json");
  BenchOptions o;
  o.planners = {kJPlusRrt};
  o.runs = 1;
  o.params.max_time = 5;
  const BenchResult r = run_benchmark({other.path / "scenario_031.json", a.manifests[0]}, o);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].scenario == "031");
  CHECK(r.records.size() == 1);

  o.runs = 0;
  CHECK_THROWS_AS(run_benchmark({a.manifests[0]}, o), Error);
  o.runs = 1;
  o.planners = {"rrt-star"};
  CHECK_THROWS_AS(run_benchmark({a.manifests[0]}, o), Error);
}

TEST_CASE("bench outputs are recomputable from the records file") {
  Annotated& a = annotated();
  BenchOptions o;
  o.runs = 3;
  o.params.max_time = 5;
  const BenchResult r = run_benchmark(a.manifests, o);
  test::TempDir out("bench_out");
  write_bench_outputs(r, o, out.path);
  for (const char* f : {"records.csv", "summary.json", "summary.txt"}) {
    CHECK(std::filesystem::exists(out.path / f));
  }
  CHECK(std::filesystem::is_directory(out.path / "curves"));
  const auto back = load_records_csv(out.path / "records.csv");
  CHECK(back == r.records);
  CHECK(summarize(back, r.meta) == summarize(r.records, r.meta));
}
