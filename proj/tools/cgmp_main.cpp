// cgmp command-line front end. Talks to the library through the C API only.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgmp/cgmp.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// A library call failed; carries the exit code.
struct Failure : std::runtime_error {
  int code;
  Failure(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

void check(cgmp_status s, const std::string& what) {
  if (s == CGMP_OK) return;
  const int code = s == CGMP_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
  throw Failure(code, what + ": " + cgmp_status_name(s) + ": " + cgmp_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ScenarioPtr = std::unique_ptr<cgmp_scenario, Deleter<cgmp_scenario, cgmp_scenario_free>>;
using GraspsPtr = std::unique_ptr<cgmp_grasp_set, Deleter<cgmp_grasp_set, cgmp_grasps_free>>;
using IkPtr = std::unique_ptr<cgmp_ik_set, Deleter<cgmp_ik_set, cgmp_ik_free>>;
using PlanPtr = std::unique_ptr<cgmp_plan, Deleter<cgmp_plan, cgmp_plan_free>>;

ScenarioPtr load_scenario(const std::string& path) {
  cgmp_scenario* s = nullptr;
  check(cgmp_scenario_load(path.c_str(), &s), "loading " + path);
  return ScenarioPtr(s);
}

std::string grasps_path_of(const cgmp_scenario* s) {
  char buf[4096];
  check(cgmp_scenario_grasps_path(s, buf, sizeof buf), "scenario grasp file");
  return buf;
}

std::string ik_path_of(const cgmp_scenario* s) {
  char buf[4096];
  check(cgmp_scenario_ik_path(s, buf, sizeof buf), "scenario IK file");
  return buf;
}

GraspsPtr load_grasps(const std::string& path) {
  cgmp_grasp_set* g = nullptr;
  check(cgmp_grasps_load(path.c_str(), &g), "loading " + path);
  return GraspsPtr(g);
}

IkPtr load_ik(const std::string& path) {
  cgmp_ik_set* k = nullptr;
  check(cgmp_ik_load(path.c_str(), &k), "loading " + path);
  return IkPtr(k);
}

// Output directory: --out when given, else a fresh time-stamped directory
// under $CGMP_OUTPUT_ROOT (default ./cgmp_runs).
fs::path make_run_dir(const std::string& command, const std::string& out) {
  if (!out.empty()) {
    fs::create_directories(out);
    return out;
  }
  const char* env = std::getenv("CGMP_OUTPUT_ROOT");
  const fs::path root = env && *env ? env : "cgmp_runs";
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", std::localtime(&now));
  fs::path dir = root / (command + "-" + stamp);
  for (int n = 2; fs::exists(dir); ++n) dir = root / (command + "-" + stamp + "-" + std::to_string(n));
  fs::create_directories(dir);
  return dir;
}

// Every option of the subcommand with its effective value. No timestamps, so
// identical invocations produce identical manifests.
void write_manifest(const fs::path& dir, const CLI::App* sub, const json& outputs) {
  json options = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name();
    if (name.empty() || name == "--help") continue;
    if (opt->get_type_size() == 0) {
      options[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto& r = opt->results();
      options[name] = r.size() == 1 ? json(r[0]) : json(r);
    } else {
      options[name] = opt->get_default_str();
    }
  }
  const json doc = {{"tool", "cgmp"},
                    {"version", cgmp_version()},
                    {"command", sub->get_name()},
                    {"options", options},
                    {"outputs", outputs}};
  std::ofstream out(dir / "manifest.json");
  out << doc.dump(2) << '\n';
}

struct PlannerFlags {
  cgmp_planner_params p{};
  bool score_bias = false;

  PlannerFlags() { cgmp_planner_params_init(&p); }

  void add(CLI::App* sub) {
    sub->add_option("--epsilon", p.epsilon, "Max per-joint step (m or rad)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--p-goal", p.p_goal, "Goal-sampling probability")
        ->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sub->add_option("--d-goal", p.d_goal, "Goal tolerance (1000*m + deg)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--max-time", p.max_time, "Planning time limit, s")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--max-iterations", p.max_iterations, "Iteration cap, 0 = none")
        ->capture_default_str();
    sub->add_option("--damping", p.damping, "Damping of the J+ extension")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->add_option("--edge-resolution", p.edge_resolution,
                    "Edge collision spacing, <= 0 means epsilon/2")
        ->capture_default_str();
    sub->add_option("--connect-threshold", p.connect_threshold,
                    "IK-RRT tree connection distance, <= 0 means epsilon")
        ->capture_default_str();
    sub->add_flag("--score-bias", score_bias, "Sample grasps proportionally to score");
  }

  cgmp_planner_params get() const {
    cgmp_planner_params out = p;
    out.score_bias = score_bias ? 1 : 0;
    return out;
  }

  json to_json() const {
    const auto q = get();
    return {{"epsilon", q.epsilon},
            {"p_goal", q.p_goal},
            {"d_goal", q.d_goal},
            {"max_time", q.max_time},
            {"max_iterations", q.max_iterations},
            {"score_bias", q.score_bias != 0},
            {"damping", q.damping},
            {"edge_resolution", q.edge_resolution},
            {"connect_threshold", q.connect_threshold}};
  }
};

struct SamplerFlags {
  cgmp_sampler_params p{};

  SamplerFlags() { cgmp_sampler_params_init(&p); }

  void add(CLI::App* sub) {
    sub->add_option("--friction", p.friction, "Friction coefficient mu")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--rays-per-point", p.rays_per_point)->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--approach-directions", p.approach_directions)
        ->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--max-opening", p.max_opening, "Gripper stroke, m")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--raw-budget", p.raw_budget, "Candidate poses before filtering")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--grasp-count", p.output_size, "Grasps kept after subsampling")
        ->check(CLI::PositiveNumber)->capture_default_str();
  }
};

struct IkFlags {
  cgmp_ik_params p{};

  IkFlags() { cgmp_ik_params_init(&p); }

  void add(CLI::App* sub) {
    sub->add_option("--ik-damping", p.damping)->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--ik-nullspace-gain", p.nullspace_gain)
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->add_option("--ik-iterations", p.max_iterations)->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--ik-threshold", p.threshold, "Accepted pose_distance residual")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--ik-attempts", p.attempts)->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
};

// Subcommands ----------------------------------------------------------------

void annotate(const std::string& manifest, const cgmp_sampler_params& sp, const cgmp_ik_params& ip,
              std::uint64_t seed, unsigned jobs) {
  auto s = load_scenario(manifest);
  cgmp_grasp_set* g = nullptr;
  check(cgmp_grasps_generate(s.get(), &sp, seed, jobs, &g),
        std::string("grasps for ") + cgmp_scenario_id(s.get()));
  GraspsPtr grasps(g);
  check(cgmp_grasps_save(grasps.get(), grasps_path_of(s.get()).c_str()), "saving grasps");
  cgmp_ik_set* k = nullptr;
  check(cgmp_ik_compute(s.get(), grasps.get(), &ip, jobs, &k), "IK batch");
  IkPtr ik(k);
  check(cgmp_ik_save(ik.get(), ik_path_of(s.get()).c_str()), "saving IK set");
  std::printf("%s: %zu grasps%s, %zu IK solutions, IK batch %.3f s\n", cgmp_scenario_id(s.get()),
              cgmp_grasps_count(grasps.get()),
              cgmp_grasps_truncated(grasps.get()) ? " (truncated)" : "", cgmp_ik_count(ik.get()),
              cgmp_ik_time(ik.get()));
}

std::vector<std::string> scenario_manifests(const fs::path& dir) {
  static const std::regex name(R"(scenario_\d{3}\.json)");
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (std::regex_match(e.path().filename().string(), name)) out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct GenScenarios {
  std::vector<std::string> families{"shelf", "under-table", "narrow-gap", "narrow-opening"};
  std::vector<double> schedule;
  std::string object, robot = CGMP_DATA_DIR "/robot.json", out;
  std::uint64_t seed = 0;
  bool no_annotations = false;
  unsigned jobs = 1;
  SamplerFlags sampler;
  IkFlags ik;

  void add(CLI::App& app, CLI::App*& sub) {
    sub = app.add_subcommand("gen-scenarios", "Generate scenario families (and annotate them)");
    sub->add_option("--family", families, "shelf, under-table, narrow-gap, narrow-opening or 1-4")
        ->capture_default_str();
    sub->add_option("--schedule", schedule,
                    "Five setbacks (increasing) or widths (decreasing), m; one family only")
        ->expected(5);
    sub->add_option("--object", object, "OBJ replacing the built-in target object")
        ->check(CLI::ExistingFile);
    sub->add_option("--robot", robot, "Robot description JSON")->capture_default_str();
    sub->add_option("--out", out, "Output directory (default: run-stamped)");
    sub->add_option("--seed", seed)->capture_default_str();
    sub->add_flag("--no-annotations", no_annotations, "Skip grasp and IK annotation");
    sub->add_option("--jobs", jobs)->check(CLI::PositiveNumber)->capture_default_str();
    sampler.add(sub);
    ik.add(sub);
  }

  int run(const CLI::App* sub) {
    if (!schedule.empty() && families.size() != 1) {
      throw CLI::ValidationError("--schedule", "needs exactly one --family");
    }
    const fs::path dir = make_run_dir("gen-scenarios", out);
    for (const auto& f : families) {
      check(cgmp_generate_family(f.c_str(), dir.string().c_str(),
                                 schedule.empty() ? nullptr : schedule.data(),
                                 object.empty() ? nullptr : object.c_str(), robot.c_str(), seed),
            "family " + f);
    }
    const auto manifests = scenario_manifests(dir);
    int status = kExitOk;
    if (!no_annotations) {
      for (const auto& m : manifests) {
        // Each scenario gets its own grasp seed.
        const std::uint64_t id = std::stoull(fs::path(m).stem().string().substr(9));
        try {
          annotate(m, sampler.p, ik.p, seed * 1000 + id, jobs);
        } catch (const Failure& e) {
          std::fprintf(stderr, "error: %s\n", e.what());
          status = kExitFailure;
        }
      }
    }
    json outputs = json::array();
    for (const auto& m : manifests) outputs.push_back(fs::path(m).filename().string());
    write_manifest(dir, sub, outputs);
    std::printf("%zu scenarios in %s\n", manifests.size(), dir.string().c_str());
    return status;
  }
};

struct SampleGrasps {
  std::string scenario, output;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  SamplerFlags sampler;

  void add(CLI::App& app, CLI::App*& sub) {
    sub = app.add_subcommand("sample-grasps", "Annotate a scenario with a grasp set");
    sub->add_option("scenario", scenario, "Scenario manifest")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", output, "Grasp file (default: the one named by the manifest)");
    sub->add_option("--seed", seed)->capture_default_str();
    sub->add_option("--jobs", jobs)->check(CLI::PositiveNumber)->capture_default_str();
    sampler.add(sub);
  }

  int run(const CLI::App*) {
    auto s = load_scenario(scenario);
    cgmp_grasp_set* g = nullptr;
    check(cgmp_grasps_generate(s.get(), &sampler.p, seed, jobs, &g), "sampling grasps");
    GraspsPtr grasps(g);
    const std::string path = output.empty() ? grasps_path_of(s.get()) : output;
    check(cgmp_grasps_save(grasps.get(), path.c_str()), "saving " + path);
    std::printf("%zu grasps%s -> %s\n", cgmp_grasps_count(grasps.get()),
                cgmp_grasps_truncated(grasps.get()) ? " (fewer than requested survived)" : "",
                path.c_str());
    return kExitOk;
  }
};

struct ComputeIk {
  std::string scenario, grasps, output;
  unsigned jobs = 1;
  IkFlags ik;

  void add(CLI::App& app, CLI::App*& sub) {
    sub = app.add_subcommand("compute-ik", "Solve IK for every grasp of a scenario");
    sub->add_option("scenario", scenario, "Scenario manifest")->required()->check(CLI::ExistingFile);
    sub->add_option("--grasps", grasps, "Grasp file (default: from the manifest)");
    sub->add_option("--output", output, "IK file (default: the one named by the manifest)");
    sub->add_option("--jobs", jobs)->check(CLI::PositiveNumber)->capture_default_str();
    ik.add(sub);
  }

  int run(const CLI::App*) {
    auto s = load_scenario(scenario);
    auto g = load_grasps(grasps.empty() ? grasps_path_of(s.get()) : grasps);
    cgmp_ik_set* k = nullptr;
    check(cgmp_ik_compute(s.get(), g.get(), &ik.p, jobs, &k), "IK batch");
    IkPtr set(k);
    const std::string path = output.empty() ? ik_path_of(s.get()) : output;
    check(cgmp_ik_save(set.get(), path.c_str()), "saving " + path);
    std::printf("IK batch: %zu of %zu grasps solved in %.3f s -> %s\n", cgmp_ik_count(set.get()),
                cgmp_grasps_count(g.get()), cgmp_ik_time(set.get()), path.c_str());
    return kExitOk;
  }
};

struct Plan {
  std::string scenario, planner = "jplus-rrt", grasps, ik, out;
  std::size_t target = 0;
  PlannerFlags flags;

  void add(CLI::App& app, CLI::App*& sub) {
    sub = app.add_subcommand("plan", "One planning run; writes path.json and stats.json");
    sub->add_option("scenario", scenario, "Scenario manifest")->required()->check(CLI::ExistingFile);
    sub->add_option("--planner", planner)
        ->check(CLI::IsMember({"jplus-rrt", "ik-rrt"}))->capture_default_str();
    sub->add_option("--target", target, "IK-RRT: index into the IK set")->capture_default_str();
    sub->add_option("--grasps", grasps, "Grasp file (default: from the manifest)");
    sub->add_option("--ik", ik, "IK file (default: from the manifest)");
    sub->add_option("--out", out, "Output directory (default: run-stamped)");
    sub->add_option("--seed", flags.p.seed)->capture_default_str();
    flags.add(sub);
  }

  int run(const CLI::App* sub) {
    auto s = load_scenario(scenario);
    auto g = load_grasps(grasps.empty() ? grasps_path_of(s.get()) : grasps);
    const cgmp_planner_params params = flags.get();
    cgmp_plan* r = nullptr;
    if (planner == "ik-rrt") {
      auto k = load_ik(ik.empty() ? ik_path_of(s.get()) : ik);
      if (cgmp_ik_count(k.get()) == 0) throw Failure(kExitFailure, "no IK solutions: IK-RRT has no target");
      if (target >= cgmp_ik_count(k.get())) {
        throw Failure(kExitUsage, "--target " + std::to_string(target) + " out of range (" +
                                      std::to_string(cgmp_ik_count(k.get())) + " IK solutions)");
      }
      check(cgmp_plan_ik_rrt(s.get(), g.get(), k.get(), target, &params, &r), "planning");
    } else {
      check(cgmp_plan_jplus_rrt(s.get(), g.get(), &params, &r), "planning");
    }
    PlanPtr plan(r);
    const fs::path dir = make_run_dir("plan", out);
    check(cgmp_plan_save(plan.get(), cgmp_scenario_id(s.get()), planner.c_str(),
                         (dir / "path.json").string().c_str()),
          "saving path");
    double length = 0.0;
    double prev[CGMP_DOF], cur[CGMP_DOF];
    for (std::size_t i = 0; i < cgmp_plan_length(plan.get()); ++i) {
      check(cgmp_plan_config(plan.get(), i, cur), "reading path");
      if (i > 0) {
        double ss = 0.0;
        for (int j = 0; j < CGMP_DOF; ++j) ss += (cur[j] - prev[j]) * (cur[j] - prev[j]);
        length += std::sqrt(ss);
      }
      std::copy(cur, cur + CGMP_DOF, prev);
    }
    const long long reached = cgmp_plan_reached_grasp(plan.get());
    const json stats = {{"scenario", cgmp_scenario_id(s.get())},
                        {"planner", planner},
                        {"seed", params.seed},
                        {"success", cgmp_plan_success(plan.get()) != 0},
                        {"time_s", cgmp_plan_time(plan.get())},
                        {"iterations", cgmp_plan_iterations(plan.get())},
                        {"final_distance", cgmp_plan_final_distance(plan.get())},
                        {"tree_nodes", cgmp_plan_tree_nodes(plan.get())},
                        {"reached_grasp", reached < 0 ? json(nullptr) : json(reached)},
                        {"waypoints", cgmp_plan_length(plan.get())},
                        {"path_len", length},
                        {"params", flags.to_json()}};
    std::ofstream(dir / "stats.json") << stats.dump(2) << '\n';
    write_manifest(dir, sub, {"path.json", "stats.json"});
    std::printf("%s %s: success=%d time=%.3f s iterations=%llu final_distance=%.3f nodes=%zu -> %s\n",
                cgmp_scenario_id(s.get()), planner.c_str(), cgmp_plan_success(plan.get()),
                cgmp_plan_time(plan.get()),
                static_cast<unsigned long long>(cgmp_plan_iterations(plan.get())),
                cgmp_plan_final_distance(plan.get()), cgmp_plan_tree_nodes(plan.get()),
                dir.string().c_str());
    return kExitOk;
  }
};

struct Bench {
  std::vector<std::string> scenarios;
  std::string planner = "both", out;
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool progress = false;
  PlannerFlags flags;

  void add(CLI::App& app, CLI::App*& sub) {
    sub = app.add_subcommand("bench", "Repeated-trial benchmark over annotated scenarios");
    sub->add_option("scenarios", scenarios, "Scenario manifests")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--planner", planner)
        ->check(CLI::IsMember({"both", "jplus-rrt", "ik-rrt"}))->capture_default_str();
    sub->add_option("--runs", runs, "Trials per scenario (per IK target for IK-RRT)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--seed", seed, "Base seed of the trial seed schedule")->capture_default_str();
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--out", out, "Output directory (default: run-stamped)");
    sub->add_flag("--progress", progress, "Echo each record to stderr");
    flags.add(sub);
  }

  int run(const CLI::App* sub) {
    cgmp_bench_options o;
    cgmp_bench_options_init(&o);
    std::vector<const char*> paths;
    for (const auto& s : scenarios) paths.push_back(s.c_str());
    o.scenarios = paths.data();
    o.scenario_count = paths.size();
    o.run_jplus_rrt = planner != "ik-rrt";
    o.run_ik_rrt = planner != "jplus-rrt";
    o.runs = runs;
    o.base_seed = seed;
    o.jobs = jobs;
    o.params = flags.get();
    if (progress) {
      o.progress = [](const char* line, void*) { std::fprintf(stderr, "%s\n", line); };
    }
    const fs::path dir = make_run_dir("bench", out);
    cgmp_bench_report report{};
    check(cgmp_bench_run(&o, dir.string().c_str(), &report), "benchmark");
    if (report.errors > 0) std::fprintf(stderr, "%s\n", cgmp_last_error());
    write_manifest(dir, sub, {"records.csv", "summary.json", "summary.txt", "curves/"});
    std::ifstream table(dir / "summary.txt");
    std::cout << table.rdbuf();
    std::printf("%zu records, %zu errors -> %s\n", report.records, report.errors,
                dir.string().c_str());
    return report.errors > 0 ? kExitFailure : kExitOk;
  }
};

struct Validate {
  std::string file, scenario, kind;
  double epsilon = 0.0, d_goal = 0.0;

  void add(CLI::App& app, CLI::App*& sub) {
    sub = app.add_subcommand("validate", "Re-check a scenario, path, grasp or IK file");
    sub->add_option("file", file)->required()->check(CLI::ExistingFile);
    sub->add_option("--scenario", scenario, "Manifest the file belongs to")
        ->check(CLI::ExistingFile);
    sub->add_option("--kind", kind, "Default: inferred from the file")
        ->check(CLI::IsMember({"scenario", "path", "grasps", "ik"}));
    sub->add_option("--epsilon", epsilon, "Step bound (default: from the path file)");
    sub->add_option("--d-goal", d_goal, "Goal tolerance (default: from the path file)");
  }

  int run(const CLI::App*) {
    std::size_t problems = 0;
    const cgmp_status s =
        cgmp_validate_file(kind.empty() ? nullptr : kind.c_str(), file.c_str(),
                           scenario.empty() ? nullptr : scenario.c_str(), epsilon, d_goal, &problems);
    if (s == CGMP_VALIDATION) {
      std::printf("%s: %zu problem(s)\n%s\n", file.c_str(), problems, cgmp_last_error());
      return kExitFailure;
    }
    check(s, "validating " + file);
    std::printf("%s: valid\n", file.c_str());
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grasp annotation and grasp-directed motion planning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cgmp_version()));

  GenScenarios gen;
  SampleGrasps sample;
  ComputeIk ik;
  Plan plan;
  Bench bench;
  Validate validate;
  CLI::App *gen_cmd, *sample_cmd, *ik_cmd, *plan_cmd, *bench_cmd, *validate_cmd;
  gen.add(app, gen_cmd);
  sample.add(app, sample_cmd);
  ik.add(app, ik_cmd);
  plan.add(app, plan_cmd);
  bench.add(app, bench_cmd);
  validate.add(app, validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return gen.run(gen_cmd);
    if (*sample_cmd) return sample.run(sample_cmd);
    if (*ik_cmd) return ik.run(ik_cmd);
    if (*plan_cmd) return plan.run(plan_cmd);
    if (*bench_cmd) return bench.run(bench_cmd);
    if (*validate_cmd) return validate.run(validate_cmd);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const Failure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
