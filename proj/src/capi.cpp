#include "cgmp/cgmp.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <sstream>
#include <string>

#include "cgmp/bench.hpp"
#include "cgmp/error.hpp"
#include "cgmp/grasping.hpp"
#include "cgmp/ik.hpp"
#include "cgmp/planners.hpp"
#include "cgmp/scenario.hpp"
#include "cgmp/validation.hpp"
#include "json_util.hpp"

struct cgmp_scenario {
  cgmp::Scenario scenario;
  cgmp::AssembledScenario assembled;
};

struct cgmp_grasp_set {
  cgmp::GraspSet set;
};

struct cgmp_ik_set {
  cgmp::IkSolutionSet set;
};

struct cgmp_plan {
  cgmp::PlanResult result;
  cgmp::PlannerParams params;
};

namespace {

thread_local std::string g_last_error;

cgmp_status status_of(cgmp::ErrorKind kind) {
  using cgmp::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return CGMP_INVALID_ARGUMENT;
    case ErrorKind::kIo: return CGMP_IO;
    case ErrorKind::kFormat: return CGMP_FORMAT;
    case ErrorKind::kStartInCollision: return CGMP_START_IN_COLLISION;
    case ErrorKind::kTargetInCollision: return CGMP_TARGET_IN_COLLISION;
    case ErrorKind::kNoGrasps: return CGMP_NO_GRASPS;
    case ErrorKind::kValidation: return CGMP_VALIDATION;
  }
  return CGMP_INTERNAL;
}

cgmp_status fail(cgmp_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

template <typename F>
cgmp_status guarded(F&& f) {
  try {
    return f();
  } catch (const cgmp::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(CGMP_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CGMP_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CGMP_INTERNAL, e.what());
  } catch (...) {
    return fail(CGMP_INTERNAL, "unknown exception");
  }
}

#define CGMP_REQUIRE(cond, what) \
  if (!(cond)) return fail(CGMP_INVALID_ARGUMENT, what)

cgmp::PlannerParams to_cpp(const cgmp_planner_params& p) {
  cgmp::PlannerParams out;
  out.epsilon = p.epsilon;
  out.p_goal = p.p_goal;
  out.d_goal = p.d_goal;
  out.max_time = p.max_time;
  out.seed = p.seed;
  out.score_bias = p.score_bias != 0;
  out.connect_threshold = p.connect_threshold;
  out.edge_resolution = p.edge_resolution;
  out.damping = p.damping;
  out.max_iterations = p.max_iterations;
  return out;
}

cgmp::SamplerParams to_cpp(const cgmp_sampler_params& p) {
  cgmp::SamplerParams out;
  out.friction = p.friction;
  out.rays_per_point = p.rays_per_point;
  out.approach_directions = p.approach_directions;
  out.max_opening = p.max_opening;
  out.raw_budget = p.raw_budget;
  out.output_size = p.output_size;
  return out;
}

cgmp::IkParams to_cpp(const cgmp_ik_params& p) {
  cgmp::IkParams out;
  out.damping = p.damping;
  out.nullspace_gain = p.nullspace_gain;
  out.max_iterations = p.max_iterations;
  out.threshold = p.threshold;
  out.step_clamp = p.step_clamp;
  out.attempts = p.attempts;
  return out;
}

cgmp::Configuration config_of(const double q[CGMP_DOF]) {
  cgmp::Configuration c;
  for (int i = 0; i < CGMP_DOF; ++i) c[i] = q[i];
  return c;
}

void copy_config(const cgmp::Configuration& c, double q[CGMP_DOF]) {
  for (int i = 0; i < CGMP_DOF; ++i) q[i] = c[i];
}

cgmp_status copy_string(const std::string& s, char* buf, size_t size) {
  CGMP_REQUIRE(buf, "null buffer");
  if (s.size() + 1 > size) return fail(CGMP_INVALID_ARGUMENT, "buffer too small for " + s);
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return CGMP_OK;
}

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

std::string infer_kind(const std::filesystem::path& file) {
  const auto doc = cgmp::detail::read_json(file);
  if (doc.contains("path")) return "path";
  if (doc.contains("solutions")) return "ik";
  if (doc.contains("grasps") && doc["grasps"].is_array()) return "grasps";
  if (doc.contains("obstacles")) return "scenario";
  throw cgmp::Error(cgmp::ErrorKind::kFormat, file.string() + ": cannot tell what kind of file");
}

}  // namespace

extern "C" {

const char* cgmp_version(void) { return "0.1.0"; }

const char* cgmp_status_name(cgmp_status status) {
  switch (status) {
    case CGMP_OK: return "ok";
    case CGMP_INVALID_ARGUMENT: return "invalid argument";
    case CGMP_IO: return "i/o error";
    case CGMP_FORMAT: return "format error";
    case CGMP_START_IN_COLLISION: return "start configuration in collision";
    case CGMP_TARGET_IN_COLLISION: return "target configuration in collision";
    case CGMP_NO_GRASPS: return "no grasps";
    case CGMP_VALIDATION: return "validation failed";
    case CGMP_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cgmp_last_error(void) { return g_last_error.c_str(); }

void cgmp_planner_params_init(cgmp_planner_params* p) {
  if (!p) return;
  const cgmp::PlannerParams d;
  *p = {d.epsilon,           d.p_goal,          d.d_goal,  d.max_time,      d.seed,
        d.score_bias ? 1 : 0, d.connect_threshold, d.edge_resolution, d.damping, d.max_iterations};
}

void cgmp_sampler_params_init(cgmp_sampler_params* p) {
  if (!p) return;
  const cgmp::SamplerParams d;
  *p = {d.friction, d.rays_per_point, d.approach_directions, d.max_opening, d.raw_budget,
        d.output_size};
}

void cgmp_ik_params_init(cgmp_ik_params* p) {
  if (!p) return;
  const cgmp::IkParams d;
  *p = {d.damping, d.nullspace_gain, d.max_iterations, d.threshold, d.step_clamp, d.attempts};
}

// Scenarios

cgmp_status cgmp_scenario_load(const char* manifest, cgmp_scenario** out) {
  CGMP_REQUIRE(manifest && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<cgmp_scenario>();
    h->scenario = cgmp::load_scenario(manifest);
    h->assembled = cgmp::assemble(h->scenario);
    *out = h.release();
    return CGMP_OK;
  });
}

void cgmp_scenario_free(cgmp_scenario* s) { delete s; }

const char* cgmp_scenario_id(const cgmp_scenario* s) { return s ? s->scenario.id.c_str() : ""; }

cgmp_status cgmp_scenario_grasps_path(const cgmp_scenario* s, char* buf, size_t size) {
  CGMP_REQUIRE(s, "null scenario");
  if (s->scenario.grasps_file.empty()) return fail(CGMP_IO, "scenario has no grasp file");
  return copy_string(cgmp::resolve(s->scenario, s->scenario.grasps_file).string(), buf, size);
}

cgmp_status cgmp_scenario_ik_path(const cgmp_scenario* s, char* buf, size_t size) {
  CGMP_REQUIRE(s, "null scenario");
  if (s->scenario.ik_file.empty()) return fail(CGMP_IO, "scenario has no IK file");
  return copy_string(cgmp::resolve(s->scenario, s->scenario.ik_file).string(), buf, size);
}

cgmp_status cgmp_scenario_start(const cgmp_scenario* s, double q[CGMP_DOF]) {
  CGMP_REQUIRE(s && q, "null argument");
  copy_config(s->assembled.q_start, q);
  return CGMP_OK;
}

cgmp_status cgmp_scenario_config_free(const cgmp_scenario* s, const double q[CGMP_DOF],
                                      int* is_free) {
  CGMP_REQUIRE(s && q && is_free, "null argument");
  return guarded([&] {
    const auto c = config_of(q);
    const auto& a = s->assembled;
    *is_free = cgmp::within_limits(a.chain, c) && !cgmp::config_in_collision(a.scene, a.chain, c);
    return CGMP_OK;
  });
}

cgmp_status cgmp_scenario_check(const cgmp_scenario* s, size_t* problems) {
  CGMP_REQUIRE(s, "null scenario");
  return guarded([&] {
    const auto report = cgmp::validate_scenario(s->scenario);
    if (problems) *problems = report.problems.size();
    if (report.ok()) return CGMP_OK;
    return fail(CGMP_VALIDATION, join(report.problems));
  });
}

cgmp_status cgmp_generate_family(const char* family, const char* out_dir, const double* schedule,
                                 const char* object_obj, const char* robot_json, uint64_t seed) {
  CGMP_REQUIRE(family && out_dir && robot_json, "null argument");
  return guarded([&] {
    cgmp::FamilySpec spec = cgmp::default_family_spec(cgmp::family_from_name(family));
    if (schedule) {
      for (int i = 0; i < 5; ++i) spec.schedule[i] = schedule[i];
    }
    cgmp::validate_schedule(spec);
    const auto robot = cgmp::load_chain(robot_json);
    std::optional<cgmp::TriangleMesh> object;
    if (object_obj) object = cgmp::load_obj(object_obj);
    const auto scenarios =
        cgmp::generate_family(spec, robot, cgmp::make_gripper_mesh(), object, seed);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    for (const auto& s : scenarios) cgmp::save_scenario(s, dir / ("scenario_" + s.id + ".json"));
    return CGMP_OK;
  });
}

// Grasp sets

cgmp_status cgmp_grasps_generate(const cgmp_scenario* s, const cgmp_sampler_params* p,
                                 uint64_t seed, unsigned jobs, cgmp_grasp_set** out) {
  CGMP_REQUIRE(s && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    cgmp::SamplerParams params;
    if (p) params = to_cpp(*p);
    const auto& a = s->assembled;
    const cgmp::GraspScene scene{a.object, a.scene, a.gripper, s->scenario.target.name,
                                 s->scenario.id};
    auto h = std::make_unique<cgmp_grasp_set>();
    h->set = cgmp::generate_grasp_set(scene, params, seed, jobs);
    *out = h.release();
    return CGMP_OK;
  });
}

cgmp_status cgmp_grasps_load(const char* path, cgmp_grasp_set** out) {
  CGMP_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<cgmp_grasp_set>();
    h->set = cgmp::load_grasp_set(path);
    *out = h.release();
    return CGMP_OK;
  });
}

cgmp_status cgmp_grasps_save(const cgmp_grasp_set* g, const char* path) {
  CGMP_REQUIRE(g && path, "null argument");
  return guarded([&] {
    cgmp::save_grasp_set(g->set, path);
    return CGMP_OK;
  });
}

size_t cgmp_grasps_count(const cgmp_grasp_set* g) { return g ? g->set.grasps.size() : 0; }

int cgmp_grasps_truncated(const cgmp_grasp_set* g) { return g && g->set.truncated ? 1 : 0; }

cgmp_status cgmp_grasps_get(const cgmp_grasp_set* g, size_t i, cgmp_grasp* out) {
  CGMP_REQUIRE(g && out, "null argument");
  CGMP_REQUIRE(i < g->set.grasps.size(), "grasp index out of range");
  const auto& gr = g->set.grasps[i];
  const auto t = gr.pose.translation();
  const auto q = gr.pose.rotation();
  *out = {{t.x(), t.y(), t.z()}, {q.w(), q.x(), q.y(), q.z()}, gr.score};
  return CGMP_OK;
}

void cgmp_grasps_free(cgmp_grasp_set* g) { delete g; }

// IK sets

cgmp_status cgmp_ik_compute(const cgmp_scenario* s, const cgmp_grasp_set* g,
                            const cgmp_ik_params* p, unsigned jobs, cgmp_ik_set** out) {
  CGMP_REQUIRE(s && g && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    cgmp::IkParams params;
    if (p) params = to_cpp(*p);
    const auto& a = s->assembled;
    auto h = std::make_unique<cgmp_ik_set>();
    h->set = cgmp::compute_ik_set(a.chain, a.scene, g->set, a.q_start, params, jobs);
    h->set.scenario_id = s->scenario.id;
    *out = h.release();
    return CGMP_OK;
  });
}

cgmp_status cgmp_ik_load(const char* path, cgmp_ik_set** out) {
  CGMP_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<cgmp_ik_set>();
    h->set = cgmp::load_ik_set(path);
    *out = h.release();
    return CGMP_OK;
  });
}

cgmp_status cgmp_ik_save(const cgmp_ik_set* k, const char* path) {
  CGMP_REQUIRE(k && path, "null argument");
  return guarded([&] {
    cgmp::save_ik_set(k->set, path);
    return CGMP_OK;
  });
}

size_t cgmp_ik_count(const cgmp_ik_set* k) { return k ? k->set.solutions.size() : 0; }

double cgmp_ik_time(const cgmp_ik_set* k) { return k ? k->set.compute_time_s : 0.0; }

cgmp_status cgmp_ik_get(const cgmp_ik_set* k, size_t i, double q[CGMP_DOF], size_t* grasp_index,
                        double* score) {
  CGMP_REQUIRE(k, "null IK set");
  CGMP_REQUIRE(i < k->set.solutions.size(), "IK solution index out of range");
  const auto& sol = k->set.solutions[i];
  if (q) copy_config(sol.q, q);
  if (grasp_index) *grasp_index = sol.grasp_index;
  if (score) *score = sol.score;
  return CGMP_OK;
}

void cgmp_ik_free(cgmp_ik_set* k) { delete k; }

// Planning

cgmp_status cgmp_plan_jplus_rrt(const cgmp_scenario* s, const cgmp_grasp_set* g,
                                const cgmp_planner_params* p, cgmp_plan** out) {
  CGMP_REQUIRE(s && g && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<cgmp_plan>();
    if (p) h->params = to_cpp(*p);
    const auto& a = s->assembled;
    h->result = cgmp::plan_jplus_rrt({a.chain, a.scene, a.q_start}, g->set, h->params);
    *out = h.release();
    return CGMP_OK;
  });
}

cgmp_status cgmp_plan_ik_rrt(const cgmp_scenario* s, const cgmp_grasp_set* g,
                             const cgmp_ik_set* k, size_t solution,
                             const cgmp_planner_params* p, cgmp_plan** out) {
  CGMP_REQUIRE(s && g && k && out, "null argument");
  *out = nullptr;
  CGMP_REQUIRE(solution < k->set.solutions.size(), "IK solution index out of range");
  const auto& sol = k->set.solutions[solution];
  CGMP_REQUIRE(sol.grasp_index < g->set.grasps.size(),
               "IK solution refers to a grasp outside the grasp set");
  return guarded([&] {
    auto h = std::make_unique<cgmp_plan>();
    if (p) h->params = to_cpp(*p);
    const auto& a = s->assembled;
    h->result = cgmp::plan_ik_rrt({a.chain, a.scene, a.q_start}, sol.q, h->params,
                                  g->set.grasps[sol.grasp_index].pose);
    if (h->result.success) h->result.reached_grasp = sol.grasp_index;
    *out = h.release();
    return CGMP_OK;
  });
}

int cgmp_plan_success(const cgmp_plan* r) { return r && r->result.success ? 1 : 0; }
double cgmp_plan_time(const cgmp_plan* r) { return r ? r->result.time_s : 0.0; }
uint64_t cgmp_plan_iterations(const cgmp_plan* r) { return r ? r->result.iterations : 0; }
double cgmp_plan_final_distance(const cgmp_plan* r) { return r ? r->result.final_distance : 0.0; }
size_t cgmp_plan_tree_nodes(const cgmp_plan* r) { return r ? r->result.tree_nodes : 0; }

long long cgmp_plan_reached_grasp(const cgmp_plan* r) {
  if (!r || !r->result.reached_grasp) return -1;
  return static_cast<long long>(*r->result.reached_grasp);
}

size_t cgmp_plan_length(const cgmp_plan* r) { return r ? r->result.path.size() : 0; }

cgmp_status cgmp_plan_config(const cgmp_plan* r, size_t i, double q[CGMP_DOF]) {
  CGMP_REQUIRE(r && q, "null argument");
  CGMP_REQUIRE(i < r->result.path.size(), "path index out of range");
  copy_config(r->result.path[i], q);
  return CGMP_OK;
}

cgmp_status cgmp_plan_save(const cgmp_plan* r, const char* scenario_id, const char* planner,
                           const char* path) {
  CGMP_REQUIRE(r && scenario_id && planner && path, "null argument");
  return guarded([&] {
    cgmp::save_path({scenario_id, planner, r->params, r->result}, path);
    return CGMP_OK;
  });
}

void cgmp_plan_free(cgmp_plan* r) { delete r; }

// Benchmark

void cgmp_bench_options_init(cgmp_bench_options* o) {
  if (!o) return;
  *o = {};
  o->run_jplus_rrt = 1;
  o->run_ik_rrt = 1;
  o->runs = 100;
  o->jobs = 1;
  cgmp_planner_params_init(&o->params);
}

cgmp_status cgmp_bench_run(const cgmp_bench_options* o, const char* out_dir,
                           cgmp_bench_report* report) {
  CGMP_REQUIRE(o && out_dir, "null argument");
  CGMP_REQUIRE(o->scenarios || o->scenario_count == 0, "null scenario list");
  return guarded([&] {
    cgmp::BenchOptions options;
    options.planners.clear();
    if (o->run_ik_rrt) options.planners.push_back(cgmp::kIkRrt);
    if (o->run_jplus_rrt) options.planners.push_back(cgmp::kJPlusRrt);
    if (options.planners.empty()) {
      return fail(CGMP_INVALID_ARGUMENT, "no planner selected");
    }
    options.runs = o->runs;
    options.params = to_cpp(o->params);
    options.base_seed = o->base_seed;
    options.jobs = o->jobs;
    if (o->progress) {
      options.on_record = [o](const cgmp::RunRecord& r) {
        std::ostringstream line;
        cgmp::write_records_csv({r}, line);
        std::string text = line.str();
        text = text.substr(text.find('\n') + 1);
        if (!text.empty() && text.back() == '\n') text.pop_back();
        o->progress(text.c_str(), o->user);
      };
    }
    std::vector<std::filesystem::path> paths;
    for (size_t i = 0; i < o->scenario_count; ++i) {
      CGMP_REQUIRE(o->scenarios[i], "null scenario path");
      paths.emplace_back(o->scenarios[i]);
    }
    const auto result = cgmp::run_benchmark(paths, options);
    cgmp::write_bench_outputs(result, options, out_dir);
    if (report) *report = {result.records.size(), result.errors.size()};
    if (!result.errors.empty()) {
      std::vector<std::string> lines;
      for (const auto& e : result.errors) {
        lines.push_back(e.scenario + " " + e.planner + ": " + e.message);
      }
      g_last_error = join(lines);
    }
    return CGMP_OK;
  });
}

// Validation

cgmp_status cgmp_validate_file(const char* kind, const char* file, const char* scenario,
                               double epsilon, double d_goal, size_t* problems) {
  CGMP_REQUIRE(file, "null file");
  if (problems) *problems = 0;
  return guarded([&] {
    const std::string k = kind ? kind : infer_kind(file);
    cgmp::ValidationReport report;
    if (k == "scenario") {
      report = cgmp::validate_scenario(cgmp::load_scenario(file));
    } else {
      if (k != "path" && k != "grasps" && k != "ik") {
        return fail(CGMP_INVALID_ARGUMENT, "unknown file kind '" + k + "'");
      }
      if (!scenario) return fail(CGMP_INVALID_ARGUMENT, k + " files need their scenario");
      const auto s = cgmp::load_scenario(scenario);
      const auto a = cgmp::assemble(s);
      auto grasps = [&] {
        if (s.grasps_file.empty()) {
          throw cgmp::Error(cgmp::ErrorKind::kIo, "scenario has no grasp file");
        }
        return cgmp::load_grasp_set(cgmp::resolve(s, s.grasps_file));
      };
      if (k == "path") {
        const auto pf = cgmp::load_path(file);
        cgmp::PathCheck check;
        check.epsilon = epsilon > 0.0 ? epsilon : pf.params.epsilon;
        check.d_goal = d_goal > 0.0 ? d_goal : pf.params.d_goal;
        check.resolution = pf.params.resolution();
        std::optional<cgmp::GraspSet> g;
        if (pf.result.reached_grasp) g = grasps();
        report = cgmp::validate_path(a, pf.result, check, g ? &g->grasps : nullptr);
      } else if (k == "grasps") {
        report = cgmp::validate_grasp_set(a, cgmp::load_grasp_set(file));
      } else {
        report = cgmp::validate_ik_set(a, cgmp::load_ik_set(file), grasps(),
                                       cgmp::IkParams{}.threshold);
      }
    }
    if (problems) *problems = report.problems.size();
    if (report.ok()) return CGMP_OK;
    return fail(CGMP_VALIDATION, join(report.problems));
  });
}

}  // extern "C"
