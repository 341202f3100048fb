/* C interface to the cgmp grasp-and-motion planning toolkit.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every call returns a cgmp_status; on failure cgmp_last_error() describes
 * the problem (thread-local, valid until the next failing call on the same
 * thread). */
#ifndef CGMP_CGMP_H
#define CGMP_CGMP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CGMP_API __declspec(dllexport)
#else
#define CGMP_API __attribute__((visibility("default")))
#endif

typedef enum cgmp_status {
  CGMP_OK = 0,
  CGMP_INVALID_ARGUMENT = 1,
  CGMP_IO = 2,
  CGMP_FORMAT = 3,
  CGMP_START_IN_COLLISION = 4,
  CGMP_TARGET_IN_COLLISION = 5,
  CGMP_NO_GRASPS = 6,
  CGMP_VALIDATION = 7,
  CGMP_INTERNAL = 99
} cgmp_status;

CGMP_API const char* cgmp_version(void);
CGMP_API const char* cgmp_status_name(cgmp_status status);
CGMP_API const char* cgmp_last_error(void);

#define CGMP_DOF 9

typedef struct cgmp_planner_params {
  double epsilon;
  double p_goal;
  double d_goal;
  double max_time;
  uint64_t seed;
  int score_bias;
  double connect_threshold; /* <= 0: epsilon */
  double edge_resolution;   /* <= 0: epsilon / 2 */
  double damping;
  uint64_t max_iterations;  /* 0: unlimited */
} cgmp_planner_params;

typedef struct cgmp_sampler_params {
  double friction;
  int rays_per_point;
  int approach_directions;
  double max_opening;
  size_t raw_budget;
  size_t output_size;
} cgmp_sampler_params;

typedef struct cgmp_ik_params {
  double damping;
  double nullspace_gain;
  int max_iterations;
  double threshold;
  double step_clamp;
  int attempts;
} cgmp_ik_params;

CGMP_API void cgmp_planner_params_init(cgmp_planner_params* p);
CGMP_API void cgmp_sampler_params_init(cgmp_sampler_params* p);
CGMP_API void cgmp_ik_params_init(cgmp_ik_params* p);

/* Scenarios ------------------------------------------------------------ */

typedef struct cgmp_scenario cgmp_scenario;

CGMP_API cgmp_status cgmp_scenario_load(const char* manifest, cgmp_scenario** out);
CGMP_API void cgmp_scenario_free(cgmp_scenario* s);
CGMP_API const char* cgmp_scenario_id(const cgmp_scenario* s);
/* Grasp / IK file named by the manifest, resolved against the manifest's
 * directory, copied NUL-terminated into buf. */
CGMP_API cgmp_status cgmp_scenario_grasps_path(const cgmp_scenario* s, char* buf, size_t size);
CGMP_API cgmp_status cgmp_scenario_ik_path(const cgmp_scenario* s, char* buf, size_t size);
CGMP_API cgmp_status cgmp_scenario_start(const cgmp_scenario* s, double q[CGMP_DOF]);
CGMP_API cgmp_status cgmp_scenario_config_free(const cgmp_scenario* s, const double q[CGMP_DOF],
                                               int* is_free);
/* Static checks (limits, start collision, resting contact). *problems
 * receives the number found; cgmp_last_error() lists them. */
CGMP_API cgmp_status cgmp_scenario_check(const cgmp_scenario* s, size_t* problems);

/* family: "shelf", "under-table", "narrow-gap", "narrow-opening" or 1-4.
 * schedule: 5 values or NULL for the defaults. object_obj: NULL for the
 * built-in object. Writes scenario_<id>.json manifests and assets into
 * out_dir. */
CGMP_API cgmp_status cgmp_generate_family(const char* family, const char* out_dir,
                                          const double* schedule, const char* object_obj,
                                          const char* robot_json, uint64_t seed);

/* Grasp sets ----------------------------------------------------------- */

typedef struct cgmp_grasp_set cgmp_grasp_set;

typedef struct cgmp_grasp {
  double position[3];
  double quaternion[4]; /* w, x, y, z */
  double score;
} cgmp_grasp;

CGMP_API cgmp_status cgmp_grasps_generate(const cgmp_scenario* s, const cgmp_sampler_params* p,
                                          uint64_t seed, unsigned jobs, cgmp_grasp_set** out);
CGMP_API cgmp_status cgmp_grasps_load(const char* path, cgmp_grasp_set** out);
CGMP_API cgmp_status cgmp_grasps_save(const cgmp_grasp_set* g, const char* path);
CGMP_API size_t cgmp_grasps_count(const cgmp_grasp_set* g);
CGMP_API int cgmp_grasps_truncated(const cgmp_grasp_set* g);
CGMP_API cgmp_status cgmp_grasps_get(const cgmp_grasp_set* g, size_t i, cgmp_grasp* out);
CGMP_API void cgmp_grasps_free(cgmp_grasp_set* g);

/* IK sets -------------------------------------------------------------- */

typedef struct cgmp_ik_set cgmp_ik_set;

CGMP_API cgmp_status cgmp_ik_compute(const cgmp_scenario* s, const cgmp_grasp_set* g,
                                     const cgmp_ik_params* p, unsigned jobs, cgmp_ik_set** out);
CGMP_API cgmp_status cgmp_ik_load(const char* path, cgmp_ik_set** out);
CGMP_API cgmp_status cgmp_ik_save(const cgmp_ik_set* k, const char* path);
CGMP_API size_t cgmp_ik_count(const cgmp_ik_set* k);
CGMP_API double cgmp_ik_time(const cgmp_ik_set* k);
CGMP_API cgmp_status cgmp_ik_get(const cgmp_ik_set* k, size_t i, double q[CGMP_DOF],
                                 size_t* grasp_index, double* score);
CGMP_API void cgmp_ik_free(cgmp_ik_set* k);

/* Planning ------------------------------------------------------------- */

typedef struct cgmp_plan cgmp_plan;

CGMP_API cgmp_status cgmp_plan_jplus_rrt(const cgmp_scenario* s, const cgmp_grasp_set* g,
                                         const cgmp_planner_params* p, cgmp_plan** out);
/* Plans to IK solution `solution` of k; g supplies the grasp pose used for
 * the final distance. */
CGMP_API cgmp_status cgmp_plan_ik_rrt(const cgmp_scenario* s, const cgmp_grasp_set* g,
                                      const cgmp_ik_set* k, size_t solution,
                                      const cgmp_planner_params* p, cgmp_plan** out);
CGMP_API int cgmp_plan_success(const cgmp_plan* r);
CGMP_API double cgmp_plan_time(const cgmp_plan* r);
CGMP_API uint64_t cgmp_plan_iterations(const cgmp_plan* r);
CGMP_API double cgmp_plan_final_distance(const cgmp_plan* r);
CGMP_API size_t cgmp_plan_tree_nodes(const cgmp_plan* r);
/* -1 when no grasp was reached. */
CGMP_API long long cgmp_plan_reached_grasp(const cgmp_plan* r);
CGMP_API size_t cgmp_plan_length(const cgmp_plan* r);
CGMP_API cgmp_status cgmp_plan_config(const cgmp_plan* r, size_t i, double q[CGMP_DOF]);
CGMP_API cgmp_status cgmp_plan_save(const cgmp_plan* r, const char* scenario_id,
                                    const char* planner, const char* path);
CGMP_API void cgmp_plan_free(cgmp_plan* r);

/* Benchmark ------------------------------------------------------------ */

typedef struct cgmp_bench_options {
  const char* const* scenarios; /* manifest paths */
  size_t scenario_count;
  int run_jplus_rrt;
  int run_ik_rrt;
  size_t runs;
  uint64_t base_seed;
  unsigned jobs;
  cgmp_planner_params params;
  /* Called after each record with a CSV line (no newline); may be NULL. */
  void (*progress)(const char* csv_line, void* user);
  void* user;
} cgmp_bench_options;

typedef struct cgmp_bench_report {
  size_t records;
  size_t errors;
} cgmp_bench_report;

CGMP_API void cgmp_bench_options_init(cgmp_bench_options* o);
/* Writes records.csv, summary.json, summary.txt and curves/ into out_dir. */
CGMP_API cgmp_status cgmp_bench_run(const cgmp_bench_options* o, const char* out_dir,
                                    cgmp_bench_report* report);

/* Validation ----------------------------------------------------------- */

/* kind: "scenario", "path", "grasps", "ik" or NULL to infer from the file.
 * scenario: manifest the file belongs to (required for path/grasps/ik).
 * epsilon / d_goal <= 0: taken from the path file.
 * Returns CGMP_OK when valid, CGMP_VALIDATION when problems were found
 * (listed in cgmp_last_error()), or another status when the check could not
 * run. */
CGMP_API cgmp_status cgmp_validate_file(const char* kind, const char* file, const char* scenario,
                                        double epsilon, double d_goal, size_t* problems);

#ifdef __cplusplus
}
#endif

#endif /* CGMP_CGMP_H */
