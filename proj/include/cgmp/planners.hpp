#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cgmp/collision.hpp"
#include "cgmp/grasping.hpp"
#include "cgmp/random.hpp"
#include "cgmp/robot.hpp"
#include "cgmp/tree.hpp"

namespace cgmp {

struct PlannerParams {
  double epsilon = 0.1;       // per-joint max displacement per step (m | rad)
  double p_goal = 0.01;
  double d_goal = 50.0;       // pose_distance units
  double max_time = 120.0;    // seconds, wall clock
  std::uint64_t seed = 0;
  bool score_bias = false;    // J+RRT: pick grasps proportionally to score
  double connect_threshold = 0.0;  // IK-RRT; <= 0 means epsilon
  double edge_resolution = 0.0;    // collision check spacing; <= 0 means epsilon / 2
  double damping = 0.1;            // lambda of the damped J+
  double stall_progress = 0.1;     // minimum pose_distance decrease per J+ step
  int stall_iterations = 200;
  std::uint64_t max_iterations = 0;  // 0 = unlimited; extra budget for reproducible runs

  void validate() const;
  double resolution() const { return edge_resolution > 0.0 ? edge_resolution : epsilon / 2.0; }
  double connect() const { return connect_threshold > 0.0 ? connect_threshold : epsilon; }
};

// Chain (with the scenario's base limits applied), scene and start.
struct PlanningProblem {
  const KinematicChain& chain;
  const CollisionScene& scene;
  Configuration q_start;
};

struct PlanResult {
  bool success = false;
  std::vector<Configuration> path;
  std::optional<std::size_t> reached_grasp;
  double time_s = 0.0;
  std::uint64_t iterations = 0;
  double final_distance = 0.0;
  std::size_t tree_nodes = 0;
};

// Trees of a run, for after-the-fact checking.
struct PlannerTrace {
  std::vector<Tree> trees;
};

enum class ExtendStatus { kAdvanced, kReached, kTrapped };

struct ExtendOutcome {
  ExtendStatus status = ExtendStatus::kTrapped;
  std::size_t index = 0;  // new node (or `from` when already at the target)
};

ExtendOutcome extend(Tree& tree, const PlanningProblem& problem, std::size_t from,
                     const Configuration& q_target, double epsilon, double resolution);

enum class JPlusStatus { kGoalReached, kStalled, kTrapped };

struct JPlusOutcome {
  JPlusStatus status = JPlusStatus::kTrapped;
  std::size_t index = 0;  // last node of the appended chain, or `from`
  std::size_t added = 0;
};

JPlusOutcome jplus_extend(Tree& tree, const PlanningProblem& problem, std::size_t from,
                          const Transform& target, const PlannerParams& params);

// Grasp selection for J+RRT goal iterations.
class GoalSampler {
 public:
  GoalSampler(const std::vector<Grasp>& grasps, bool score_bias);
  std::size_t operator()(Rng& rng);

 private:
  std::size_t count_;
  bool weighted_;
  std::discrete_distribution<std::size_t> dist_;
};

// Minimum pose_distance from `pose` to any grasp, stopping early on
// translation terms that already exceed `bound`.
struct GoalDistance {
  double distance;
  std::size_t grasp;
};
GoalDistance nearest_grasp(const Transform& pose, const std::vector<Grasp>& grasps,
                           double bound = std::numeric_limits<double>::infinity());

PlanResult plan_jplus_rrt(const PlanningProblem& problem, const GraspSet& grasps,
                          const PlannerParams& params, PlannerTrace* trace = nullptr);

// `target_pose`, when given, is the grasp the target configuration solves; the
// final distance is measured against it, else against FK of target_q.
PlanResult plan_ik_rrt(const PlanningProblem& problem, const Configuration& target_q,
                       const PlannerParams& params,
                       const std::optional<Transform>& target_pose = std::nullopt,
                       PlannerTrace* trace = nullptr);

// Start tree walk to `a`, then the goal tree walk from `b` back to its root.
// A zero-length joining edge is collapsed.
std::vector<Configuration> extract_path(const Tree& start_tree, std::size_t a,
                                        const Tree& goal_tree, std::size_t b);

struct PathFile {
  std::string scenario_id;
  std::string planner;
  PlannerParams params;
  PlanResult result;
};

void save_path(const PathFile& file, const std::filesystem::path& path);
PathFile load_path(const std::filesystem::path& path);

}  // namespace cgmp
