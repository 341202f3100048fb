#pragma once

#include <string>
#include <vector>

#include "cgmp/grasping.hpp"
#include "cgmp/ik.hpp"
#include "cgmp/planners.hpp"
#include "cgmp/scenario.hpp"

namespace cgmp {

// Checkers written against the invariants directly rather than reusing the
// planner's own edge and goal code paths.
struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
  void add(std::string p) { problems.push_back(std::move(p)); }
};

// Straight edge sampled at 2^k + 1 evenly spaced configurations, the smallest
// k with max|dq| / 2^k <= resolution, every sample tested for limits and
// collision.
bool check_edge(const AssembledScenario& a, const Configuration& qa, const Configuration& qb,
                double resolution);

struct PathCheck {
  double epsilon = 0.1;
  double resolution = 0.05;
  double d_goal = 50.0;
  double distance_tolerance = 1e-9;
};

// Start match, per-joint step <= epsilon, collision-free edges, and, when
// `grasps` is given and a grasp was reached, final gripper pose within d_goal
// of it with the reported final distance reproduced.
ValidationReport validate_path(const AssembledScenario& a, const PlanResult& result,
                               const PathCheck& check, const std::vector<Grasp>* grasps);

// Root has no parent, parents precede children, edges obey the step bound
// and are collision-free.
ValidationReport validate_tree(const AssembledScenario& a, const Tree& tree,
                               const PathCheck& check);

// Minimum over nodes and grasps, computed by exhaustive scan.
double tree_goal_distance(const Tree& tree, const std::vector<Grasp>& grasps);

ValidationReport validate_grasp_set(const AssembledScenario& a, const GraspSet& set);

ValidationReport validate_ik_set(const AssembledScenario& a, const IkSolutionSet& ik,
                                 const GraspSet& grasps, double threshold);

ValidationReport validate_scenario(const Scenario& s);

}  // namespace cgmp
