#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cgmp/collision.hpp"
#include "cgmp/grasping.hpp"
#include "cgmp/robot.hpp"

namespace cgmp {

struct IkParams {
  double damping = 0.1;          // lambda
  double nullspace_gain = 0.05;  // attraction toward the rest configuration
  int max_iterations = 300;
  double threshold = 1.0;        // pose_distance at which a solve succeeds
  double step_clamp = 0.1;       // max per-joint change per iteration
  int attempts = 1;              // extra attempts start from random in-limit seeds

  void validate() const;
};

// J^T (J J^T + lambda^2 I)^-1.
Eigen::Matrix<double, kDof, 6> damped_pseudo_inverse(const Jacobian& j, double damping);

// I - J^+ J with the undamped pseudo-inverse.
Eigen::Matrix<double, kDof, kDof> nullspace_projector(const Jacobian& j);

// One damped least-squares step toward `error` plus null-space attraction to
// q_rest (skipped when the gain is 0). Joints on a limit that the step would
// push past are locked and the step is recomputed without them.
Configuration dls_step(const KinematicChain& chain, const Configuration& q, const Jacobian& jac,
                       const Twist& error, double damping, double nullspace_gain,
                       const Configuration& q_rest);

// Damped least squares with null-space attraction to q_init. Joint-limit
// clamped after each step; collisions are not considered. `residuals`, when
// given, receives pose_distance at every iterate.
std::optional<Configuration> solve_ik(const KinematicChain& chain, const Transform& target,
                                      const Configuration& q_init, const IkParams& params,
                                      std::vector<double>* residuals = nullptr);

struct IkSolution {
  Configuration q;
  double score = 0.0;
  std::size_t grasp_index = 0;
};

struct IkSolutionSet {
  std::string scenario_id;
  std::vector<IkSolution> solutions;
  double compute_time_s = 0.0;  // wall time of the batch, reported apart from planning
};

// One solve per grasp seeded at q_start; keeps solutions that are within
// limits and collision-free. Output preserves grasp order.
IkSolutionSet compute_ik_set(const KinematicChain& chain, const CollisionScene& scene,
                             const GraspSet& grasps, const Configuration& q_start,
                             const IkParams& params, unsigned jobs = 1);

void save_ik_set(const IkSolutionSet& set, const std::filesystem::path& path);
IkSolutionSet load_ik_set(const std::filesystem::path& path);

}  // namespace cgmp
