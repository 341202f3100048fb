#include "cgmp/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace cgmp {

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

bool config_ok(const AssembledScenario& a, const Configuration& q) {
  const Configuration lo = a.chain.lower(), hi = a.chain.upper();
  for (int i = 0; i < kDof; ++i) {
    if (!(q[i] >= lo[i] && q[i] <= hi[i])) return false;
  }
  const FkResult fk = forward_kinematics(a.chain, q);
  for (int link = 0; link < kDof; ++link) {
    for (const auto& s : a.chain.spheres(link)) {
      if (a.scene.sphere_in_collision(fk.links[link].apply(s.center), s.radius,
                                      a.scene.target_blocks_robot())) {
        return false;
      }
    }
  }
  return true;
}

// tan of the angle between unit n and unit u, +inf past 90 degrees.
double tan_angle(const Vec3& n, const Vec3& u) {
  const double c = std::clamp(n.dot(u), -1.0, 1.0);
  if (c <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::max(0.0, 1.0 - c * c)) / c;
}

}  // namespace

bool check_edge(const AssembledScenario& a, const Configuration& qa, const Configuration& qb,
                double resolution) {
  const double span = (qb - qa).cwiseAbs().maxCoeff();
  std::size_t n = 1;
  while (span / static_cast<double>(n) > resolution) n *= 2;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    const Configuration q = i == n ? qb : Configuration(qa + t * (qb - qa));
    if (!config_ok(a, q)) return false;
  }
  return true;
}

ValidationReport validate_path(const AssembledScenario& a, const PlanResult& result,
                               const PathCheck& check, const std::vector<Grasp>* grasps) {
  ValidationReport r;
  const auto& path = result.path;
  if (!result.success) {
    if (!path.empty()) r.add("failed result carries a path");
    return r;
  }
  if (path.empty()) {
    r.add("successful result with an empty path");
    return r;
  }
  if (path.front() != a.q_start) r.add("path does not start at q_start");
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i + 1 < path.size()) {
      const double step = (path[i + 1] - path[i]).cwiseAbs().maxCoeff();
      if (step > check.epsilon + 1e-12) {
        r.add("edge " + std::to_string(i) + fmt(": joint step %.6g exceeds epsilon %.6g", step, check.epsilon));
      }
      if (!check_edge(a, path[i], path[i + 1], check.resolution)) {
        r.add("edge " + std::to_string(i) + " is in collision");
      }
    } else if (path.size() == 1 && !config_ok(a, path[0])) {
      r.add("single-configuration path is in collision");
    }
  }
  if (grasps && result.reached_grasp) {
    if (*result.reached_grasp >= grasps->size()) {
      r.add("reached grasp index out of range");
      return r;
    }
    const Transform end = gripper_pose(a.chain, path.back());
    const Transform& g = (*grasps)[*result.reached_grasp].pose;
    const double d = 1000.0 * (end.translation() - g.translation()).norm() +
                     (180.0 / std::numbers::pi) * end.rotation().angularDistance(g.rotation());
    if (d > check.d_goal + 1e-9) r.add(fmt("final pose %.6g from the reached grasp, above d_goal %.6g", d, check.d_goal));
    if (std::abs(d - result.final_distance) > check.distance_tolerance * std::max(1.0, d)) {
      r.add(fmt("reported final distance %.12g differs from recomputed %.12g", result.final_distance, d));
    }
  }
  return r;
}

ValidationReport validate_tree(const AssembledScenario& a, const Tree& tree,
                               const PathCheck& check) {
  ValidationReport r;
  if (tree.size() == 0) {
    r.add("empty tree");
    return r;
  }
  if (tree[0].parent != -1) r.add("root has a parent");
  for (std::size_t i = 1; i < tree.size(); ++i) {
    const auto parent = tree[i].parent;
    if (parent < 0 || static_cast<std::size_t>(parent) >= i) {
      r.add("node " + std::to_string(i) + " has an invalid parent");
      continue;
    }
    const Configuration& qp = tree[parent].q;
    if ((tree[i].q - qp).cwiseAbs().maxCoeff() > check.epsilon + 1e-12) {
      r.add("edge to node " + std::to_string(i) + " exceeds epsilon");
    }
    if (!check_edge(a, qp, tree[i].q, check.resolution)) {
      r.add("edge to node " + std::to_string(i) + " is in collision");
    }
  }
  return r;
}

double tree_goal_distance(const Tree& tree, const std::vector<Grasp>& grasps) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& node : tree.nodes()) {
    for (const auto& g : grasps) {
      const double d =
          1000.0 * (node.gripper.translation() - g.pose.translation()).norm() +
          (180.0 / std::numbers::pi) * node.gripper.rotation().angularDistance(g.pose.rotation());
      best = std::min(best, d);
    }
  }
  return best;
}

ValidationReport validate_grasp_set(const AssembledScenario& a, const GraspSet& set) {
  ValidationReport r;
  const double mu = set.params.friction;
  const double cone_cos = 1.0 / std::sqrt(1.0 + mu * mu);
  if (set.grasps.size() > set.params.output_size) r.add("more grasps than the output size");
  for (std::size_t i = 0; i < set.grasps.size(); ++i) {
    const Grasp& g = set.grasps[i];
    const std::string where = "grasp " + std::to_string(i) + ": ";
    if (!(g.score >= 0.0 && g.score <= 1.0)) r.add(where + "score outside [0, 1]");
    if (gripper_pose_in_collision(a.scene, a.gripper, g.pose, true)) {
      r.add(where + "gripper in collision");
    }
    if (!g.contacts) continue;
    const ContactPair& c = *g.contacts;
    const Vec3 d = c.p2 - c.p1;
    const double width = d.norm();
    if (!(width > 0.0) || width > set.params.max_opening + 1e-12) {
      r.add(where + "contact width outside (0, max_opening]");
      continue;
    }
    const Vec3 u = d / width;
    if (c.n1.dot(u) < cone_cos - 1e-9 || c.n2.dot(-u) < cone_cos - 1e-9) {
      r.add(where + "contacts are not antipodal at the configured friction");
    }
    const double expected =
        std::clamp(1.0 - std::max(tan_angle(c.n1, u), tan_angle(c.n2, -u)), 0.0, 1.0);
    if (std::abs(expected - g.score) > 1e-9) r.add(where + "score does not match its contacts");
    const Vec3 mid = 0.5 * (c.p1 + c.p2);
    if ((g.pose.translation() - mid).norm() > 1e-9) r.add(where + "origin is not the contact midpoint");
    const Vec3 y = g.pose.rotate(Vec3::UnitY());
    if (std::abs(std::abs(y.dot(u)) - 1.0) > 1e-9) r.add(where + "closing axis not along the contacts");
    for (const Vec3& p : {c.p1, c.p2}) {
      if (!sphere_touches_mesh(a.object.mesh, a.object.bvh, p, 1e-6)) {
        r.add(where + "contact point off the object surface");
      }
    }
  }
  return r;
}

ValidationReport validate_ik_set(const AssembledScenario& a, const IkSolutionSet& ik,
                                 const GraspSet& grasps, double threshold) {
  ValidationReport r;
  for (std::size_t i = 0; i < ik.solutions.size(); ++i) {
    const IkSolution& s = ik.solutions[i];
    const std::string where = "IK solution " + std::to_string(i) + ": ";
    if (s.grasp_index >= grasps.grasps.size()) {
      r.add(where + "grasp index out of range");
      continue;
    }
    if (!config_ok(a, s.q)) r.add(where + "outside limits or in collision");
    const Transform end = gripper_pose(a.chain, s.q);
    const Transform& g = grasps.grasps[s.grasp_index].pose;
    const double d = 1000.0 * (end.translation() - g.translation()).norm() +
                     (180.0 / std::numbers::pi) * end.rotation().angularDistance(g.rotation());
    if (d > threshold) r.add(where + fmt("residual %.6g above %.6g", d, threshold));
  }
  return r;
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport r;
  for (auto& p : check_scenario(s)) r.add(std::move(p));
  return r;
}

}  // namespace cgmp
