#include "cgmp/planners.hpp"

#include <chrono>
#include <cmath>

#include "cgmp/error.hpp"
#include "cgmp/ik.hpp"
#include "json_util.hpp"

namespace cgmp {

void PlannerParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); };
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(p_goal >= 0.0 && p_goal <= 1.0)) fail("p_goal must lie in [0, 1]");
  if (!(d_goal > 0.0)) fail("d_goal must be positive");
  if (!(max_time > 0.0)) fail("max_time must be positive");
  if (!(damping > 0.0)) fail("damping must be positive");
  if (!(stall_progress >= 0.0)) fail("stall progress must be >= 0");
  if (stall_iterations < 1) fail("stall iterations must be >= 1");
  if (std::isnan(connect_threshold) || std::isnan(edge_resolution)) fail("NaN parameter");
}

namespace {

class Clock {
 public:
  Clock() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Configuration sample_uniform(const KinematicChain& chain, Rng& rng) {
  const Configuration lo = chain.lower(), hi = chain.upper();
  Configuration q;
  for (int i = 0; i < kDof; ++i) q[i] = lo[i] + uniform01(rng) * (hi[i] - lo[i]);
  return q;
}

bool out_of_budget(const PlannerParams& p, const Clock& clock, std::uint64_t iterations) {
  if (p.max_iterations > 0 && iterations >= p.max_iterations) return true;
  return clock.seconds() >= p.max_time;
}

}  // namespace

ExtendOutcome extend(Tree& tree, const PlanningProblem& problem, std::size_t from,
                     const Configuration& q_target, double epsilon, double resolution) {
  const Configuration& q_from = tree[from].q;
  const Configuration delta = q_target - q_from;
  if ((delta.array() == 0.0).all()) return {ExtendStatus::kReached, from};
  const bool reaches = (delta.cwiseAbs().array() <= epsilon).all();
  const Configuration q_new =
      reaches ? q_target : Configuration(q_from + delta.cwiseMax(-epsilon).cwiseMin(epsilon));
  if (!edge_collision_free(problem.scene, problem.chain, q_from, q_new, resolution)) {
    return {ExtendStatus::kTrapped, from};
  }
  const std::size_t index = tree.add(q_new, from, gripper_pose(problem.chain, q_new));
  return {reaches ? ExtendStatus::kReached : ExtendStatus::kAdvanced, index};
}

JPlusOutcome jplus_extend(Tree& tree, const PlanningProblem& problem, std::size_t from,
                          const Transform& target, const PlannerParams& params) {
  JPlusOutcome out{JPlusStatus::kStalled, from, 0};
  double d = pose_distance(tree[from].gripper, target);
  if (d <= params.d_goal) {
    out.status = JPlusStatus::kGoalReached;
    return out;
  }
  const double resolution = params.resolution();
  for (int it = 0; it < params.stall_iterations; ++it) {
    const Configuration q = tree[out.index].q;
    const FkResult fk = forward_kinematics(problem.chain, q);
    const Jacobian jac = jacobian(problem.chain, fk);
    Configuration dq = dls_step(problem.chain, q, jac, pose_error(fk.gripper, target),
                                params.damping, 0.0, q);
    const double largest = dq.cwiseAbs().maxCoeff();
    if (!(largest > 0.0)) return out;
    if (largest > params.epsilon) dq *= params.epsilon / largest;
    const Configuration q_new = clamp_to_limits(problem.chain, q + dq);
    if (q_new == q) return out;
    if (!edge_collision_free(problem.scene, problem.chain, q, q_new, resolution)) {
      if (it == 0) out.status = JPlusStatus::kTrapped;
      return out;
    }
    const Transform pose = gripper_pose(problem.chain, q_new);
    const double d_new = pose_distance(pose, target);
    if (!(d - d_new > params.stall_progress)) return out;
    out.index = tree.add(q_new, out.index, pose);
    ++out.added;
    d = d_new;
    if (d <= params.d_goal) {
      out.status = JPlusStatus::kGoalReached;
      return out;
    }
  }
  return out;
}

GoalSampler::GoalSampler(const std::vector<Grasp>& grasps, bool score_bias)
    : count_(grasps.size()), weighted_(false) {
  if (count_ == 0) throw Error(ErrorKind::kNoGrasps, "goal sampler needs at least one grasp");
  if (!score_bias) return;
  std::vector<double> w;
  double total = 0.0;
  for (const auto& g : grasps) {
    w.push_back(std::max(0.0, g.score));
    total += w.back();
  }
  // All-zero scores fall back to uniform selection.
  if (total > 0.0) {
    weighted_ = true;
    dist_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }
}

std::size_t GoalSampler::operator()(Rng& rng) {
  if (weighted_) return dist_(rng);
  return std::min(count_ - 1, static_cast<std::size_t>(uniform01(rng) * count_));
}

GoalDistance nearest_grasp(const Transform& pose, const std::vector<Grasp>& grasps,
                           double bound) {
  GoalDistance best{bound, grasps.size()};
  for (std::size_t i = 0; i < grasps.size(); ++i) {
    const double t = pose_distance_translation_term(pose, grasps[i].pose);
    if (t >= best.distance) continue;
    const double d = t + pose_distance_rotation_term(pose, grasps[i].pose);
    if (d < best.distance) best = {d, i};
  }
  return best;
}

namespace {

std::size_t nearest_in_task_space(const Tree& tree, const Transform& target) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const double t = pose_distance_translation_term(tree[i].gripper, target);
    if (t >= best) continue;
    const double d = t + pose_distance_rotation_term(tree[i].gripper, target);
    if (d < best) {
      best = d;
      index = i;
    }
  }
  return index;
}

}  // namespace

PlanResult plan_jplus_rrt(const PlanningProblem& problem, const GraspSet& grasps,
                          const PlannerParams& params, PlannerTrace* trace) {
  params.validate();
  if (grasps.grasps.empty()) throw Error(ErrorKind::kNoGrasps, "J+RRT needs at least one grasp");
  if (config_in_collision(problem.scene, problem.chain, problem.q_start)) {
    throw Error(ErrorKind::kStartInCollision, "start configuration is in collision");
  }
  const Clock clock;
  Rng rng(params.seed);
  GoalSampler pick_goal(grasps.grasps, params.score_bias);
  const auto& goals = grasps.grasps;
  const double resolution = params.resolution();

  Tree tree(problem.q_start, gripper_pose(problem.chain, problem.q_start));
  GoalDistance best = nearest_grasp(tree[0].gripper, goals);
  std::size_t best_node = 0;
  auto scan_new = [&](std::size_t first) {
    for (std::size_t i = first; i < tree.size(); ++i) {
      const GoalDistance g = nearest_grasp(tree[i].gripper, goals, best.distance);
      if (g.grasp < goals.size()) {
        best = g;
        best_node = i;
      }
    }
  };

  PlanResult result;
  while (best.distance > params.d_goal && !out_of_budget(params, clock, result.iterations)) {
    ++result.iterations;
    const std::size_t before = tree.size();
    if (uniform01(rng) < params.p_goal) {
      const Transform& target = goals[pick_goal(rng)].pose;
      jplus_extend(tree, problem, nearest_in_task_space(tree, target), target, params);
    } else {
      const Configuration q_rand = sample_uniform(problem.chain, rng);
      extend(tree, problem, tree.nearest(q_rand), q_rand, params.epsilon, resolution);
    }
    scan_new(before);
  }

  result.success = best.distance <= params.d_goal;
  result.final_distance = best.distance;
  if (result.success) {
    result.path = tree.path_from_root(best_node);
    result.reached_grasp = best.grasp;
  }
  result.tree_nodes = tree.size();
  result.time_s = clock.seconds();
  if (trace) trace->trees.push_back(std::move(tree));
  return result;
}

std::vector<Configuration> extract_path(const Tree& start_tree, std::size_t a,
                                        const Tree& goal_tree, std::size_t b) {
  std::vector<Configuration> path = start_tree.path_from_root(a);
  std::vector<Configuration> tail = goal_tree.path_from_root(b);
  auto it = tail.rbegin();
  if (it != tail.rend() && *it == path.back()) ++it;
  path.insert(path.end(), it, tail.rend());
  return path;
}

PlanResult plan_ik_rrt(const PlanningProblem& problem, const Configuration& target_q,
                       const PlannerParams& params, const std::optional<Transform>& target_pose,
                       PlannerTrace* trace) {
  params.validate();
  const auto& chain = problem.chain;
  const auto& scene = problem.scene;
  if (!within_limits(chain, target_q) || config_in_collision(scene, chain, target_q)) {
    throw Error(ErrorKind::kTargetInCollision,
                "target configuration is in collision or outside joint limits");
  }
  if (config_in_collision(scene, chain, problem.q_start)) {
    throw Error(ErrorKind::kStartInCollision, "start configuration is in collision");
  }
  const Clock clock;
  Rng rng(params.seed);
  const double resolution = params.resolution();
  const double threshold = params.connect();
  const Transform goal_pose = target_pose ? *target_pose : gripper_pose(chain, target_q);

  Tree trees[2] = {Tree(problem.q_start, gripper_pose(chain, problem.q_start)),
                   Tree(target_q, gripper_pose(chain, target_q))};
  std::optional<std::pair<std::size_t, std::size_t>> meeting;

  // Tries to join node k of trees[side] to the other tree.
  auto try_connect = [&](int side, std::size_t k) {
    const Tree& other = trees[1 - side];
    const Configuration& q = trees[side][k].q;
    const std::size_t m = other.nearest(q);
    if ((other[m].q - q).norm() > threshold) return false;
    if (!edge_collision_free(scene, chain, q, other[m].q, resolution)) return false;
    meeting = side == 0 ? std::make_pair(k, m) : std::make_pair(m, k);
    return true;
  };

  PlanResult result;
  try_connect(0, 0);
  while (!meeting && !out_of_budget(params, clock, result.iterations)) {
    ++result.iterations;
    const Configuration q_r = sample_uniform(chain, rng);
    for (int side = 0; side < 2 && !meeting; ++side) {
      Tree& tree = trees[side];
      std::size_t n = tree.nearest(q_r);
      for (;;) {
        const ExtendOutcome out = extend(tree, problem, n, q_r, params.epsilon, resolution);
        if (out.status == ExtendStatus::kTrapped) break;
        if (try_connect(side, out.index)) break;
        if (out.status == ExtendStatus::kReached) break;
        n = out.index;
      }
    }
  }

  result.success = meeting.has_value();
  if (result.success) {
    result.path = extract_path(trees[0], meeting->first, trees[1], meeting->second);
    result.final_distance = pose_distance(gripper_pose(chain, result.path.back()), goal_pose);
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& node : trees[0].nodes()) best = std::min(best, pose_distance(node.gripper, goal_pose));
    result.final_distance = best;
  }
  result.tree_nodes = trees[0].size() + trees[1].size();
  result.time_s = clock.seconds();
  if (trace) {
    trace->trees.push_back(std::move(trees[0]));
    trace->trees.push_back(std::move(trees[1]));
  }
  return result;
}

namespace {

detail::json params_to_json(const PlannerParams& p) {
  return {{"epsilon", p.epsilon},
          {"p_goal", p.p_goal},
          {"d_goal", p.d_goal},
          {"max_time", p.max_time},
          {"seed", p.seed},
          {"score_bias", p.score_bias},
          {"connect_threshold", p.connect_threshold},
          {"edge_resolution", p.edge_resolution},
          {"damping", p.damping},
          {"stall_progress", p.stall_progress},
          {"stall_iterations", p.stall_iterations},
          {"max_iterations", p.max_iterations}};
}

PlannerParams params_from_json(const detail::json& j) {
  PlannerParams p;
  p.epsilon = j.value("epsilon", p.epsilon);
  p.p_goal = j.value("p_goal", p.p_goal);
  p.d_goal = j.value("d_goal", p.d_goal);
  p.max_time = j.value("max_time", p.max_time);
  p.seed = j.value("seed", p.seed);
  p.score_bias = j.value("score_bias", p.score_bias);
  p.connect_threshold = j.value("connect_threshold", p.connect_threshold);
  p.edge_resolution = j.value("edge_resolution", p.edge_resolution);
  p.damping = j.value("damping", p.damping);
  p.stall_progress = j.value("stall_progress", p.stall_progress);
  p.stall_iterations = j.value("stall_iterations", p.stall_iterations);
  p.max_iterations = j.value("max_iterations", p.max_iterations);
  return p;
}

}  // namespace

void save_path(const PathFile& file, const std::filesystem::path& path) {
  using detail::json;
  // No wall time here: a seeded run must reproduce this file byte for byte.
  const PlanResult& r = file.result;
  json configs = json::array();
  for (const auto& q : r.path) configs.push_back(detail::to_json(q));
  json doc = {{"format", detail::kFormatVersion},
              {"scenario", file.scenario_id},
              {"planner", file.planner},
              {"params", params_to_json(file.params)},
              {"success", r.success},
              {"iterations", r.iterations},
              {"final_distance", r.final_distance},
              {"tree_nodes", r.tree_nodes},
              {"reached_grasp", nullptr},
              {"path", configs}};
  if (r.reached_grasp) doc["reached_grasp"] = *r.reached_grasp;
  detail::write_json(doc, path);
}

PathFile load_path(const std::filesystem::path& path) {
  using detail::field;
  const auto doc = detail::read_json(path);
  const std::string src = path.string();
  detail::check_format(doc, src);
  PathFile f;
  try {
    f.scenario_id = doc.value("scenario", "");
    f.planner = doc.value("planner", "");
    if (doc.contains("params")) f.params = params_from_json(doc.at("params"));
    f.result.success = field(doc, "success", src).get<bool>();
    f.result.iterations = doc.value("iterations", std::uint64_t{0});
    f.result.time_s = doc.value("time_s", 0.0);
    f.result.final_distance = doc.value("final_distance", 0.0);
    f.result.tree_nodes = doc.value("tree_nodes", std::size_t{0});
    if (doc.contains("reached_grasp") && !doc["reached_grasp"].is_null()) {
      f.result.reached_grasp = doc["reached_grasp"].get<std::size_t>();
    }
  } catch (const detail::json::exception& e) {
    throw Error(ErrorKind::kFormat, src + ": " + e.what());
  }
  const auto& arr = field(doc, "path", src);
  if (!arr.is_array()) throw Error(ErrorKind::kFormat, src + ": 'path' must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    f.result.path.push_back(detail::config_from(arr[i], src + ": path[" + std::to_string(i) + "]"));
  }
  return f;
}

}  // namespace cgmp
