#include "cgmp/ik.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "cgmp/error.hpp"
#include "cgmp/random.hpp"
#include "json_util.hpp"

namespace cgmp {

void IkParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); };
  if (!(damping > 0.0)) fail("IK damping must be positive");
  if (!(nullspace_gain >= 0.0)) fail("IK null-space gain must be >= 0");
  if (max_iterations < 1) fail("IK max iterations must be >= 1");
  if (!(threshold > 0.0)) fail("IK threshold must be positive");
  if (!(step_clamp > 0.0)) fail("IK step clamp must be positive");
  if (attempts < 1) fail("IK attempts must be >= 1");
}

Eigen::Matrix<double, kDof, 6> damped_pseudo_inverse(const Jacobian& j, double damping) {
  Eigen::Matrix<double, 6, 6> jjt = j * j.transpose();
  jjt.diagonal().array() += damping * damping;
  return j.transpose() * jjt.ldlt().solve(Eigen::Matrix<double, 6, 6>::Identity());
}

Eigen::Matrix<double, kDof, kDof> nullspace_projector(const Jacobian& j) {
  Eigen::CompleteOrthogonalDecomposition<Jacobian> cod(j);
  cod.setThreshold(1e-9);
  const Eigen::Matrix<double, kDof, 6> pinv = cod.pseudoInverse();
  return Eigen::Matrix<double, kDof, kDof>::Identity() - pinv * j;
}

Configuration dls_step(const KinematicChain& chain, const Configuration& q, const Jacobian& jac,
                       const Twist& error, double damping, double nullspace_gain,
                       const Configuration& q_rest) {
  const Configuration lo = chain.lower(), hi = chain.upper();
  Jacobian active = jac;
  Eigen::Matrix<double, kDof, 1> free = Eigen::Matrix<double, kDof, 1>::Ones();
  Configuration dq = Configuration::Zero();
  // Joints resting on a limit that the step pushes further out are dropped
  // and the step is recomputed without them.
  for (int pass = 0; pass <= kDof; ++pass) {
    dq = damped_pseudo_inverse(active, damping) * error;
    if (nullspace_gain != 0.0) {
      dq += nullspace_gain * nullspace_projector(active) * free.asDiagonal() * (q_rest - q);
    }
    dq = free.asDiagonal() * dq;
    bool changed = false;
    for (int i = 0; i < kDof; ++i) {
      if (free[i] == 0.0) continue;
      if ((q[i] >= hi[i] && dq[i] > 0.0) || (q[i] <= lo[i] && dq[i] < 0.0)) {
        free[i] = 0.0;
        active.col(i).setZero();
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dq;
}

std::optional<Configuration> solve_ik(const KinematicChain& chain, const Transform& target,
                                      const Configuration& q_init, const IkParams& params,
                                      std::vector<double>* residuals) {
  const Configuration q_rest = q_init;
  Configuration q = clamp_to_limits(chain, q_init);
  for (int it = 0;; ++it) {
    const FkResult fk = forward_kinematics(chain, q);
    const double d = pose_distance(fk.gripper, target);
    if (residuals) residuals->push_back(d);
    if (d <= params.threshold) return q;
    if (it == params.max_iterations) return std::nullopt;
    Configuration dq = dls_step(chain, q, jacobian(chain, fk), pose_error(fk.gripper, target),
                                params.damping, params.nullspace_gain, q_rest);
    const double largest = dq.cwiseAbs().maxCoeff();
    if (largest > params.step_clamp) dq *= params.step_clamp / largest;
    q = clamp_to_limits(chain, q + dq);
  }
}

namespace {

std::optional<Configuration> solve_with_attempts(const KinematicChain& chain,
                                                 const CollisionScene& scene,
                                                 const Transform& target,
                                                 const Configuration& q_start,
                                                 const IkParams& params, std::size_t index) {
  Rng rng(mix_seed({0x696bULL, index}));
  const Configuration lo = chain.lower(), hi = chain.upper();
  for (int attempt = 0; attempt < params.attempts; ++attempt) {
    Configuration seed = q_start;
    if (attempt > 0) {
      for (int i = 0; i < kDof; ++i) seed[i] = lo[i] + uniform01(rng) * (hi[i] - lo[i]);
    }
    auto q = solve_ik(chain, target, seed, params);
    if (q && within_limits(chain, *q) && !config_in_collision(scene, chain, *q)) return q;
  }
  return std::nullopt;
}

}  // namespace

IkSolutionSet compute_ik_set(const KinematicChain& chain, const CollisionScene& scene,
                             const GraspSet& grasps, const Configuration& q_start,
                             const IkParams& params, unsigned jobs) {
  params.validate();
  const auto started = std::chrono::steady_clock::now();
  jobs = std::max(1u, jobs);
  const std::size_t n = grasps.grasps.size();
  std::vector<std::optional<Configuration>> found(n);
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < n; i += jobs) {
      found[i] = solve_with_attempts(chain, scene, grasps.grasps[i].pose, q_start, params, i);
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  IkSolutionSet set;
  set.scenario_id = grasps.scenario_id;
  for (std::size_t i = 0; i < n; ++i) {
    if (found[i]) set.solutions.push_back({*found[i], grasps.grasps[i].score, i});
  }
  set.compute_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return set;
}

void save_ik_set(const IkSolutionSet& set, const std::filesystem::path& path) {
  using detail::json;
  json sols = json::array();
  for (const auto& s : set.solutions) {
    sols.push_back({{"q", detail::to_json(s.q)}, {"score", s.score}, {"grasp_index", s.grasp_index}});
  }
  detail::write_json({{"format", detail::kFormatVersion},
                      {"scenario", set.scenario_id},
                      {"compute_time_s", set.compute_time_s},
                      {"solutions", sols}},
                     path);
}

IkSolutionSet load_ik_set(const std::filesystem::path& path) {
  using detail::field;
  const auto doc = detail::read_json(path);
  const std::string src = path.string();
  detail::check_format(doc, src);
  IkSolutionSet set;
  set.scenario_id = doc.value("scenario", "");
  set.compute_time_s = doc.value("compute_time_s", 0.0);
  const auto& arr = field(doc, "solutions", src);
  if (!arr.is_array()) throw Error(ErrorKind::kFormat, src + ": 'solutions' must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = src + ": solutions[" + std::to_string(i) + "]";
    const auto& s = arr[i];
    const auto& gi = field(s, "grasp_index", where);
    if (!gi.is_number_unsigned()) throw Error(ErrorKind::kFormat, where + ": bad grasp_index");
    set.solutions.push_back({detail::config_from(field(s, "q", where), where + ".q"),
                             detail::number(field(s, "score", where), where + ".score"),
                             gi.get<std::size_t>()});
  }
  return set;
}

}  // namespace cgmp
