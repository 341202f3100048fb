#include "cgmp/grasping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "cgmp/error.hpp"
#include "json_util.hpp"

namespace cgmp {

ContactPair ContactPair::make(const Vec3& p1, const Vec3& n1, const Vec3& p2, const Vec3& n2) {
  return ContactPair{p1, p2, n1.normalized(), n2.normalized(), (p2 - p1).norm()};
}

void SamplerParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); };
  if (!(friction > 0.0)) fail("friction coefficient must be positive");
  if (rays_per_point < 1) fail("rays per point must be >= 1");
  if (approach_directions < 1) fail("approach directions must be >= 1");
  if (!(max_opening > 0.0)) fail("max opening must be positive");
  if (output_size < 1) fail("output size must be >= 1");
  if (output_size > raw_budget) fail("output size must not exceed the raw sample budget");
}

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Unit vector perpendicular to `axis`, preferring the projection of `hint`.
Vec3 perpendicular(const Vec3& axis, const Vec3& hint) {
  Vec3 v = hint - hint.dot(axis) * axis;
  if (v.norm() < 1e-6) {
    int k = 0;
    axis.cwiseAbs().minCoeff(&k);
    const Vec3 e = Vec3::Unit(k);
    v = e - e.dot(axis) * axis;
  }
  return v.normalized();
}

}  // namespace

ContactAngles contact_angles(const ContactPair& c) {
  const Vec3 u = (c.p2 - c.p1).normalized();
  return {angle_between(c.n1, u), angle_between(c.n2, -u)};
}

bool is_antipodal(const ContactPair& c, double mu) {
  if (!(c.width > 0.0)) return false;
  const double cone = std::atan(mu);
  const ContactAngles a = contact_angles(c);
  return a.first <= cone && a.second <= cone;
}

double grasp_score(const ContactPair& c, double mu_ref) {
  const ContactAngles a = contact_angles(c);
  const double half_pi = 0.5 * std::numbers::pi;
  if (a.first >= half_pi || a.second >= half_pi) return 0.0;
  const double mu_required = std::max(std::tan(a.first), std::tan(a.second));
  return std::clamp(1.0 - mu_required / mu_ref, 0.0, 1.0);
}

std::vector<ContactPair> contact_pairs_from_point(const IndexedMesh& object,
                                                  const SurfacePoint& first,
                                                  const SamplerParams& params, Rng& rng) {
  std::vector<ContactPair> pairs;
  const Vec3 inward = -first.normal;
  const Vec3 b1 = perpendicular(inward, Vec3::UnitZ());
  const Vec3 b2 = inward.cross(b1);
  const double cos_cone = std::cos(std::atan(params.friction));
  for (int r = 0; r < params.rays_per_point; ++r) {
    // Uniform over the spherical cap around the inward normal.
    const double cos_t = 1.0 - uniform01(rng) * (1.0 - cos_cone);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    const Vec3 dir = cos_t * inward + sin_t * (std::cos(phi) * b1 + std::sin(phi) * b2);
    const auto hit = ray_cast(object.mesh, object.bvh, Ray(first.point, dir));
    if (!hit) continue;
    const ContactPair c = ContactPair::make(first.point, inward, hit->point,
                                            -object.mesh.normals()[hit->triangle]);
    if (c.width <= params.max_opening && is_antipodal(c, params.friction)) pairs.push_back(c);
  }
  return pairs;
}

std::vector<ContactPair> sample_contact_pairs(const IndexedMesh& object,
                                              const SamplerParams& params, Rng& rng,
                                              std::size_t points) {
  std::vector<ContactPair> out;
  for (const SurfacePoint& p : surface_sample(object.mesh, rng, points)) {
    auto pairs = contact_pairs_from_point(object, p, params, rng);
    out.insert(out.end(), pairs.begin(), pairs.end());
  }
  return out;
}

std::vector<Transform> build_grasp_poses(const ContactPair& c, int n_approach) {
  if (n_approach < 1) throw Error(ErrorKind::kInvalidArgument, "n_approach must be >= 1");
  const Vec3 y = (c.p2 - c.p1).normalized();
  const Vec3 center = 0.5 * (c.p1 + c.p2);
  // First approach direction comes from above where possible.
  const Vec3 z0 = perpendicular(y, -Vec3::UnitZ());
  std::vector<Transform> poses;
  poses.reserve(n_approach);
  for (int k = 0; k < n_approach; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n_approach;
    const Vec3 z = Eigen::AngleAxisd(angle, y) * z0;
    Mat3 r;
    r.col(0) = y.cross(z);
    r.col(1) = y;
    r.col(2) = z;
    poses.emplace_back(r, center);
  }
  return poses;
}

std::vector<std::size_t> farthest_point_subsample(const std::vector<Transform>& poses,
                                                  std::size_t k, Rng& rng) {
  const std::size_t n = poses.size();
  if (k >= n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  std::vector<std::size_t> picked;
  picked.reserve(k);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t next = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  while (picked.size() < k) {
    picked.push_back(next);
    nearest[next] = -1.0;
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] < 0.0) continue;
      nearest[i] = std::min(nearest[i], pose_distance(poses[i], poses[next]));
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    if (best == n) break;
    next = best;
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

namespace {

struct Candidate {
  Transform pose;
  double score;
  ContactPair contacts;
};

std::vector<Candidate> candidates_for_point(const GraspScene& gs, const SamplerParams& params,
                                            std::uint64_t seed, std::size_t point_index) {
  Rng rng(mix_seed({seed, 0x6772617370ULL, point_index}));
  const SurfacePoint first = surface_sample(gs.object.mesh, rng, 1).front();
  std::vector<Candidate> out;
  for (const ContactPair& c : contact_pairs_from_point(gs.object, first, params, rng)) {
    const double score = grasp_score(c);
    for (const Transform& pose : build_grasp_poses(c, params.approach_directions)) {
      out.push_back({pose, score, c});
    }
  }
  return out;
}

}  // namespace

GraspSet generate_grasp_set(const GraspScene& gs, const SamplerParams& params, std::uint64_t seed,
                            unsigned jobs) {
  params.validate();
  if (gs.object.mesh.empty()) throw Error(ErrorKind::kInvalidArgument, "target mesh is empty");
  jobs = std::max(1u, jobs);

  // Candidates are generated per first-contact point from independent
  // substreams, so the result does not depend on `jobs`.
  std::vector<Candidate> candidates;
  const std::size_t max_points = std::max<std::size_t>(params.raw_budget, 1000);
  const std::size_t chunk = 64;
  for (std::size_t begin = 0; begin < max_points && candidates.size() < params.raw_budget;
       begin += chunk) {
    const std::size_t end = std::min(max_points, begin + chunk);
    std::vector<std::vector<Candidate>> per_point(end - begin);
    auto work = [&](unsigned worker) {
      for (std::size_t i = begin + worker; i < end; i += jobs) {
        per_point[i - begin] = candidates_for_point(gs, params, seed, i);
      }
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::thread> threads;
      for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work, w);
      for (auto& t : threads) t.join();
    }
    for (auto& pts : per_point) {
      for (auto& c : pts) {
        if (candidates.size() == params.raw_budget) break;
        candidates.push_back(std::move(c));
      }
    }
  }

  std::vector<Candidate> survivors;
  for (auto& c : candidates) {
    if (!gripper_pose_in_collision(gs.scene, gs.gripper, c.pose, /*exclude_target=*/true)) {
      survivors.push_back(std::move(c));
    }
  }
  if (survivors.empty()) {
    throw Error(ErrorKind::kNoGrasps,
                "no collision-free grasp candidates for object '" + gs.object_id + "' (" +
                    std::to_string(candidates.size()) + " raw candidates)");
  }

  std::vector<Transform> poses;
  poses.reserve(survivors.size());
  for (const auto& c : survivors) poses.push_back(c.pose);
  Rng rng(mix_seed({seed, 0x737562ULL}));
  const auto keep = farthest_point_subsample(poses, params.output_size, rng);

  GraspSet set;
  set.object_id = gs.object_id;
  set.scenario_id = gs.scenario_id;
  set.params = params;
  set.seed = seed;
  set.truncated = survivors.size() < params.output_size;
  for (std::size_t i : keep) {
    set.grasps.push_back({survivors[i].pose, survivors[i].score, survivors[i].contacts});
  }
  return set;
}

TriangleMesh make_gripper_mesh(double max_opening) {
  constexpr double kPalmBottom = -0.1034, kPalmTop = -0.045, kFingerTip = 0.008;
  constexpr double kFingerThickness = 0.02;
  const double half_open = 0.5 * max_opening;
  TriangleMesh palm = make_box(Vec3(0.03, 0.1, 0.5 * (kPalmTop - kPalmBottom)),
                               Transform::translation(0, 0, 0.5 * (kPalmTop + kPalmBottom)));
  const Vec3 finger_half(0.01, 0.5 * kFingerThickness, 0.5 * (kFingerTip - kPalmTop));
  const double finger_y = half_open + 0.5 * kFingerThickness;
  const double finger_z = 0.5 * (kFingerTip + kPalmTop);
  return palm.merged(make_box(finger_half, Transform::translation(0, finger_y, finger_z)))
      .merged(make_box(finger_half, Transform::translation(0, -finger_y, finger_z)));
}

void save_grasp_set(const GraspSet& set, const std::filesystem::path& path) {
  using detail::json;
  using detail::to_json;
  json grasps = json::array();
  for (const Grasp& g : set.grasps) {
    json rec{{"position", to_json(g.pose.translation())},
             {"quaternion", to_json(g.pose.rotation())},
             {"score", g.score}};
    if (g.contacts) {
      const ContactPair& c = *g.contacts;
      rec["contacts"] = {{"p1", to_json(c.p1)}, {"p2", to_json(c.p2)}, {"n1", to_json(c.n1)},
                         {"n2", to_json(c.n2)}, {"width", c.width}};
    }
    grasps.push_back(std::move(rec));
  }
  const SamplerParams& p = set.params;
  const json doc{{"format", detail::kFormatVersion},
                 {"object", set.object_id},
                 {"scenario", set.scenario_id},
                 {"seed", set.seed},
                 {"truncated", set.truncated},
                 {"params",
                  {{"friction", p.friction},
                   {"rays_per_point", p.rays_per_point},
                   {"approach_directions", p.approach_directions},
                   {"max_opening", p.max_opening},
                   {"raw_budget", p.raw_budget},
                   {"output_size", p.output_size}}},
                 {"grasps", grasps}};
  detail::write_json(doc, path);
}

GraspSet load_grasp_set(const std::filesystem::path& path) {
  using detail::field;
  const auto doc = detail::read_json(path);
  const std::string src = path.string();
  detail::check_format(doc, src);
  GraspSet set;
  set.object_id = doc.value("object", "");
  set.scenario_id = doc.value("scenario", "");
  set.seed = doc.value("seed", std::uint64_t{0});
  set.truncated = doc.value("truncated", false);
  if (doc.contains("params")) {
    const auto& p = doc.at("params");
    set.params.friction = p.value("friction", set.params.friction);
    set.params.rays_per_point = p.value("rays_per_point", set.params.rays_per_point);
    set.params.approach_directions = p.value("approach_directions", set.params.approach_directions);
    set.params.max_opening = p.value("max_opening", set.params.max_opening);
    set.params.raw_budget = p.value("raw_budget", set.params.raw_budget);
    set.params.output_size = p.value("output_size", set.params.output_size);
  }
  const auto& arr = field(doc, "grasps", src);
  if (!arr.is_array()) throw Error(ErrorKind::kFormat, src + ": 'grasps' must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& g = arr[i];
    const std::string where = src + ": grasps[" + std::to_string(i) + "]";
    Grasp grasp;
    grasp.pose = detail::transform_from(g, where);
    grasp.score = detail::number(field(g, "score", where), where + ".score");
    if (g.contains("contacts")) {
      const auto& c = g.at("contacts");
      grasp.contacts = ContactPair{detail::vec3_from(field(c, "p1", where), where),
                                   detail::vec3_from(field(c, "p2", where), where),
                                   detail::vec3_from(field(c, "n1", where), where),
                                   detail::vec3_from(field(c, "n2", where), where),
                                   detail::number(field(c, "width", where), where)};
    }
    set.grasps.push_back(std::move(grasp));
  }
  return set;
}

}  // namespace cgmp
