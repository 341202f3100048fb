#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cgmp/bvh.hpp"
#include "cgmp/collision.hpp"
#include "cgmp/random.hpp"
#include "cgmp/transform.hpp"

namespace cgmp {

// Two surface contacts of a parallel-jaw grasp. Normals point into the body.
struct ContactPair {
  Vec3 p1, p2;
  Vec3 n1, n2;
  double width = 0.0;

  static ContactPair make(const Vec3& p1, const Vec3& n1, const Vec3& p2, const Vec3& n2);
};

struct SamplerParams {
  double friction = 1.0;           // mu; friction cone half-angle is atan(mu)
  int rays_per_point = 16;
  int approach_directions = 6;
  double max_opening = 0.08;       // m
  std::size_t raw_budget = 20000;  // candidate poses before collision filtering
  std::size_t output_size = 200;

  void validate() const;
};

struct Grasp {
  Transform pose;  // gripper frame in world coordinates
  double score = 0.0;
  std::optional<ContactPair> contacts;
};

struct GraspSet {
  std::vector<Grasp> grasps;
  std::string object_id;
  std::string scenario_id;
  SamplerParams params;
  std::uint64_t seed = 0;
  // Fewer than params.output_size grasps survived collision filtering.
  bool truncated = false;
};

// Angle between n1 and the line p1->p2, and between n2 and p2->p1.
struct ContactAngles {
  double first = 0.0;
  double second = 0.0;
};
ContactAngles contact_angles(const ContactPair& c);

// Both contacts lie within the other's friction cone of half-angle atan(mu).
bool is_antipodal(const ContactPair& c, double mu);

// 1 - (minimum friction needed for force closure) / mu_ref, clamped to [0, 1].
double grasp_score(const ContactPair& c, double mu_ref = 1.0);

// Contacts found by casting rays_per_point rays from one first contact into
// the body, inside the friction cone around its inward normal.
std::vector<ContactPair> contact_pairs_from_point(const IndexedMesh& object,
                                                  const SurfacePoint& first,
                                                  const SamplerParams& params, Rng& rng);

// `points` first contacts sampled uniformly over the surface.
std::vector<ContactPair> sample_contact_pairs(const IndexedMesh& object,
                                              const SamplerParams& params, Rng& rng,
                                              std::size_t points);

// Gripper frames for a contact pair: origin at the contact midpoint, y along
// p2 - p1, and n_approach approach (z) directions evenly spaced about y.
std::vector<Transform> build_grasp_poses(const ContactPair& c, int n_approach);

// Greedy farthest-point selection under pose_distance. The first pick is
// drawn from rng; later ties go to the lowest index.
std::vector<std::size_t> farthest_point_subsample(const std::vector<Transform>& poses,
                                                  std::size_t k, Rng& rng);

struct GraspScene {
  const IndexedMesh& object;  // world frame
  const CollisionScene& scene;
  const IndexedMesh& gripper;  // gripper frame
  std::string object_id;
  std::string scenario_id;
};

// Full annotation pipeline: sample contacts, build poses, score, drop poses in
// collision (target excluded), subsample to params.output_size. Throws
// Error(kNoGrasps) when nothing survives.
GraspSet generate_grasp_set(const GraspScene& scene, const SamplerParams& params,
                            std::uint64_t seed, unsigned jobs = 1);

// Three-box parallel gripper (palm + two fingers at max opening) in the
// gripper frame.
TriangleMesh make_gripper_mesh(double max_opening = 0.08);

void save_grasp_set(const GraspSet& set, const std::filesystem::path& path);
GraspSet load_grasp_set(const std::filesystem::path& path);

}  // namespace cgmp
