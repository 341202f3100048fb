#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cgmp/bvh.hpp"
#include "cgmp/robot.hpp"

namespace cgmp {

// One connected, world-frame piece of scene geometry.
struct SceneBody {
  std::string name;
  std::shared_ptr<const IndexedMesh> geometry;
  Aabb box;
};

// Obstacles, the target object and an optional floor plane z = 0. Obstacle
// meshes are split into connected components so that each closed component
// also supports containment tests.
class CollisionScene {
 public:
  void add_obstacle(const std::string& name, const TriangleMesh& world_mesh);
  void set_target(const std::string& name, const TriangleMesh& world_mesh);
  void set_floor(bool enabled) { floor_ = enabled; }
  // Whether the target object counts as an obstacle for robot configurations.
  void set_target_blocks_robot(bool blocks) { target_blocks_robot_ = blocks; }

  bool floor() const { return floor_; }
  bool target_blocks_robot() const { return target_blocks_robot_; }
  const std::vector<SceneBody>& obstacles() const { return obstacles_; }
  const std::vector<SceneBody>& target() const { return target_; }
  bool has_target() const { return !target_.empty(); }

  // Sphere intersects a triangle, lies inside a closed body, or crosses the floor.
  bool sphere_in_collision(const Vec3& center, double radius, bool include_target) const;

 private:
  std::vector<SceneBody> obstacles_;
  std::vector<SceneBody> target_;
  bool floor_ = true;
  bool target_blocks_robot_ = true;
};

// Membership test for the complement of C_free: joint-limit violation, any link
// sphere against the scene, or any link sphere below the floor.
bool config_in_collision(const CollisionScene& scene, const KinematicChain& chain,
                         const Configuration& q);

// Samples the straight segment so that no joint moves more than `step`
// between samples. The sample count is a power of two, so any finer step
// checks a superset of the points a coarser step checks.
bool edge_collision_free(const CollisionScene& scene, const KinematicChain& chain,
                         const Configuration& qa, const Configuration& qb, double step);

// Number of segments edge_collision_free uses for the given displacement.
std::size_t edge_segments(const Configuration& qa, const Configuration& qb, double step);

// Gripper mesh placed at `pose` against scene obstacles and the floor. The
// target object is skipped when exclude_target is set.
bool gripper_pose_in_collision(const CollisionScene& scene, const IndexedMesh& gripper,
                               const Transform& pose, bool exclude_target);

}  // namespace cgmp
