#include "cgmp/collision.hpp"

#include <algorithm>
#include <cmath>

#include "cgmp/error.hpp"

namespace cgmp {

namespace {

void append_components(std::vector<SceneBody>& out, const std::string& name,
                       const TriangleMesh& mesh) {
  for (auto& part : mesh.connected_components()) {
    auto geometry = std::make_shared<const IndexedMesh>(std::move(part));
    const Aabb box = geometry->bvh.root_box();
    out.push_back({name, std::move(geometry), box});
  }
}

bool sphere_hits_body(const SceneBody& body, const Vec3& center, double radius) {
  if (body.box.squared_distance(center) >= radius * radius) return false;
  const IndexedMesh& g = *body.geometry;
  if (sphere_touches_mesh(g.mesh, g.bvh, center, radius)) return true;
  return g.closed && body.box.contains(center) && point_inside(g.mesh, g.bvh, center);
}

}  // namespace

void CollisionScene::add_obstacle(const std::string& name, const TriangleMesh& world_mesh) {
  append_components(obstacles_, name, world_mesh);
}

void CollisionScene::set_target(const std::string& name, const TriangleMesh& world_mesh) {
  target_.clear();
  append_components(target_, name, world_mesh);
}

bool CollisionScene::sphere_in_collision(const Vec3& center, double radius,
                                         bool include_target) const {
  if (floor_ && center.z() < radius) return true;
  for (const auto& body : obstacles_) {
    if (sphere_hits_body(body, center, radius)) return true;
  }
  if (include_target) {
    for (const auto& body : target_) {
      if (sphere_hits_body(body, center, radius)) return true;
    }
  }
  return false;
}

bool config_in_collision(const CollisionScene& scene, const KinematicChain& chain,
                         const Configuration& q) {
  if (!within_limits(chain, q)) return true;
  const FkResult fk = forward_kinematics(chain, q);
  const bool with_target = scene.target_blocks_robot();
  for (int link = 0; link < kDof; ++link) {
    const Transform& frame = fk.links[link];
    for (const auto& s : chain.spheres(link)) {
      if (scene.sphere_in_collision(frame.apply(s.center), s.radius, with_target)) return true;
    }
  }
  return false;
}

std::size_t edge_segments(const Configuration& qa, const Configuration& qb, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::kInvalidArgument, "edge step must be positive");
  const double max_delta = (qb - qa).cwiseAbs().maxCoeff();
  std::size_t n = 1;
  while (max_delta / static_cast<double>(n) > step) n *= 2;
  return n;
}

bool edge_collision_free(const CollisionScene& scene, const KinematicChain& chain,
                         const Configuration& qa, const Configuration& qb, double step) {
  const std::size_t n = edge_segments(qa, qb, step);
  if (config_in_collision(scene, chain, qa)) return false;
  if (n == 1 && qa == qb) return true;
  if (config_in_collision(scene, chain, qb)) return false;
  // Coarse-to-fine so that blocked edges usually fail early.
  for (std::size_t stride = n / 2; stride >= 1; stride /= 2) {
    for (std::size_t k = stride; k < n; k += 2 * stride) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      if (config_in_collision(scene, chain, interpolate(qa, qb, t))) return false;
    }
  }
  return true;
}

namespace {

bool gripper_hits_body(const SceneBody& body, const IndexedMesh& gripper, const Aabb& gripper_box,
                       const Transform& pose) {
  if (!body.box.overlaps(gripper_box)) return false;
  const IndexedMesh& g = *body.geometry;
  if (meshes_intersect(g, gripper, pose)) return true;
  // Full containment in either direction.
  if (g.closed) {
    const Vec3 p = pose.apply(gripper.mesh.vertices().front());
    if (point_inside(g.mesh, g.bvh, p)) return true;
  }
  if (gripper.closed) {
    const Vec3 p = pose.inverse().apply(g.mesh.vertices().front());
    if (point_inside(gripper.mesh, gripper.bvh, p)) return true;
  }
  return false;
}

}  // namespace

bool gripper_pose_in_collision(const CollisionScene& scene, const IndexedMesh& gripper,
                               const Transform& pose, bool exclude_target) {
  if (gripper.mesh.empty()) return false;
  if (scene.floor()) {
    for (const Vec3& v : gripper.mesh.vertices()) {
      if (pose.apply(v).z() < 0.0) return true;
    }
  }
  const Aabb box = gripper.bvh.root_box().transformed(pose);
  for (const auto& body : scene.obstacles()) {
    if (gripper_hits_body(body, gripper, box, pose)) return true;
  }
  if (!exclude_target) {
    for (const auto& body : scene.target()) {
      if (gripper_hits_body(body, gripper, box, pose)) return true;
    }
  }
  return false;
}

}  // namespace cgmp
