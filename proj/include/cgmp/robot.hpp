#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "cgmp/transform.hpp"

namespace cgmp {

inline constexpr int kDof = 9;
inline constexpr int kBaseDof = 2;

using Configuration = Eigen::Matrix<double, kDof, 1>;
using Jacobian = Eigen::Matrix<double, 6, kDof>;

enum class JointKind { kPrismatic, kRevolute };

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::kRevolute;
  Vec3 axis = Vec3::UnitZ();  // in the joint frame
  Transform origin;           // parent link frame -> joint frame
  double lower = 0.0;         // m or rad
  double upper = 0.0;
};

struct CollisionSphere {
  Vec3 center;  // link frame
  double radius = 0.0;
};

// Mobile manipulator: joints 0-1 prismatic along world x and y (the base,
// orientation fixed), joints 2-8 revolute. The gripper frame has its y-axis
// along the finger-closing direction and its z-axis along the approach.
class KinematicChain {
 public:
  KinematicChain() = default;
  KinematicChain(std::string name, std::vector<JointSpec> joints,
                 std::vector<std::vector<CollisionSphere>> link_spheres, Transform tool);

  const std::string& name() const { return name_; }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const JointSpec& joint(int i) const { return joints_[i]; }
  // Spheres attached to the frame of link i (the frame after joint i).
  const std::vector<CollisionSphere>& spheres(int link) const { return link_spheres_[link]; }
  const std::vector<std::vector<CollisionSphere>>& all_spheres() const { return link_spheres_; }
  std::size_t sphere_count() const;
  const Transform& tool() const { return tool_; }

  Configuration lower() const;
  Configuration upper() const;

  // Copy with the base prismatic limits replaced (per-scenario base region).
  KinematicChain with_base_limits(double x_lo, double x_hi, double y_lo, double y_hi) const;
  // Copy with every sphere radius changed by `delta` (clamped at zero).
  KinematicChain with_inflated_spheres(double delta) const;

  friend bool operator==(const KinematicChain& a, const KinematicChain& b);

 private:
  std::string name_;
  std::vector<JointSpec> joints_;
  std::vector<std::vector<CollisionSphere>> link_spheres_;
  Transform tool_;
};

struct FkResult {
  std::array<Transform, kDof> links;
  Transform gripper;
};

FkResult forward_kinematics(const KinematicChain& chain, const Configuration& q);
Transform gripper_pose(const KinematicChain& chain, const Configuration& q);

// Geometric Jacobian of the gripper frame in world coordinates. Rows 0-2 are
// linear velocity, rows 3-5 angular velocity.
Jacobian jacobian(const KinematicChain& chain, const Configuration& q);
Jacobian jacobian(const KinematicChain& chain, const FkResult& fk);

// Closed interval check on every joint.
bool within_limits(const KinematicChain& chain, const Configuration& q);
Configuration clamp_to_limits(const KinematicChain& chain, const Configuration& q);

// Componentwise linear blend; throws for t outside [0, 1].
Configuration interpolate(const Configuration& qa, const Configuration& qb, double t);

// Robot description file (JSON, `format: 1`).
KinematicChain load_chain(const std::filesystem::path& path);
void save_chain(const KinematicChain& chain, const std::filesystem::path& path);

}  // namespace cgmp
