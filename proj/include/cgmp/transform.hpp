#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cgmp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Quat = Eigen::Quaterniond;
using Twist = Eigen::Matrix<double, 6, 1>;

// Rigid transform stored as unit quaternion + translation. Every constructor
// and composition re-normalizes the quaternion.
class Transform {
 public:
  Transform() : rotation_(Quat::Identity()), translation_(Vec3::Zero()) {}
  Transform(const Quat& rotation, const Vec3& translation);
  Transform(const Mat3& rotation, const Vec3& translation);

  static Transform identity() { return Transform(); }
  static Transform translation(double x, double y, double z);
  static Transform translation(const Vec3& t);
  static Transform rotation(const Vec3& axis, double angle);
  static Transform rot_x(double angle) { return rotation(Vec3::UnitX(), angle); }
  static Transform rot_y(double angle) { return rotation(Vec3::UnitY(), angle); }
  static Transform rot_z(double angle) { return rotation(Vec3::UnitZ(), angle); }

  const Quat& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat3 rotation_matrix() const { return rotation_.toRotationMatrix(); }
  Mat4 matrix() const;

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

  // (*this) ∘ other: applies `other` first.
  Transform operator*(const Transform& other) const;
  Transform inverse() const;

  // Exact equality of the stored quaternion coefficients and translation.
  friend bool operator==(const Transform& a, const Transform& b) {
    return a.rotation_.coeffs() == b.rotation_.coeffs() && a.translation_ == b.translation_;
  }

 private:
  Quat rotation_;
  Vec3 translation_;
};

inline Transform compose(const Transform& a, const Transform& b) { return a * b; }
inline Transform invert(const Transform& t) { return t.inverse(); }

// Angle of a rotation in [0, pi], via atan2 so it stays accurate near 0 and pi.
double rotation_angle(const Quat& q);

// Relative rotation angle between the orientations of a and b.
double rotation_distance(const Transform& a, const Transform& b);

// Weighted task-space distance: 1 mm of translation counts as much as 1 degree
// of rotation. Unitless.
double pose_distance(const Transform& a, const Transform& b);

// Rotation term of pose_distance: the relative angle in degrees.
double pose_distance_rotation_term(const Transform& a, const Transform& b);

// Only the translation term of pose_distance; a lower bound on it.
inline double pose_distance_translation_term(const Transform& a, const Transform& b) {
  return 1000.0 * (a.translation() - b.translation()).norm();
}

// Rotation vector (axis * angle) of q, angle in [0, pi].
Vec3 rotation_log(const Quat& q);

// Error twist that moves `from` toward `to`, expressed in the world frame:
// (translation difference in m, rotation vector of R_to * R_from^T in rad).
Twist pose_error(const Transform& from, const Transform& to);

}  // namespace cgmp
