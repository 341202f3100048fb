#include "cgmp/transform.hpp"

#include <cmath>
#include <numbers>

namespace cgmp {

Transform::Transform(const Quat& rotation, const Vec3& translation)
    : rotation_(rotation.normalized()), translation_(translation) {}

Transform::Transform(const Mat3& rotation, const Vec3& translation)
    : rotation_(Quat(rotation).normalized()), translation_(translation) {}

Transform Transform::translation(double x, double y, double z) {
  return Transform(Quat::Identity(), Vec3(x, y, z));
}

Transform Transform::translation(const Vec3& t) { return Transform(Quat::Identity(), t); }

Transform Transform::rotation(const Vec3& axis, double angle) {
  return Transform(Quat(Eigen::AngleAxisd(angle, axis.normalized())), Vec3::Zero());
}

Mat4 Transform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Transform Transform::operator*(const Transform& other) const {
  return Transform(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
}

Transform Transform::inverse() const {
  const Quat inv = rotation_.conjugate();
  return Transform(inv, -(inv * translation_));
}

double rotation_angle(const Quat& q) {
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

double rotation_distance(const Transform& a, const Transform& b) {
  return rotation_angle(a.rotation().conjugate() * b.rotation());
}

double pose_distance_rotation_term(const Transform& a, const Transform& b) {
  constexpr double kDegPerRad = 180.0 / std::numbers::pi;
  return kDegPerRad * rotation_distance(a, b);
}

double pose_distance(const Transform& a, const Transform& b) {
  return pose_distance_translation_term(a, b) + pose_distance_rotation_term(a, b);
}

Vec3 rotation_log(const Quat& q) {
  Quat c = q.normalized();
  if (c.w() < 0.0) c.coeffs() = -c.coeffs();
  const double s = c.vec().norm();
  if (s < 1e-12) return 2.0 * c.vec();  // first-order near identity
  const double angle = 2.0 * std::atan2(s, c.w());
  return c.vec() * (angle / s);
}

Twist pose_error(const Transform& from, const Transform& to) {
  Twist e;
  e.head<3>() = to.translation() - from.translation();
  e.tail<3>() = rotation_log(to.rotation() * from.rotation().conjugate());
  return e;
}

}  // namespace cgmp
