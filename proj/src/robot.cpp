#include "cgmp/robot.hpp"

#include <algorithm>
#include <cmath>

#include "cgmp/error.hpp"
#include "json_util.hpp"

namespace cgmp {

KinematicChain::KinematicChain(std::string name, std::vector<JointSpec> joints,
                               std::vector<std::vector<CollisionSphere>> link_spheres,
                               Transform tool)
    : name_(std::move(name)),
      joints_(std::move(joints)),
      link_spheres_(std::move(link_spheres)),
      tool_(tool) {
  if (joints_.size() != kDof) {
    throw Error(ErrorKind::kFormat,
                "chain must have exactly 9 joints, got " + std::to_string(joints_.size()));
  }
  link_spheres_.resize(kDof);
  for (int i = 0; i < kDof; ++i) {
    JointSpec& j = joints_[i];
    const std::string where = "joint " + std::to_string(i) + " (" + j.name + ")";
    const bool prismatic = j.kind == JointKind::kPrismatic;
    if ((i < kBaseDof) != prismatic) {
      throw Error(ErrorKind::kFormat,
                  where + ": joints 0-1 must be prismatic and joints 2-8 revolute");
    }
    if (j.axis.norm() < 1e-12) throw Error(ErrorKind::kFormat, where + ": zero axis");
    j.axis.normalize();
    if (!(j.lower < j.upper)) throw Error(ErrorKind::kFormat, where + ": lower >= upper");
    for (const auto& s : link_spheres_[i]) {
      if (!(s.radius > 0.0)) throw Error(ErrorKind::kFormat, where + ": non-positive radius");
    }
  }
  // Base moves along world x then world y with fixed orientation.
  const Vec3 expected[2] = {Vec3::UnitX(), Vec3::UnitY()};
  for (int i = 0; i < kBaseDof; ++i) {
    const Vec3 world_axis = joints_[i].origin.rotate(joints_[i].axis);
    if ((world_axis - expected[i]).norm() > 1e-9 ||
        rotation_angle(joints_[i].origin.rotation()) > 1e-9) {
      throw Error(ErrorKind::kFormat, "base joint " + std::to_string(i) +
                                          " must translate along world " + (i ? "y" : "x") +
                                          " with identity origin rotation");
    }
  }
}

std::size_t KinematicChain::sphere_count() const {
  std::size_t n = 0;
  for (const auto& s : link_spheres_) n += s.size();
  return n;
}

Configuration KinematicChain::lower() const {
  Configuration q;
  for (int i = 0; i < kDof; ++i) q[i] = joints_[i].lower;
  return q;
}

Configuration KinematicChain::upper() const {
  Configuration q;
  for (int i = 0; i < kDof; ++i) q[i] = joints_[i].upper;
  return q;
}

KinematicChain KinematicChain::with_base_limits(double x_lo, double x_hi, double y_lo,
                                                double y_hi) const {
  KinematicChain c = *this;
  c.joints_[0].lower = x_lo;
  c.joints_[0].upper = x_hi;
  c.joints_[1].lower = y_lo;
  c.joints_[1].upper = y_hi;
  for (int i = 0; i < kBaseDof; ++i) {
    if (!(c.joints_[i].lower < c.joints_[i].upper)) {
      throw Error(ErrorKind::kInvalidArgument, "base limits must satisfy lo < hi");
    }
  }
  return c;
}

KinematicChain KinematicChain::with_inflated_spheres(double delta) const {
  KinematicChain c = *this;
  for (auto& link : c.link_spheres_) {
    for (auto& s : link) s.radius = std::max(0.0, s.radius + delta);
  }
  return c;
}

bool operator==(const KinematicChain& a, const KinematicChain& b) {
  if (a.name_ != b.name_ || !(a.tool_ == b.tool_) || a.joints_.size() != b.joints_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.joints_.size(); ++i) {
    const JointSpec& x = a.joints_[i];
    const JointSpec& y = b.joints_[i];
    if (x.name != y.name || x.kind != y.kind || x.axis != y.axis || !(x.origin == y.origin) ||
        x.lower != y.lower || x.upper != y.upper) {
      return false;
    }
    const auto& sx = a.link_spheres_[i];
    const auto& sy = b.link_spheres_[i];
    if (sx.size() != sy.size()) return false;
    for (std::size_t k = 0; k < sx.size(); ++k) {
      if (sx[k].center != sy[k].center || sx[k].radius != sy[k].radius) return false;
    }
  }
  return true;
}

namespace {

Transform joint_motion(const JointSpec& j, double q) {
  if (j.kind == JointKind::kPrismatic) return Transform::translation(j.axis * q);
  return Transform::rotation(j.axis, q);
}

}  // namespace

FkResult forward_kinematics(const KinematicChain& chain, const Configuration& q) {
  FkResult fk;
  Transform frame;
  for (int i = 0; i < kDof; ++i) {
    const JointSpec& j = chain.joint(i);
    frame = frame * j.origin * joint_motion(j, q[i]);
    fk.links[i] = frame;
  }
  fk.gripper = frame * chain.tool();
  return fk;
}

Transform gripper_pose(const KinematicChain& chain, const Configuration& q) {
  return forward_kinematics(chain, q).gripper;
}

Jacobian jacobian(const KinematicChain& chain, const FkResult& fk) {
  Jacobian jac;
  const Vec3& p_ee = fk.gripper.translation();
  for (int i = 0; i < kDof; ++i) {
    const JointSpec& j = chain.joint(i);
    const Vec3 axis = fk.links[i].rotate(j.axis);
    if (j.kind == JointKind::kPrismatic) {
      jac.col(i) << axis, Vec3::Zero();
    } else {
      jac.col(i) << axis.cross(p_ee - fk.links[i].translation()), axis;
    }
  }
  return jac;
}

Jacobian jacobian(const KinematicChain& chain, const Configuration& q) {
  return jacobian(chain, forward_kinematics(chain, q));
}

bool within_limits(const KinematicChain& chain, const Configuration& q) {
  for (int i = 0; i < kDof; ++i) {
    const JointSpec& j = chain.joint(i);
    if (!(q[i] >= j.lower && q[i] <= j.upper)) return false;
  }
  return true;
}

Configuration clamp_to_limits(const KinematicChain& chain, const Configuration& q) {
  return q.cwiseMax(chain.lower()).cwiseMin(chain.upper());
}

Configuration interpolate(const Configuration& qa, const Configuration& qb, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "interpolate: t must lie in [0, 1]");
  }
  if (t == 1.0) return qb;
  return qa + t * (qb - qa);
}

KinematicChain load_chain(const std::filesystem::path& path) {
  using detail::field;
  const auto j = detail::read_json(path);
  const std::string src = path.string();
  detail::check_format(j, src);
  std::vector<JointSpec> joints;
  std::vector<std::vector<CollisionSphere>> spheres;
  const auto& arr = field(j, "joints", src);
  if (!arr.is_array()) throw Error(ErrorKind::kFormat, src + ": 'joints' must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& jj = arr[i];
    const std::string where = src + ": joints[" + std::to_string(i) + "]";
    JointSpec spec;
    spec.name = jj.value("name", "joint" + std::to_string(i));
    const std::string kind = field(jj, "kind", where).get<std::string>();
    if (kind == "prismatic") {
      spec.kind = JointKind::kPrismatic;
    } else if (kind == "revolute") {
      spec.kind = JointKind::kRevolute;
    } else {
      throw Error(ErrorKind::kFormat, where + ": unknown joint kind '" + kind + "'");
    }
    spec.axis = detail::vec3_from(field(jj, "axis", where), where + ".axis");
    spec.origin = detail::transform_from(field(jj, "origin", where), where + ".origin");
    const auto lim = detail::vec_from<2>(field(jj, "limits", where), where + ".limits");
    spec.lower = lim[0];
    spec.upper = lim[1];
    std::vector<CollisionSphere> link;
    if (jj.contains("spheres")) {
      for (const auto& s : jj.at("spheres")) {
        link.push_back({detail::vec3_from(field(s, "center", where), where + ".spheres"),
                        detail::number(field(s, "radius", where), where + ".spheres")});
      }
    }
    joints.push_back(spec);
    spheres.push_back(std::move(link));
  }
  try {
    return KinematicChain(j.value("name", "robot"), std::move(joints), std::move(spheres),
                          detail::transform_from(field(j, "tool", src), src + ".tool"));
  } catch (const Error& e) {
    throw Error(e.kind(), src + ": " + e.what());
  }
}

void save_chain(const KinematicChain& chain, const std::filesystem::path& path) {
  using detail::json;
  json joints = json::array();
  for (int i = 0; i < kDof; ++i) {
    const JointSpec& j = chain.joint(i);
    json spheres = json::array();
    for (const auto& s : chain.spheres(i)) {
      spheres.push_back({{"center", detail::to_json(s.center)}, {"radius", s.radius}});
    }
    joints.push_back({{"name", j.name},
                      {"kind", j.kind == JointKind::kPrismatic ? "prismatic" : "revolute"},
                      {"axis", detail::to_json(j.axis)},
                      {"origin", detail::to_json(j.origin)},
                      {"limits", {j.lower, j.upper}},
                      {"spheres", spheres}});
  }
  const json doc{{"format", detail::kFormatVersion},
                 {"name", chain.name()},
                 {"joints", joints},
                 {"tool", detail::to_json(chain.tool())}};
  detail::write_json(doc, path);
}

}  // namespace cgmp
