#include "cgmp/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "cgmp/error.hpp"
#include "cgmp/random.hpp"
#include "json_util.hpp"

namespace cgmp {

bool operator==(const Scenario& a, const Scenario& b) {
  return a.id == b.id && a.family == b.family && a.level == b.level &&
         a.difficulty_parameter == b.difficulty_parameter && a.robot_file == b.robot_file &&
         a.gripper_file == b.gripper_file && a.robot == b.robot && a.gripper == b.gripper &&
         a.base_x == b.base_x && a.base_y == b.base_y && a.q_start == b.q_start &&
         a.floor == b.floor && a.obstacles == b.obstacles && a.target == b.target &&
         a.grasps_file == b.grasps_file && a.ik_file == b.ik_file;
}

std::filesystem::path resolve(const Scenario& s, const std::string& relative) {
  return s.directory / relative;
}

namespace {

using detail::json;

json placed_to_json(const PlacedMesh& m) {
  return {{"name", m.name},
          {"mesh", m.mesh_file},
          {"position", detail::to_json(m.pose.translation())},
          {"quaternion", detail::to_json(m.pose.rotation())}};
}

PlacedMesh placed_from_json(const json& j, const std::filesystem::path& dir,
                            const std::string& where) {
  PlacedMesh m;
  m.name = detail::field(j, "name", where).get<std::string>();
  m.mesh_file = detail::field(j, "mesh", where).get<std::string>();
  m.pose = detail::transform_from(j, where);
  m.mesh = load_obj(dir / m.mesh_file);
  return m;
}

std::array<double, 2> range_from(const json& j, const std::string& where) {
  const auto v = detail::vec_from<2>(j, where);
  if (!(v[0] < v[1])) throw Error(ErrorKind::kFormat, where + ": range must satisfy lo < hi");
  return {v[0], v[1]};
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& manifest) {
  using detail::field;
  const json doc = detail::read_json(manifest);
  const std::string src = manifest.string();
  detail::check_format(doc, src);
  Scenario s;
  s.directory = manifest.parent_path();
  try {
    s.id = field(doc, "id", src).get<std::string>();
    s.family = field(doc, "family", src).get<std::string>();
    s.level = field(doc, "level", src).get<int>();
    s.difficulty_parameter = detail::number(field(doc, "difficulty_parameter", src), src);
    s.robot_file = field(doc, "robot", src).get<std::string>();
    s.gripper_file = field(doc, "gripper", src).get<std::string>();
    const json& limits = field(doc, "base_limits", src);
    s.base_x = range_from(field(limits, "x", src), src + ": base_limits.x");
    s.base_y = range_from(field(limits, "y", src), src + ": base_limits.y");
    s.q_start = detail::config_from(field(doc, "q_start", src), src + ": q_start");
    s.floor = doc.value("floor", true);
    const json& obstacles = field(doc, "obstacles", src);
    if (!obstacles.is_array()) {
      throw Error(ErrorKind::kFormat, src + ": 'obstacles' must be an array");
    }
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      s.obstacles.push_back(placed_from_json(obstacles[i], s.directory,
                                             src + ": obstacles[" + std::to_string(i) + "]"));
    }
    s.target = placed_from_json(field(doc, "target", src), s.directory, src + ": target");
    s.grasps_file = doc.value("grasps", "");
    s.ik_file = doc.value("ik", "");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, src + ": " + e.what());
  }
  s.robot = load_chain(resolve(s, s.robot_file));
  s.gripper = load_obj(resolve(s, s.gripper_file));
  return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& manifest) {
  const std::filesystem::path dir = manifest.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  json obstacles = json::array();
  for (const auto& o : s.obstacles) {
    obstacles.push_back(placed_to_json(o));
    save_obj(o.mesh, dir / o.mesh_file);
  }
  save_obj(s.target.mesh, dir / s.target.mesh_file);
  save_chain(s.robot, dir / s.robot_file);
  save_obj(s.gripper, dir / s.gripper_file);
  const json doc = {{"format", detail::kFormatVersion},
                    {"id", s.id},
                    {"family", s.family},
                    {"level", s.level},
                    {"difficulty_parameter", s.difficulty_parameter},
                    {"robot", s.robot_file},
                    {"gripper", s.gripper_file},
                    {"base_limits", {{"x", s.base_x}, {"y", s.base_y}}},
                    {"q_start", detail::to_json(s.q_start)},
                    {"floor", s.floor},
                    {"obstacles", obstacles},
                    {"target", placed_to_json(s.target)},
                    {"grasps", s.grasps_file},
                    {"ik", s.ik_file}};
  detail::write_json(doc, manifest);
}

AssembledScenario assemble(const Scenario& s) {
  AssembledScenario a{
      s.robot.with_base_limits(s.base_x[0], s.base_x[1], s.base_y[0], s.base_y[1]),
      CollisionScene(),
      IndexedMesh(s.gripper),
      IndexedMesh(s.target.mesh.transformed(s.target.pose)),
      s.q_start};
  a.scene.set_floor(s.floor);
  for (const auto& o : s.obstacles) a.scene.add_obstacle(o.name, o.mesh.transformed(o.pose));
  a.scene.set_target(s.target.name, a.object.mesh);
  return a;
}

std::vector<std::string> check_scenario(const Scenario& s) {
  std::vector<std::string> problems;
  if (s.level < 1 || s.level > 5) problems.push_back("level must lie in 1..5");
  const auto& jx = s.robot.joint(0);
  const auto& jy = s.robot.joint(1);
  if (!(s.base_x[0] < s.base_x[1]) || s.base_x[0] < jx.lower || s.base_x[1] > jx.upper) {
    problems.push_back("base x-range is empty or exceeds the robot's prismatic limits");
  }
  if (!(s.base_y[0] < s.base_y[1]) || s.base_y[0] < jy.lower || s.base_y[1] > jy.upper) {
    problems.push_back("base y-range is empty or exceeds the robot's prismatic limits");
  }
  const AssembledScenario a = assemble(s);
  if (!within_limits(a.chain, s.q_start)) {
    problems.push_back("q_start violates joint or base limits");
  } else if (config_in_collision(a.scene, a.chain, s.q_start)) {
    problems.push_back("q_start is in collision");
  }
  // Resting contact: the object's lowest point lies on the floor or on the
  // top face of an obstacle underneath it.
  const Aabb box = a.object.mesh.bounds();
  const double z = box.lo.z();
  const Vec3 foot(box.center().x(), box.center().y(), z);
  bool supported = s.floor && std::abs(z) <= 1e-6;
  for (const auto& body : a.scene.obstacles()) {
    const Aabb& b = body.box;
    if (std::abs(b.hi.z() - z) <= 1e-6 && foot.x() >= b.lo.x() && foot.x() <= b.hi.x() &&
        foot.y() >= b.lo.y() && foot.y() <= b.hi.y()) {
      supported = true;
    }
  }
  if (!supported) problems.push_back("target object does not rest on a supporting surface");
  return problems;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::kShelf: return "shelf";
    case Family::kUnderTable: return "under-table";
    case Family::kNarrowGap: return "narrow-gap";
    case Family::kNarrowOpening: return "narrow-opening";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  for (Family f : {Family::kShelf, Family::kUnderTable, Family::kNarrowGap, Family::kNarrowOpening}) {
    if (name == family_name(f) || name == std::to_string(static_cast<int>(f)) ||
        name == "0" + std::to_string(static_cast<int>(f))) {
      return f;
    }
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown scenario family '" + name + "'");
}

FamilySpec default_family_spec(Family f) {
  switch (f) {
    case Family::kShelf:
    case Family::kUnderTable:
      return {f, {0.1, 0.2, 0.3, 0.4, 0.5}};
    case Family::kNarrowGap:
      return {f, {0.5, 0.42, 0.35, 0.3, 0.25}};
    case Family::kNarrowOpening:
      return {f, {0.8, 0.7, 0.6, 0.55, 0.5}};
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown scenario family");
}

void validate_schedule(const FamilySpec& spec) {
  const bool increasing = spec.family == Family::kShelf || spec.family == Family::kUnderTable;
  for (std::size_t i = 0; i < spec.schedule.size(); ++i) {
    if (!(spec.schedule[i] > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "difficulty schedule values must be positive");
    }
    if (i == 0) continue;
    const double prev = spec.schedule[i - 1], cur = spec.schedule[i];
    if (increasing ? !(cur > prev) : !(cur < prev)) {
      throw Error(ErrorKind::kInvalidArgument,
                  std::string("difficulty schedule for ") + family_name(spec.family) +
                      (increasing ? " must be strictly increasing (setbacks)"
                                  : " must be strictly decreasing (opening widths)"));
    }
  }
}

Configuration default_start_configuration() {
  constexpr double pi = std::numbers::pi;
  Configuration q;
  q << 0.0, 0.0, 0.0, -pi / 4, 0.0, -3 * pi / 4, 0.0, pi / 2, pi / 4;
  return q;
}

namespace {

TriangleMesh box_between(const Vec3& lo, const Vec3& hi) {
  return make_box(0.5 * (hi - lo), Transform::translation(0.5 * (lo + hi)));
}

TriangleMesh merge_all(const std::vector<TriangleMesh>& parts) {
  TriangleMesh out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = out.merged(parts[i]);
  return out;
}

// Footprint centred on the origin, lowest point at z = 0.
TriangleMesh rest_on_origin(const TriangleMesh& m) {
  const Aabb b = m.bounds();
  return m.transformed(Transform::translation(-b.center().x(), -b.center().y(), -b.lo.z()));
}

// Room layouts. The table and board heights were tuned so the levels get
// harder in order.
constexpr double kShelfFront = 0.75;
constexpr double kShelfDepth = 0.6;
constexpr double kCabinetTop = 0.45;
constexpr double kShelfBoard = 0.72;
constexpr double kTableEdge = 0.5;      // under-table: near edge, y
constexpr double kTableTop = 0.45;      // under-table: underside of the top
constexpr double kGapWallX = 0.7;
constexpr double kDoorWallX = 1.0;

TriangleMesh shelf_obstacles() {
  const double x0 = kShelfFront, x1 = kShelfFront + kShelfDepth, hw = 0.5, t = 0.02;
  return merge_all({
      box_between({x0, -hw, 0.0}, {x1, hw, kCabinetTop}),                   // cabinet
      box_between({x0, -hw - t, kCabinetTop}, {x1, -hw, 1.1}),              // side walls
      box_between({x0, hw, kCabinetTop}, {x1, hw + t, 1.1}),
      box_between({x0, -hw - t, kShelfBoard}, {x1, hw + t, kShelfBoard + t}),  // board
      box_between({x1, -hw - t, 0.0}, {x1 + t, hw + t, 1.1}),               // back
  });
}

TriangleMesh table_obstacles() {
  const double x = 0.6, y0 = kTableEdge, y1 = kTableEdge + 1.0, leg = 0.04;
  std::vector<TriangleMesh> parts{box_between({-x, y0, kTableTop}, {x, y1, kTableTop + 0.04})};
  for (double lx : {-x, x - leg}) {
    for (double ly : {y0, y1 - leg}) {
      parts.push_back(box_between({lx, ly, 0.0}, {lx + leg, ly + leg, kTableTop}));
    }
  }
  return merge_all(parts);
}

TriangleMesh gap_obstacles(double width) {
  const double x0 = kGapWallX, x1 = kGapWallX + 0.05, h = 1.2, span = 1.2;
  return merge_all({
      box_between({x0, -span, 0.0}, {x1, -0.5 * width, h}),
      box_between({x0, 0.5 * width, 0.0}, {x1, span, h}),
      box_between({0.85, -0.3, 0.0}, {1.25, 0.3, 0.4}),  // table behind the wall
  });
}

TriangleMesh opening_obstacles(double width) {
  const double x0 = kDoorWallX, x1 = kDoorWallX + 0.1, h = 1.5, span = 2.0;
  return merge_all({
      box_between({x0, -span, 0.0}, {x1, -0.5 * width, h}),
      box_between({x0, 0.5 * width, 0.0}, {x1, span, h}),
      box_between({1.8, -0.3, 0.0}, {2.2, 0.3, 0.45}),  // table in the second room
  });
}

char id_digit(int v) { return static_cast<char>('0' + v); }

}  // namespace

TriangleMesh default_family_object(Family f) {
  switch (f) {
    case Family::kShelf:  // screwdriver-like rod lying along y
      return rest_on_origin(
          make_cylinder(0.015, 0.2, 24).transformed(Transform::rot_x(std::numbers::pi / 2)));
    case Family::kUnderTable:
      return rest_on_origin(make_icosphere(0.035, 2));
    case Family::kNarrowGap:
      return rest_on_origin(make_box(Vec3(0.025, 0.025, 0.04)));
    case Family::kNarrowOpening:
      return rest_on_origin(make_curved_prism(0.12, 1.4, 0.03, 0.03, 16));
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown scenario family");
}

std::vector<Scenario> generate_family(const FamilySpec& spec, const KinematicChain& robot,
                                      const TriangleMesh& gripper,
                                      const std::optional<TriangleMesh>& object,
                                      std::uint64_t seed) {
  validate_schedule(spec);
  const int env = static_cast<int>(spec.family);
  const std::string prefix = std::string("env0") + id_digit(env);
  const TriangleMesh target_mesh = object ? rest_on_origin(*object) : default_family_object(spec.family);
  // One yaw per family: levels differ only in the difficulty parameter.
  Rng rng(mix_seed({seed, static_cast<std::uint64_t>(env)}));
  const double yaw = (uniform01(rng) - 0.5) * (std::numbers::pi / 6);

  std::vector<Scenario> out;
  for (int level = 1; level <= 5; ++level) {
    const double p = spec.schedule[level - 1];
    Scenario s;
    s.id = std::string("0") + id_digit(env) + id_digit(level);
    s.family = family_name(spec.family);
    s.level = level;
    s.difficulty_parameter = p;
    s.robot = robot;
    s.gripper = gripper;
    s.q_start = default_start_configuration();
    s.target.mesh_file = prefix + "_object.obj";
    s.target.mesh = target_mesh;
    s.grasps_file = "scenario_" + s.id + "_grasps.json";
    s.ik_file = "scenario_" + s.id + "_ik.json";
    const std::string level_obstacles = "scenario_" + s.id + "_obstacles.obj";
    const Transform spin = Transform::rot_z(yaw);
    switch (spec.family) {
      case Family::kShelf:
        s.base_x = {-0.6, 0.5};
        s.base_y = {-0.6, 0.6};
        s.obstacles.push_back({"shelf", prefix + "_obstacles.obj", shelf_obstacles(), Transform()});
        s.target.name = "screwdriver";
        s.target.pose = Transform::translation(kShelfFront + p, 0.0, kCabinetTop) * spin;
        break;
      case Family::kUnderTable:
        s.base_x = {-0.8, 0.8};
        s.base_y = {-0.8, kTableEdge - 0.22};
        s.obstacles.push_back({"table", prefix + "_obstacles.obj", table_obstacles(), Transform()});
        s.target.name = "ball";
        s.target.pose = Transform::translation(0.0, kTableEdge + p, 0.0) * spin;
        break;
      case Family::kNarrowGap:
        s.base_x = {-0.6, kGapWallX - 0.25};
        s.base_y = {-0.6, 0.6};
        s.obstacles.push_back({"wall", level_obstacles, gap_obstacles(p), Transform()});
        s.target.name = "box";
        s.target.pose = Transform::translation(0.95, 0.0, 0.4) * spin;
        break;
      case Family::kNarrowOpening:
        s.base_x = {-0.5, 2.5};
        s.base_y = {-1.0, 1.0};
        s.obstacles.push_back({"wall", level_obstacles, opening_obstacles(p), Transform()});
        s.target.name = "banana";
        s.target.pose = Transform::translation(2.0, 0.0, 0.45) * spin;
        break;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cgmp
