#include <doctest.h>

#include "cgmp/error.hpp"
#include "cgmp/grasping.hpp"
#include "cgmp/scenario.hpp"
#include "cgmp/validation.hpp"
#include "support.hpp"

using namespace cgmp;

namespace {

constexpr Family kFamilies[] = {Family::kShelf, Family::kUnderTable, Family::kNarrowGap,
                                Family::kNarrowOpening};

std::vector<Scenario> family(Family f, std::uint64_t seed = 1) {
  return generate_family(default_family_spec(f), test::robot(), make_gripper_mesh(), std::nullopt, seed);
}

Aabb world_bounds(const PlacedMesh& m) { return m.mesh.transformed(m.pose).bounds(); }

// Gap between the two wall pieces along y, measured from the meshes.
double wall_gap(const Scenario& s) {
  double neg = -1e9, pos = 1e9;
  const TriangleMesh world = s.obstacles.front().mesh.transformed(s.obstacles.front().pose);
  for (const TriangleMesh& part : world.connected_components()) {
    const Aabb b = part.bounds();
    if (b.hi.z() < 1.0) continue;  // the table behind the wall
    if (b.hi.y() <= 0) neg = std::max(neg, b.hi.y());
    if (b.lo.y() >= 0) pos = std::min(pos, b.lo.y());
  }
  return pos - neg;
}

}  // namespace

TEST_CASE("every family has five levels with ids in the 0EL scheme") {
  for (Family f : kFamilies) {
    const auto scenarios = family(f);
    REQUIRE(scenarios.size() == 5);
    for (int level = 1; level <= 5; ++level) {
      const Scenario& s = scenarios[level - 1];
      CHECK(s.id == "0" + std::to_string(static_cast<int>(f)) + std::to_string(level));
      CHECK(s.level == level);
      CHECK(s.family == family_name(f));
      CHECK(family_from_name(s.family) == f);
      CHECK(s.q_start == default_start_configuration());
    }
  }
  CHECK_THROWS_AS(family_from_name("attic"), Error);
}

TEST_CASE("generated start configurations are collision-free and within the base region") {
  for (Family f : kFamilies) {
    for (const Scenario& s : family(f)) {
      const AssembledScenario a = assemble(s);
      CHECK_FALSE(config_in_collision(a.scene, a.chain, a.q_start));
      CHECK(a.chain.lower()[0] == s.base_x[0]);
      CHECK(a.chain.upper()[1] == s.base_y[1]);
      CHECK(validate_scenario(s).ok());
      CHECK(check_scenario(s).empty());
    }
  }
}

TEST_CASE("setback families differ only in the object position") {
  for (Family f : {Family::kShelf, Family::kUnderTable}) {
    const auto sc = family(f);
    double previous = -1e9;
    for (const Scenario& s : sc) {
      CHECK(s.obstacles == sc[0].obstacles);
      CHECK(s.target.mesh == sc[0].target.mesh);
      CHECK(s.base_x == sc[0].base_x);
      CHECK(s.base_y == sc[0].base_y);
      CHECK(s.target.pose.rotation().coeffs() == sc[0].target.pose.rotation().coeffs());
      // Setback direction: x into the shelf, y under the table.
      const Vec3 t = s.target.pose.translation();
      const double setback = f == Family::kShelf ? t.x() : t.y();
      CHECK(setback > previous);
      previous = setback;
      const Vec3 d = t - sc[0].target.pose.translation();
      CHECK((f == Family::kShelf ? d.y() : d.x()) == 0.0);
      CHECK(d.z() == 0.0);
    }
  }
}

TEST_CASE("opening families differ only in the obstacle geometry and the gap shrinks") {
  for (Family f : {Family::kNarrowGap, Family::kNarrowOpening}) {
    const auto sc = family(f);
    double previous = 1e9;
    for (const Scenario& s : sc) {
      CHECK(s.target == sc[0].target);
      CHECK(s.base_x == sc[0].base_x);
      const double gap = wall_gap(s);
      CHECK(gap == doctest::Approx(s.difficulty_parameter).epsilon(1e-9));
      CHECK(gap < previous);
      previous = gap;
    }
  }
}

TEST_CASE("targets rest on a supporting surface") {
  for (Family f : kFamilies) {
    for (const Scenario& s : family(f)) {
      const Aabb obj = world_bounds(s.target);
      const Vec3 below(obj.center().x(), obj.center().y(), obj.lo.z() - 1e-3);
      bool supported = below.z() < 0.0;
      for (const auto& o : s.obstacles) {
        const IndexedMesh m(o.mesh.transformed(o.pose));
        for (const auto& part : m.mesh.connected_components()) {
          const IndexedMesh p(part);
          supported = supported || point_inside(p.mesh, p.bvh, below);
        }
      }
      CHECK_MESSAGE(supported, s.id);
      // And does not sink into it.
      const Vec3 above(obj.center().x(), obj.center().y(), obj.lo.z() + 1e-3);
      for (const auto& o : s.obstacles) {
        const IndexedMesh m(o.mesh.transformed(o.pose));
        for (const auto& part : m.mesh.connected_components()) {
          const IndexedMesh p(part);
          CHECK_FALSE(point_inside(p.mesh, p.bvh, above));
        }
      }
    }
  }
}

TEST_CASE("generation is deterministic under the seed") {
  const auto a = family(Family::kNarrowOpening, 5), b = family(Family::kNarrowOpening, 5);
  for (int i = 0; i < 5; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("schedules must be strictly monotone in the difficulty direction") {
  FamilySpec shelf = default_family_spec(Family::kShelf);
  CHECK_NOTHROW(validate_schedule(shelf));
  shelf.schedule = {0.1, 0.2, 0.2, 0.3, 0.4};
  CHECK_THROWS_AS(validate_schedule(shelf), Error);
  FamilySpec gap = default_family_spec(Family::kNarrowGap);
  CHECK_NOTHROW(validate_schedule(gap));
  gap.schedule = {0.25, 0.3, 0.35, 0.42, 0.5};
  CHECK_THROWS_AS(validate_schedule(gap), Error);
  CHECK_THROWS_AS(generate_family(gap, test::robot(), make_gripper_mesh(), std::nullopt, 1), Error);
}

TEST_CASE("a user object is re-centred onto the resting surface") {
  const TriangleMesh odd = make_box(Vec3(0.02, 0.03, 0.04), Transform::translation(3, -2, 5));
  const auto sc = generate_family(default_family_spec(Family::kUnderTable), test::robot(),
                                  make_gripper_mesh(), odd, 1);
  const Aabb local = sc[0].target.mesh.bounds();
  CHECK(local.lo.z() == doctest::Approx(0.0).scale(1));
  CHECK(std::abs(local.center().x()) < 1e-12);
  CHECK(std::abs(local.center().y()) < 1e-12);
}

TEST_CASE("scenario files round trip") {
  test::TempDir dir("scenario");
  for (Family f : kFamilies) {
    for (const Scenario& s : family(f)) {
      const auto manifest = dir.path / ("scenario_" + s.id + ".json");
      save_scenario(s, manifest);
      const Scenario back = load_scenario(manifest);
      CHECK(back == s);
      CHECK(back.directory == dir.path);
    }
  }
}

TEST_CASE("scenario load errors") {
  test::TempDir dir("scenario_err");
  const Scenario s = family(Family::kShelf)[0];
  const auto manifest = dir.path / "scenario_011.json";
  save_scenario(s, manifest);

  std::filesystem::remove(dir.path / s.target.mesh_file);
  try {
    load_scenario(manifest);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(s.target.mesh_file) != std::string::npos);
  }

  save_scenario(s, manifest);
  std::string text;
  {
    std::ifstream in(manifest);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto pos = text.find("\"format\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "\"format\": 99");
  { std::ofstream(manifest) << text; }
  try {
    load_scenario(manifest);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFormat);
    CHECK(std::string(e.what()).find("99") != std::string::npos);
  }

  save_scenario(s, manifest);
  { std::ofstream(dir.path / s.target.mesh_file) << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n"; }
  CHECK_THROWS_AS(load_scenario(manifest), Error);
}

TEST_CASE("grasp annotations are unique per level") {
  // The opening is at least 20 cm from the object, so the gripper filter alone
  // does not separate the levels; the annotator's per-scenario seed does.
  const auto sc = family(Family::kNarrowGap);
  SamplerParams p;
  p.raw_budget = 3000;
  p.output_size = 50;
  std::vector<std::vector<Transform>> poses;
  for (const Scenario& s : sc) {
    const AssembledScenario a = assemble(s);
    const std::uint64_t seed = 1 * 1000 + std::stoull(s.id);
    const GraspSet g = generate_grasp_set({a.object, a.scene, a.gripper, "box", s.id}, p, seed);
    poses.emplace_back();
    for (const auto& x : g.grasps) poses.back().push_back(x.pose);
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    for (std::size_t j = i + 1; j < poses.size(); ++j) {
      bool identical = poses[i].size() == poses[j].size();
      for (std::size_t k = 0; identical && k < poses[i].size(); ++k) {
        identical = poses[i][k].translation() == poses[j][k].translation();
      }
      CHECK_FALSE(identical);
    }
  }
}
