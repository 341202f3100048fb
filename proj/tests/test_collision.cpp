#include <doctest.h>

#include "cgmp/collision.hpp"
#include "cgmp/error.hpp"
#include "cgmp/grasping.hpp"
#include "support.hpp"

using namespace cgmp;
using test::random_config;
using test::robot;

namespace {

struct Box {
  Transform pose;
  Vec3 half;
};

// Sphere against a solid oriented box: clamp the centre into the box frame.
bool sphere_hits_box(const Box& b, const Vec3& c, double r) {
  const Vec3 local = b.pose.inverse().apply(c);
  const Vec3 nearest = local.cwiseMax(-b.half).cwiseMin(b.half);
  return (local - nearest).norm() < r;
}

// Exhaustive oracle: every sphere of every link against every box and the floor.
bool brute_in_collision(const std::vector<Box>& boxes, const KinematicChain& chain,
                        const Configuration& q) {
  for (int i = 0; i < kDof; ++i) {
    if (q[i] < chain.joint(i).lower || q[i] > chain.joint(i).upper) return true;
  }
  const FkResult fk = forward_kinematics(chain, q);
  for (int link = 0; link < kDof; ++link) {
    for (const auto& s : chain.spheres(link)) {
      const Vec3 c = fk.links[link].apply(s.center);
      if (c.z() < s.radius) return true;
      for (const Box& b : boxes) {
        if (sphere_hits_box(b, c, s.radius)) return true;
      }
    }
  }
  return false;
}

KinematicChain small_base() { return robot().with_base_limits(-2, 2, -2, 2); }

std::vector<Box> random_boxes(Rng& rng, int n) {
  std::vector<Box> boxes;
  for (int i = 0; i < n; ++i) {
    Transform pose = test::random_transform(rng, 1.0);
    pose = Transform::translation(0, 0, 0.7) * pose;
    boxes.push_back({pose, Vec3(test::uniform(rng, 0.02, 0.3), test::uniform(rng, 0.02, 0.3),
                                test::uniform(rng, 0.02, 0.3))});
  }
  return boxes;
}

CollisionScene scene_of(const std::vector<Box>& boxes) {
  CollisionScene scene;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    scene.add_obstacle("box" + std::to_string(i), make_box(boxes[i].half, boxes[i].pose));
  }
  return scene;
}

// A configuration with the arm folded up above the base.
Configuration upright(double x, double y) {
  Configuration q = Configuration::Zero();
  q << x, y, 0, -0.3, 0, -2.0, 0, 1.8, 0.8;
  return q;
}

}  // namespace

TEST_CASE("empty scene: in-limit configurations are free") {
  CollisionScene scene;
  scene.set_floor(false);
  Rng rng(31);
  for (int i = 0; i < 200; ++i) CHECK_FALSE(config_in_collision(scene, robot(), random_config(rng, robot())));
  Configuration q = upright(0, 0);
  q[4] = robot().joint(4).upper + 0.01;
  CHECK(config_in_collision(scene, robot(), q));
}

TEST_CASE("a box enclosing the robot collides") {
  CollisionScene scene;
  scene.add_obstacle("crate", make_box(Vec3(3, 3, 3), Transform::translation(0, 0, 1)));
  CHECK(config_in_collision(scene, robot(), upright(0, 0)));
}

TEST_CASE("config_in_collision equals the brute-force sphere check on random scenes") {
  Rng rng(32);
  const KinematicChain chain = small_base();
  int colliding = 0, free = 0;
  for (int s = 0; s < 40; ++s) {
    const auto boxes = random_boxes(rng, 1 + s % 5);
    const CollisionScene scene = scene_of(boxes);
    for (int i = 0; i < 50; ++i) {
      Configuration q = random_config(rng, chain);
      if (i % 10 == 0) q[3] = chain.joint(3).upper + 0.1;
      const bool want = brute_in_collision(boxes, chain, q);
      CHECK(config_in_collision(scene, chain, q) == want);
      (want ? colliding : free)++;
    }
  }
  CHECK(colliding > 100);
  CHECK(free > 100);
}

TEST_CASE("edge check: thin wall at the midpoint") {
  const Configuration qa = upright(-1.5, 0), qb = upright(1.5, 0);
  CollisionScene scene;
  scene.add_obstacle("wall", make_box(Vec3(0.005, 1.0, 0.3), Transform::translation(0, 0, 0.5)));
  REQUIRE_FALSE(config_in_collision(scene, robot(), qa));
  REQUIRE_FALSE(config_in_collision(scene, robot(), qb));
  REQUIRE(config_in_collision(scene, robot(), interpolate(qa, qb, 0.5)));
  CHECK_FALSE(edge_collision_free(scene, robot(), qa, qb, 0.05));
  // One segment: only the free endpoints are sampled.
  CHECK(edge_segments(qa, qb, 3.0) == 1);
  CHECK(edge_collision_free(scene, robot(), qa, qb, 3.0));
  CHECK_THROWS_AS(edge_segments(qa, qb, 0.0), Error);
}

TEST_CASE("edge check: degenerate and empty-scene edges") {
  CollisionScene scene;
  scene.set_floor(false);
  Rng rng(33);
  for (int i = 0; i < 100; ++i) {
    const Configuration a = random_config(rng, robot()), b = random_config(rng, robot());
    CHECK(edge_collision_free(scene, robot(), a, b, 0.05));
    CHECK(edge_collision_free(scene, robot(), a, a, 0.05));
  }
}

TEST_CASE("edge segment count keeps every joint step within the bound") {
  Rng rng(34);
  for (int i = 0; i < 500; ++i) {
    const Configuration a = random_config(rng, robot()), b = random_config(rng, robot());
    const double step = test::uniform(rng, 0.01, 1.0);
    const std::size_t n = edge_segments(a, b, step);
    CHECK((n & (n - 1)) == 0);
    CHECK((b - a).cwiseAbs().maxCoeff() / static_cast<double>(n) <= step);
    if (n > 1) CHECK((b - a).cwiseAbs().maxCoeff() / static_cast<double>(n / 2) > step);
  }
}

TEST_CASE("edge check is monotone in the step") {
  Rng rng(35);
  const KinematicChain chain = small_base();
  int blocked = 0;
  for (int s = 0; s < 20; ++s) {
    const CollisionScene scene = scene_of(random_boxes(rng, 3));
    for (int i = 0; i < 10; ++i) {
      const Configuration a = random_config(rng, chain);
      const Configuration b = interpolate(a, random_config(rng, chain), 0.3);
      bool seen_blocked = false;
      for (double step = 0.8; step > 0.01; step /= 2) {
        const bool ok = edge_collision_free(scene, chain, a, b, step);
        if (seen_blocked) CHECK_FALSE(ok);
        seen_blocked = seen_blocked || !ok;
      }
      blocked += seen_blocked;
    }
  }
  CHECK(blocked > 20);
}

TEST_CASE("free configurations have free zero-length edges") {
  Rng rng(36);
  const KinematicChain chain = small_base();
  for (int s = 0; s < 10; ++s) {
    const CollisionScene scene = scene_of(random_boxes(rng, 3));
    for (int i = 0; i < 30; ++i) {
      const Configuration q = random_config(rng, chain);
      if (!config_in_collision(scene, chain, q)) CHECK(edge_collision_free(scene, chain, q, q, 0.05));
    }
  }
}

TEST_CASE("shrinking link spheres never creates a collision") {
  Rng rng(37);
  const KinematicChain chain = small_base();
  for (int s = 0; s < 20; ++s) {
    const CollisionScene scene = scene_of(random_boxes(rng, 4));
    const KinematicChain thinner = chain.with_inflated_spheres(-test::uniform(rng, 0.001, 0.05));
    for (int i = 0; i < 30; ++i) {
      const Configuration q = random_config(rng, chain);
      if (!config_in_collision(scene, chain, q)) CHECK_FALSE(config_in_collision(scene, thinner, q));
    }
  }
}

TEST_CASE("target object blocks the arm only when flagged") {
  CollisionScene scene;
  const FkResult fk = forward_kinematics(robot(), upright(0, 0));
  const Vec3 wrist = fk.links[6].translation();
  scene.set_target("mug", make_icosphere(0.05, 2).transformed(Transform::translation(wrist)));
  CHECK(config_in_collision(scene, robot(), upright(0, 0)));
  scene.set_target_blocks_robot(false);
  CHECK_FALSE(config_in_collision(scene, robot(), upright(0, 0)));
}

TEST_CASE("gripper pose collision examples") {
  const IndexedMesh gripper(make_gripper_mesh());
  CollisionScene table;
  table.add_obstacle("table", make_box(Vec3(0.5, 0.8, 0.02), Transform::translation(0, 0, 0.7)));
  CHECK_FALSE(gripper_pose_in_collision(table, gripper, Transform::translation(0, 0, 1.5), true));

  // Palm centre (about 7 cm behind the gripper origin) placed inside a board.
  CollisionScene shelf;
  shelf.add_obstacle("board", make_box(Vec3(0.4, 0.2, 0.05), Transform::translation(0, 0, 1.0)));
  CHECK(gripper_pose_in_collision(shelf, gripper, Transform::translation(0, 0, 1.07), true));
  // Gripper completely inside a solid block still counts.
  CollisionScene block;
  block.add_obstacle("block", make_box(Vec3(0.5, 0.5, 0.5), Transform::translation(0, 0, 1.0)));
  CHECK(gripper_pose_in_collision(block, gripper, Transform::translation(0, 0, 1.0), true));
  // Gripper below the floor.
  CollisionScene empty;
  CHECK(gripper_pose_in_collision(empty, gripper, Transform::translation(0, 0, 0.01), true));

  // Fingers straddling an isolated ball, approach from above.
  CollisionScene isolated;
  const Vec3 centre(0, 0, 1.0);
  isolated.set_target("ball", make_icosphere(0.03, 3).transformed(Transform::translation(centre)));
  const auto c = ContactPair::make(centre - Vec3(0, 0.03, 0), Vec3(0, 1, 0), centre + Vec3(0, 0.03, 0),
                                   Vec3(0, -1, 0));
  for (const Transform& pose : build_grasp_poses(c, 8)) {
    CHECK_FALSE(gripper_pose_in_collision(isolated, gripper, pose, true));
  }
}
