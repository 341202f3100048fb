#include <doctest.h>

#include <array>
#include <sstream>

#include "cgmp/bvh.hpp"
#include "cgmp/error.hpp"
#include "support.hpp"

using namespace cgmp;
using cgmp::test::random_transform;
using cgmp::test::random_unit;
using cgmp::test::random_vec;

namespace {

constexpr double kPi = std::numbers::pi;

Mat4 translate4(double x, double y, double z) {
  Mat4 m = Mat4::Identity();
  m.block<3, 1>(0, 3) = Vec3(x, y, z);
  return m;
}

Mat4 rotz4(double a) {
  Mat4 m = Mat4::Identity();
  m(0, 0) = std::cos(a);
  m(0, 1) = -std::sin(a);
  m(1, 0) = std::sin(a);
  m(1, 1) = std::cos(a);
  return m;
}

// Plane intersection followed by a same-side test; no shared code with the
// library's Moller-Trumbore.
std::optional<double> plane_ray_hit(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                                    const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double denom = n.dot(d);
  if (std::abs(denom) < 1e-14) return std::nullopt;
  const double t = n.dot(a - o) / denom;
  if (t <= kSelfHitGuard) return std::nullopt;
  const Vec3 p = o + t * d;
  const double s0 = n.dot((b - a).cross(p - a));
  const double s1 = n.dot((c - b).cross(p - b));
  const double s2 = n.dot((a - c).cross(p - c));
  if (s0 < 0 || s1 < 0 || s2 < 0) return std::nullopt;
  return t;
}

std::optional<double> brute_ray(const TriangleMesh& m, const Vec3& o, const Vec3& d) {
  std::optional<double> best;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto t = plane_ray_hit(o, d, m.vertex(i, 0), m.vertex(i, 1), m.vertex(i, 2));
    if (t && (!best || *t < *best)) best = t;
  }
  return best;
}

bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                           const Vec3& c) {
  const Vec3 d = q - p;
  const Vec3 n = (b - a).cross(c - a);
  const double denom = n.dot(d);
  if (std::abs(denom) < 1e-14) return false;
  const double t = n.dot(a - p) / denom;
  if (t < 0.0 || t > 1.0) return false;
  const Vec3 x = p + t * d;
  return n.dot((b - a).cross(x - a)) >= 0 && n.dot((c - b).cross(x - b)) >= 0 &&
         n.dot((a - c).cross(x - c)) >= 0;
}

// Two triangles in general position intersect iff an edge of one pierces the
// other.
bool brute_tri_tri(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b) {
  for (int i = 0; i < 3; ++i) {
    if (segment_hits_triangle(a[i], a[(i + 1) % 3], b[0], b[1], b[2])) return true;
    if (segment_hits_triangle(b[i], b[(i + 1) % 3], a[0], a[1], a[2])) return true;
  }
  return false;
}

TriangleMesh random_soup(Rng& rng, int n, double spread, double size) {
  std::vector<Vec3> v;
  std::vector<TriangleIndices> t;
  for (int i = 0; i < n; ++i) {
    const Vec3 c = random_vec(rng, spread);
    const auto base = static_cast<std::uint32_t>(v.size());
    for (int k = 0; k < 3; ++k) v.push_back(c + random_vec(rng, size));
    t.push_back({base, base + 1, base + 2});
  }
  return TriangleMesh(v, t);
}

}  // namespace

TEST_CASE("compose examples") {
  CHECK(compose(Transform(), Transform()) == Transform());
  const Transform t = compose(Transform::translation(1, 0, 0), Transform::translation(0, 2, 0));
  CHECK((t.translation() - Vec3(1, 2, 0)).norm() < 1e-15);
  CHECK(rotation_angle(t.rotation()) < 1e-15);

  const Transform r = compose(Transform::rot_z(kPi / 2), Transform::translation(1, 0, 0));
  const Mat4 oracle = rotz4(kPi / 2) * translate4(1, 0, 0);
  CHECK((r.matrix() - oracle).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.translation() - Vec3(0, 1, 0)).norm() < 1e-12);
}

TEST_CASE("compose matches 4x4 matrix products") {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const Transform a = random_transform(rng, 2.0), b = random_transform(rng, 2.0);
    CHECK(((a * b).matrix() - a.matrix() * b.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("quaternion stays unit along long compose chains") {
  Rng rng(2);
  Transform t;
  for (int i = 0; i < 100000; ++i) {
    t = t * Transform::rotation(random_unit(rng), 0.3);
    if (i % 1000 == 0) REQUIRE(std::abs(t.rotation().norm() - 1.0) < 1e-9);
  }
  CHECK(std::abs(t.rotation().norm() - 1.0) < 1e-9);
}

TEST_CASE("compose with inverse is the identity; inverse of a product reverses it") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Transform a = random_transform(rng, 5.0), b = random_transform(rng, 5.0);
    const Transform id = compose(a, invert(a));
    CHECK(id.translation().norm() < 1e-9);
    CHECK(rotation_angle(id.rotation()) < 1e-9);
    const Transform lhs = invert(compose(a, b));
    const Transform rhs = compose(invert(b), invert(a));
    CHECK((lhs.translation() - rhs.translation()).norm() < 1e-9);
    CHECK(rotation_distance(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("pose_distance examples") {
  Rng rng(4);
  const Transform t = random_transform(rng);
  CHECK(pose_distance(t, t) < 1e-9);
  CHECK(pose_distance(Transform(), Transform::translation(0.05, 0, 0)) ==
        doctest::Approx(50.0).epsilon(1e-12));
  for (int i = 0; i < 20; ++i) {
    const Vec3 axis = random_unit(rng);
    CHECK(pose_distance(t, t * Transform::rotation(axis, kPi / 2)) ==
          doctest::Approx(90.0).epsilon(1e-9));
  }
  const Transform b = Transform::translation(0.02, 0, 0) * Transform::rot_x(kPi / 6);
  CHECK(pose_distance(Transform(), b) == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("rotation angle stays accurate near 0 and 180 degrees") {
  for (double a : {1e-9, 1e-6, 1e-3, kPi - 1e-3, kPi - 1e-6, kPi}) {
    const Quat q(Eigen::AngleAxisd(a, Vec3(1, 2, 3).normalized()));
    CHECK(rotation_angle(q) == doctest::Approx(a).epsilon(1e-9));
  }
}

TEST_CASE("pose_distance metric axioms on random triples") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Transform a = random_transform(rng), b = random_transform(rng), c = random_transform(rng);
    const double ab = pose_distance(a, b), ba = pose_distance(b, a);
    CHECK(ab >= 0.0);
    CHECK(std::abs(ab - ba) <= 1e-6);
    CHECK(pose_distance(a, a) <= 1e-6);
    CHECK(ab <= pose_distance(a, c) + pose_distance(c, b) + 1e-6);
    // Independent formula: 1000 |dt| + degrees of acos((tr(Ra^T Rb) - 1) / 2).
    const double oracle = 1000.0 * (a.translation() - b.translation()).norm() +
                          180.0 / kPi * test::matrix_angle(a.rotation_matrix(), b.rotation_matrix());
    CHECK(ab == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("mesh construction invariants") {
  const TriangleMesh box = make_box(Vec3(0.5, 0.5, 0.5));
  CHECK(box.size() == 12);
  CHECK(box.is_closed());
  for (const Vec3& n : box.normals()) CHECK(std::abs(n.norm() - 1.0) < 1e-9);
  // Outward normals: each points away from the centre.
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Vec3 c = (box.vertex(i, 0) + box.vertex(i, 1) + box.vertex(i, 2)) / 3.0;
    CHECK(box.normals()[i].dot(c) > 0.0);
  }
  CHECK(box.total_area() == doctest::Approx(6.0));
  CHECK_THROWS_AS(TriangleMesh({Vec3(0, 0, 0), Vec3(1, 0, 0)}, {{0, 1, 2}}), Error);
  CHECK_THROWS_AS(TriangleMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {{0, 1, 2}}), Error);

  const TriangleMesh sphere = make_icosphere(1.0, 3);
  CHECK(sphere.is_closed());
  for (const Vec3& v : sphere.vertices()) CHECK(std::abs(v.norm() - 1.0) < 1e-9);
  CHECK(make_cylinder(0.1, 0.5, 16).is_closed());
  CHECK(make_curved_prism(0.12, 1.4, 0.03, 0.03, 16).is_closed());
}

TEST_CASE("OBJ parsing") {
  std::istringstream ok("# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2//1 3\n");
  const TriangleMesh m = parse_obj(ok, "ok.obj");
  CHECK(m.size() == 1);

  std::istringstream quad("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  try {
    parse_obj(quad, "quad.obj");
    FAIL("polygon face accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFormat);
    CHECK(std::string(e.what()).find("quad.obj:5") != std::string::npos);
  }
  std::istringstream bad_index("v 0 0 0\nf 1 2 3\n");
  CHECK_THROWS_AS(parse_obj(bad_index, "x.obj"), Error);

  const TriangleMesh box = make_icosphere(0.3, 1);
  std::stringstream io;
  write_obj(io, box);
  CHECK(parse_obj(io, "round.obj") == box);
}

TEST_CASE("BVH structure invariants") {
  Rng rng(6);
  const TriangleMesh soup = random_soup(rng, 300, 1.0, 0.1);
  const BvhIndex bvh(soup);
  for (const Vec3& v : soup.vertices()) CHECK(bvh.root_box().contains(v));
  std::vector<int> seen(soup.size(), 0);
  for (const auto& node : bvh.nodes()) {
    if (!node.leaf()) continue;
    CHECK(node.count <= BvhIndex::kLeafSize);
    for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
      const auto tri = bvh.order()[i];
      ++seen[tri];
      for (int k = 0; k < 3; ++k) CHECK(node.box.contains(soup.vertex(tri, k)));
    }
  }
  for (int s : seen) CHECK(s == 1);
}

TEST_CASE("ray_cast examples on the unit cube") {
  const IndexedMesh cube(make_box(Vec3(0.5, 0.5, 0.5)));
  const auto hit = ray_cast(cube.mesh, cube.bvh, Ray(Vec3::Zero(), Vec3::UnitZ()));
  REQUIRE(hit);
  CHECK((hit->point - Vec3(0, 0, 0.5)).norm() < 1e-12);
  CHECK(hit->distance == doctest::Approx(0.5));
  CHECK_FALSE(ray_cast(cube.mesh, cube.bvh, Ray(Vec3(0, 0, 2), Vec3::UnitZ())));
}

TEST_CASE("ray_cast through the BVH equals brute force") {
  Rng rng(7);
  int hits = 0;
  for (int c = 0; c < 1000; ++c) {
    const TriangleMesh m = c % 2 ? random_soup(rng, 40, 0.5, 0.2)
                                 : make_icosphere(test::uniform(rng, 0.1, 1.0), 2)
                                       .transformed(random_transform(rng, 0.3));
    const BvhIndex bvh(m);
    const Vec3 o = random_vec(rng, 1.0);
    const Vec3 d = c % 3 ? random_unit(rng) : (random_vec(rng, 0.2) - o).normalized();
    const auto got = ray_cast(m, bvh, Ray(o, d));
    const auto want = brute_ray(m, o, d);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      ++hits;
      CHECK(got->distance == doctest::Approx(*want).epsilon(1e-9));
      CHECK((got->point - (o + *want * d)).norm() < 1e-9);
    }
  }
  CHECK(hits >= 250);  // enough hit cases to exercise the distance check
}

TEST_CASE("point_inside agrees with analytic containment") {
  Rng rng(8);
  const Vec3 half(0.3, 0.2, 0.1);
  const Transform pose = random_transform(rng, 0.5);
  const IndexedMesh box(make_box(half, pose));
  for (int i = 0; i < 2000; ++i) {
    const Vec3 p = pose.apply(random_vec(rng, 0.4));
    const Vec3 local = pose.inverse().apply(p);
    const Vec3 margin = half - local.cwiseAbs();
    if (std::abs(margin.minCoeff()) < 1e-6) continue;
    CHECK(point_inside(box.mesh, box.bvh, p) == (margin.minCoeff() > 0));
  }
}

TEST_CASE("sphere_touches_mesh equals exhaustive closest-point distance") {
  Rng rng(9);
  for (int c = 0; c < 200; ++c) {
    const TriangleMesh m = random_soup(rng, 30, 0.5, 0.2);
    const BvhIndex bvh(m);
    const Vec3 center = random_vec(rng, 0.7);
    const double r = test::uniform(rng, 0.01, 0.3);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i) {
      // Dense barycentric grid as the independent distance oracle.
      for (int u = 0; u <= 40; ++u) {
        for (int v = 0; u + v <= 40; ++v) {
          const double a = u / 40.0, b = v / 40.0;
          const Vec3 p = (1 - a - b) * m.vertex(i, 0) + a * m.vertex(i, 1) + b * m.vertex(i, 2);
          best = std::min(best, (p - center).norm());
        }
      }
    }
    if (std::abs(best - r) < 0.02) continue;  // grid resolution
    CHECK(sphere_touches_mesh(m, bvh, center, r) == (best < r));
  }
}

TEST_CASE("meshes_intersect examples") {
  const IndexedMesh a(make_box(Vec3(0.5, 0.5, 0.5)));
  const IndexedMesh b(make_box(Vec3(0.5, 0.5, 0.5)));
  CHECK_FALSE(meshes_intersect(a, b, Transform::translation(2, 0, 0)));
  CHECK(meshes_intersect(a, b, Transform::translation(0.5, 0, 0)));
}

TEST_CASE("meshes_intersect equals exhaustive triangle pairs") {
  Rng rng(10);
  int positives = 0;
  for (int c = 0; c < 300; ++c) {
    const IndexedMesh a(random_soup(rng, 12, 0.3, 0.15));
    const IndexedMesh b(random_soup(rng, 12, 0.3, 0.15));
    const Transform pose = random_transform(rng, 0.4);
    bool want = false;
    for (std::size_t i = 0; i < a.mesh.size() && !want; ++i) {
      for (std::size_t j = 0; j < b.mesh.size() && !want; ++j) {
        want = brute_tri_tri({a.mesh.vertex(i, 0), a.mesh.vertex(i, 1), a.mesh.vertex(i, 2)},
                             {pose.apply(b.mesh.vertex(j, 0)), pose.apply(b.mesh.vertex(j, 1)),
                              pose.apply(b.mesh.vertex(j, 2))});
      }
    }
    positives += want;
    CHECK(meshes_intersect(a, b, pose) == want);
  }
  CHECK(positives > 30);
  CHECK(positives < 270);
}

TEST_CASE("surface_sample basics") {
  Rng rng(11);
  const TriangleMesh tri({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
  CHECK(surface_sample(tri, rng, 0).empty());
  for (const auto& s : surface_sample(tri, rng, 1000)) {
    CHECK(s.triangle == 0);
    CHECK(std::abs(s.point.z()) < 1e-9);
    CHECK(s.point.x() >= -1e-12);
    CHECK(s.point.y() >= -1e-12);
    CHECK(s.point.x() + s.point.y() <= 1.0 + 1e-12);
    CHECK((s.normal - Vec3::UnitZ()).norm() < 1e-12);
  }
  CHECK_THROWS_AS(surface_sample(TriangleMesh(), rng, 3), Error);
}

TEST_CASE("surface_sample on a sphere fills octants evenly") {
  Rng rng(12);
  const TriangleMesh sphere = make_icosphere(1.0, 4);
  const int n = 10000;
  std::array<int, 8> counts{};
  for (const auto& s : surface_sample(sphere, rng, n)) {
    const Vec3 p = s.point;
    // Samples lie on their triangle's plane.
    const Vec3 a = sphere.vertex(s.triangle, 0);
    CHECK(std::abs((p - a).dot(sphere.normals()[s.triangle])) < 1e-9);
    CHECK((s.normal - sphere.normals()[s.triangle]).norm() < 1e-15);
    ++counts[(p.x() > 0) + 2 * (p.y() > 0) + 4 * (p.z() > 0)];
  }
  const double mean = n / 8.0, sigma = std::sqrt(n * (1.0 / 8) * (7.0 / 8));
  for (int c : counts) CHECK(std::abs(c - mean) < 5 * sigma);
}

TEST_CASE("surface_sample is area-uniform (chi-square)") {
  Rng rng(13);
  // 20 triangles with very different areas.
  std::vector<Vec3> v;
  std::vector<TriangleIndices> t;
  for (int i = 0; i < 20; ++i) {
    const double s = 0.05 + 0.05 * i;
    const auto b = static_cast<std::uint32_t>(v.size());
    v.push_back(Vec3(i, 0, 0));
    v.push_back(Vec3(i + s, 0, 0));
    v.push_back(Vec3(i, s * (1 + i % 3), 0));
    t.push_back({b, b + 1, b + 2});
  }
  const TriangleMesh m(v, t);
  const std::size_t n = 100000;
  std::vector<double> counts(20, 0.0);
  for (const auto& s : surface_sample(m, rng, n)) counts[s.triangle] += 1;
  double chi2 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double expected = n * m.areas()[i] / m.total_area();
    chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  // Upper 0.001 quantile of chi-square with 19 degrees of freedom.
  CHECK(chi2 < 43.82);
}
