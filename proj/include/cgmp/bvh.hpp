#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cgmp/mesh.hpp"

namespace cgmp {

// Axis-aligned bounding-box tree over the triangles of one mesh. Median split
// along the longest centroid axis, at most kLeafSize triangles per leaf.
class BvhIndex {
 public:
  static constexpr std::uint32_t kLeafSize = 4;

  struct Node {
    Aabb box;
    // Leaf: first index into order(), count > 0. Inner: children at
    // `first` and `first + 1`, count == 0.
    std::uint32_t first = 0;
    std::uint32_t count = 0;
    bool leaf() const { return count > 0; }
  };

  BvhIndex() = default;
  explicit BvhIndex(const TriangleMesh& mesh);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& order() const { return order_; }
  const Aabb& root_box() const { return nodes_.front().box; }
  bool empty() const { return nodes_.empty(); }

 private:
  void build(const TriangleMesh& mesh, std::uint32_t node, std::uint32_t begin,
             std::uint32_t end, const std::vector<Vec3>& centroids);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

// A mesh together with its acceleration structure.
struct IndexedMesh {
  TriangleMesh mesh;
  BvhIndex bvh;
  bool closed = false;

  IndexedMesh() = default;
  explicit IndexedMesh(TriangleMesh m)
      : mesh(std::move(m)), bvh(mesh), closed(mesh.is_closed()) {}
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit

  Ray(const Vec3& o, const Vec3& d) : origin(o), direction(d.normalized()) {}
};

struct RayHit {
  Vec3 point;
  std::uint32_t triangle;
  double distance;
};

// Hits closer than this are ignored so rays leaving a surface do not report
// the surface they start on.
inline constexpr double kSelfHitGuard = 1e-9;

// Möller–Trumbore; returns the hit distance along the ray, if any.
std::optional<double> intersect_ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                             const Vec3& c);

// Nearest intersection with distance > kSelfHitGuard; ties resolve to the
// lowest triangle id.
std::optional<RayHit> ray_cast(const TriangleMesh& mesh, const BvhIndex& index, const Ray& ray);

// Number of intersections (distance > kSelfHitGuard) along the ray.
std::size_t ray_crossings(const TriangleMesh& mesh, const BvhIndex& index, const Ray& ray);

// Parity test; only meaningful for closed meshes.
bool point_inside(const TriangleMesh& mesh, const BvhIndex& index, const Vec3& p);

// Closest point on triangle abc to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// True iff some triangle lies strictly closer than `radius` to `center`.
bool sphere_touches_mesh(const TriangleMesh& mesh, const BvhIndex& index, const Vec3& center,
                         double radius);

// Separating-axis triangle/triangle overlap test (touching counts as overlap).
bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                         const Vec3& b1, const Vec3& b2);

// True iff some triangle of `a` intersects some triangle of `b` when b is
// placed in a's frame by pose_ab.
bool meshes_intersect(const IndexedMesh& a, const IndexedMesh& b, const Transform& pose_ab);

}  // namespace cgmp
