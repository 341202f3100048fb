#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "cgmp/random.hpp"
#include "cgmp/transform.hpp"

namespace cgmp {

using TriangleIndices = std::array<std::uint32_t, 3>;

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool empty() const { return (lo.array() > hi.array()).any(); }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return (p.array() >= lo.array() - tol).all() && (p.array() <= hi.array() + tol).all();
  }
  bool contains(const Aabb& b) const { return contains(b.lo) && contains(b.hi); }
  bool overlaps(const Aabb& b) const {
    return (lo.array() <= b.hi.array()).all() && (b.lo.array() <= hi.array()).all();
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
  // Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const {
    const Vec3 d = (lo - p).cwiseMax(Vec3::Zero()).cwiseMax(p - hi);
    return d.squaredNorm();
  }
  // Axis-aligned box of this box after a rigid transform.
  Aabb transformed(const Transform& t) const;
};

// Immutable triangle mesh with outward unit normals and areas derived at
// construction. Construction rejects out-of-range indices and degenerate
// (area <= 1e-12 m^2) triangles.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  TriangleMesh(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<TriangleIndices>& triangles() const { return triangles_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<double>& areas() const { return areas_; }
  std::size_t size() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }

  const Vec3& vertex(std::size_t tri, int corner) const {
    return vertices_[triangles_[tri][corner]];
  }
  Aabb bounds() const;
  double total_area() const;

  TriangleMesh transformed(const Transform& t) const;
  // Mesh containing the triangles of both, vertex indices of `other` shifted.
  TriangleMesh merged(const TriangleMesh& other) const;

  // Each edge shared by exactly two triangles.
  bool is_closed() const;
  // Splits into edge/vertex-connected components.
  std::vector<TriangleMesh> connected_components() const;

  friend bool operator==(const TriangleMesh& a, const TriangleMesh& b) {
    return a.vertices_ == b.vertices_ && a.triangles_ == b.triangles_;
  }

 private:
  std::vector<Vec3> vertices_;
  std::vector<TriangleIndices> triangles_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
};

// Wavefront OBJ subset: `v` and `f` records only. Polygon faces are rejected
// with an error naming the line. Face entries of the form `i/j/k` use `i`.
TriangleMesh parse_obj(std::istream& in, const std::string& source_name);
TriangleMesh load_obj(const std::filesystem::path& path);
void write_obj(std::ostream& out, const TriangleMesh& mesh);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

// Procedural primitives, all closed with outward normals.
TriangleMesh make_box(const Vec3& half_extents, const Transform& pose = Transform());
TriangleMesh make_icosphere(double radius, int subdivisions);
// Cylinder along z, centered at the origin.
TriangleMesh make_cylinder(double radius, double length, int segments);
// Rectangular cross-section swept along a circular arc in the xy-plane:
// a flat "banana". Its bounding box is centered at the origin.
TriangleMesh make_curved_prism(double arc_radius, double arc_angle, double width,
                               double height, int segments);

struct SurfacePoint {
  Vec3 point;
  Vec3 normal;  // outward
  std::uint32_t triangle;
};

// n points distributed uniformly by area. Throws on an empty mesh.
std::vector<SurfacePoint> surface_sample(const TriangleMesh& mesh, Rng& rng, std::size_t n);

}  // namespace cgmp
