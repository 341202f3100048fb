#include "cgmp/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace cgmp {

BvhIndex::BvhIndex(const TriangleMesh& mesh) {
  if (mesh.empty()) return;
  const auto n = static_cast<std::uint32_t>(mesh.size());
  order_.resize(n);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    order_[i] = i;
    centroids[i] = (mesh.vertex(i, 0) + mesh.vertex(i, 1) + mesh.vertex(i, 2)) / 3.0;
  }
  nodes_.reserve(2 * (n / kLeafSize + 1));
  nodes_.emplace_back();
  build(mesh, 0, 0, n, centroids);
}

void BvhIndex::build(const TriangleMesh& mesh, std::uint32_t node, std::uint32_t begin,
                     std::uint32_t end, const std::vector<Vec3>& centroids) {
  Aabb box, centroid_box;
  for (std::uint32_t i = begin; i < end; ++i) {
    const std::uint32_t t = order_[i];
    for (int k = 0; k < 3; ++k) box.extend(mesh.vertex(t, k));
    centroid_box.extend(centroids[t]);
  }
  nodes_[node].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[node].first = begin;
    nodes_[node].count = end - begin;
    return;
  }
  int axis = 0;
  centroid_box.extent().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double ca = centroids[a][axis], cb = centroids[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const auto child = static_cast<std::uint32_t>(nodes_.size());
  nodes_[node].first = child;
  nodes_[node].count = 0;
  nodes_.emplace_back();
  nodes_.emplace_back();
  build(mesh, child, begin, mid, centroids);
  build(mesh, child + 1, mid, end, centroids);
}

std::optional<double> intersect_ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                             const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-18) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (!(t > kSelfHitGuard)) return std::nullopt;
  return t;
}

namespace {

constexpr double kBoxPad = 1e-9;

// Entry distance of the ray into the padded box, or nullopt when missed.
std::optional<double> ray_box_entry(const Ray& ray, const Aabb& box) {
  double tmin = 0.0, tmax = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double lo = box.lo[k] - kBoxPad, hi = box.hi[k] + kBoxPad;
    const double o = ray.origin[k], d = ray.direction[k];
    if (d == 0.0) {
      if (o < lo || o > hi) return std::nullopt;
      continue;
    }
    double t0 = (lo - o) / d, t1 = (hi - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return std::nullopt;
  }
  return tmin;
}

}  // namespace

std::optional<RayHit> ray_cast(const TriangleMesh& mesh, const BvhIndex& index, const Ray& ray) {
  if (index.empty()) return std::nullopt;
  double best_t = std::numeric_limits<double>::infinity();
  std::uint32_t best_tri = 0;
  bool found = false;
  std::vector<std::uint32_t> stack{0};
  const auto& nodes = index.nodes();
  while (!stack.empty()) {
    const std::uint32_t ni = stack.back();
    stack.pop_back();
    const auto& node = nodes[ni];
    const auto entry = ray_box_entry(ray, node.box);
    if (!entry || *entry > best_t) continue;
    if (node.leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = index.order()[i];
        const auto t = intersect_ray_triangle(ray, mesh.vertex(tri, 0), mesh.vertex(tri, 1),
                                              mesh.vertex(tri, 2));
        if (t && (*t < best_t || (*t == best_t && tri < best_tri))) {
          best_t = *t;
          best_tri = tri;
          found = true;
        }
      }
    } else {
      stack.push_back(node.first);
      stack.push_back(node.first + 1);
    }
  }
  if (!found) return std::nullopt;
  return RayHit{ray.origin + best_t * ray.direction, best_tri, best_t};
}

std::size_t ray_crossings(const TriangleMesh& mesh, const BvhIndex& index, const Ray& ray) {
  if (index.empty()) return 0;
  std::size_t count = 0;
  std::vector<std::uint32_t> stack{0};
  const auto& nodes = index.nodes();
  while (!stack.empty()) {
    const auto& node = nodes[stack.back()];
    stack.pop_back();
    if (!ray_box_entry(ray, node.box)) continue;
    if (node.leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = index.order()[i];
        if (intersect_ray_triangle(ray, mesh.vertex(tri, 0), mesh.vertex(tri, 1),
                                   mesh.vertex(tri, 2))) {
          ++count;
        }
      }
    } else {
      stack.push_back(node.first);
      stack.push_back(node.first + 1);
    }
  }
  return count;
}

bool point_inside(const TriangleMesh& mesh, const BvhIndex& index, const Vec3& p) {
  if (index.empty() || !index.root_box().contains(p)) return false;
  // Skewed direction keeps the ray off the edges of axis-aligned geometry.
  static const Vec3 kDir = Vec3(0.5773, 0.5776, 0.5779).normalized();
  return ray_crossings(mesh, index, Ray(p, kDir)) % 2 == 1;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

bool sphere_touches_mesh(const TriangleMesh& mesh, const BvhIndex& index, const Vec3& center,
                         double radius) {
  if (index.empty()) return false;
  const double r2 = radius * radius;
  std::array<std::uint32_t, 64> stack;
  std::size_t top = 0;
  stack[top++] = 0;
  const auto& nodes = index.nodes();
  while (top > 0) {
    const auto& node = nodes[stack[--top]];
    if (node.box.squared_distance(center) >= r2) continue;
    if (node.leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = index.order()[i];
        const Vec3 q = closest_point_on_triangle(center, mesh.vertex(tri, 0), mesh.vertex(tri, 1),
                                                 mesh.vertex(tri, 2));
        if ((q - center).squaredNorm() < r2) return true;
      }
    } else {
      stack[top++] = node.first;
      stack[top++] = node.first + 1;
    }
  }
  return false;
}

namespace {

bool separated_on_axis(const Vec3& axis, const std::array<Vec3, 3>& a,
                       const std::array<Vec3, 3>& b) {
  if (axis.squaredNorm() < 1e-30) return false;
  double amin = axis.dot(a[0]), amax = amin;
  double bmin = axis.dot(b[0]), bmax = bmin;
  for (int k = 1; k < 3; ++k) {
    const double pa = axis.dot(a[k]), pb = axis.dot(b[k]);
    amin = std::min(amin, pa);
    amax = std::max(amax, pa);
    bmin = std::min(bmin, pb);
    bmax = std::max(bmax, pb);
  }
  return amax < bmin || bmax < amin;
}

}  // namespace

bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                         const Vec3& b1, const Vec3& b2) {
  const std::array<Vec3, 3> a{a0, a1, a2}, b{b0, b1, b2};
  const std::array<Vec3, 3> ea{a1 - a0, a2 - a1, a0 - a2}, eb{b1 - b0, b2 - b1, b0 - b2};
  const Vec3 na = ea[0].cross(ea[1]), nb = eb[0].cross(eb[1]);
  if (separated_on_axis(na, a, b) || separated_on_axis(nb, a, b)) return false;
  for (const Vec3& u : ea) {
    for (const Vec3& v : eb) {
      if (separated_on_axis(u.cross(v), a, b)) return false;
    }
  }
  // In-plane edge normals complete the axis set for (near-)coplanar pairs.
  for (const Vec3& u : ea) {
    if (separated_on_axis(na.cross(u), a, b)) return false;
  }
  for (const Vec3& v : eb) {
    if (separated_on_axis(nb.cross(v), a, b)) return false;
  }
  return true;
}

bool meshes_intersect(const IndexedMesh& a, const IndexedMesh& b, const Transform& pose_ab) {
  if (a.bvh.empty() || b.bvh.empty()) return false;
  std::vector<Vec3> bv;
  bv.reserve(b.mesh.vertices().size());
  for (const Vec3& v : b.mesh.vertices()) bv.push_back(pose_ab.apply(v));
  const auto& an = a.bvh.nodes();
  const auto& bn = b.bvh.nodes();
  std::vector<Aabb> bboxes;
  bboxes.reserve(bn.size());
  for (const auto& n : bn) bboxes.push_back(n.box.transformed(pose_ab));

  std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [ia, ib] = stack.back();
    stack.pop_back();
    const auto& na = an[ia];
    const auto& nb = bn[ib];
    if (!na.box.overlaps(bboxes[ib])) continue;
    if (na.leaf() && nb.leaf()) {
      for (std::uint32_t i = na.first; i < na.first + na.count; ++i) {
        const auto& ta = a.mesh.triangles()[a.bvh.order()[i]];
        for (std::uint32_t j = nb.first; j < nb.first + nb.count; ++j) {
          const auto& tb = b.mesh.triangles()[b.bvh.order()[j]];
          if (triangles_intersect(a.mesh.vertices()[ta[0]], a.mesh.vertices()[ta[1]],
                                  a.mesh.vertices()[ta[2]], bv[tb[0]], bv[tb[1]], bv[tb[2]])) {
            return true;
          }
        }
      }
    } else if (nb.leaf() || (!na.leaf() && na.box.extent().squaredNorm() >=
                                               bboxes[ib].extent().squaredNorm())) {
      stack.push_back({na.first, ib});
      stack.push_back({na.first + 1, ib});
    } else {
      stack.push_back({ia, nb.first});
      stack.push_back({ia, nb.first + 1});
    }
  }
  return false;
}

}  // namespace cgmp
