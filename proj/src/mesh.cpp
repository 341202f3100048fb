#include "cgmp/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cgmp/error.hpp"

namespace cgmp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kStartInCollision: return "start configuration in collision";
    case ErrorKind::kTargetInCollision: return "target configuration in collision";
    case ErrorKind::kNoGrasps: return "no grasps";
    case ErrorKind::kValidation: return "validation failed";
  }
  return "unknown";
}

Aabb Aabb::transformed(const Transform& t) const {
  // Arvo's method: center/half-extent through |R|.
  const Mat3 r = t.rotation_matrix();
  const Vec3 c = t.apply(center());
  const Vec3 h = r.cwiseAbs() * (0.5 * extent());
  Aabb out;
  out.lo = c - h;
  out.hi = c + h;
  return out;
}

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  normals_.reserve(triangles_.size());
  areas_.reserve(triangles_.size());
  for (std::size_t i = 0; i < triangles_.size(); ++i) {
    for (std::uint32_t idx : triangles_[i]) {
      if (idx >= vertices_.size()) {
        throw Error(ErrorKind::kFormat, "triangle " + std::to_string(i) +
                                            " references vertex " + std::to_string(idx) +
                                            " out of range");
      }
    }
    const Vec3 n = (vertex(i, 1) - vertex(i, 0)).cross(vertex(i, 2) - vertex(i, 0));
    const double area = 0.5 * n.norm();
    if (!(area > 1e-12)) {
      throw Error(ErrorKind::kFormat, "triangle " + std::to_string(i) + " is degenerate");
    }
    normals_.push_back(n.normalized());
    areas_.push_back(area);
  }
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const Vec3& v : vertices_) box.extend(v);
  return box;
}

double TriangleMesh::total_area() const {
  return std::accumulate(areas_.begin(), areas_.end(), 0.0);
}

TriangleMesh TriangleMesh::transformed(const Transform& t) const {
  std::vector<Vec3> verts;
  verts.reserve(vertices_.size());
  for (const Vec3& v : vertices_) verts.push_back(t.apply(v));
  return TriangleMesh(std::move(verts), triangles_);
}

TriangleMesh TriangleMesh::merged(const TriangleMesh& other) const {
  std::vector<Vec3> verts = vertices_;
  verts.insert(verts.end(), other.vertices_.begin(), other.vertices_.end());
  std::vector<TriangleIndices> tris = triangles_;
  const auto offset = static_cast<std::uint32_t>(vertices_.size());
  for (TriangleIndices t : other.triangles_) {
    for (auto& i : t) i += offset;
    tris.push_back(t);
  }
  return TriangleMesh(std::move(verts), std::move(tris));
}

bool TriangleMesh::is_closed() const {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) {
      std::uint32_t a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edges[{a, b}];
    }
  }
  return !edges.empty() &&
         std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
}

std::vector<TriangleMesh> TriangleMesh::connected_components() const {
  std::vector<std::uint32_t> parent(vertices_.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& t : triangles_) {
    const std::uint32_t r0 = find(t[0]);
    parent[find(t[1])] = r0;
    parent[find(t[2])] = r0;
  }
  // Components ordered by their first triangle.
  std::map<std::uint32_t, std::size_t> component_of_root;
  std::vector<std::vector<std::size_t>> tris_of;
  for (std::size_t i = 0; i < triangles_.size(); ++i) {
    const std::uint32_t root = find(triangles_[i][0]);
    auto [it, inserted] = component_of_root.try_emplace(root, tris_of.size());
    if (inserted) tris_of.emplace_back();
    tris_of[it->second].push_back(i);
  }
  std::vector<TriangleMesh> out;
  out.reserve(tris_of.size());
  for (const auto& tri_ids : tris_of) {
    std::map<std::uint32_t, std::uint32_t> remap;
    std::vector<Vec3> verts;
    std::vector<TriangleIndices> tris;
    for (std::size_t i : tri_ids) {
      TriangleIndices t = triangles_[i];
      for (auto& v : t) {
        auto [it, inserted] = remap.try_emplace(v, static_cast<std::uint32_t>(verts.size()));
        if (inserted) verts.push_back(vertices_[v]);
        v = it->second;
      }
      tris.push_back(t);
    }
    out.emplace_back(std::move(verts), std::move(tris));
  }
  return out;
}

namespace {

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

[[noreturn]] void obj_error(const std::string& source, int line, const std::string& what) {
  throw Error(ErrorKind::kFormat, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

TriangleMesh parse_obj(std::istream& in, const std::string& source_name) {
  std::vector<Vec3> verts;
  std::vector<TriangleIndices> tris;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      std::string tok[3];
      Vec3 v;
      for (int k = 0; k < 3; ++k) {
        if (!(ss >> tok[k]) || !parse_double(tok[k], v[k])) {
          obj_error(source_name, line_no, "malformed vertex record");
        }
      }
      verts.push_back(v);
    } else if (tag == "f") {
      std::vector<std::string> entries;
      for (std::string e; ss >> e;) entries.push_back(e);
      if (entries.size() != 3) {
        obj_error(source_name, line_no,
                  "face with " + std::to_string(entries.size()) +
                      " vertices; only triangulated meshes are supported");
      }
      TriangleIndices t{};
      for (int k = 0; k < 3; ++k) {
        const std::string head = entries[k].substr(0, entries[k].find('/'));
        long idx = 0;
        auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0) {
          obj_error(source_name, line_no, "malformed face index '" + entries[k] + "'");
        }
        const long resolved = idx > 0 ? idx - 1 : static_cast<long>(verts.size()) + idx;
        if (resolved < 0 || resolved >= static_cast<long>(verts.size())) {
          obj_error(source_name, line_no, "face index out of range");
        }
        t[k] = static_cast<std::uint32_t>(resolved);
      }
      tris.push_back(t);
    }
  }
  try {
    return TriangleMesh(std::move(verts), std::move(tris));
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, source_name + ": " + e.what());
  }
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open mesh file " + path.string());
  return parse_obj(in, path.string());
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  char buf[64];
  for (const Vec3& v : mesh.vertices()) {
    out << 'v';
    for (int k = 0; k < 3; ++k) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v[k]);
      out << ' ' << std::string_view(buf, ptr - buf);
    }
    out << '\n';
  }
  for (const auto& t : mesh.triangles()) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write mesh file " + path.string());
  write_obj(out, mesh);
  if (!out) throw Error(ErrorKind::kIo, "failed writing mesh file " + path.string());
}

namespace {

void add_quad(std::vector<TriangleIndices>& tris, std::uint32_t a, std::uint32_t b,
              std::uint32_t c, std::uint32_t d) {
  tris.push_back({a, b, c});
  tris.push_back({a, c, d});
}

}  // namespace

TriangleMesh make_box(const Vec3& h, const Transform& pose) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.push_back(pose.apply(Vec3((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                                (i & 4) ? h.z() : -h.z())));
  }
  std::vector<TriangleIndices> t;
  add_quad(t, 0, 2, 3, 1);  // -z
  add_quad(t, 4, 5, 7, 6);  // +z
  add_quad(t, 0, 1, 5, 4);  // -y
  add_quad(t, 2, 6, 7, 3);  // +y
  add_quad(t, 0, 4, 6, 2);  // -x
  add_quad(t, 1, 3, 7, 5);  // +x
  return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh make_icosphere(double radius, int subdivisions) {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, p, 0}, {1, p, 0},  {-1, -p, 0}, {1, -p, 0},
                         {0, -1, p}, {0, 1, p},  {0, -1, -p}, {0, 1, -p},
                         {p, 0, -1}, {p, 0, 1},  {-p, 0, -1}, {-p, 0, 1}};
  for (auto& x : v) x.normalize();
  std::vector<TriangleIndices> t = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      auto key = std::minmax(a, b);
      auto [it, inserted] = mid.try_emplace({key.first, key.second}, 0u);
      if (inserted) {
        it->second = static_cast<std::uint32_t>(v.size());
        v.push_back((v[a] + v[b]).normalized());
      }
      return it->second;
    };
    std::vector<TriangleIndices> next;
    next.reserve(t.size() * 4);
    for (const auto& f : t) {
      const std::uint32_t ab = midpoint(f[0], f[1]);
      const std::uint32_t bc = midpoint(f[1], f[2]);
      const std::uint32_t ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    t = std::move(next);
  }
  for (auto& x : v) x *= radius;
  return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh make_cylinder(double radius, double length, int segments) {
  std::vector<Vec3> v;
  std::vector<TriangleIndices> t;
  const double hz = 0.5 * length;
  const auto n = static_cast<std::uint32_t>(segments);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const std::uint32_t bottom = 2 * n, top = 2 * n + 1;
  v.emplace_back(0, 0, -hz);
  v.emplace_back(0, 0, hz);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    add_quad(t, 2 * i, 2 * j, 2 * j + 1, 2 * i + 1);
    t.push_back({bottom, 2 * j, 2 * i});
    t.push_back({top, 2 * i + 1, 2 * j + 1});
  }
  return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh make_curved_prism(double arc_radius, double arc_angle, double width, double height,
                               int segments) {
  std::vector<Vec3> v;
  std::vector<TriangleIndices> t;
  const auto n = static_cast<std::uint32_t>(segments);
  const double hz = 0.5 * height;
  for (std::uint32_t k = 0; k <= n; ++k) {
    const double phi = -0.5 * arc_angle + arc_angle * k / n;
    const Vec3 r(std::cos(phi), std::sin(phi), 0.0);
    const double ri = arc_radius - 0.5 * width, ro = arc_radius + 0.5 * width;
    v.push_back(ri * r - hz * Vec3::UnitZ());  // inner bottom
    v.push_back(ro * r - hz * Vec3::UnitZ());  // outer bottom
    v.push_back(ro * r + hz * Vec3::UnitZ());  // outer top
    v.push_back(ri * r + hz * Vec3::UnitZ());  // inner top
  }
  auto ib = [](std::uint32_t k) { return 4 * k; };
  auto ob = [](std::uint32_t k) { return 4 * k + 1; };
  auto ot = [](std::uint32_t k) { return 4 * k + 2; };
  auto it = [](std::uint32_t k) { return 4 * k + 3; };
  for (std::uint32_t k = 0; k < n; ++k) {
    add_quad(t, ob(k), ob(k + 1), ot(k + 1), ot(k));
    add_quad(t, ib(k), it(k), it(k + 1), ib(k + 1));
    add_quad(t, it(k), ot(k), ot(k + 1), it(k + 1));
    add_quad(t, ib(k), ib(k + 1), ob(k + 1), ob(k));
  }
  add_quad(t, ib(0), ob(0), ot(0), it(0));
  add_quad(t, ib(n), it(n), ot(n), ob(n));
  Aabb box;
  for (const Vec3& p : v) box.extend(p);
  const Vec3 c = box.center();
  for (Vec3& p : v) p -= c;
  return TriangleMesh(std::move(v), std::move(t));
}

std::vector<SurfacePoint> surface_sample(const TriangleMesh& mesh, Rng& rng, std::size_t n) {
  if (mesh.empty()) throw Error(ErrorKind::kInvalidArgument, "surface_sample on an empty mesh");
  std::vector<double> cumulative(mesh.size());
  std::partial_sum(mesh.areas().begin(), mesh.areas().end(), cumulative.begin());
  const double total = cumulative.back();
  std::vector<SurfacePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(rng) * total;
    auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    const auto tri = static_cast<std::uint32_t>(
        std::min<std::ptrdiff_t>(pos, static_cast<std::ptrdiff_t>(mesh.size()) - 1));
    const double r1 = std::sqrt(uniform01(rng));
    const double r2 = uniform01(rng);
    const Vec3 p = (1.0 - r1) * mesh.vertex(tri, 0) + r1 * (1.0 - r2) * mesh.vertex(tri, 1) +
                   r1 * r2 * mesh.vertex(tri, 2);
    out.push_back({p, mesh.normals()[tri], tri});
  }
  return out;
}

}  // namespace cgmp
