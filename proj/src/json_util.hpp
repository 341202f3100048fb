#pragma once

// Internal JSON helpers shared by the file-format readers and writers.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "cgmp/error.hpp"
#include "cgmp/robot.hpp"
#include "cgmp/transform.hpp"

namespace cgmp::detail {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json to_json(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

inline json to_json(const Transform& t) {
  return json{{"position", to_json(t.translation())}, {"quaternion", to_json(t.rotation())}};
}

inline json to_json(const Configuration& q) {
  json arr = json::array();
  for (int i = 0; i < q.size(); ++i) arr.push_back(q[i]);
  return arr;
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::kFormat, where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw Error(ErrorKind::kFormat, where + ": expected a number");
  return j.get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != N) {
    throw Error(ErrorKind::kFormat,
                where + ": expected an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = number(j[i], where);
  return v;
}

inline Vec3 vec3_from(const json& j, const std::string& where) { return vec_from<3>(j, where); }

inline Configuration config_from(const json& j, const std::string& where) {
  return vec_from<kDof>(j, where);
}

inline Quat quat_from(const json& j, const std::string& where) {
  const auto v = vec_from<4>(j, where);
  Quat q(v[0], v[1], v[2], v[3]);
  if (q.norm() < 1e-12) throw Error(ErrorKind::kFormat, where + ": zero quaternion");
  return q.normalized();
}

inline Transform transform_from(const json& j, const std::string& where) {
  return Transform(quat_from(field(j, "quaternion", where), where + ".quaternion"),
                   vec3_from(field(j, "position", where), where + ".position"));
}

inline void check_format(const json& j, const std::string& where) {
  const json& f = field(j, "format", where);
  if (!f.is_number_integer() || f.get<int>() != kFormatVersion) {
    throw Error(ErrorKind::kFormat, where + ": unsupported format version " + f.dump() +
                                        " (expected " + std::to_string(kFormatVersion) + ")");
  }
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

inline void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace cgmp::detail
