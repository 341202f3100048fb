#pragma once

// Hand-rolled generators and oracles shared by the test binaries.

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <numbers>
#include <string>

#include "cgmp/mesh.hpp"
#include "cgmp/random.hpp"
#include "cgmp/robot.hpp"
#include "cgmp/transform.hpp"

namespace cgmp::test {

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline Vec3 random_vec(Rng& rng, double scale = 1.0) {
  return Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale));
}

inline Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

// Uniform random rotation (Shoemake) and translation in a cube.
inline Transform random_transform(Rng& rng, double scale = 1.0) {
  const double u1 = uniform01(rng), u2 = uniform01(rng), u3 = uniform01(rng);
  const double tau = 2.0 * std::numbers::pi;
  const Quat q(std::sqrt(u1) * std::cos(tau * u3), std::sqrt(1 - u1) * std::sin(tau * u2),
               std::sqrt(1 - u1) * std::cos(tau * u2), std::sqrt(u1) * std::sin(tau * u3));
  return Transform(q, random_vec(rng, scale));
}

inline const KinematicChain& robot() {
  static const KinematicChain chain = load_chain(CGMP_DATA_DIR "/robot.json");
  return chain;
}

inline Configuration random_config(Rng& rng, const KinematicChain& chain) {
  Configuration q;
  const Configuration lo = chain.lower(), hi = chain.upper();
  for (int i = 0; i < kDof; ++i) q[i] = uniform(rng, lo[i], hi[i]);
  return q;
}

// Angle between two rotations from their matrices: acos((tr R - 1) / 2).
// Deliberately a different formula from the library's atan2 quaternion form.
inline double matrix_angle(const Mat3& a, const Mat3& b) {
  const double c = ((a.transpose() * b).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Temporary directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    Rng rng(std::random_device{}());
    path = std::filesystem::temp_directory_path() /
           ("cgmp_test_" + tag + "_" + std::to_string(rng() % 1000000000));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace cgmp::test
