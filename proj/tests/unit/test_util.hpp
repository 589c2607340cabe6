#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "ih/error.hpp"
#include "ih/geometry.hpp"

#define EXPECT_THROW_KIND(stmt, k)                                   \
  do {                                                               \
    try {                                                            \
      stmt;                                                          \
      ADD_FAILURE() << "expected " << ih::to_string(k) << ", no throw"; \
    } catch (const ih::Error& e) {                                   \
      EXPECT_EQ(e.kind(), k) << e.what();                            \
    }                                                                \
  } while (0)

namespace ih::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline double gauss(Rng& rng, double sigma) { return std::normal_distribution<double>(0.0, sigma)(rng); }

/// Camera at `center` looking at `target` on the ground, image x roughly
/// along world x.
inline CameraModel look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target, double f = 1000.0,
                           double cx = 960.0, double cy = 540.0) {
  const Eigen::Vector3d fwd = (target - center).normalized();
  Eigen::Vector3d x = fwd.cross(Eigen::Vector3d::UnitZ());
  if (x.norm() < 1e-9) x = Eigen::Vector3d::UnitX();
  x.normalize();
  const Eigen::Vector3d y = fwd.cross(x);
  CameraModel cam;
  cam.fx = cam.fy = f;
  cam.cx = cx;
  cam.cy = cy;
  cam.rotation.row(0) = x;
  cam.rotation.row(1) = y;
  cam.rotation.row(2) = fwd;
  cam.translation = -cam.rotation * center;
  return cam;
}

/// Surveillance-style camera 4-12 m up, looking down at a spot a few meters
/// ahead of a 2x2 m marker area around the origin.
inline CameraModel random_ground_camera(Rng& rng) {
  const double yaw = uniform(rng, 0.0, 2.0 * M_PI);
  const double back = uniform(rng, 3.0, 10.0);
  const Eigen::Vector3d center(1.0 - back * std::cos(yaw), 1.0 - back * std::sin(yaw), uniform(rng, 4.0, 12.0));
  const Eigen::Vector3d target(1.0 + uniform(rng, -1.0, 1.0), 1.0 + uniform(rng, -1.0, 1.0), 0.0);
  return look_at(center, target, uniform(rng, 600.0, 1500.0));
}

/// Independent ground -> image evaluation of K [r1 r2 t] (x, y, 1).
inline PixelPoint project_ground(const CameraModel& cam, double x, double y) {
  const Eigen::Vector3d pc = cam.rotation * Eigen::Vector3d(x, y, 0.0) + cam.translation;
  return {cam.fx * pc.x() / pc.z() + cam.cx, cam.fy * pc.y() / pc.z() + cam.cy};
}

/// Projection by an explicit 3x3 matrix, written out term by term.
inline Eigen::Vector2d project_matrix(const Eigen::Matrix3d& h, double x, double y) {
  const double w = h(2, 0) * x + h(2, 1) * y + h(2, 2);
  return {(h(0, 0) * x + h(0, 1) * y + h(0, 2)) / w, (h(1, 0) * x + h(1, 1) * y + h(1, 2)) / w};
}

inline std::vector<GroundPoint> unit_grid(double spacing = 1.0) {
  std::vector<GroundPoint> g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g.push_back({j * spacing, i * spacing});
  return g;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ih_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ih::test
