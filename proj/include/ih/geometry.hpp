#pragma once

// Planar projective geometry: homography estimation (normalized DLT, RANSAC,
// Levenberg-Marquardt refinement), application, inversion and the pinhole
// camera model.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ih {

/// Image-plane position in pixels.
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

/// Ground-plane position in meters.
struct GroundPoint {
  double x = 0.0;
  double y = 0.0;
};

struct Correspondence {
  PixelPoint image;
  GroundPoint ground;
};

inline constexpr double kPointAtInfinityTolerance = 1e-12;
inline constexpr double kDeterminantFloor = 1e-12;
inline constexpr double kNormalizationFloor = 1e-12;

/// A 3x3 projective map, always stored with h33 == 1.
///
/// The default-constructed value is the identity. Construction from an
/// arbitrary matrix divides by h33 and rejects matrices whose normalized
/// determinant falls below kDeterminantFloor.
class Homography {
 public:
  Homography();

  /// Throws NotNormalizable when |h33| < 1e-12, SingularMatrix when the
  /// normalized determinant is below the conditioning floor.
  static Homography from_matrix(const Eigen::Matrix3d& m);
  static Homography from_row_major(std::span<const double> entries);

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }
  std::array<double, 9> row_major() const;

  /// Projective application with division by the third coordinate.
  /// Throws PointAtInfinity if the denominator magnitude is below 1e-12.
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const;

  PixelPoint to_image(const GroundPoint& g) const;
  GroundPoint to_ground(const PixelPoint& p) const;

 private:
  explicit Homography(const Eigen::Matrix3d& normalized) : m_(normalized) {}

  Eigen::Matrix3d m_;
};

Eigen::Vector2d apply(const Homography& h, const Eigen::Vector2d& p);
Homography invert(const Homography& h);

/// Sum over correspondences of the squared pixel residual between the
/// observed image point and the projected ground point.
double backprojection_error(const Homography& h,
                            std::span<const Correspondence> correspondences);

/// Linear least-squares estimate with isotropic (Hartley) conditioning of both
/// point sets. Needs at least four correspondences.
Homography estimate_homography_dlt(std::span<const Correspondence> correspondences);

struct RansacOptions {
  int iterations = 2000;
  double inlier_threshold = 3.0;  // px, one-way reprojection distance
  std::uint64_t seed = 0;
};

struct RansacResult {
  Homography homography;
  std::vector<bool> inliers;
  std::size_t inlier_count = 0;
};

RansacResult estimate_homography_ransac(std::span<const Correspondence> correspondences,
                                        const RansacOptions& options = {});

struct LmOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;
  double initial_damping = 1e-3;
};

/// Minimizes backprojection_error over the eight free entries, never
/// returning a homography worse than the starting one.
Homography refine_homography_lm(const Homography& initial,
                                std::span<const Correspondence> inliers,
                                const LmOptions& options = {});

/// Isotropic conditioning transform: centroid to the origin, mean distance
/// from it scaled to sqrt(2).
Eigen::Matrix3d isotropic_normalization(std::span<const Eigen::Vector2d> points);

/// True when the three points are collinear within a sine-of-angle tolerance.
bool nearly_collinear(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                      const Eigen::Vector2d& c, double tolerance = 1e-6);

struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  /// Throws InvalidArgument on non-positive focal lengths or a rotation that
  /// is not orthonormal within 1e-9.
  void validate() const;

  Eigen::Matrix3d intrinsics() const;
  /// Camera center in world coordinates, -R^T t.
  Eigen::Vector3d center() const;
};

/// Throws BehindCamera when the camera-frame depth is <= 1e-9.
PixelPoint pinhole_project(const CameraModel& cam, const Eigen::Vector3d& world);

/// Reduced projection of the world Z = 0 plane, K [r1 r2 t].
Homography ground_plane_homography(const CameraModel& cam);

}  // namespace ih
