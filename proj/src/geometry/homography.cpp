#include <cmath>
#include <string>

#include <Eigen/LU>

#include "ih/error.hpp"
#include "ih/geometry.hpp"

namespace ih {

Homography::Homography() : m_(Eigen::Matrix3d::Identity()) {}

Homography Homography::from_matrix(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) raise(ErrorKind::InvalidArgument, "homography has non-finite entries");
  if (std::abs(m(2, 2)) < kNormalizationFloor) {
    raise(ErrorKind::NotNormalizable, "h33 magnitude below 1e-12");
  }
  const Eigen::Matrix3d normalized = m / m(2, 2);
  const double det = normalized.determinant();
  if (!(std::abs(det) >= kDeterminantFloor)) {
    raise(ErrorKind::SingularMatrix, "|det(H)| = " + std::to_string(std::abs(det)) +
                                         " is below the conditioning floor");
  }
  return Homography(normalized);
}

Homography Homography::from_row_major(std::span<const double> entries) {
  if (entries.size() != 9) raise(ErrorKind::InvalidArgument, "homography needs 9 entries");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = entries[3 * r + c];
  return from_matrix(m);
}

std::array<double, 9> Homography::row_major() const {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[3 * r + c] = m_(r, c);
  return out;
}

Eigen::Vector2d Homography::apply(const Eigen::Vector2d& p) const {
  const double w = m_(2, 0) * p.x() + m_(2, 1) * p.y() + m_(2, 2);
  if (!(std::abs(w) >= kPointAtInfinityTolerance)) {
    raise(ErrorKind::PointAtInfinity, "homogeneous denominator vanishes");
  }
  return {(m_(0, 0) * p.x() + m_(0, 1) * p.y() + m_(0, 2)) / w,
          (m_(1, 0) * p.x() + m_(1, 1) * p.y() + m_(1, 2)) / w};
}

PixelPoint Homography::to_image(const GroundPoint& g) const {
  const Eigen::Vector2d p = apply({g.x, g.y});
  return {p.x(), p.y()};
}

GroundPoint Homography::to_ground(const PixelPoint& px) const {
  const Eigen::Vector2d p = apply({px.u, px.v});
  return {p.x(), p.y()};
}

Eigen::Vector2d apply(const Homography& h, const Eigen::Vector2d& p) { return h.apply(p); }

Homography invert(const Homography& h) {
  Eigen::Matrix3d inv;
  bool invertible = false;
  double det = 0.0;
  h.matrix().computeInverseAndDetWithCheck(inv, det, invertible, 0.0);
  if (!invertible || std::abs(det) < kDeterminantFloor) {
    raise(ErrorKind::SingularMatrix, "homography is not invertible");
  }
  return Homography::from_matrix(inv);
}

double backprojection_error(const Homography& h,
                            std::span<const Correspondence> correspondences) {
  const Eigen::Matrix3d& m = h.matrix();
  double sum = 0.0;
  for (const auto& c : correspondences) {
    const double X = c.ground.x;
    const double Y = c.ground.y;
    const double w = m(2, 0) * X + m(2, 1) * Y + m(2, 2);
    if (!(std::abs(w) >= kPointAtInfinityTolerance)) {
      raise(ErrorKind::PointAtInfinity, "ground point maps to infinity");
    }
    const double du = c.image.u - (m(0, 0) * X + m(0, 1) * Y + m(0, 2)) / w;
    const double dv = c.image.v - (m(1, 0) * X + m(1, 1) * Y + m(1, 2)) / w;
    sum += du * du + dv * dv;
  }
  return sum;
}

bool nearly_collinear(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                      const Eigen::Vector2d& c, double tolerance) {
  const Eigen::Vector2d ab = b - a;
  const Eigen::Vector2d ac = c - a;
  const double scale = ab.norm() * ac.norm();
  if (scale == 0.0) return true;
  const double cross = ab.x() * ac.y() - ab.y() * ac.x();
  return std::abs(cross) <= tolerance * scale;
}

}  // namespace ih
