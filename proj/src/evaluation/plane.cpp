#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ih/error.hpp"
#include "ih/evaluation.hpp"

namespace ih {

Plane fit_plane(std::span<const Eigen::Vector3d> points, const Eigen::Vector3d& viewpoint) {
  if (points.size() < 3) raise(ErrorKind::DegeneratePoints, "plane fit needs at least 3 points");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) {
    if (!p.allFinite()) raise(ErrorKind::InvalidArgument, "plane fit point is not finite");
    centroid += p;
  }
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - centroid;
    scatter.noalias() += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  const Eigen::Vector3d& values = eig.eigenvalues();  // ascending
  if (!(values(1) > 1e-12 * values(2))) raise(ErrorKind::DegeneratePoints, "points are collinear or coincident");

  Plane plane;
  plane.normal = eig.eigenvectors().col(0).normalized();
  const double side = plane.normal.dot(viewpoint - centroid);
  const double scale = std::max(1.0, (viewpoint - centroid).norm());
  if (std::abs(side) > 1e-12 * scale) {
    if (side < 0.0) plane.normal = -plane.normal;
  } else {
    // Viewpoint on the plane: fall back to a positive dominant component.
    Eigen::Index k;
    plane.normal.cwiseAbs().maxCoeff(&k);
    if (plane.normal(k) < 0.0) plane.normal = -plane.normal;
  }
  plane.offset = plane.normal.dot(centroid);
  return plane;
}

PlaneFrame PlaneFrame::make(const Plane& plane, const Eigen::Matrix3d& camera_rotation) {
  PlaneFrame f;
  f.plane = plane;
  const Eigen::Vector3d& n = plane.normal;
  f.origin = plane.offset * n;

  // Rows of R are the camera axes expressed in world coordinates.
  const Eigen::Vector3d cam_x = camera_rotation.row(0).transpose();
  Eigen::Vector3d axis = cam_x - cam_x.dot(n) * n;
  if (axis.norm() < 1e-6) {
    const Eigen::Vector3d cam_z = camera_rotation.row(2).transpose();
    axis = cam_z - cam_z.dot(n) * n;
  }
  f.axis_x = axis.normalized();
  f.axis_y = n.cross(f.axis_x);
  return f;
}

GroundPoint PlaneFrame::to_plane(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d d = p - origin;
  return {d.dot(axis_x), d.dot(axis_y)};
}

Eigen::Vector3d PlaneFrame::lift(const GroundPoint& g) const { return origin + g.x * axis_x + g.y * axis_y; }

std::vector<GroundPoint> plane_coordinates(const PlaneFrame& frame, std::span<const Eigen::Vector3d> points) {
  std::vector<GroundPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(frame.to_plane(p));
  return out;
}

}  // namespace ih
