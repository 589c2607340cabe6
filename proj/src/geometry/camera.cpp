#include <cmath>

#include "ih/error.hpp"
#include "ih/geometry.hpp"

namespace ih {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) raise(ErrorKind::InvalidArgument, "focal lengths must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy) || !rotation.allFinite() || !translation.allFinite()) {
    raise(ErrorKind::InvalidArgument, "camera parameters must be finite");
  }
  const double deviation =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (deviation > 1e-9) raise(ErrorKind::InvalidArgument, "rotation is not orthonormal");
}

Eigen::Matrix3d CameraModel::intrinsics() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Vector3d CameraModel::center() const { return -rotation.transpose() * translation; }

PixelPoint pinhole_project(const CameraModel& cam, const Eigen::Vector3d& world) {
  const Eigen::Vector3d pc = cam.rotation * world + cam.translation;
  if (!(pc.z() > 1e-9)) raise(ErrorKind::BehindCamera, "point has non-positive depth");
  return {cam.fx * pc.x() / pc.z() + cam.cx, cam.fy * pc.y() / pc.z() + cam.cy};
}

Homography ground_plane_homography(const CameraModel& cam) {
  Eigen::Matrix3d rt;
  rt.col(0) = cam.rotation.col(0);
  rt.col(1) = cam.rotation.col(1);
  rt.col(2) = cam.translation;
  return Homography::from_matrix(cam.intrinsics() * rt);
}

}  // namespace ih
