#include <sstream>

#include "ih/error.hpp"
#include "ih/evaluation.hpp"

namespace ih {

EvalCorrespondences build_eval_correspondences(std::span<const Eigen::Vector3d> feet, const CameraModel& camera,
                                               std::uint64_t seed) {
  camera.validate();
  EvalCorrespondences out;
  const Plane plane = fit_plane(feet, camera.center());
  out.frame = PlaneFrame::make(plane, camera.rotation);

  const std::vector<GroundPoint> ground = plane_coordinates(out.frame, feet);
  out.centers = kmeans9(ground, seed);

  out.pairs.reserve(out.centers.size());
  for (std::size_t k = 0; k < out.centers.size(); ++k) {
    const Eigen::Vector3d world = out.frame.lift(out.centers[k]);
    PixelPoint px;
    try {
      px = pinhole_project(camera, world);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BehindCamera) throw;
      std::ostringstream msg;
      msg << "cluster center " << k << " at (" << world.x() << ", " << world.y() << ", " << world.z()
          << ") is not in front of the camera; the foot plane passes through or behind the camera center";
      raise(ErrorKind::BehindCamera, msg.str());
    }
    out.pairs.push_back({px, out.centers[k]});
  }
  out.ground_to_image = estimate_homography_dlt(out.pairs);
  return out;
}

}  // namespace ih
