#pragma once

// Ground-plane detection scoring: plane regression over annotated feet, an
// in-plane coordinate frame, nine-center clustering, the evaluation
// homography, and precision / recall / F1 under thresholded one-to-one
// matching per camera-range bucket.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ih/geometry.hpp"

namespace ih {

/// { x : normal . x = offset }, unit normal.
struct Plane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;

  double signed_distance(const Eigen::Vector3d& p) const { return normal.dot(p) - offset; }
};

/// Total-least-squares plane. The normal is oriented so that
/// n . (viewpoint - centroid) >= 0. Throws DegeneratePoints for fewer than
/// three points or collinear input.
Plane fit_plane(std::span<const Eigen::Vector3d> points,
                const Eigen::Vector3d& viewpoint = Eigen::Vector3d::Zero());

/// Orthonormal in-plane frame. The first axis is the camera x-axis projected
/// onto the plane (camera z-axis if that projection is too short), the second
/// is normal x first. The frame origin is the foot of the perpendicular from
/// the world origin.
struct PlaneFrame {
  Plane plane;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis_x = Eigen::Vector3d::UnitX();
  Eigen::Vector3d axis_y = Eigen::Vector3d::UnitY();

  static PlaneFrame make(const Plane& plane, const Eigen::Matrix3d& camera_rotation = Eigen::Matrix3d::Identity());

  GroundPoint to_plane(const Eigen::Vector3d& p) const;
  Eigen::Vector3d lift(const GroundPoint& g) const;
};

std::vector<GroundPoint> plane_coordinates(const PlaneFrame& frame, std::span<const Eigen::Vector3d> points);

struct KMeansOptions {
  int max_iterations = 300;
  double shift_tolerance = 1e-6;  // m
  int restarts = 8;
};

/// Lloyd's algorithm with k-means++ seeding, k = 9, best of `restarts` runs by
/// inertia. Deterministic for a given seed. Throws InsufficientPoints when
/// fewer than nine distinct points are given.
std::vector<GroundPoint> kmeans9(std::span<const GroundPoint> points, std::uint64_t seed,
                                 const KMeansOptions& options = {});

struct EvalCorrespondences {
  PlaneFrame frame;
  std::vector<GroundPoint> centers;
  std::vector<Correspondence> pairs;  // nine, image <-> in-plane ground
  Homography ground_to_image;         // DLT on the nine pairs
};

/// Plane fit over every annotated foot, clustering to nine centers, lifting
/// back to 3D and pinhole projection. BehindCamera from any center aborts.
EvalCorrespondences build_eval_correspondences(std::span<const Eigen::Vector3d> feet,
                                               const CameraModel& camera, std::uint64_t seed);

struct MatchedPair {
  std::size_t gt = 0;
  std::size_t pred = 0;
  double distance = 0.0;
};

struct MatchResult {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::vector<MatchedPair> pairs;
};

/// Maximum-cardinality one-to-one matching among pairs with distance <= t,
/// minimum total distance among those.
MatchResult match_frame(std::span<const GroundPoint> gt, std::span<const GroundPoint> pred, double threshold);

struct EvalFrame {
  std::int64_t frame_id = 0;
  std::string sequence_id = "0";
  std::vector<Eigen::Vector3d> gt_feet_3d;
  std::vector<GroundPoint> predicted_ground;
};

/// GT kept when its 3D distance to the camera center is <= max_range;
/// predictions kept when their in-plane distance to the camera's footprint
/// is <= max_range.
EvalFrame apply_range_filter(const EvalFrame& frame, const PlaneFrame& plane, const CameraModel& camera,
                             double max_range);

struct Scores {
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f1 = 0.0;
};

/// Percent scores from counts with the zero-denominator conventions:
/// nothing to find and nothing found is a perfect 100 / 100 / 100.
Scores scores_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct MetricsCell {
  double threshold = 0.0;
  double max_range = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  Scores aggregate;  // from pooled counts
  Scores macro;      // mean of per-sequence scores
};

struct MetricsTable {
  std::vector<double> thresholds;
  std::vector<double> ranges;
  std::size_t frames_scored = 0;
  std::vector<MetricsCell> cells;  // range-major, then threshold

  const MetricsCell& at(double max_range, double threshold) const;
};

inline const std::vector<double> kDefaultThresholds{0.5, 1.0, 1.5};
inline const std::vector<double> kDefaultRanges{10.0, 20.0, 30.0, 100.0};

/// Per-sequence data the scorer needs alongside the frames.
struct SequenceGeometry {
  PlaneFrame frame;
  CameraModel camera;
};

/// Scores frames whose frame_id is a multiple of `stride`, pooling counts per
/// (threshold, range). GT ground positions are the in-plane coordinates of
/// the annotated feet.
MetricsTable compute_metrics(std::span<const EvalFrame> frames,
                             const std::map<std::string, SequenceGeometry>& geometry,
                             std::span<const double> thresholds, std::span<const double> ranges,
                             std::size_t stride);

namespace reference {
/// Serial scorer kept for cross-checking the parallel one.
MetricsTable compute_metrics(std::span<const EvalFrame> frames,
                             const std::map<std::string, SequenceGeometry>& geometry,
                             std::span<const double> thresholds, std::span<const double> ranges,
                             std::size_t stride);
}  // namespace reference

std::string metrics_to_csv(const MetricsTable& table);
std::string metrics_to_json(const MetricsTable& table);
/// Fixed-width text table, one row per range and variant.
std::string metrics_to_text(const MetricsTable& table);

CameraModel camera_from_json(const std::string& text);
std::string camera_to_json(const CameraModel& camera);

struct EvalInputFrame {
  EvalFrame frame;
  std::optional<std::vector<PixelPoint>> predicted_pixels;
};

/// Evaluation JSONL record: {frame_id, gt_feet_3d[][3], predicted_ground[][2]}
/// with optional sequence_id and predicted_pixels[][2].
EvalInputFrame parse_eval_frame(const std::string& line, std::size_t line_number = 0);
std::vector<EvalInputFrame> read_eval_frames(const std::string& path);

}  // namespace ih
