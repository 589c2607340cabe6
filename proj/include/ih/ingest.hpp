#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ih/calibration.hpp"
#include "ih/geometry.hpp"
#include "ih/risk.hpp"

namespace ih {

struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;
};

struct Detection {
  BoundingBox bbox;
  double confidence = 1.0;
  std::optional<PixelPoint> foot_point;  // occlusion-corrected feet midpoint
  std::optional<PixelPoint> head_point;
};

struct FrameDetections {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  std::string camera_id;
  std::vector<Detection> detections;
};

inline constexpr double kDefaultMinConfidence = 0.3;

/// foot_point when present, otherwise the bottom-center of the box.
PixelPoint ground_contact_pixel(const Detection& d);

struct SnapshotResult {
  SceneSnapshot snapshot;
  std::vector<std::size_t> source_index;  // detection index of each position
  std::size_t below_confidence = 0;
  std::size_t at_infinity = 0;
  std::size_t outside_area = 0;
};

/// Projects each sufficiently confident detection to the ground and keeps the
/// ones inside the walking area, in input order. Points that map to infinity
/// are dropped and counted.
SnapshotResult to_snapshot(const FrameDetections& frame, const Calibration& cal,
                           double min_confidence = kDefaultMinConfidence);

/// Parses one JSON Lines record. Throws ParseError / SchemaVersionMismatch.
FrameDetections parse_frame_detections(const std::string& line, std::size_t line_number = 0);

/// Sequential reader over a detections JSONL file, or stdin for "-".
class DetectionReader {
 public:
  explicit DetectionReader(const std::string& path);

  /// Next frame in file order; std::nullopt at end of input. Blank lines are
  /// skipped. Throws ParseError naming the line number.
  std::optional<FrameDetections> next();

  std::size_t line_number() const noexcept { return line_; }
  /// Detections whose foot point sits above the box center.
  std::size_t foot_point_warnings() const noexcept { return foot_warnings_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* in_ = nullptr;
  std::size_t line_ = 0;
  std::size_t foot_warnings_ = 0;
};

/// Reads a whole file eagerly.
std::vector<FrameDetections> read_detections(const std::string& path);

}  // namespace ih
