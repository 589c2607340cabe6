#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ih/geometry.hpp"

namespace ih {

/// Nine-marker carpet laid out as a 3x3 lattice on the ground.
struct MarkerGrid {
  int rows = 3;
  int cols = 3;
  double spacing_x = 1.0;  // m
  double spacing_y = 1.0;  // m
  GroundPoint origin;      // marker (0, 0)

  void validate() const;
};

/// Row-major lattice origin + (j * spacing_x, i * spacing_y).
std::vector<GroundPoint> grid_ground_points(const MarkerGrid& grid);

class WalkingArea {
 public:
  /// Throws SelfIntersectingPolygon for crossing edges or zero area,
  /// InvalidArgument for fewer than three vertices.
  explicit WalkingArea(std::vector<GroundPoint> vertices);

  const std::vector<GroundPoint>& vertices() const noexcept { return vertices_; }

  double signed_area() const;
  /// Inclusive: points on the boundary are inside.
  bool contains(const GroundPoint& p) const;

  struct Bounds {
    double min_x, min_y, max_x, max_y;
  };
  Bounds bounds() const;

 private:
  std::vector<GroundPoint> vertices_;
};

/// Non-adjacent edge crossing test over the closed polygon.
bool polygon_self_intersects(std::span<const GroundPoint> vertices);

struct Calibration {
  Homography ground_to_image;
  Homography image_to_ground;
  std::optional<WalkingArea> walking_area;
  std::string camera_id;
  std::string created_at;  // ISO-8601 UTC
  double rms_backprojection_px = 0.0;
  MarkerGrid grid;
  std::vector<PixelPoint> clicked_pixels;

  /// Calibration straight from a known homography, no markers involved.
  static Calibration from_homography(const Homography& ground_to_image,
                                     std::string camera_id = "cam");
};

struct CalibrateOptions {
  double max_rms_px = 5.0;
  RansacOptions ransac;
  LmOptions lm;
  std::string camera_id = "cam";
};

/// Pairs the nine clicked pixels (row-major marker order) with the lattice,
/// fits RANSAC + LM and stores both directions. The RMS is taken over all
/// nine markers so a single mis-click is caught by the ceiling.
Calibration calibrate(const MarkerGrid& grid, std::span<const PixelPoint> clicked_pixels,
                      const CalibrateOptions& options = {});

/// Converts the pixel polygon to the ground and stores it.
Calibration set_walking_area(Calibration cal, std::span<const PixelPoint> pixel_polygon);

/// Always true when no walking area is configured.
bool in_walking_area(const Calibration& cal, const GroundPoint& p);

// Calibration file (JSON) round trip.
void save_calibration(const Calibration& cal, const std::filesystem::path& path);
Calibration load_calibration(const std::filesystem::path& path);
std::string calibration_to_json(const Calibration& cal);
Calibration calibration_from_json(const std::string& text);

std::string utc_now_iso8601();

}  // namespace ih
