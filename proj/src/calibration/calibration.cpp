#include "ih/calibration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ih/error.hpp"

namespace ih {

using nlohmann::json;

namespace {

constexpr int kCalibrationVersion = 1;
constexpr double kBoundaryTolerance = 1e-9;

double cross(const GroundPoint& o, const GroundPoint& a, const GroundPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const GroundPoint& a, const GroundPoint& b, const GroundPoint& p, double tol) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  if (std::abs(cross(a, b, p)) > tol * std::max(len, 1.0)) return false;
  return p.x >= std::min(a.x, b.x) - tol && p.x <= std::max(a.x, b.x) + tol &&
         p.y >= std::min(a.y, b.y) - tol && p.y <= std::max(a.y, b.y) + tol;
}

int orientation(double value) { return (value > 0.0) - (value < 0.0); }

bool segments_intersect(const GroundPoint& p1, const GroundPoint& p2, const GroundPoint& q1,
                        const GroundPoint& q2) {
  const int o1 = orientation(cross(p1, p2, q1));
  const int o2 = orientation(cross(p1, p2, q2));
  const int o3 = orientation(cross(q1, q2, p1));
  const int o4 = orientation(cross(q1, q2, p2));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1, 0.0)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2, 0.0)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1, 0.0)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2, 0.0)) return true;
  return false;
}

}  // namespace

void MarkerGrid::validate() const {
  if (rows != 3 || cols != 3) raise(ErrorKind::InvalidArgument, "marker grid must be 3x3");
  if (!(spacing_x > 0.0) || !(spacing_y > 0.0) || !std::isfinite(spacing_x) ||
      !std::isfinite(spacing_y)) {
    raise(ErrorKind::InvalidArgument, "marker spacing must be positive");
  }
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    raise(ErrorKind::InvalidArgument, "marker origin must be finite");
  }
}

std::vector<GroundPoint> grid_ground_points(const MarkerGrid& grid) {
  grid.validate();
  std::vector<GroundPoint> points;
  points.reserve(static_cast<std::size_t>(grid.rows * grid.cols));
  for (int i = 0; i < grid.rows; ++i)
    for (int j = 0; j < grid.cols; ++j)
      points.push_back({grid.origin.x + j * grid.spacing_x, grid.origin.y + i * grid.spacing_y});
  return points;
}

bool polygon_self_intersects(std::span<const GroundPoint> v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GroundPoint& a1 = v[i];
    const GroundPoint& a2 = v[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const GroundPoint& b1 = v[j];
      const GroundPoint& b2 = v[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share a vertex; they only conflict if they fold back
        // onto each other.
        const GroundPoint& shared = (j == i + 1) ? a2 : a1;
        const GroundPoint& other_a = (j == i + 1) ? a1 : a2;
        const GroundPoint& other_b = (j == i + 1) ? b2 : b1;
        if (cross(shared, other_a, other_b) == 0.0) {
          const double dot = (other_a.x - shared.x) * (other_b.x - shared.x) +
                             (other_a.y - shared.y) * (other_b.y - shared.y);
          if (dot > 0.0) return true;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return true;
    }
  }
  return false;
}

WalkingArea::WalkingArea(std::vector<GroundPoint> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) raise(ErrorKind::InvalidArgument, "walking area needs at least 3 vertices");
  for (const auto& p : vertices_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      raise(ErrorKind::InvalidArgument, "walking area vertex is not finite");
  if (polygon_self_intersects(vertices_)) {
    raise(ErrorKind::SelfIntersectingPolygon, "walking area edges cross");
  }
  if (signed_area() == 0.0) raise(ErrorKind::SelfIntersectingPolygon, "walking area has zero area");
}

double WalkingArea::signed_area() const {
  double twice = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

bool WalkingArea::contains(const GroundPoint& p) const {
  const std::size_t n = vertices_.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GroundPoint& a = vertices_[i];
    const GroundPoint& b = vertices_[j];
    if (on_segment(a, b, p, kBoundaryTolerance)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

WalkingArea::Bounds WalkingArea::bounds() const {
  Bounds b{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
  for (const auto& p : vertices_) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

std::string utc_now_iso8601() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Calibration Calibration::from_homography(const Homography& ground_to_image, std::string camera_id) {
  Calibration cal;
  cal.ground_to_image = ground_to_image;
  cal.image_to_ground = invert(ground_to_image);
  cal.camera_id = std::move(camera_id);
  cal.created_at = utc_now_iso8601();
  return cal;
}

Calibration calibrate(const MarkerGrid& grid, std::span<const PixelPoint> clicked_pixels,
                      const CalibrateOptions& options) {
  if (clicked_pixels.size() != 9) {
    raise(ErrorKind::InvalidArgument,
          "calibration needs exactly 9 clicked markers, got " + std::to_string(clicked_pixels.size()));
  }
  for (const auto& p : clicked_pixels)
    if (!std::isfinite(p.u) || !std::isfinite(p.v))
      raise(ErrorKind::InvalidArgument, "clicked pixel is not finite");

  const std::vector<GroundPoint> ground = grid_ground_points(grid);
  std::vector<Correspondence> pairs;
  pairs.reserve(9);
  for (std::size_t i = 0; i < 9; ++i) pairs.push_back({clicked_pixels[i], ground[i]});

  const RansacResult ransac = estimate_homography_ransac(pairs, options.ransac);
  std::vector<Correspondence> inliers;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (ransac.inliers[i]) inliers.push_back(pairs[i]);
  const Homography h = refine_homography_lm(ransac.homography, inliers, options.lm);

  Calibration cal;
  cal.ground_to_image = h;
  cal.image_to_ground = invert(h);
  cal.camera_id = options.camera_id;
  cal.created_at = utc_now_iso8601();
  cal.rms_backprojection_px = std::sqrt(backprojection_error(h, pairs) / 9.0);
  cal.grid = grid;
  cal.clicked_pixels.assign(clicked_pixels.begin(), clicked_pixels.end());

  if (cal.rms_backprojection_px > options.max_rms_px) {
    std::ostringstream msg;
    msg << "RMS back-projection " << cal.rms_backprojection_px << " px exceeds ceiling "
        << options.max_rms_px << " px (check the marker click order)";
    raise(ErrorKind::CalibrationRejected, msg.str());
  }
  return cal;
}

Calibration set_walking_area(Calibration cal, std::span<const PixelPoint> pixel_polygon) {
  if (pixel_polygon.size() < 3) raise(ErrorKind::InvalidArgument, "walking area needs at least 3 vertices");
  std::vector<GroundPoint> ground;
  ground.reserve(pixel_polygon.size());
  for (const auto& p : pixel_polygon) ground.push_back(cal.image_to_ground.to_ground(p));
  cal.walking_area.emplace(std::move(ground));
  return cal;
}

bool in_walking_area(const Calibration& cal, const GroundPoint& p) {
  return !cal.walking_area || cal.walking_area->contains(p);
}

std::string calibration_to_json(const Calibration& cal) {
  json j;
  j["version"] = kCalibrationVersion;
  j["camera_id"] = cal.camera_id;
  j["created_at"] = cal.created_at;
  j["grid"] = {{"rows", cal.grid.rows},
               {"cols", cal.grid.cols},
               {"spacing_x_m", cal.grid.spacing_x},
               {"spacing_y_m", cal.grid.spacing_y},
               {"origin_m", {cal.grid.origin.x, cal.grid.origin.y}}};
  json clicked = json::array();
  for (const auto& p : cal.clicked_pixels) clicked.push_back({p.u, p.v});
  j["clicked_pixels"] = clicked;
  j["H_ground_to_image"] = cal.ground_to_image.row_major();
  j["H_image_to_ground"] = cal.image_to_ground.row_major();
  j["rms_backprojection_px"] = cal.rms_backprojection_px;
  json area = json::array();
  if (cal.walking_area)
    for (const auto& p : cal.walking_area->vertices()) area.push_back({p.x, p.y});
  j["walking_area_ground_m"] = area;
  j["conventions"] = {{"marker_order", "row-major"}, {"boundary", "inclusive"}};
  return j.dump(2);
}

Calibration calibration_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorKind::ParseError, std::string("calibration file: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kCalibrationVersion) {
      raise(ErrorKind::SchemaVersionMismatch, "calibration version " + j.at("version").dump());
    }
    if (j.contains("conventions")) {
      const auto& conv = j.at("conventions");
      if (conv.contains("marker_order") && conv.at("marker_order") != "row-major")
        raise(ErrorKind::ParseError, "unsupported marker_order convention");
    }
    Calibration cal;
    cal.camera_id = j.at("camera_id").get<std::string>();
    cal.created_at = j.value("created_at", std::string{});
    const auto h = j.at("H_ground_to_image").get<std::vector<double>>();
    cal.ground_to_image = Homography::from_row_major(h);
    if (j.contains("H_image_to_ground")) {
      cal.image_to_ground =
          Homography::from_row_major(j.at("H_image_to_ground").get<std::vector<double>>());
    } else {
      cal.image_to_ground = invert(cal.ground_to_image);
    }
    cal.rms_backprojection_px = j.value("rms_backprojection_px", 0.0);
    if (cal.rms_backprojection_px < 0.0) raise(ErrorKind::ParseError, "negative rms_backprojection_px");
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      cal.grid.rows = g.value("rows", 3);
      cal.grid.cols = g.value("cols", 3);
      cal.grid.spacing_x = g.at("spacing_x_m").get<double>();
      cal.grid.spacing_y = g.at("spacing_y_m").get<double>();
      if (g.contains("origin_m")) {
        const auto o = g.at("origin_m").get<std::vector<double>>();
        if (o.size() != 2) raise(ErrorKind::ParseError, "origin_m must have 2 entries");
        cal.grid.origin = {o[0], o[1]};
      }
    }
    if (j.contains("clicked_pixels")) {
      for (const auto& p : j.at("clicked_pixels")) {
        const auto uv = p.get<std::vector<double>>();
        if (uv.size() != 2) raise(ErrorKind::ParseError, "clicked pixel must have 2 entries");
        cal.clicked_pixels.push_back({uv[0], uv[1]});
      }
    }
    if (j.contains("walking_area_ground_m") && !j.at("walking_area_ground_m").empty()) {
      std::vector<GroundPoint> area;
      for (const auto& p : j.at("walking_area_ground_m")) {
        const auto xy = p.get<std::vector<double>>();
        if (xy.size() != 2) raise(ErrorKind::ParseError, "walking area vertex must have 2 entries");
        area.push_back({xy[0], xy[1]});
      }
      cal.walking_area.emplace(std::move(area));
    }
    return cal;
  } catch (const json::exception& e) {
    raise(ErrorKind::ParseError, std::string("calibration file: ") + e.what());
  }
}

void save_calibration(const Calibration& cal, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::StorageError, "cannot open " + path.string() + " for writing");
  out << calibration_to_json(cal) << '\n';
  if (!out.flush()) raise(ErrorKind::StorageError, "failed writing " + path.string());
}

Calibration load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::StorageError, "cannot read calibration " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return calibration_from_json(buf.str());
}

}  // namespace ih
