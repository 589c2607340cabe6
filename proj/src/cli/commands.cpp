#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "ih/calibration.hpp"
#include "ih/cli.hpp"
#include "ih/evaluation.hpp"
#include "ih/ingest.hpp"

namespace ih::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::GridTooLarge:
      return kUsageError;
    case ErrorKind::StorageError:
      return kStorageError;
    default:
      return kDataError;
  }
}

namespace {

std::string read_text(const std::string& path, const char* what) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) raise(ErrorKind::StorageError, std::string("cannot read ") + what + " " + path);
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::StorageError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) raise(ErrorKind::StorageError, "failed writing " + path.string());
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) raise(ErrorKind::StorageError, "cannot create directory " + dir.string());
}

PixelPoint json_pixel(const json& v, const char* field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    raise(ErrorKind::ParseError, std::string(field) + " entries must be [u, v]");
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<PixelPoint> json_pixels(const json& v, const char* field) {
  if (!v.is_array()) raise(ErrorKind::ParseError, std::string(field) + " must be an array");
  std::vector<PixelPoint> out;
  for (const auto& p : v) out.push_back(json_pixel(p, field));
  return out;
}

std::optional<double> json_spacing(const json& grid, const char* key) {
  if (!grid.contains(key)) return std::nullopt;
  if (!grid[key].is_number()) raise(ErrorKind::ParseError, std::string("grid.") + key + " must be a number");
  return grid[key].get<double>();
}

/// Walking area used for maps: the calibrated polygon, else the configured
/// rectangle, else none.
std::optional<WalkingArea> map_area(const Calibration& cal, const RunConfig& config) {
  if (cal.walking_area) return cal.walking_area;
  if (config.map_bounds) {
    const auto& b = *config.map_bounds;
    return WalkingArea({{b.min_x, b.min_y}, {b.max_x, b.min_y}, {b.max_x, b.max_y}, {b.min_x, b.max_y}});
  }
  return std::nullopt;
}

void write_map(const MapGrid& grid, const fs::path& dir, const std::string& base) {
  write_map_csv(grid, dir / (base + ".csv"));
  write_map_pgm(grid, dir / (base + ".pgm"));
}

json error_record(std::size_t line, const Error& e) {
  return {{"line", line}, {"error", to_string(e.kind())}, {"message", e.what()}};
}

double parse_date(const std::string& text, long utc_offset_s) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char dash1 = 0;
  char dash2 = 0;
  std::istringstream in(text);
  in >> y >> dash1 >> m >> dash2 >> d;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!in || !in.eof() || dash1 != '-' || dash2 != '-' || !ymd.ok())
    raise(ErrorKind::InvalidArgument, "date must be YYYY-MM-DD, got '" + text + "'");
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 - static_cast<double>(utc_offset_s);
}

}  // namespace

PointsInput parse_points(const std::string& text) {
  PointsInput input;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return input;

  if (text[first] == '{' || text[first] == '[') {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) raise(ErrorKind::ParseError, "points input is not valid JSON");
    if (j.is_array()) {
      input.clicked = json_pixels(j, "points");
      return input;
    }
    if (j.contains("version") && j["version"] != 1)
      raise(ErrorKind::SchemaVersionMismatch, "unsupported annotation version " + j["version"].dump());
    if (!j.contains("clicked_pixels")) raise(ErrorKind::ParseError, "annotation has no clicked_pixels");
    input.clicked = json_pixels(j["clicked_pixels"], "clicked_pixels");
    if (j.contains("grid")) {
      const json& g = j["grid"];
      if (!g.is_object()) raise(ErrorKind::ParseError, "grid must be an object");
      for (const char* key : {"rows", "cols"}) {
        if (g.contains(key) && g[key] != 3) raise(ErrorKind::ParseError, std::string("grid.") + key + " must be 3");
      }
      input.spacing_x = json_spacing(g, "spacing_x_m");
      input.spacing_y = json_spacing(g, "spacing_y_m");
    }
    if (j.contains("conventions") && j["conventions"].contains("marker_order") &&
        j["conventions"]["marker_order"] != "row-major") {
      raise(ErrorKind::ParseError, "unsupported marker_order " + j["conventions"]["marker_order"].dump());
    }
    if (j.contains("walking_area_pixels") && !j["walking_area_pixels"].is_null())
      input.walking_area = json_pixels(j["walking_area_pixels"], "walking_area_pixels");
    return input;
  }

  std::istringstream lines(text);
  std::size_t n = 0;
  for (std::string line; std::getline(lines, line);) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream fields(line);
    std::vector<double> values;
    for (double v; fields >> v;) values.push_back(v);
    if (!fields.eof()) raise(ErrorKind::ParseError, "points line " + std::to_string(n) + ": not a number");
    if (values.empty()) continue;
    if (values.size() != 2) raise(ErrorKind::ParseError, "points line " + std::to_string(n) + ": expected u v");
    input.clicked.push_back({values[0], values[1]});
  }
  return input;
}

int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err) {
  const PointsInput points = parse_points(read_text(args.points, "points file"));

  MarkerGrid grid;
  const auto sx = args.spacing_x ? args.spacing_x : points.spacing_x;
  const auto sy = args.spacing_y ? args.spacing_y : (args.spacing_x ? args.spacing_x : points.spacing_y);
  if (!sx || !sy) raise(ErrorKind::InvalidArgument, "grid spacing missing: pass --grid-spacing");
  grid.spacing_x = *sx;
  grid.spacing_y = *sy;
  grid.origin = args.origin;

  CalibrateOptions options;
  options.max_rms_px = args.max_rms_px;
  options.ransac.iterations = args.ransac_iterations;
  options.ransac.inlier_threshold = args.ransac_threshold;
  options.ransac.seed = args.seed;
  options.camera_id = args.camera_id;

  Calibration cal = calibrate(grid, points.clicked, options);
  if (!points.walking_area.empty()) cal = set_walking_area(std::move(cal), points.walking_area);
  save_calibration(cal, args.out);

  json summary = {{"camera_id", cal.camera_id},
                  {"rms_backprojection_px", cal.rms_backprojection_px},
                  {"out", args.out.string()},
                  {"walking_area", cal.walking_area.has_value()}};
  out << summary.dump() << '\n';
  err << "rms_backprojection_px " << cal.rms_backprojection_px << '\n';
  return kOk;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Calibration cal = load_calibration(config.calibration);
  RiskParams params = config.risk;
  if (config.auto_capacity) {
    if (!cal.walking_area) raise(ErrorKind::InvalidArgument, "capacity \"auto\" needs a walking area in the calibration");
    params.capacity = estimate_capacity(*cal.walking_area, params.tau);
  }
  params.validate();
  const std::string camera = config.camera_id.value_or(cal.camera_id);

  if (config.write_logs || config.write_maps) ensure_directory(config.output_dir);
  JsonlLogStore store(config.output_dir, config.utc_offset_s);

  std::optional<WalkingArea> area;
  OccupationAccumulator occupation;
  if (config.write_maps) {
    area = map_area(cal, config);
    if (area) {
      occupation = OccupationAccumulator(make_map_grid(*area, config.cell_size, config.map_cell_budget));
    } else {
      err << "warning: no walking area or map_bounds_m; maps disabled\n";
    }
  }

  DetectionReader reader(config.detections);
  RiskState state(params.window);
  AlarmMonitor alarms(params);
  std::optional<double> last_timestamp;
  std::string current_day;
  std::size_t frames = 0;
  std::size_t errors = 0;

  auto flush_occupation = [&](const std::string& day) {
    write_map(occupation.mean(), config.output_dir, occupation_map_basename(camera, day));
  };

  while (true) {
    std::optional<FrameDetections> frame;
    try {
      frame = reader.next();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::StorageError) throw;
      ++errors;
      json rec = error_record(reader.line_number(), e);
      rec["errors"] = errors;
      out << rec.dump() << '\n';
      continue;
    }
    if (!frame) break;

    if (last_timestamp && frame->timestamp <= *last_timestamp) {
      ++errors;
      out << json{{"line", reader.line_number()},
                  {"frame_id", frame->frame_id},
                  {"error", "NonMonotonicTimestamp"},
                  {"message", "timestamp does not increase"},
                  {"errors", errors}}
                 .dump()
          << '\n';
      continue;
    }
    last_timestamp = frame->timestamp;

    const SnapshotResult snap = to_snapshot(*frame, cal, config.min_confidence);
    const auto& positions = snap.snapshot.positions;
    const std::vector<double> risks = kernels::individual_risks(params, positions);
    const double g = global_risk(params, risks);
    const double d = state.update_dynamic_risk(g);
    const double smoothed = state.smoothed_count(positions.size());
    const auto events = alarms.update(frame->timestamp, d, smoothed);

    json links = json::array();
    for (const Link& l : link_severities(params, snap.snapshot)) {
      links.push_back({{"i", snap.source_index[l.i]},
                       {"j", snap.source_index[l.j]},
                       {"d", l.distance},
                       {"severity", l.severity}});
    }
    json alarm_list = json::array();
    for (const AlarmEvent& a : events) {
      alarm_list.push_back({{"type", to_string(a.type)}, {"timestamp", a.timestamp}, {"value", a.value}});
      err << "alarm: " << to_string(a.type) << " at " << a.timestamp << " value " << a.value << '\n';
    }
    json rec = {{"frame_id", frame->frame_id},
                {"timestamp", frame->timestamp},
                {"count", positions.size()},
                {"smoothed_count", smoothed},
                {"G", g},
                {"D", d},
                {"links", links},
                {"alarms", alarm_list},
                {"dropped",
                 {{"below_confidence", snap.below_confidence},
                  {"at_infinity", snap.at_infinity},
                  {"outside_area", snap.outside_area}}},
                {"errors", errors}};
    out << rec.dump() << '\n';
    ++frames;

    if (config.write_logs) {
      LogRecord log;
      log.timestamp = frame->timestamp;
      log.camera_id = camera;
      log.positions = positions;
      log.people_count = positions.size();
      log.global_risk = g;
      log.dynamic_risk = d;
      log.infraction_pairs = count_infractions(params, snap.snapshot);
      store.append(log);
    }

    if (area) {
      const std::string day = date_key(frame->timestamp, config.utc_offset_s);
      if (!current_day.empty() && day != current_day) {
        flush_occupation(current_day);
        occupation.reset();
      }
      current_day = day;
      const MapGrid dyn =
          kernels::dynamic_risk_map(params, positions, *area, config.cell_size, config.map_cell_budget);
      occupation.fold(dyn);
      if (config.map_every > 0 && frames % static_cast<std::size_t>(config.map_every) == 0) {
        write_map(dyn, config.output_dir, "dynamic_" + camera + "_" + std::to_string(frame->frame_id));
        flush_occupation(current_day);
      }
    }
  }

  if (area) flush_occupation(current_day.empty() ? "empty" : current_day);
  if (reader.foot_point_warnings() > 0)
    err << "warning: " << reader.foot_point_warnings() << " foot points above their box center\n";
  err << "frames " << frames << ", errors " << errors << '\n';
  return kOk;
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  if (args.thresholds.empty() || args.ranges.empty())
    raise(ErrorKind::InvalidArgument, "thresholds and ranges must not be empty");
  for (double t : args.thresholds) {
    if (!(t > 0.0) || !std::isfinite(t)) raise(ErrorKind::InvalidArgument, "thresholds must be positive");
  }
  for (double r : args.ranges) {
    if (!(r > 0.0)) raise(ErrorKind::InvalidArgument, "ranges must be positive");
  }
  if (args.stride == 0) raise(ErrorKind::InvalidArgument, "stride must be >= 1");

  const CameraModel camera = camera_from_json(read_text(args.camera.string(), "camera file"));
  std::vector<EvalInputFrame> inputs = read_eval_frames(args.input);

  std::map<std::string, std::vector<Eigen::Vector3d>> feet;
  for (const auto& in : inputs) {
    auto& bucket = feet[in.frame.sequence_id];
    bucket.insert(bucket.end(), in.frame.gt_feet_3d.begin(), in.frame.gt_feet_3d.end());
  }

  std::map<std::string, SequenceGeometry> geometry;
  std::map<std::string, EvalCorrespondences> correspondences;
  for (const auto& [seq, points] : feet) {
    EvalCorrespondences ec = build_eval_correspondences(points, camera, args.seed);
    geometry[seq] = SequenceGeometry{ec.frame, camera};
    correspondences.emplace(seq, std::move(ec));
  }

  std::vector<EvalFrame> frames;
  frames.reserve(inputs.size());
  for (auto& in : inputs) {
    if (in.predicted_pixels) {
      const Homography& h = correspondences.at(in.frame.sequence_id).ground_to_image;
      const Homography inv = invert(h);
      in.frame.predicted_ground.clear();
      for (const auto& px : *in.predicted_pixels) in.frame.predicted_ground.push_back(inv.to_ground(px));
    }
    frames.push_back(std::move(in.frame));
  }

  const MetricsTable table = compute_metrics(frames, geometry, args.thresholds, args.ranges, args.stride);

  ensure_directory(args.out_dir);
  write_text(args.out_dir / "metrics.csv", metrics_to_csv(table));
  write_text(args.out_dir / "metrics.json", metrics_to_json(table));

  json geo = json::object();
  for (const auto& [seq, ec] : correspondences) {
    json centers = json::array();
    for (const auto& c : ec.centers) centers.push_back({c.x, c.y});
    json pixels = json::array();
    for (const auto& p : ec.pairs) pixels.push_back({p.image.u, p.image.v});
    const auto& n = ec.frame.plane.normal;
    geo[seq] = {{"plane_normal", {n.x(), n.y(), n.z()}},
                {"plane_offset", ec.frame.plane.offset},
                {"centers_m", centers},
                {"center_pixels", pixels},
                {"H_ground_to_image", ec.ground_to_image.row_major()}};
  }
  write_text(args.out_dir / "eval_geometry.json", geo.dump(2) + "\n");

  out << metrics_to_text(table);
  err << "frames scored " << table.frames_scored << " of " << frames.size() << '\n';
  return kOk;
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  std::error_code ec;
  if (!fs::is_directory(args.logs, ec))
    raise(ErrorKind::StorageError, "log directory " + args.logs.string() + " does not exist");

  JsonlLogStore store(args.logs, args.utc_offset_s);
  ReportOptions options;
  options.utc_offset_s = args.utc_offset_s;
  if (args.start_date) options.start = parse_date(*args.start_date, args.utc_offset_s);
  const Report report = build_report(store, args.period, args.camera, options);
  if (report.skipped_lines > 0)
    err << "warning: skipped " << report.skipped_lines << " corrupt trailing line(s)\n";

  if (args.config) {
    const RunConfig config = load_run_config(*args.config);
    const Calibration cal = load_calibration(config.calibration);
    const auto area = map_area(cal, config);
    if (!area) raise(ErrorKind::InvalidArgument, "map recomputation needs a walking area or map_bounds_m");
    RiskParams params = config.risk;
    if (config.auto_capacity) params.capacity = estimate_capacity(*area, params.tau);

    const fs::path map_dir = args.out ? args.out->parent_path() : args.logs;
    if (!map_dir.empty()) ensure_directory(map_dir);
    const MapGrid zero = make_map_grid(*area, config.cell_size, config.map_cell_budget);
    std::map<std::string, OccupationAccumulator> per_day;
    for (const auto& r : store.read_all(args.camera).records) {
      const std::string day = date_key(r.timestamp, args.utc_offset_s);
      if (std::none_of(report.occupation_maps.begin(), report.occupation_maps.end(),
                       [&](const OccupationMapRef& m) { return m.date == day; }))
        continue;
      auto [it, fresh] = per_day.try_emplace(day, zero);
      it->second.fold(kernels::dynamic_risk_map(params, r.positions, *area, config.cell_size, config.map_cell_budget));
    }
    for (const auto& [day, acc] : per_day) write_map(acc.mean(), map_dir, occupation_map_basename(args.camera, day));
  }

  const std::string text = report_to_json(report) + "\n";
  if (args.out) {
    write_text(*args.out, text);
  } else {
    out << text;
  }
  return kOk;
}

}  // namespace ih::cli
