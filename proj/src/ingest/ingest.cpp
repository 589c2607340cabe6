#include "ih/ingest.hpp"

#include <cmath>
#include <iostream>

#include "json.hpp"

#include "ih/error.hpp"

namespace ih {

using nlohmann::json;

namespace {

constexpr int kDetectionsVersion = 1;

std::string where(std::size_t line) { return line ? "line " + std::to_string(line) + ": " : std::string{}; }

double finite_number(const json& v, const char* field, std::size_t line) {
  if (!v.is_number()) raise(ErrorKind::ParseError, where(line) + field + " is not a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) raise(ErrorKind::ParseError, where(line) + field + " is not finite");
  return x;
}

PixelPoint pixel(const json& v, const char* field, std::size_t line) {
  if (!v.is_array() || v.size() != 2) raise(ErrorKind::ParseError, where(line) + field + " must be [u, v]");
  return {finite_number(v[0], field, line), finite_number(v[1], field, line)};
}

}  // namespace

PixelPoint ground_contact_pixel(const Detection& d) {
  if (d.foot_point) return *d.foot_point;
  return {(d.bbox.x1 + d.bbox.x2) / 2.0, d.bbox.y2};
}

SnapshotResult to_snapshot(const FrameDetections& frame, const Calibration& cal, double min_confidence) {
  SnapshotResult out;
  out.snapshot.timestamp = frame.timestamp;
  out.snapshot.positions.reserve(frame.detections.size());
  for (std::size_t k = 0; k < frame.detections.size(); ++k) {
    const Detection& d = frame.detections[k];
    if (!(d.confidence >= min_confidence)) {
      ++out.below_confidence;
      continue;
    }
    GroundPoint g;
    try {
      g = cal.image_to_ground.to_ground(ground_contact_pixel(d));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PointAtInfinity) throw;
      ++out.at_infinity;
      continue;
    }
    if (!in_walking_area(cal, g)) {
      ++out.outside_area;
      continue;
    }
    out.snapshot.positions.push_back(g);
    out.source_index.push_back(k);
  }
  return out;
}

FrameDetections parse_frame_detections(const std::string& line, std::size_t line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    raise(ErrorKind::ParseError, where(line_number) + e.what());
  }
  if (!j.is_object()) raise(ErrorKind::ParseError, where(line_number) + "record is not an object");

  if (j.contains("version")) {
    if (!j["version"].is_number_integer() || j["version"].get<int>() != kDetectionsVersion) {
      raise(ErrorKind::SchemaVersionMismatch, where(line_number) + "unsupported version " + j["version"].dump());
    }
  }

  FrameDetections frame;
  try {
    const json& id = j.at("frame_id");
    if (!id.is_number_integer() || id.get<std::int64_t>() < 0)
      raise(ErrorKind::ParseError, where(line_number) + "frame_id must be a non-negative integer");
    frame.frame_id = id.get<std::int64_t>();
    frame.timestamp = finite_number(j.at("timestamp"), "timestamp", line_number);
    if (!j.at("camera_id").is_string()) raise(ErrorKind::ParseError, where(line_number) + "camera_id must be a string");
    frame.camera_id = j.at("camera_id").get<std::string>();

    const json& dets = j.at("detections");
    if (!dets.is_array()) raise(ErrorKind::ParseError, where(line_number) + "detections must be an array");
    frame.detections.reserve(dets.size());
    for (const json& dj : dets) {
      Detection d;
      const json& box = dj.at("bbox");
      if (!box.is_array() || box.size() != 4)
        raise(ErrorKind::ParseError, where(line_number) + "bbox must be [x1, y1, x2, y2]");
      d.bbox = {finite_number(box[0], "bbox", line_number), finite_number(box[1], "bbox", line_number),
                finite_number(box[2], "bbox", line_number), finite_number(box[3], "bbox", line_number)};
      if (!(d.bbox.x1 < d.bbox.x2) || !(d.bbox.y1 < d.bbox.y2))
        raise(ErrorKind::ParseError, where(line_number) + "bbox must satisfy x1 < x2 and y1 < y2");
      d.confidence = finite_number(dj.at("confidence"), "confidence", line_number);
      if (d.confidence < 0.0 || d.confidence > 1.0)
        raise(ErrorKind::ParseError, where(line_number) + "confidence must be in [0, 1]");
      if (dj.contains("foot_point") && !dj["foot_point"].is_null())
        d.foot_point = pixel(dj["foot_point"], "foot_point", line_number);
      if (dj.contains("head_point") && !dj["head_point"].is_null())
        d.head_point = pixel(dj["head_point"], "head_point", line_number);
      frame.detections.push_back(d);
    }
  } catch (const json::exception& e) {
    raise(ErrorKind::ParseError, where(line_number) + e.what());
  }
  return frame;
}

DetectionReader::DetectionReader(const std::string& path) {
  if (path == "-") {
    in_ = &std::cin;
    return;
  }
  file_ = std::make_unique<std::ifstream>(path);
  if (!*file_) raise(ErrorKind::StorageError, "cannot open detections file " + path);
  in_ = file_.get();
}

std::optional<FrameDetections> DetectionReader::next() {
  std::string line;
  while (std::getline(*in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    FrameDetections frame = parse_frame_detections(line, line_);
    for (const auto& d : frame.detections) {
      if (d.foot_point && d.foot_point->v < (d.bbox.y1 + d.bbox.y2) / 2.0) ++foot_warnings_;
    }
    return frame;
  }
  return std::nullopt;
}

std::vector<FrameDetections> read_detections(const std::string& path) {
  DetectionReader reader(path);
  std::vector<FrameDetections> frames;
  while (auto f = reader.next()) frames.push_back(std::move(*f));
  return frames;
}

}  // namespace ih
