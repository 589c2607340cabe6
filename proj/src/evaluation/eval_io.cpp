#include <cmath>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "ih/error.hpp"
#include "ih/evaluation.hpp"

namespace ih {

using nlohmann::json;

namespace {

std::string where(std::size_t line) { return line ? "line " + std::to_string(line) + ": " : std::string{}; }

std::vector<double> finite_array(const json& v, std::size_t size, const char* field, std::size_t line) {
  if (!v.is_array() || v.size() != size)
    raise(ErrorKind::ParseError, where(line) + field + " must have " + std::to_string(size) + " entries");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>()))
      raise(ErrorKind::ParseError, where(line) + field + " has a non-finite entry");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

CameraModel camera_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    CameraModel cam;
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    if (j.contains("R")) {
      const auto r = finite_array(j.at("R"), 9, "R", 0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) cam.rotation(a, b) = r[3 * a + b];
    }
    if (j.contains("t")) {
      const auto t = finite_array(j.at("t"), 3, "t", 0);
      cam.translation = {t[0], t[1], t[2]};
    }
    cam.validate();
    return cam;
  } catch (const json::exception& e) {
    raise(ErrorKind::ParseError, std::string("camera file: ") + e.what());
  }
}

std::string camera_to_json(const CameraModel& cam) {
  json r = json::array();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) r.push_back(cam.rotation(a, b));
  json j = {{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx}, {"cy", cam.cy},
            {"R", r}, {"t", {cam.translation.x(), cam.translation.y(), cam.translation.z()}}};
  return j.dump(2);
}

EvalInputFrame parse_eval_frame(const std::string& line, std::size_t line_number) {
  EvalInputFrame out;
  try {
    const json j = json::parse(line);
    const json& id = j.at("frame_id");
    if (!id.is_number_integer() || id.get<std::int64_t>() < 0)
      raise(ErrorKind::ParseError, where(line_number) + "frame_id must be a non-negative integer");
    out.frame.frame_id = id.get<std::int64_t>();
    if (j.contains("sequence_id")) {
      const json& s = j.at("sequence_id");
      out.frame.sequence_id = s.is_string() ? s.get<std::string>() : s.dump();
    }
    for (const auto& g : j.at("gt_feet_3d")) {
      const auto v = finite_array(g, 3, "gt_feet_3d", line_number);
      out.frame.gt_feet_3d.emplace_back(v[0], v[1], v[2]);
    }
    if (j.contains("predicted_ground")) {
      for (const auto& p : j.at("predicted_ground")) {
        const auto v = finite_array(p, 2, "predicted_ground", line_number);
        out.frame.predicted_ground.push_back({v[0], v[1]});
      }
    }
    if (j.contains("predicted_pixels")) {
      std::vector<PixelPoint> px;
      for (const auto& p : j.at("predicted_pixels")) {
        const auto v = finite_array(p, 2, "predicted_pixels", line_number);
        px.push_back({v[0], v[1]});
      }
      out.predicted_pixels = std::move(px);
    }
    if (!j.contains("predicted_ground") && !j.contains("predicted_pixels"))
      raise(ErrorKind::ParseError, where(line_number) + "missing predicted_ground");
  } catch (const json::exception& e) {
    raise(ErrorKind::ParseError, where(line_number) + e.what());
  }
  return out;
}

std::vector<EvalInputFrame> read_eval_frames(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) raise(ErrorKind::StorageError, "cannot open evaluation input " + path);
    in = &file;
  }
  std::vector<EvalInputFrame> frames;
  std::size_t n = 0;
  for (std::string line; std::getline(*in, line);) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    frames.push_back(parse_eval_frame(line, n));
  }
  return frames;
}

}  // namespace ih
