#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "ih/analytics.hpp"
#include "ih/error.hpp"

namespace ih {

using nlohmann::json;

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) raise(ErrorKind::InvalidArgument, std::string("log record ") + field + " is not finite");
}

}  // namespace

std::string date_key(double timestamp, long utc_offset_s) {
  using namespace std::chrono;
  const sys_seconds t{seconds{static_cast<long long>(std::floor(timestamp)) + utc_offset_s}};
  const year_month_day ymd{floor<days>(t)};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

double day_start(double timestamp, long utc_offset_s) {
  using namespace std::chrono;
  const sys_seconds t{seconds{static_cast<long long>(std::floor(timestamp)) + utc_offset_s}};
  const auto midnight = floor<days>(t);
  return static_cast<double>(duration_cast<seconds>(midnight.time_since_epoch()).count() - utc_offset_s);
}

std::string log_record_to_json(const LogRecord& r) {
  require_finite(r.timestamp, "timestamp");
  require_finite(r.global_risk, "global_risk");
  require_finite(r.dynamic_risk, "dynamic_risk");
  if (r.global_risk < 0.0 || r.global_risk > 1.0 || r.dynamic_risk < 0.0 || r.dynamic_risk > 1.0) {
    raise(ErrorKind::InvalidArgument, "log record risks must be in [0, 1]");
  }
  json positions = json::array();
  for (const auto& p : r.positions) {
    require_finite(p.x, "position");
    require_finite(p.y, "position");
    positions.push_back({p.x, p.y});
  }
  json j = {{"timestamp", r.timestamp},
            {"camera_id", r.camera_id},
            {"positions", positions},
            {"people_count", r.people_count},
            {"global_risk", r.global_risk},
            {"dynamic_risk", r.dynamic_risk},
            {"infraction_pairs", r.infraction_pairs}};
  return j.dump();
}

LogRecord log_record_from_json(const std::string& line) {
  try {
    const json j = json::parse(line);
    LogRecord r;
    r.timestamp = j.at("timestamp").get<double>();
    r.camera_id = j.at("camera_id").get<std::string>();
    for (const auto& p : j.at("positions")) {
      const auto xy = p.get<std::vector<double>>();
      if (xy.size() != 2) raise(ErrorKind::ParseError, "position must have 2 entries");
      r.positions.push_back({xy[0], xy[1]});
    }
    r.people_count = j.at("people_count").get<std::size_t>();
    r.global_risk = j.at("global_risk").get<double>();
    r.dynamic_risk = j.at("dynamic_risk").get<double>();
    r.infraction_pairs = j.at("infraction_pairs").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    raise(ErrorKind::ParseError, std::string("log record: ") + e.what());
  }
}

JsonlLogStore::JsonlLogStore(std::filesystem::path directory, long utc_offset_s)
    : dir_(std::move(directory)), utc_offset_s_(utc_offset_s) {}

std::filesystem::path JsonlLogStore::file_for(const std::string& camera_id, double timestamp) const {
  return dir_ / ("log_" + camera_id + "_" + date_key(timestamp, utc_offset_s_) + ".jsonl");
}

void JsonlLogStore::append(const LogRecord& record) {
  const std::string line = log_record_to_json(record);
  const auto path = file_for(record.camera_id, record.timestamp);
  std::ofstream out(path, std::ios::app);
  if (!out) raise(ErrorKind::StorageError, "cannot append to " + path.string());
  out << line << '\n';
  if (!out.flush()) raise(ErrorKind::StorageError, "failed writing " + path.string());
}

LogReadResult JsonlLogStore::read_all(const std::string& camera_id) const {
  LogReadResult result;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir_, ec)) {
    raise(ErrorKind::StorageError, "log directory " + dir_.string() + " does not exist");
  }

  const std::string prefix = "log_" + camera_id + "_";
  const std::string suffix = ".jsonl";
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
    const std::string name = entry.path().filename().string();
    // prefix + YYYY-MM-DD + suffix
    if (name.size() == prefix.size() + 10 + suffix.size() && name.starts_with(prefix) && name.ends_with(suffix)) {
      files.push_back(entry.path());
    }
  }
  if (ec) raise(ErrorKind::StorageError, "cannot list " + dir_.string());
  std::sort(files.begin(), files.end());

  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::StorageError, "cannot read " + path.string());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (lines[k].empty()) continue;
      try {
        result.records.push_back(log_record_from_json(lines[k]));
      } catch (const Error&) {
        if (k + 1 == lines.size()) {
          ++result.skipped_lines;
          continue;
        }
        raise(ErrorKind::StorageError, path.string() + " line " + std::to_string(k + 1) + " is corrupt");
      }
    }
  }
  return result;
}

}  // namespace ih
