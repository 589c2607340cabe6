#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "ih/analytics.hpp"
#include "ih/error.hpp"

namespace ih {

using nlohmann::json;

std::string occupation_map_basename(const std::string& camera_id, const std::string& date) {
  return "occupation_" + camera_id + "_" + date;
}

Report build_report(const LogStore& store, ReportPeriod period, const std::string& camera_id,
                    const ReportOptions& options) {
  LogReadResult read = store.read_all(camera_id);
  std::stable_sort(read.records.begin(), read.records.end(),
                   [](const LogRecord& a, const LogRecord& b) { return a.timestamp < b.timestamp; });

  Report report;
  report.period = period;
  report.camera_id = camera_id;
  report.skipped_lines = read.skipped_lines;
  const std::size_t hours = period == ReportPeriod::Day ? 24 : 168;
  report.buckets.resize(hours);

  if (options.start) {
    report.start = *options.start;
  } else if (!read.records.empty()) {
    report.start = day_start(read.records.front().timestamp, options.utc_offset_s);
  }
  if (!report.start) return report;

  const double start = *report.start;
  for (std::size_t h = 0; h < hours; ++h) report.buckets[h].start = start + 3600.0 * static_cast<double>(h);

  std::vector<std::string> days;
  for (const auto& r : read.records) {
    const double offset = r.timestamp - start;
    if (offset < 0.0 || offset >= 3600.0 * static_cast<double>(hours)) continue;
    HourBucket& b = report.buckets[static_cast<std::size_t>(offset / 3600.0)];
    ++b.samples;
    b.empty = false;
    b.avg_people += static_cast<double>(r.people_count);
    b.max_people = std::max(b.max_people, r.people_count);
    b.avg_dynamic_risk += r.dynamic_risk;
    b.max_dynamic_risk = std::max(b.max_dynamic_risk, r.dynamic_risk);
    b.infraction_count += r.infraction_pairs;
    const std::string day = date_key(r.timestamp, options.utc_offset_s);
    if (days.empty() || days.back() != day) days.push_back(day);
  }
  for (auto& b : report.buckets) {
    if (b.samples == 0) continue;
    b.avg_people /= static_cast<double>(b.samples);
    b.avg_dynamic_risk /= static_cast<double>(b.samples);
  }
  for (const auto& day : days) {
    const std::string base = occupation_map_basename(camera_id, day);
    report.occupation_maps.push_back({day, base + ".csv", base + ".pgm"});
  }
  return report;
}

std::string report_to_json(const Report& report) {
  json buckets = json::array();
  for (std::size_t h = 0; h < report.buckets.size(); ++h) {
    const auto& b = report.buckets[h];
    buckets.push_back({{"hour", h},
                       {"start", b.start},
                       {"empty", b.empty},
                       {"samples", b.samples},
                       {"avg_people", b.avg_people},
                       {"max_people", b.max_people},
                       {"avg_D", b.avg_dynamic_risk},
                       {"max_D", b.max_dynamic_risk},
                       {"infraction_count", b.infraction_count}});
  }
  json maps = json::array();
  for (const auto& m : report.occupation_maps) maps.push_back({{"date", m.date}, {"csv", m.csv}, {"pgm", m.pgm}});
  json j = {{"period", report.period == ReportPeriod::Day ? "day" : "week"},
            {"camera_id", report.camera_id},
            {"start", report.start ? json(*report.start) : json(nullptr)},
            {"buckets", buckets},
            {"occupation_maps", maps},
            {"skipped_lines", report.skipped_lines}};
  return j.dump(2);
}

}  // namespace ih
