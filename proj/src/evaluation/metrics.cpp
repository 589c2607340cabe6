#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>

#include "json.hpp"

#include "ih/error.hpp"
#include "ih/evaluation.hpp"

namespace ih {

namespace {

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

struct PreparedFrame {
  const EvalFrame* frame;
  const SequenceGeometry* geometry;
};

std::vector<PreparedFrame> select_frames(std::span<const EvalFrame> frames,
                                         const std::map<std::string, SequenceGeometry>& geometry,
                                         std::size_t stride) {
  if (stride < 1) raise(ErrorKind::InvalidArgument, "stride must be >= 1");
  std::vector<PreparedFrame> out;
  for (const auto& f : frames) {
    if (f.frame_id % static_cast<std::int64_t>(stride) != 0) continue;
    const auto it = geometry.find(f.sequence_id);
    if (it == geometry.end()) raise(ErrorKind::InvalidArgument, "no geometry for sequence " + f.sequence_id);
    out.push_back({&f, &it->second});
  }
  return out;
}

// Per-frame counts laid out [range][threshold].
std::vector<Counts> score_frame(const PreparedFrame& pf, std::span<const double> thresholds,
                                std::span<const double> ranges) {
  std::vector<Counts> counts(thresholds.size() * ranges.size());
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    const EvalFrame kept = apply_range_filter(*pf.frame, pf.geometry->frame, pf.geometry->camera, ranges[r]);
    const auto gt = plane_coordinates(pf.geometry->frame, kept.gt_feet_3d);
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      const MatchResult m = match_frame(gt, kept.predicted_ground, thresholds[t]);
      counts[r * thresholds.size() + t] = {m.true_positives, m.false_positives, m.false_negatives};
    }
  }
  return counts;
}

void validate_axes(std::span<const double> thresholds, std::span<const double> ranges) {
  if (thresholds.empty() || ranges.empty()) raise(ErrorKind::InvalidArgument, "need thresholds and ranges");
  for (double t : thresholds)
    if (!(t > 0.0)) raise(ErrorKind::InvalidArgument, "thresholds must be positive");
  for (double r : ranges)
    if (!(r > 0.0)) raise(ErrorKind::InvalidArgument, "ranges must be positive");
}

// Ordered reduction shared by the serial and parallel scorers.
MetricsTable reduce(const std::vector<PreparedFrame>& selected, const std::vector<std::vector<Counts>>& per_frame,
                    std::span<const double> thresholds, std::span<const double> ranges) {
  const std::size_t cells = thresholds.size() * ranges.size();
  std::vector<Counts> total(cells);
  std::map<std::string, std::vector<Counts>> per_sequence;
  for (std::size_t f = 0; f < selected.size(); ++f) {
    auto& seq = per_sequence[selected[f].frame->sequence_id];
    seq.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      const Counts& k = per_frame[f][c];
      total[c].tp += k.tp;
      total[c].fp += k.fp;
      total[c].fn += k.fn;
      seq[c].tp += k.tp;
      seq[c].fp += k.fp;
      seq[c].fn += k.fn;
    }
  }

  MetricsTable table;
  table.thresholds.assign(thresholds.begin(), thresholds.end());
  table.ranges.assign(ranges.begin(), ranges.end());
  table.frames_scored = selected.size();
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      const std::size_t c = r * thresholds.size() + t;
      MetricsCell cell;
      cell.threshold = thresholds[t];
      cell.max_range = ranges[r];
      cell.true_positives = total[c].tp;
      cell.false_positives = total[c].fp;
      cell.false_negatives = total[c].fn;
      cell.aggregate = scores_from_counts(total[c].tp, total[c].fp, total[c].fn);
      if (per_sequence.empty()) {
        cell.macro = cell.aggregate;
      } else {
        for (const auto& [id, seq] : per_sequence) {
          const Scores s = scores_from_counts(seq[c].tp, seq[c].fp, seq[c].fn);
          cell.macro.precision += s.precision;
          cell.macro.recall += s.recall;
          cell.macro.f1 += s.f1;
        }
        const auto n = static_cast<double>(per_sequence.size());
        cell.macro.precision /= n;
        cell.macro.recall /= n;
        cell.macro.f1 /= n;
      }
      table.cells.push_back(cell);
    }
  }
  return table;
}

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

EvalFrame apply_range_filter(const EvalFrame& frame, const PlaneFrame& plane, const CameraModel& camera,
                             double max_range) {
  if (!(max_range > 0.0)) raise(ErrorKind::InvalidArgument, "max_range must be positive");
  const Eigen::Vector3d center = camera.center();
  const GroundPoint footprint = plane.to_plane(center);

  EvalFrame out;
  out.frame_id = frame.frame_id;
  out.sequence_id = frame.sequence_id;
  for (const auto& g : frame.gt_feet_3d)
    if ((g - center).norm() <= max_range) out.gt_feet_3d.push_back(g);
  for (const auto& p : frame.predicted_ground)
    if (std::hypot(p.x - footprint.x, p.y - footprint.y) <= max_range) out.predicted_ground.push_back(p);
  return out;
}

Scores scores_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fp + fn == 0) return {100.0, 100.0, 100.0};
  Scores s;
  s.precision = tp + fp > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

const MetricsCell& MetricsTable::at(double max_range, double threshold) const {
  for (const auto& c : cells)
    if (c.max_range == max_range && c.threshold == threshold) return c;
  raise(ErrorKind::InvalidArgument, "no metrics cell for range " + fmt(max_range) + " threshold " + fmt(threshold));
}

MetricsTable compute_metrics(std::span<const EvalFrame> frames,
                             const std::map<std::string, SequenceGeometry>& geometry,
                             std::span<const double> thresholds, std::span<const double> ranges,
                             std::size_t stride) {
  validate_axes(thresholds, ranges);
  const auto selected = select_frames(frames, geometry, stride);
  std::vector<std::vector<Counts>> per_frame(selected.size());
  const auto n = static_cast<std::ptrdiff_t>(selected.size());
  // Exceptions cannot leave an OpenMP region; capture the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t f = 0; f < n; ++f) {
    try {
      per_frame[static_cast<std::size_t>(f)] = score_frame(selected[static_cast<std::size_t>(f)], thresholds, ranges);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return reduce(selected, per_frame, thresholds, ranges);
}

namespace reference {

MetricsTable compute_metrics(std::span<const EvalFrame> frames,
                             const std::map<std::string, SequenceGeometry>& geometry,
                             std::span<const double> thresholds, std::span<const double> ranges,
                             std::size_t stride) {
  validate_axes(thresholds, ranges);
  const auto selected = select_frames(frames, geometry, stride);
  std::vector<std::vector<Counts>> per_frame;
  per_frame.reserve(selected.size());
  for (const auto& pf : selected) per_frame.push_back(score_frame(pf, thresholds, ranges));
  return reduce(selected, per_frame, thresholds, ranges);
}

}  // namespace reference

std::string metrics_to_csv(const MetricsTable& table) {
  std::ostringstream out;
  out << "max_range_m,variant";
  for (double t : table.thresholds) {
    const std::string at = "@" + fmt(t, "%g");
    out << ",PR" << at << ",RE" << at << ",F1" << at;
  }
  out << '\n';
  for (double r : table.ranges) {
    for (const char* variant : {"aggregate", "macro"}) {
      out << fmt(r, "%g") << ',' << variant;
      for (double t : table.thresholds) {
        const auto& c = table.at(r, t);
        const Scores& s = variant[0] == 'a' ? c.aggregate : c.macro;
        out << ',' << fmt(s.precision, "%.4f") << ',' << fmt(s.recall, "%.4f") << ',' << fmt(s.f1, "%.4f");
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string metrics_to_json(const MetricsTable& table) {
  using nlohmann::json;
  json rows = json::array();
  for (double r : table.ranges) {
    json row = {{"max_range_m", r}, {"thresholds", json::array()}};
    for (double t : table.thresholds) {
      const auto& c = table.at(r, t);
      row["thresholds"].push_back({{"threshold_m", t},
                                   {"tp", c.true_positives},
                                   {"fp", c.false_positives},
                                   {"fn", c.false_negatives},
                                   {"aggregate", {{"PR", c.aggregate.precision}, {"RE", c.aggregate.recall}, {"F1", c.aggregate.f1}}},
                                   {"macro", {{"PR", c.macro.precision}, {"RE", c.macro.recall}, {"F1", c.macro.f1}}}});
    }
    rows.push_back(row);
  }
  json j = {{"frames_scored", table.frames_scored},
            {"thresholds_m", table.thresholds},
            {"ranges_m", table.ranges},
            {"rows", rows}};
  return j.dump(2);
}

std::string metrics_to_text(const MetricsTable& table) {
  std::ostringstream out;
  out << "max range  variant   ";
  for (double t : table.thresholds) out << " |    PR     RE     F1  @" << fmt(t, "%.1f") << "m";
  out << '\n';
  for (double r : table.ranges) {
    for (const char* variant : {"aggregate", "macro"}) {
      char head[32];
      std::snprintf(head, sizeof head, "%6gm    %-9s ", r, variant);
      out << head;
      for (double t : table.thresholds) {
        const auto& c = table.at(r, t);
        const Scores& s = variant[0] == 'a' ? c.aggregate : c.macro;
        char buf[64];
        std::snprintf(buf, sizeof buf, " | %6.2f %6.2f %6.2f        ", s.precision, s.recall, s.f1);
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace ih
