#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ih/calibration.hpp"
#include "ih/risk.hpp"

namespace ih {

/// Dense bird-eye raster. Cell (row, col) covers
/// [origin.x + col*cell, +cell) x [origin.y + row*cell, +cell); values are
/// stored row-major with row 0 at the lowest y.
struct MapGrid {
  GroundPoint origin;
  double cell_size = 0.25;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  double& at(std::size_t row, std::size_t col) { return values[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return values[row * width + col]; }
  GroundPoint cell_center(std::size_t row, std::size_t col) const;
  bool same_geometry(const MapGrid& other) const;
};

inline constexpr double kDefaultCellSize = 0.25;
inline constexpr std::size_t kDefaultCellBudget = 1'000'000;

/// Zero-valued grid covering the area's bounding box. Throws GridTooLarge
/// when the cell count exceeds the budget.
MapGrid make_map_grid(const WalkingArea& area, double cell_size, std::size_t cell_budget = kDefaultCellBudget);

namespace reference {
MapGrid dynamic_risk_map(const RiskParams& params, std::span<const GroundPoint> positions,
                         const WalkingArea& area, double cell_size,
                         std::size_t cell_budget = kDefaultCellBudget);
}  // namespace reference

namespace kernels {
/// Each cell center inside the area gets the reciprocal risk to the nearest
/// person; cells outside the area and empty scenes stay 0.
MapGrid dynamic_risk_map(const RiskParams& params, std::span<const GroundPoint> positions,
                         const WalkingArea& area, double cell_size,
                         std::size_t cell_budget = kDefaultCellBudget);
}  // namespace kernels

MapGrid dynamic_risk_map(const RiskParams& params, const SceneSnapshot& snapshot, const WalkingArea& area,
                         double cell_size = kDefaultCellSize, std::size_t cell_budget = kDefaultCellBudget);

/// Running cell-wise mean of maps with identical geometry.
class OccupationAccumulator {
 public:
  OccupationAccumulator() = default;
  explicit OccupationAccumulator(MapGrid zero_like);

  /// Throws GridMismatch on differing geometry.
  void fold(const MapGrid& m);
  void reset();

  const MapGrid& mean() const noexcept { return mean_; }
  std::size_t samples() const noexcept { return samples_; }
  bool initialized() const noexcept { return initialized_; }

 private:
  MapGrid mean_;
  std::size_t samples_ = 0;
  bool initialized_ = false;
};

/// Unordered pairs strictly closer than tau.
std::size_t count_infractions(const RiskParams& params, const SceneSnapshot& snapshot);

void write_map_csv(const MapGrid& grid, const std::filesystem::path& path);
/// Plain (P2) PGM, values scaled to 0..255, same row order as the CSV.
void write_map_pgm(const MapGrid& grid, const std::filesystem::path& path);

struct LogRecord {
  double timestamp = 0.0;
  std::string camera_id;
  std::vector<GroundPoint> positions;
  std::size_t people_count = 0;
  double global_risk = 0.0;
  double dynamic_risk = 0.0;
  std::size_t infraction_pairs = 0;
};

std::string log_record_to_json(const LogRecord& record);
LogRecord log_record_from_json(const std::string& line);

struct LogReadResult {
  std::vector<LogRecord> records;
  std::size_t skipped_lines = 0;  // trailing partial lines
};

/// Storage boundary for the coordinate log.
class LogStore {
 public:
  virtual ~LogStore() = default;
  virtual void append(const LogRecord& record) = 0;
  virtual LogReadResult read_all(const std::string& camera_id) const = 0;
};

/// Calendar date (YYYY-MM-DD) of a timestamp shifted by utc_offset_s.
std::string date_key(double timestamp, long utc_offset_s = 0);
/// Timestamp of the local midnight that starts the day containing `timestamp`.
double day_start(double timestamp, long utc_offset_s = 0);

/// Append-only JSON Lines, one file per camera per day:
/// log_<camera>_<YYYY-MM-DD>.jsonl.
class JsonlLogStore final : public LogStore {
 public:
  explicit JsonlLogStore(std::filesystem::path directory, long utc_offset_s = 0);

  /// Throws InvalidArgument for non-finite values, StorageError on I/O failure.
  void append(const LogRecord& record) override;
  /// Records of every day file for the camera, in file order. A malformed
  /// last line is skipped and counted; malformed interior lines are a
  /// StorageError.
  LogReadResult read_all(const std::string& camera_id) const override;

  std::filesystem::path file_for(const std::string& camera_id, double timestamp) const;
  const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  long utc_offset_s_;
};

enum class ReportPeriod { Day, Week };

struct HourBucket {
  double start = 0.0;  // timestamp
  std::size_t samples = 0;
  bool empty = true;
  double avg_people = 0.0;
  std::size_t max_people = 0;
  double avg_dynamic_risk = 0.0;
  double max_dynamic_risk = 0.0;
  std::size_t infraction_count = 0;
};

struct OccupationMapRef {
  std::string date;
  std::string csv;
  std::string pgm;
};

struct Report {
  ReportPeriod period = ReportPeriod::Day;
  std::string camera_id;
  std::optional<double> start;  // absent for an empty store
  std::vector<HourBucket> buckets;  // 24 or 168
  std::vector<OccupationMapRef> occupation_maps;
  std::size_t skipped_lines = 0;
};

struct ReportOptions {
  std::optional<double> start;  // defaults to the midnight before the first record
  long utc_offset_s = 0;
};

Report build_report(const LogStore& store, ReportPeriod period, const std::string& camera_id,
                    const ReportOptions& options = {});
std::string report_to_json(const Report& report);

std::string occupation_map_basename(const std::string& camera_id, const std::string& date);

}  // namespace ih
