#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ih/analytics.hpp"
#include "ih/error.hpp"
#include "ih/risk.hpp"

namespace ih::cli {

/// Stable exit-code contract.
enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
  kStorageError = 3,
};

int exit_code_for(ErrorKind kind);

struct RunConfig {
  std::filesystem::path calibration;
  std::string detections = "-";
  RiskParams risk;
  bool auto_capacity = false;
  double min_confidence = 0.3;
  double cell_size = 0.25;
  std::size_t map_cell_budget = 1'000'000;
  std::filesystem::path output_dir = ".";
  bool write_logs = true;
  bool write_maps = true;
  int map_every = 30;  // frames between map dumps; 0 = only at the end
  std::optional<std::string> camera_id;  // defaults to the calibration's
  long utc_offset_s = 0;
  std::optional<WalkingArea::Bounds> map_bounds;  // used when no walking area
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Process environment lookup.
std::optional<std::string> process_env(const std::string& name);

/// Parses the config document. Unknown fields are rejected; every field may
/// be overridden by IH_<FIELD> (upper case) from `env`. Relative paths are
/// resolved against `base_dir`. Throws InvalidArgument.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const EnvLookup& env = process_env);
RunConfig load_run_config(const std::filesystem::path& path, const EnvLookup& env = process_env);

/// Clicked marker pixels plus optional extras from a UI annotation export.
struct PointsInput {
  std::vector<PixelPoint> clicked;
  std::optional<double> spacing_x;
  std::optional<double> spacing_y;
  std::vector<PixelPoint> walking_area;
};

/// Accepts an annotation JSON object, a JSON array of [u, v] pairs, or text
/// with one "u v" (or "u,v") pair per line.
PointsInput parse_points(const std::string& text);

struct CalibrateArgs {
  std::optional<double> spacing_x;
  std::optional<double> spacing_y;
  GroundPoint origin;
  std::string points = "-";
  std::filesystem::path out;
  std::string camera_id = "cam";
  double max_rms_px = 5.0;
  std::uint64_t seed = 0;
  int ransac_iterations = 2000;
  double ransac_threshold = 3.0;
};

struct EvaluateArgs {
  std::string input;
  std::filesystem::path camera;
  std::vector<double> thresholds{0.5, 1.0, 1.5};
  std::vector<double> ranges{10.0, 20.0, 30.0, 100.0};
  std::size_t stride = 10;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
};

struct ReportArgs {
  std::filesystem::path logs;
  ReportPeriod period = ReportPeriod::Day;
  std::string camera;
  std::optional<std::string> start_date;  // YYYY-MM-DD
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> config;  // recompute occupation maps
  long utc_offset_s = 0;
};

int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

/// Full command line entry point (argv[0] is the program name).
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ih::cli
