#include <filesystem>
#include <system_error>

#include "CLI11.hpp"

#include "ih/cli.hpp"

namespace ih::cli {

namespace {

std::vector<double> split_numbers(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) raise(ErrorKind::InvalidArgument, std::string(what) + ": bad number '" + part + "'");
    values.push_back(v);
  }
  return values;
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground-plane distancing risk engine"};
  app.require_subcommand(1);

  CalibrateArgs cal;
  std::string spacing;
  std::string origin = "0,0";
  auto* calibrate = app.add_subcommand("calibrate", "Fit the image/ground homography from nine clicked markers");
  calibrate->add_option("--grid-spacing", spacing, "Marker spacing in m: 'd' or 'dx,dy' (default: from the annotation)");
  calibrate->add_option("--origin", origin, "Ground position of marker (0,0): 'x,y'")->capture_default_str();
  calibrate->add_option("--points", cal.points, "Points file, annotation JSON, or - for stdin")->capture_default_str();
  calibrate->add_option("--out", cal.out, "Calibration file to write")->required();
  calibrate->add_option("--camera-id", cal.camera_id)->capture_default_str();
  calibrate->add_option("--max-rms", cal.max_rms_px, "Rejection ceiling in px")->capture_default_str();
  calibrate->add_option("--seed", cal.seed)->capture_default_str();
  calibrate->add_option("--ransac-iterations", cal.ransac_iterations)->capture_default_str();
  calibrate->add_option("--ransac-threshold", cal.ransac_threshold, "Inlier threshold in px")->capture_default_str();

  std::filesystem::path config_path;
  auto* run = app.add_subcommand("run", "Stream detections through the risk pipeline");
  run->add_option("--config", config_path, "Run configuration JSON")->required();

  EvaluateArgs eval;
  std::string thresholds = "0.5,1.0,1.5";
  std::string ranges = "10,20,30,100";
  auto* evaluate = app.add_subcommand("evaluate", "Score ground-plane detections against annotated feet");
  evaluate->add_option("--input", eval.input, "Evaluation JSONL, or - for stdin")->required();
  evaluate->add_option("--camera", eval.camera, "Camera JSON")->required();
  evaluate->add_option("--thresholds", thresholds)->capture_default_str();
  evaluate->add_option("--ranges", ranges)->capture_default_str();
  evaluate->add_option("--stride", eval.stride)->capture_default_str();
  evaluate->add_option("--out-dir", eval.out_dir)->capture_default_str();
  evaluate->add_option("--seed", eval.seed)->capture_default_str();

  ReportArgs rep;
  std::string period;
  std::string start;
  std::string report_out;
  std::string report_config;
  auto* report = app.add_subcommand("report", "Aggregate the coordinate log into hourly buckets");
  report->add_option("--logs", rep.logs, "Log directory")->required();
  report->add_option("--period", period)->required()->check(CLI::IsMember({"day", "week"}));
  report->add_option("--camera", rep.camera)->required();
  report->add_option("--start", start, "First day, YYYY-MM-DD");
  report->add_option("--out", report_out, "Report file (default: stdout)");
  report->add_option("--config", report_config, "Run config used to recompute occupation maps");
  report->add_option("--utc-offset", rep.utc_offset_s, "Seconds east of UTC for day boundaries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*calibrate) {
      if (!spacing.empty()) {
        const auto s = split_numbers(spacing, "--grid-spacing");
        if (s.size() != 1 && s.size() != 2) raise(ErrorKind::InvalidArgument, "--grid-spacing takes d or dx,dy");
        cal.spacing_x = s[0];
        cal.spacing_y = s.back();
      }
      const auto o = split_numbers(origin, "--origin");
      if (o.size() != 2) raise(ErrorKind::InvalidArgument, "--origin takes x,y");
      cal.origin = {o[0], o[1]};
      return cmd_calibrate(cal, out, err);
    }
    if (*run) return cmd_run(load_run_config(config_path), out, err);
    if (*evaluate) {
      eval.thresholds = split_numbers(thresholds, "--thresholds");
      eval.ranges = split_numbers(ranges, "--ranges");
      return cmd_evaluate(eval, out, err);
    }
    rep.period = period == "week" ? ReportPeriod::Week : ReportPeriod::Day;
    if (!start.empty()) rep.start_date = start;
    if (!report_out.empty()) rep.out = report_out;
    if (!report_config.empty()) rep.config = report_config;
    return cmd_report(rep, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: StorageError: " << e.what() << '\n';
    return kStorageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace ih::cli
