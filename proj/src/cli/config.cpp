#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ih/cli.hpp"

namespace ih::cli {

using nlohmann::json;

namespace {

enum class FieldType { String, Number, Integer, Bool, Capacity, Bounds };

struct Field {
  const char* name;
  FieldType type;
};

constexpr Field kFields[] = {
    {"calibration", FieldType::String},
    {"detections", FieldType::String},
    {"eta", FieldType::Number},
    {"beta", FieldType::Number},
    {"tau", FieldType::Number},
    {"capacity", FieldType::Capacity},
    {"window", FieldType::Integer},
    {"link_max", FieldType::Number},
    {"alarm_risk_threshold", FieldType::Number},
    {"alarm_count_threshold", FieldType::Integer},
    {"min_confidence", FieldType::Number},
    {"cell_size", FieldType::Number},
    {"map_cell_budget", FieldType::Integer},
    {"output_dir", FieldType::String},
    {"write_logs", FieldType::Bool},
    {"write_maps", FieldType::Bool},
    {"map_every", FieldType::Integer},
    {"camera_id", FieldType::String},
    {"utc_offset_s", FieldType::Integer},
    {"map_bounds_m", FieldType::Bounds},
};

[[noreturn]] void config_error(const std::string& message) { raise(ErrorKind::InvalidArgument, "config: " + message); }

std::string env_name(const char* field) {
  std::string name = "IH_";
  for (const char* c = field; *c; ++c) name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
  return name;
}

json env_value(const Field& f, const std::string& raw) {
  const std::string var = env_name(f.name);
  switch (f.type) {
    case FieldType::String:
      return raw;
    case FieldType::Bool:
      if (raw == "true" || raw == "1") return true;
      if (raw == "false" || raw == "0") return false;
      config_error(var + " must be true/false");
    case FieldType::Capacity:
      if (raw == "auto") return raw;
      [[fallthrough]];
    case FieldType::Number:
    case FieldType::Integer: {
      json v = json::parse(raw, nullptr, false);
      if (!v.is_number()) config_error(var + " is not a number: " + raw);
      return v;
    }
    case FieldType::Bounds: {
      json arr = json::array();
      std::stringstream ss(raw);
      for (std::string part; std::getline(ss, part, ',');) {
        json v = json::parse(part, nullptr, false);
        if (!v.is_number()) config_error(var + " must be four comma-separated numbers");
        arr.push_back(v);
      }
      return arr;
    }
  }
  config_error("unhandled field type");
}

double number(const json& doc, const char* name) {
  const json& v = doc.at(name);
  if (!v.is_number() || !std::isfinite(v.get<double>())) config_error(std::string(name) + " must be a finite number");
  return v.get<double>();
}

long long integer(const json& doc, const char* name) {
  const json& v = doc.at(name);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::isfinite(d)) return static_cast<long long>(d);
  }
  config_error(std::string(name) + " must be an integer");
}

std::string string(const json& doc, const char* name) {
  const json& v = doc.at(name);
  if (!v.is_string()) config_error(std::string(name) + " must be a string");
  return v.get<std::string>();
}

bool boolean(const json& doc, const char* name) {
  const json& v = doc.at(name);
  if (!v.is_boolean()) config_error(std::string(name) + " must be true or false");
  return v.get<bool>();
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir, const EnvLookup& env) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) config_error("document is not a JSON object");

  std::set<std::string> known;
  for (const auto& f : kFields) known.insert(f.name);
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) config_error("unknown field '" + key + "'");
  }
  for (const auto& f : kFields) {
    if (auto raw = env(env_name(f.name))) doc[f.name] = env_value(f, *raw);
  }

  RunConfig cfg;
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  if (!doc.contains("calibration")) config_error("'calibration' is required");
  cfg.calibration = resolve(string(doc, "calibration"));
  if (doc.contains("detections")) {
    const std::string d = string(doc, "detections");
    cfg.detections = d == "-" ? d : resolve(d).string();
  }
  if (doc.contains("eta")) cfg.risk.eta = number(doc, "eta");
  if (doc.contains("beta")) cfg.risk.beta_slope = number(doc, "beta");
  if (doc.contains("tau")) cfg.risk.tau = number(doc, "tau");
  if (doc.contains("capacity")) {
    if (doc["capacity"].is_string()) {
      if (doc["capacity"] != "auto") config_error("capacity must be a positive integer or \"auto\"");
      cfg.auto_capacity = true;
    } else {
      cfg.risk.capacity = static_cast<int>(integer(doc, "capacity"));
    }
  }
  if (doc.contains("window")) cfg.risk.window = static_cast<int>(integer(doc, "window"));
  if (doc.contains("link_max")) cfg.risk.link_max = number(doc, "link_max");
  if (doc.contains("alarm_risk_threshold")) cfg.risk.alarm_risk_threshold = number(doc, "alarm_risk_threshold");
  if (doc.contains("alarm_count_threshold"))
    cfg.risk.alarm_count_threshold = static_cast<int>(integer(doc, "alarm_count_threshold"));
  if (doc.contains("min_confidence")) cfg.min_confidence = number(doc, "min_confidence");
  if (doc.contains("cell_size")) cfg.cell_size = number(doc, "cell_size");
  if (doc.contains("map_cell_budget")) {
    const long long b = integer(doc, "map_cell_budget");
    if (b < 1) config_error("map_cell_budget must be positive");
    cfg.map_cell_budget = static_cast<std::size_t>(b);
  }
  if (doc.contains("output_dir")) cfg.output_dir = resolve(string(doc, "output_dir"));
  if (doc.contains("write_logs")) cfg.write_logs = boolean(doc, "write_logs");
  if (doc.contains("write_maps")) cfg.write_maps = boolean(doc, "write_maps");
  if (doc.contains("map_every")) cfg.map_every = static_cast<int>(integer(doc, "map_every"));
  if (doc.contains("camera_id")) cfg.camera_id = string(doc, "camera_id");
  if (doc.contains("utc_offset_s")) cfg.utc_offset_s = static_cast<long>(integer(doc, "utc_offset_s"));
  if (doc.contains("map_bounds_m")) {
    const json& b = doc["map_bounds_m"];
    if (!b.is_array() || b.size() != 4) config_error("map_bounds_m must be [min_x, min_y, max_x, max_y]");
    std::array<double, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!b[k].is_number()) config_error("map_bounds_m entries must be numbers");
      v[k] = b[k].get<double>();
    }
    if (!(v[2] > v[0]) || !(v[3] > v[1])) config_error("map_bounds_m must have max > min");
    cfg.map_bounds = WalkingArea::Bounds{v[0], v[1], v[2], v[3]};
  }

  if (!(cfg.cell_size > 0.0)) config_error("cell_size must be positive");
  if (cfg.map_every < 0) config_error("map_every must be >= 0");
  RiskParams check = cfg.risk;
  if (cfg.auto_capacity) check.capacity = 1;
  try {
    check.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const EnvLookup& env) {
  std::ifstream in(path);
  if (!in) config_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path(), env);
}

}  // namespace ih::cli
