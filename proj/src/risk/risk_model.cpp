#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ih/error.hpp"
#include "ih/risk.hpp"

namespace ih {

namespace {

void require(bool ok, const char* message) {
  if (!ok) raise(ErrorKind::InvalidArgument, message);
}

}  // namespace

void RiskParams::validate() const {
  require(eta > 0.0 && eta <= 1.0, "eta must be in (0, 1]");
  require(beta_slope > 0.0 && std::isfinite(beta_slope), "beta must be positive");
  require(tau > 0.0 && std::isfinite(tau), "tau must be positive");
  require(capacity >= 1, "capacity must be a positive integer");
  require(window >= 1, "window must be a positive integer");
  require(std::isfinite(link_max) && link_max >= tau, "link_max must be >= tau");
  require(alarm_risk_threshold > 0.0 && alarm_risk_threshold <= 1.0,
          "alarm_risk_threshold must be in (0, 1]");
  require(alarm_count_threshold >= 1, "alarm_count_threshold must be a positive integer");
}

double reciprocal_risk(const RiskParams& params, double distance) {
  return params.eta * std::exp(-params.beta_slope * std::max(0.0, distance - params.tau));
}

double r0(double transmissibility, double contact_rate, double duration) {
  require(transmissibility >= 0.0 && contact_rate >= 0.0 && duration >= 0.0,
          "R0 factors must be non-negative");
  return transmissibility * contact_rate * duration;
}

std::vector<double> individual_risks(const RiskParams& params, const SceneSnapshot& snapshot) {
  return kernels::individual_risks(params, snapshot.positions);
}

double global_risk(const RiskParams& params, std::span<const double> individual) {
  require(params.capacity >= 1, "capacity must be a positive integer");
  const double sum = std::accumulate(individual.begin(), individual.end(), 0.0);
  return std::min(1.0, sum / params.capacity);
}

double global_risk(const RiskParams& params, const SceneSnapshot& snapshot) {
  const auto risks = individual_risks(params, snapshot);
  return global_risk(params, risks);
}

RiskState::RiskState(int window) : window_(window) {
  require(window >= 1, "window must be a positive integer");
  risks_.reserve(static_cast<std::size_t>(window));
  counts_.reserve(static_cast<std::size_t>(window));
}

double RiskState::push_and_mean(std::vector<double>& buffer, std::size_t& head, int window, double value) {
  if (buffer.size() < static_cast<std::size_t>(window)) {
    buffer.push_back(value);
  } else {
    buffer[head] = value;
    head = (head + 1) % buffer.size();
  }
  // Oldest-first summation so the result does not depend on ring position.
  double sum = 0.0;
  const std::size_t size = buffer.size();
  for (std::size_t k = 0; k < size; ++k) sum += buffer[(head + k) % size];
  return sum / static_cast<double>(size);
}

double RiskState::update_dynamic_risk(double g) {
  require(g >= 0.0 && g <= 1.0, "global risk must be in [0, 1]");
  return push_and_mean(risks_, risk_head_, window_, g);
}

double RiskState::smoothed_count(std::size_t n) {
  return push_and_mean(counts_, count_head_, window_, static_cast<double>(n));
}

std::vector<Link> link_severities(const RiskParams& params, const SceneSnapshot& snapshot) {
  std::vector<Link> links;
  const auto& p = snapshot.positions;
  const double span = params.link_max - params.tau;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double d = std::hypot(p[i].x - p[j].x, p[i].y - p[j].y);
      if (!(d < params.link_max)) continue;
      const double severity = span > 0.0 ? std::clamp((params.link_max - d) / span, 0.0, 1.0) : 1.0;
      links.push_back({i, j, d, severity});
    }
  }
  return links;
}

int estimate_capacity(const WalkingArea& area, double tau) {
  require(tau > 0.0 && std::isfinite(tau), "tau must be positive");
  const auto b = area.bounds();
  // Row height and offsets are derived so that the pitch-2*tau lattice is
  // bit-for-bit a subset of the pitch-tau lattice.
  const double row_height = (std::sqrt(3.0) / 2.0) * tau;
  const double rows = std::floor((b.max_y - b.min_y) / row_height) + 1.0;
  const double cols = std::floor((b.max_x - b.min_x) / tau) + 1.0;
  if (rows * cols > 1e8) raise(ErrorKind::InvalidArgument, "capacity lattice too fine for this area");

  int count = 0;
  for (long j = 0;; ++j) {
    const double y = b.min_y + static_cast<double>(j) * row_height;
    if (y > b.max_y) break;
    const double offset = (j % 2 == 1) ? 0.5 : 0.0;
    for (long i = 0;; ++i) {
      const double x = b.min_x + (static_cast<double>(i) + offset) * tau;
      if (x > b.max_x) break;
      if (area.contains({x, y})) ++count;
    }
  }
  return std::max(count, 1);
}

std::string to_string(AlarmType type) { return type == AlarmType::Risk ? "RiskAlarm" : "CrowdAlarm"; }

std::vector<AlarmEvent> check_alarms(const RiskParams& params, double timestamp, double dynamic_risk,
                                     double count) {
  std::vector<AlarmEvent> events;
  if (dynamic_risk >= params.alarm_risk_threshold) events.push_back({AlarmType::Risk, timestamp, dynamic_risk});
  if (count >= params.alarm_count_threshold) events.push_back({AlarmType::Crowd, timestamp, count});
  return events;
}

AlarmMonitor::AlarmMonitor(const RiskParams& params)
    : risk_threshold_(params.alarm_risk_threshold),
      count_threshold_(static_cast<double>(params.alarm_count_threshold)) {}

std::vector<AlarmEvent> AlarmMonitor::update(double timestamp, double dynamic_risk, double count) {
  std::vector<AlarmEvent> events;
  if (risk_armed_ && dynamic_risk >= risk_threshold_) {
    events.push_back({AlarmType::Risk, timestamp, dynamic_risk});
    risk_armed_ = false;
  } else if (!risk_armed_ && dynamic_risk < kRearmFraction * risk_threshold_) {
    risk_armed_ = true;
  }
  if (crowd_armed_ && count >= count_threshold_) {
    events.push_back({AlarmType::Crowd, timestamp, count});
    crowd_armed_ = false;
  } else if (!crowd_armed_ && count < kRearmFraction * count_threshold_) {
    crowd_armed_ = true;
  }
  return events;
}

SirStepResult sir_step(const SirState& state, double beta_contact, double v_removal, double dt) {
  require(dt > 0.0, "dt must be positive");
  require(beta_contact >= 0.0 && v_removal >= 0.0, "SIR rates must be non-negative");
  for (double f : {state.s, state.i, state.r}) require(f >= 0.0 && f <= 1.0, "SIR fractions must be in [0, 1]");

  double infections = beta_contact * state.s * state.i * dt;
  double removals = v_removal * state.i * dt;
  bool clamped = false;
  if (infections > state.s) {
    infections = state.s;
    clamped = true;
  }
  if (removals > state.i + infections) {
    removals = state.i + infections;
    clamped = true;
  }

  SirStepResult out;
  out.state.s = state.s - infections;
  out.state.i = state.i + infections - removals;
  out.state.r = state.r + removals;
  out.clamped = clamped;
  return out;
}

}  // namespace ih
