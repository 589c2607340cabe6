#pragma once

// Distance-based contagion risk: pairwise reciprocal risk, per-person and
// scene risk, the windowed dynamic risk, people-counter smoothing, display
// links, capacity estimation, alarms, and a small SIR reference integrator.
//
// The pairwise loops come in two flavours: `ih::kernels` (OpenMP, used by the
// pipeline) and `ih::reference` (plain serial loops kept for testing and
// benchmarking). Both agree to rounding (1e-12).

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ih/calibration.hpp"
#include "ih/geometry.hpp"

namespace ih {

struct RiskParams {
  double eta = 1.0;         // height mitigator, (0, 1]
  double beta_slope = 1.0;  // 1/m
  double tau = 1.0;         // m, minimal allowed distance
  int capacity = 10;        // C
  int window = 10;          // W, in snapshots
  double link_max = 3.0;    // m
  double alarm_risk_threshold = 0.5;
  int alarm_count_threshold = 50;

  /// Throws InvalidArgument naming the first violated bound.
  void validate() const;
};

struct SceneSnapshot {
  double timestamp = 0.0;
  std::vector<GroundPoint> positions;
};

/// eta * exp(-beta * max(0, d - tau)).
double reciprocal_risk(const RiskParams& params, double distance);

double r0(double transmissibility, double contact_rate, double duration);

namespace reference {

std::vector<double> individual_risks(const RiskParams& params, std::span<const GroundPoint> positions);
double global_risk(const RiskParams& params, std::span<const GroundPoint> positions);
std::size_t count_pairs_below(std::span<const GroundPoint> positions, double distance);

}  // namespace reference

namespace kernels {

/// Person count from which the pairwise loop is split across threads.
inline constexpr std::size_t kParallelThreshold = 256;

/// R_i = max_{j != i} rr(d_ij); 0 for a lone person.
std::vector<double> individual_risks(const RiskParams& params, std::span<const GroundPoint> positions);

/// Number of unordered pairs with d_ij < distance.
std::size_t count_pairs_below(std::span<const GroundPoint> positions, double distance);

}  // namespace kernels

std::vector<double> individual_risks(const RiskParams& params, const SceneSnapshot& snapshot);

/// min(1, sum(R_i) / C).
double global_risk(const RiskParams& params, std::span<const double> individual);
double global_risk(const RiskParams& params, const SceneSnapshot& snapshot);

/// Rolling window over the last W global-risk values and people counts.
/// Before W samples exist the mean runs over the samples seen so far.
class RiskState {
 public:
  explicit RiskState(int window);

  /// Pushes g (in [0, 1]) and returns the windowed mean D.
  double update_dynamic_risk(double g);
  /// Pushes a raw people count and returns its windowed mean.
  double smoothed_count(std::size_t n);

  int window() const noexcept { return window_; }
  std::span<const double> risk_history() const noexcept { return risks_; }

 private:
  static double push_and_mean(std::vector<double>& buffer, std::size_t& head, int window, double value);

  int window_;
  std::vector<double> risks_;
  std::vector<double> counts_;
  std::size_t risk_head_ = 0;
  std::size_t count_head_ = 0;
};

struct Link {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
  double severity = 0.0;  // 1 at d <= tau, 0 at d = link_max
};

/// Every unordered pair with d < link_max. When link_max == tau the ramp is
/// undefined and every emitted link gets severity 1.
std::vector<Link> link_severities(const RiskParams& params, const SceneSnapshot& snapshot);

/// Hexagonal lattice of pitch tau anchored at the bounding-box minimum
/// corner; counts lattice points inside the polygon, at least 1.
int estimate_capacity(const WalkingArea& area, double tau);

enum class AlarmType { Risk, Crowd };

struct AlarmEvent {
  AlarmType type = AlarmType::Risk;
  double timestamp = 0.0;
  double value = 0.0;
};

std::string to_string(AlarmType type);

/// Level check: RiskAlarm iff d >= threshold, CrowdAlarm iff count >= threshold.
std::vector<AlarmEvent> check_alarms(const RiskParams& params, double timestamp, double dynamic_risk,
                                     double count);

/// Edge-triggered alarms. Each alarm fires once when its value reaches the
/// threshold and re-arms only after the value drops below 0.95 * threshold.
class AlarmMonitor {
 public:
  static constexpr double kRearmFraction = 0.95;

  explicit AlarmMonitor(const RiskParams& params);

  std::vector<AlarmEvent> update(double timestamp, double dynamic_risk, double count);

 private:
  double risk_threshold_;
  double count_threshold_;
  bool risk_armed_ = true;
  bool crowd_armed_ = true;
};

struct SirState {
  double s = 1.0;
  double i = 0.0;
  double r = 0.0;
};

struct SirStepResult {
  SirState state;
  bool clamped = false;  // the raw Euler step left [0, 1] and was limited
};

/// One explicit Euler step of ds = -b s i, di = b s i - v i, dr = v i.
/// The flows are moved between compartments so s + i + r is conserved.
SirStepResult sir_step(const SirState& state, double beta_contact, double v_removal, double dt);

}  // namespace ih
