#include <cmath>
#include <limits>

#include "ih/risk.hpp"

namespace ih::kernels {

// rr is non-increasing in d, so the max over partners is rr of the nearest
// partner: one exp per person instead of one per pair.
std::vector<double> individual_risks(const RiskParams& params, std::span<const GroundPoint> positions) {
  const std::size_t n = positions.size();
  std::vector<double> risks(n, 0.0);
  if (n < 2) return risks;

  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const GroundPoint p = positions[i];
    double nearest_sq = std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      if (j == i) continue;
      const double dx = positions[j].x - p.x;
      const double dy = positions[j].y - p.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < nearest_sq) nearest_sq = d2;
    }
    risks[i] = reciprocal_risk(params, std::sqrt(nearest_sq));
  }
  return risks;
}

std::size_t count_pairs_below(std::span<const GroundPoint> positions, double distance) {
  const auto count = static_cast<std::ptrdiff_t>(positions.size());
  std::size_t total = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : total) if (positions.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    for (std::ptrdiff_t j = i + 1; j < count; ++j) {
      const double dx = positions[j].x - positions[i].x;
      const double dy = positions[j].y - positions[i].y;
      if (std::hypot(dx, dy) < distance) ++total;
    }
  }
  return total;
}

}  // namespace ih::kernels
