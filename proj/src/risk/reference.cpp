#include <algorithm>
#include <cmath>

#include "ih/risk.hpp"

namespace ih::reference {

std::vector<double> individual_risks(const RiskParams& params, std::span<const GroundPoint> positions) {
  const std::size_t n = positions.size();
  std::vector<double> risks(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = std::hypot(positions[i].x - positions[j].x, positions[i].y - positions[j].y);
      risks[i] = std::max(risks[i], reciprocal_risk(params, d));
    }
  }
  return risks;
}

double global_risk(const RiskParams& params, std::span<const GroundPoint> positions) {
  double sum = 0.0;
  for (double r : individual_risks(params, positions)) sum += r;
  return std::min(1.0, sum / params.capacity);
}

std::size_t count_pairs_below(std::span<const GroundPoint> positions, double distance) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      if (std::hypot(positions[i].x - positions[j].x, positions[i].y - positions[j].y) < distance) ++total;
  return total;
}

}  // namespace ih::reference
