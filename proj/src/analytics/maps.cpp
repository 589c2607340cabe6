#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "ih/analytics.hpp"
#include "ih/error.hpp"

namespace ih {

GroundPoint MapGrid::cell_center(std::size_t row, std::size_t col) const {
  return {origin.x + (static_cast<double>(col) + 0.5) * cell_size,
          origin.y + (static_cast<double>(row) + 0.5) * cell_size};
}

bool MapGrid::same_geometry(const MapGrid& other) const {
  return width == other.width && height == other.height && cell_size == other.cell_size &&
         origin.x == other.origin.x && origin.y == other.origin.y;
}

MapGrid make_map_grid(const WalkingArea& area, double cell_size, std::size_t cell_budget) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) raise(ErrorKind::InvalidArgument, "cell_size must be positive");
  const auto b = area.bounds();
  const double w = std::max(1.0, std::ceil((b.max_x - b.min_x) / cell_size));
  const double h = std::max(1.0, std::ceil((b.max_y - b.min_y) / cell_size));
  if (w * h > static_cast<double>(cell_budget)) {
    raise(ErrorKind::GridTooLarge, std::to_string(static_cast<long long>(w * h)) + " cells exceed the budget of " +
                                       std::to_string(cell_budget));
  }
  MapGrid grid;
  grid.origin = {b.min_x, b.min_y};
  grid.cell_size = cell_size;
  grid.width = static_cast<std::size_t>(w);
  grid.height = static_cast<std::size_t>(h);
  grid.values.assign(grid.width * grid.height, 0.0);
  return grid;
}

namespace reference {

MapGrid dynamic_risk_map(const RiskParams& params, std::span<const GroundPoint> positions,
                         const WalkingArea& area, double cell_size, std::size_t cell_budget) {
  MapGrid grid = make_map_grid(area, cell_size, cell_budget);
  if (positions.empty()) return grid;
  for (std::size_t r = 0; r < grid.height; ++r) {
    for (std::size_t c = 0; c < grid.width; ++c) {
      const GroundPoint center = grid.cell_center(r, c);
      if (!area.contains(center)) continue;
      double best = 0.0;
      for (const auto& p : positions)
        best = std::max(best, reciprocal_risk(params, std::hypot(center.x - p.x, center.y - p.y)));
      grid.at(r, c) = best;
    }
  }
  return grid;
}

}  // namespace reference

namespace kernels {

MapGrid dynamic_risk_map(const RiskParams& params, std::span<const GroundPoint> positions,
                         const WalkingArea& area, double cell_size, std::size_t cell_budget) {
  MapGrid grid = make_map_grid(area, cell_size, cell_budget);
  if (positions.empty()) return grid;
  const auto cells = static_cast<std::ptrdiff_t>(grid.values.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < cells; ++k) {
    const auto r = static_cast<std::size_t>(k) / grid.width;
    const auto c = static_cast<std::size_t>(k) % grid.width;
    const GroundPoint center = grid.cell_center(r, c);
    if (!area.contains(center)) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& p : positions) nearest = std::min(nearest, std::hypot(center.x - p.x, center.y - p.y));
    grid.values[static_cast<std::size_t>(k)] = reciprocal_risk(params, nearest);
  }
  return grid;
}

}  // namespace kernels

MapGrid dynamic_risk_map(const RiskParams& params, const SceneSnapshot& snapshot, const WalkingArea& area,
                         double cell_size, std::size_t cell_budget) {
  return kernels::dynamic_risk_map(params, snapshot.positions, area, cell_size, cell_budget);
}

OccupationAccumulator::OccupationAccumulator(MapGrid zero_like) : mean_(std::move(zero_like)), initialized_(true) {
  std::fill(mean_.values.begin(), mean_.values.end(), 0.0);
}

void OccupationAccumulator::fold(const MapGrid& m) {
  if (!initialized_) {
    mean_ = m;
    std::fill(mean_.values.begin(), mean_.values.end(), 0.0);
    initialized_ = true;
  }
  if (!mean_.same_geometry(m) || m.values.size() != mean_.values.size()) {
    raise(ErrorKind::GridMismatch, "occupation map geometry differs from the accumulator");
  }
  ++samples_;
  const double inv = 1.0 / static_cast<double>(samples_);
  for (std::size_t k = 0; k < m.values.size(); ++k) mean_.values[k] += (m.values[k] - mean_.values[k]) * inv;
}

void OccupationAccumulator::reset() {
  std::fill(mean_.values.begin(), mean_.values.end(), 0.0);
  samples_ = 0;
}

std::size_t count_infractions(const RiskParams& params, const SceneSnapshot& snapshot) {
  return kernels::count_pairs_below(snapshot.positions, params.tau);
}

void write_map_csv(const MapGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::StorageError, "cannot write " + path.string());
  out.precision(17);
  for (std::size_t r = 0; r < grid.height; ++r) {
    for (std::size_t c = 0; c < grid.width; ++c) {
      if (c) out << ',';
      out << grid.at(r, c);
    }
    out << '\n';
  }
  if (!out.flush()) raise(ErrorKind::StorageError, "failed writing " + path.string());
}

void write_map_pgm(const MapGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::StorageError, "cannot write " + path.string());
  out << "P2\n" << grid.width << ' ' << grid.height << "\n255\n";
  for (std::size_t r = 0; r < grid.height; ++r) {
    for (std::size_t c = 0; c < grid.width; ++c) {
      if (c) out << ' ';
      out << static_cast<int>(std::lround(std::clamp(grid.at(r, c), 0.0, 1.0) * 255.0));
    }
    out << '\n';
  }
  if (!out.flush()) raise(ErrorKind::StorageError, "failed writing " + path.string());
}

}  // namespace ih
