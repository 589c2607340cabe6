#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "ih/error.hpp"
#include "ih/evaluation.hpp"

namespace ih {

namespace {

constexpr std::size_t kClusters = 9;

double sq_dist(const GroundPoint& a, const GroundPoint& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::vector<GroundPoint> seed_plus_plus(std::span<const GroundPoint> pts, std::mt19937_64& rng) {
  std::vector<GroundPoint> centers;
  centers.reserve(kClusters);
  std::uniform_int_distribution<std::size_t> first(0, pts.size() - 1);
  centers.push_back(pts[first(rng)]);

  std::vector<double> d2(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = sq_dist(pts[i], centers[0]);
  while (centers.size() < kClusters) {
    std::discrete_distribution<std::size_t> pick(d2.begin(), d2.end());
    const GroundPoint c = pts[pick(rng)];
    centers.push_back(c);
    for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = std::min(d2[i], sq_dist(pts[i], c));
  }
  return centers;
}

double lloyd(std::span<const GroundPoint> pts, std::vector<GroundPoint>& centers, const KMeansOptions& opt) {
  std::vector<std::size_t> label(pts.size(), 0);
  auto assign = [&] {
    double inertia = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const double d = sq_dist(pts[i], centers[k]);
        if (d < best) {
          best = d;
          label[i] = k;
        }
      }
      inertia += best;
    }
    return inertia;
  };

  double inertia = assign();
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    std::vector<double> sx(kClusters, 0.0), sy(kClusters, 0.0);
    std::vector<std::size_t> count(kClusters, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sx[label[i]] += pts[i].x;
      sy[label[i]] += pts[i].y;
      ++count[label[i]];
    }
    double max_shift = 0.0;
    for (std::size_t k = 0; k < kClusters; ++k) {
      GroundPoint next;
      if (count[k] == 0) {
        // Re-seed an empty cluster at the worst-served point.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const double d = sq_dist(pts[i], centers[label[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        next = pts[far];
        label[far] = k;
      } else {
        next = {sx[k] / static_cast<double>(count[k]), sy[k] / static_cast<double>(count[k])};
      }
      max_shift = std::max(max_shift, std::sqrt(sq_dist(next, centers[k])));
      centers[k] = next;
    }
    inertia = assign();
    if (max_shift < opt.shift_tolerance) break;
  }
  return inertia;
}

}  // namespace

std::vector<GroundPoint> kmeans9(std::span<const GroundPoint> points, std::uint64_t seed,
                                 const KMeansOptions& options) {
  std::set<std::pair<double, double>> distinct;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) raise(ErrorKind::InvalidArgument, "k-means point is not finite");
    distinct.emplace(p.x, p.y);
  }
  if (distinct.size() < kClusters) {
    raise(ErrorKind::InsufficientPoints,
          "need at least 9 distinct points, got " + std::to_string(distinct.size()));
  }

  std::mt19937_64 rng(seed);
  std::vector<GroundPoint> best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(1, options.restarts); ++run) {
    std::vector<GroundPoint> centers = seed_plus_plus(points, rng);
    const double inertia = lloyd(points, centers, options);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = std::move(centers);
    }
  }
  std::sort(best.begin(), best.end(),
            [](const GroundPoint& a, const GroundPoint& b) { return a.y < b.y || (a.y == b.y && a.x < b.x); });
  return best;
}

}  // namespace ih
