#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ih/error.hpp"
#include "ih/geometry.hpp"

namespace ih {

namespace {

bool degenerate_sample(std::span<const Correspondence> all, const std::array<std::size_t, 4>& idx) {
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b)
      for (std::size_t c = b + 1; c < 4; ++c) {
        const auto& ca = all[idx[a]];
        const auto& cb = all[idx[b]];
        const auto& cc = all[idx[c]];
        if (nearly_collinear({ca.ground.x, ca.ground.y}, {cb.ground.x, cb.ground.y},
                             {cc.ground.x, cc.ground.y}) ||
            nearly_collinear({ca.image.u, ca.image.v}, {cb.image.u, cb.image.v},
                             {cc.image.u, cc.image.v})) {
          return true;
        }
      }
  return false;
}

// One-way reprojection distance in the image; +inf when the ground point maps
// to infinity.
double reprojection_distance(const Homography& h, const Correspondence& c) {
  const Eigen::Matrix3d& m = h.matrix();
  const double w = m(2, 0) * c.ground.x + m(2, 1) * c.ground.y + m(2, 2);
  if (!(std::abs(w) >= kPointAtInfinityTolerance)) return std::numeric_limits<double>::infinity();
  const double u = (m(0, 0) * c.ground.x + m(0, 1) * c.ground.y + m(0, 2)) / w;
  const double v = (m(1, 0) * c.ground.x + m(1, 1) * c.ground.y + m(1, 2)) / w;
  return std::hypot(u - c.image.u, v - c.image.v);
}

}  // namespace

RansacResult estimate_homography_ransac(std::span<const Correspondence> correspondences,
                                        const RansacOptions& options) {
  const std::size_t n = correspondences.size();
  if (n < 4) {
    raise(ErrorKind::NoConsensus, "need at least 4 correspondences, got " + std::to_string(n));
  }
  if (options.iterations < 1 || !(options.inlier_threshold > 0.0)) {
    raise(ErrorKind::InvalidArgument, "RANSAC needs positive iterations and threshold");
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::size_t best_count = 0;
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<bool> best_mask(n, false);
  std::vector<bool> mask(n, false);

  for (int iter = 0; iter < options.iterations; ++iter) {
    std::array<std::size_t, 4> idx{};
    for (std::size_t k = 0; k < 4; ++k) {
      std::size_t candidate;
      do {
        candidate = pick(rng);
      } while (std::find(idx.begin(), idx.begin() + k, candidate) != idx.begin() + k);
      idx[k] = candidate;
    }
    // Degenerate draws consume an iteration so fully collinear input terminates.
    if (degenerate_sample(correspondences, idx)) continue;

    const std::array<Correspondence, 4> sample{correspondences[idx[0]], correspondences[idx[1]],
                                               correspondences[idx[2]], correspondences[idx[3]]};
    Homography hypothesis;
    try {
      hypothesis = estimate_homography_dlt(sample);
    } catch (const Error&) {
      continue;
    }

    std::size_t count = 0;
    double score = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = reprojection_distance(hypothesis, correspondences[i]);
      mask[i] = d <= options.inlier_threshold;
      if (mask[i]) {
        ++count;
        score += d * d;
      }
    }
    // Ties on inlier count go to the lower inlier residual.
    if (count > best_count || (count == best_count && count > 0 && score < best_score)) {
      best_count = count;
      best_score = score;
      best_mask = mask;
      if (best_count == n) break;
    }
  }

  if (best_count < 4) {
    raise(ErrorKind::NoConsensus, "best model has only " + std::to_string(best_count) + " inliers");
  }

  std::vector<Correspondence> inliers;
  inliers.reserve(best_count);
  for (std::size_t i = 0; i < n; ++i)
    if (best_mask[i]) inliers.push_back(correspondences[i]);

  return {estimate_homography_dlt(inliers), std::move(best_mask), best_count};
}

}  // namespace ih
