#include <cmath>
#include <limits>

#include "ih/error.hpp"
#include "ih/evaluation.hpp"

namespace ih {

namespace {

// Rectangular assignment (rows <= cols) by the shortest augmenting path
// Hungarian method with potentials. Returns the column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const std::size_t m = n ? cost[0].size() : 0;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j]) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

MatchResult match_frame(std::span<const GroundPoint> gt, std::span<const GroundPoint> pred, double threshold) {
  if (!(threshold > 0.0)) raise(ErrorKind::InvalidArgument, "match threshold must be positive");

  MatchResult result;
  const bool gt_rows = gt.size() <= pred.size();
  const std::size_t rows = gt_rows ? gt.size() : pred.size();
  const std::size_t cols = gt_rows ? pred.size() : gt.size();

  if (rows > 0) {
    // Any matching that uses one more admissible edge beats every matching
    // with fewer, since the penalty exceeds the largest admissible total.
    const double penalty = (static_cast<double>(rows) + 1.0) * threshold + 1.0;
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols, penalty));
    bool any_edge = false;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const GroundPoint& g = gt_rows ? gt[r] : gt[c];
        const GroundPoint& p = gt_rows ? pred[c] : pred[r];
        const double d = std::hypot(g.x - p.x, g.y - p.y);
        if (d <= threshold) {
          cost[r][c] = d;
          any_edge = true;
        }
      }
    }
    if (any_edge) {
      const auto assignment = hungarian(cost);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t c = assignment[r];
        if (cost[r][c] >= penalty) continue;
        result.pairs.push_back(gt_rows ? MatchedPair{r, c, cost[r][c]} : MatchedPair{c, r, cost[r][c]});
      }
    }
  }

  result.true_positives = result.pairs.size();
  result.false_positives = pred.size() - result.true_positives;
  result.false_negatives = gt.size() - result.true_positives;
  return result;
}

}  // namespace ih
