#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include "ih/error.hpp"
#include "ih/geometry.hpp"

namespace ih {

namespace {

using Params = Eigen::Matrix<double, 8, 1>;

constexpr double kMaxDamping = 1e16;

Eigen::Matrix3d to_matrix(const Params& p) {
  Eigen::Matrix3d m;
  m << p(0), p(1), p(2), p(3), p(4), p(5), p(6), p(7), 1.0;
  return m;
}

Params to_params(const Eigen::Matrix3d& m) {
  const Eigen::Matrix3d n = m / m(2, 2);
  Params p;
  p << n(0, 0), n(0, 1), n(0, 2), n(1, 0), n(1, 1), n(1, 2), n(2, 0), n(2, 1);
  return p;
}

struct Problem {
  std::vector<Eigen::Vector2d> ground;
  std::vector<Eigen::Vector2d> image;

  // Squared residual sum; +inf if any point maps to infinity.
  double error(const Params& p) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < ground.size(); ++i) {
      const double X = ground[i].x(), Y = ground[i].y();
      const double w = p(6) * X + p(7) * Y + 1.0;
      if (!(std::abs(w) >= kPointAtInfinityTolerance)) return std::numeric_limits<double>::infinity();
      const double du = (p(0) * X + p(1) * Y + p(2)) / w - image[i].x();
      const double dv = (p(3) * X + p(4) * Y + p(5)) / w - image[i].y();
      sum += du * du + dv * dv;
    }
    return sum;
  }

  void linearize(const Params& p, Eigen::Matrix<double, 8, 8>& jtj, Params& jtr) const {
    jtj.setZero();
    jtr.setZero();
    Eigen::Matrix<double, 2, 8> j;
    for (std::size_t i = 0; i < ground.size(); ++i) {
      const double X = ground[i].x(), Y = ground[i].y();
      const double w = p(6) * X + p(7) * Y + 1.0;
      const double xu = p(0) * X + p(1) * Y + p(2);
      const double xv = p(3) * X + p(4) * Y + p(5);
      const double u = xu / w, v = xv / w;
      j << X / w, Y / w, 1.0 / w, 0.0, 0.0, 0.0, -u * X / w, -u * Y / w,
           0.0, 0.0, 0.0, X / w, Y / w, 1.0 / w, -v * X / w, -v * Y / w;
      const Eigen::Vector2d r(u - image[i].x(), v - image[i].y());
      jtj.noalias() += j.transpose() * j;
      jtr.noalias() += j.transpose() * r;
    }
  }
};

}  // namespace

Homography refine_homography_lm(const Homography& initial,
                                std::span<const Correspondence> inliers,
                                const LmOptions& options) {
  const std::size_t n = inliers.size();
  if (n < 4) raise(ErrorKind::InvalidArgument, "LM refinement needs at least 4 inliers");

  // Work in conditioned coordinates; the squared error there is the original
  // error times a constant, so accept/reject decisions are unchanged.
  Problem prob;
  prob.ground.reserve(n);
  prob.image.reserve(n);
  for (const auto& c : inliers) {
    prob.ground.emplace_back(c.ground.x, c.ground.y);
    prob.image.emplace_back(c.image.u, c.image.v);
  }
  const Eigen::Matrix3d tg = isotropic_normalization(prob.ground);
  const Eigen::Matrix3d ti = isotropic_normalization(prob.image);
  for (std::size_t i = 0; i < n; ++i) {
    prob.ground[i] = (tg * prob.ground[i].homogeneous()).hnormalized();
    prob.image[i] = (ti * prob.image[i].homogeneous()).hnormalized();
  }

  const Eigen::Matrix3d conditioned = ti * initial.matrix() * tg.inverse();
  if (std::abs(conditioned(2, 2)) < kNormalizationFloor) {
    // The pinned entry is degenerate in this frame; nothing safe to do.
    return initial;
  }

  Params p = to_params(conditioned);
  double err = prob.error(p);
  if (!std::isfinite(err)) raise(ErrorKind::PointAtInfinity, "initial homography maps an inlier to infinity");

  double lambda = options.initial_damping;
  Eigen::Matrix<double, 8, 8> jtj;
  Params jtr;
  prob.linearize(p, jtj, jtr);

  for (int iter = 0; iter < options.max_iterations && err > 0.0; ++iter) {
    Params step;
    for (;;) {
      Eigen::Matrix<double, 8, 8> damped = jtj;
      for (int k = 0; k < 8; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::LDLT<Eigen::Matrix<double, 8, 8>> ldlt(damped);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        step = ldlt.solve(-jtr);
        if (step.allFinite()) break;
      }
      lambda *= 10.0;
      if (lambda > kMaxDamping) {
        raise(ErrorKind::SingularNormalEquations, "damped normal equations cannot be solved");
      }
    }

    const Params candidate = p + step;
    const double candidate_err = prob.error(candidate);
    const bool converged = step.lpNorm<Eigen::Infinity>() < options.step_tolerance;
    if (candidate_err < err) {
      p = candidate;
      err = candidate_err;
      lambda = std::max(lambda * 0.1, 1e-15);
      if (converged) break;
      prob.linearize(p, jtj, jtr);
    } else {
      if (converged) break;
      lambda *= 10.0;
      if (lambda > kMaxDamping) break;
    }
  }

  Homography refined;
  try {
    refined = Homography::from_matrix(ti.inverse() * to_matrix(p) * tg);
  } catch (const Error&) {
    return initial;
  }
  // Guard against round-off on the way back to pixel units.
  if (backprojection_error(refined, inliers) > backprojection_error(initial, inliers)) {
    return initial;
  }
  return refined;
}

}  // namespace ih
