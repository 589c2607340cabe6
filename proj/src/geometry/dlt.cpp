#include <cmath>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "ih/error.hpp"
#include "ih/geometry.hpp"

namespace ih {

namespace {

// Ratio of the eighth singular value to the largest below which the design
// matrix is treated as rank deficient.
constexpr double kRankTolerance = 1e-9;

Eigen::Vector2d transform(const Eigen::Matrix3d& t, const Eigen::Vector2d& p) {
  return {t(0, 0) * p.x() + t(0, 2), t(1, 1) * p.y() + t(1, 2)};
}

}  // namespace

Eigen::Matrix3d isotropic_normalization(std::span<const Eigen::Vector2d> points) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  double mean_distance = 0.0;
  for (const auto& p : points) mean_distance += (p - centroid).norm();
  mean_distance /= static_cast<double>(points.size());
  if (!(mean_distance > 0.0)) {
    raise(ErrorKind::DegenerateConfiguration, "all points coincide");
  }

  const double s = std::sqrt(2.0) / mean_distance;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = s;
  t(1, 1) = s;
  t(0, 2) = -s * centroid.x();
  t(1, 2) = -s * centroid.y();
  return t;
}

Homography estimate_homography_dlt(std::span<const Correspondence> correspondences) {
  const std::size_t n = correspondences.size();
  if (n < 4) {
    raise(ErrorKind::InvalidArgument, "DLT needs at least 4 correspondences, got " +
                                          std::to_string(n));
  }

  std::vector<Eigen::Vector2d> ground(n);
  std::vector<Eigen::Vector2d> image(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = correspondences[i];
    if (!std::isfinite(c.ground.x) || !std::isfinite(c.ground.y) ||
        !std::isfinite(c.image.u) || !std::isfinite(c.image.v)) {
      raise(ErrorKind::InvalidArgument, "non-finite correspondence");
    }
    ground[i] = {c.ground.x, c.ground.y};
    image[i] = {c.image.u, c.image.v};
  }

  if (n == 4) {
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = a + 1; b < 4; ++b)
        for (std::size_t c = b + 1; c < 4; ++c)
          if (nearly_collinear(ground[a], ground[b], ground[c]) ||
              nearly_collinear(image[a], image[b], image[c])) {
            raise(ErrorKind::DegenerateConfiguration, "three of four points are collinear");
          }
  }

  const Eigen::Matrix3d tg = isotropic_normalization(ground);
  const Eigen::Matrix3d ti = isotropic_normalization(image);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d g = transform(tg, ground[i]);
    const Eigen::Vector2d p = transform(ti, image[i]);
    const double X = g.x(), Y = g.y(), u = p.x(), v = p.y();
    a.row(2 * i) << X, Y, 1.0, 0.0, 0.0, 0.0, -u * X, -u * Y, -u;
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, X, Y, 1.0, -v * X, -v * Y, -v;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(7) <= kRankTolerance * sv(0)) {
    raise(ErrorKind::DegenerateConfiguration, "design matrix is rank deficient");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);

  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d m = ti.inverse() * hn * tg;

  if (std::abs(m(2, 2)) < kNormalizationFloor * m.cwiseAbs().maxCoeff()) {
    raise(ErrorKind::NotNormalizable, "solved h33 vanishes");
  }
  try {
    return Homography::from_matrix(m);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularMatrix) {
      raise(ErrorKind::DegenerateConfiguration, "solution is a singular matrix");
    }
    throw;
  }
}

}  // namespace ih
