#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "json.hpp"

#include "ih/evaluation.hpp"
#include "test_util.hpp"

using namespace ih;
using ih::test::Rng;

namespace {

struct Best {
  std::size_t count = 0;
  double total = 0.0;
};

// Every partial one-to-one assignment within threshold.
void search(const std::vector<GroundPoint>& gt, const std::vector<GroundPoint>& pred, double t, std::size_t i,
            std::vector<bool>& used, std::size_t count, double total, Best& best) {
  if (i == gt.size()) {
    if (count > best.count || (count == best.count && total < best.total)) best = {count, total};
    return;
  }
  search(gt, pred, t, i + 1, used, count, total, best);
  for (std::size_t j = 0; j < pred.size(); ++j) {
    if (used[j]) continue;
    const double d = std::hypot(gt[i].x - pred[j].x, gt[i].y - pred[j].y);
    if (d > t) continue;
    used[j] = true;
    search(gt, pred, t, i + 1, used, count + 1, total + d, best);
    used[j] = false;
  }
}

Best exhaustive(const std::vector<GroundPoint>& gt, const std::vector<GroundPoint>& pred, double t) {
  Best best{0, 0.0};
  std::vector<bool> used(pred.size(), false);
  search(gt, pred, t, 0, used, 0, 0.0, best);
  return best;
}

std::vector<GroundPoint> random_points(Rng& rng, std::size_t n, double extent) {
  std::vector<GroundPoint> p(n);
  for (auto& q : p) q = {test::uniform(rng, 0, extent), test::uniform(rng, 0, extent)};
  return p;
}

// Camera 6 m up behind the origin, looking across a z = 0 floor.
CameraModel floor_camera() { return test::look_at({0, -8, 6}, {0, 6, 0}); }

SequenceGeometry floor_geometry(const CameraModel& cam) {
  return {PlaneFrame::make(Plane{Eigen::Vector3d::UnitZ(), 0.0}, cam.rotation), cam};
}

// Frames of feet on the floor with noisy, partly missing and spurious predictions.
std::vector<EvalFrame> synthetic_frames(Rng& rng, const SequenceGeometry& geo, std::size_t count, double noise) {
  std::vector<EvalFrame> frames;
  for (std::size_t f = 0; f < count; ++f) {
    EvalFrame fr;
    fr.frame_id = static_cast<std::int64_t>(f);
    const std::size_t n = rng() % 12;
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::Vector3d foot(test::uniform(rng, -8, 8), test::uniform(rng, -2, 40), 0.0);
      fr.gt_feet_3d.push_back(foot);
      if (test::uniform(rng, 0, 1) < 0.15) continue;
      const GroundPoint g = geo.frame.to_plane(foot);
      fr.predicted_ground.push_back({g.x + test::gauss(rng, noise), g.y + test::gauss(rng, noise)});
    }
    if (test::uniform(rng, 0, 1) < 0.3) {
      const GroundPoint g = geo.frame.to_plane({test::uniform(rng, -8, 8), test::uniform(rng, 0, 40), 0.0});
      fr.predicted_ground.push_back(g);
    }
    frames.push_back(std::move(fr));
  }
  return frames;
}

}  // namespace

TEST(PlaneFit, Floor) {
  const std::vector<Eigen::Vector3d> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {3, 2, 0}};
  const Plane p = fit_plane(pts);
  EXPECT_NEAR(std::abs(p.normal.z()), 1.0, 1e-12);
  EXPECT_NEAR(p.offset, 0.0, 1e-12);
  for (const auto& q : pts) EXPECT_NEAR(p.signed_distance(q), 0.0, 1e-12);
}

TEST(PlaneFit, KnownTiltedPlane) {
  Rng rng(81);
  std::vector<Eigen::Vector3d> pts;
  for (int k = 0; k < 50; ++k) {
    const double x = test::uniform(rng, -5, 5);
    const double y = test::uniform(rng, -5, 5);
    pts.emplace_back(x, y, 3.0 - x - y);
  }
  const Plane p = fit_plane(pts);
  const Eigen::Vector3d n = Eigen::Vector3d(1, 1, 1).normalized();
  EXPECT_NEAR(std::abs(p.normal.dot(n)), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(p.offset), 3.0 / std::sqrt(3.0), 1e-9);
  // origin is on the negative side of x + y + z = 3, so the normal points back toward it
  EXPECT_LT(p.normal.dot(n), 0.0);
}

TEST(PlaneFit, Degenerate) {
  const std::vector<Eigen::Vector3d> line{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
  EXPECT_THROW_KIND(fit_plane(line), ErrorKind::DegeneratePoints);
  const std::vector<Eigen::Vector3d> two{{0, 0, 0}, {1, 1, 1}};
  EXPECT_THROW_KIND(fit_plane(two), ErrorKind::DegeneratePoints);
}

TEST(PlaneFit, ResidualInvariantUnderRigidMotion) {
  Rng rng(82);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Eigen::Vector3d> pts;
    for (int k = 0; k < 40; ++k)
      pts.emplace_back(test::uniform(rng, -3, 3), test::uniform(rng, -3, 3), test::gauss(rng, 0.1));
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(test::uniform(rng, 0, M_PI), Eigen::Vector3d::Random().normalized()).toRotationMatrix();
    const Eigen::Vector3d shift(test::uniform(rng, -9, 9), test::uniform(rng, -9, 9), test::uniform(rng, -9, 9));
    std::vector<Eigen::Vector3d> moved;
    for (const auto& p : pts) moved.push_back(rot * p + shift);
    auto residual = [](const std::vector<Eigen::Vector3d>& v, const Plane& pl) {
      double s = 0.0;
      for (const auto& p : v) s += pl.signed_distance(p) * pl.signed_distance(p);
      return s;
    };
    EXPECT_NEAR(residual(pts, fit_plane(pts)), residual(moved, fit_plane(moved)), 1e-9);
  }
}

TEST(PlaneFrameTest, FloorCoordinates) {
  const PlaneFrame f = PlaneFrame::make(Plane{Eigen::Vector3d::UnitZ(), 0.0});
  const GroundPoint g = f.to_plane({3, 4, 0});
  EXPECT_NEAR(g.x, 3, 1e-15);
  EXPECT_NEAR(g.y, 4, 1e-15);
  EXPECT_TRUE(f.lift(g).isApprox(Eigen::Vector3d(3, 4, 0)));
}

TEST(PlaneFrameTest, FallbackAxis) {
  // camera x-axis along the plane normal
  Eigen::Matrix3d r;
  r << 0, 0, 1, 0, 1, 0, -1, 0, 0;
  const PlaneFrame f = PlaneFrame::make(Plane{Eigen::Vector3d::UnitZ(), 0.0}, r);
  EXPECT_NEAR(f.axis_x.norm(), 1.0, 1e-12);
  EXPECT_NEAR(f.axis_x.dot(Eigen::Vector3d::UnitZ()), 0.0, 1e-12);
  EXPECT_NEAR(f.axis_x.dot(f.axis_y), 0.0, 1e-12);
}

TEST(PlaneFrameTest, IsometryUnderNoise) {
  Rng rng(83);
  const Eigen::Vector3d n = Eigen::Vector3d(0.2, -0.1, 1).normalized();
  const PlaneFrame f = PlaneFrame::make(Plane{n, 2.0});
  for (int k = 0; k < 200; ++k) {
    const GroundPoint a{test::uniform(rng, -10, 10), test::uniform(rng, -10, 10)};
    const double ang = test::uniform(rng, 0, 2 * M_PI);
    const GroundPoint b{a.x + 5 * std::cos(ang), a.y + 5 * std::sin(ang)};
    const GroundPoint ea = f.to_plane(f.lift(a));
    const GroundPoint eb = f.to_plane(f.lift(b));
    EXPECT_NEAR(std::hypot(ea.x - eb.x, ea.y - eb.y), 5.0, 1e-9);
    const Eigen::Vector3d pa = f.lift(a) + test::gauss(rng, 0.01) * n;
    const Eigen::Vector3d pb = f.lift(b) + test::gauss(rng, 0.01) * n;
    const GroundPoint na = f.to_plane(pa);
    const GroundPoint nb = f.to_plane(pb);
    EXPECT_NEAR(std::hypot(na.x - nb.x, na.y - nb.y), (pa - pb).norm(), 0.03);
  }
}

TEST(KMeans, Blobs) {
  Rng rng(84);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<GroundPoint> means;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        means.push_back({6.0 * j + test::uniform(rng, -0.5, 0.5), 6.0 * i + test::uniform(rng, -0.5, 0.5)});
    std::vector<GroundPoint> pts;
    std::vector<GroundPoint> sample_means;
    for (const auto& m : means) {
      GroundPoint acc{};
      for (int k = 0; k < 40; ++k) {
        const GroundPoint p{m.x + test::gauss(rng, 0.05), m.y + test::gauss(rng, 0.05)};
        pts.push_back(p);
        acc.x += p.x / 40;
        acc.y += p.y / 40;
      }
      sample_means.push_back(acc);
    }
    std::shuffle(pts.begin(), pts.end(), rng);
    const auto centers = kmeans9(pts, trial);
    ASSERT_EQ(centers.size(), 9u);
    for (const auto& m : sample_means) {
      double best = 1e9;
      for (const auto& c : centers) best = std::min(best, std::hypot(c.x - m.x, c.y - m.y));
      EXPECT_LT(best, 0.1);
    }
  }
}

TEST(KMeans, NinePointsAndTooFew) {
  const auto pts = test::unit_grid(2.0);
  auto centers = kmeans9(pts, 1);
  for (const auto& p : pts) {
    EXPECT_TRUE(std::any_of(centers.begin(), centers.end(),
                            [&](const GroundPoint& c) { return std::hypot(c.x - p.x, c.y - p.y) < 1e-12; }));
  }
  std::vector<GroundPoint> eight(pts.begin(), pts.begin() + 8);
  EXPECT_THROW_KIND(kmeans9(eight, 1), ErrorKind::InsufficientPoints);
  std::vector<GroundPoint> dup(20, GroundPoint{1, 1});
  EXPECT_THROW_KIND(kmeans9(dup, 1), ErrorKind::InsufficientPoints);
  EXPECT_EQ(kmeans9(pts, 7).size(), 9u);
}

TEST(Correspondences, ReproduceAnalyticHomography) {
  Rng rng(85);
  const CameraModel cam = floor_camera();
  std::vector<Eigen::Vector3d> feet;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 30; ++k)
        feet.emplace_back(-4.0 + 4.0 * j + test::gauss(rng, 0.3), 2.0 + 5.0 * i + test::gauss(rng, 0.3), 0.0);
  const auto ec = build_eval_correspondences(feet, cam, 3);
  ASSERT_EQ(ec.pairs.size(), 9u);
  // Plane coordinates (a, b) map to origin + a*ex + b*ey, then through K [R | t].
  Eigen::Matrix3d m;
  m.col(0) = cam.rotation * ec.frame.axis_x;
  m.col(1) = cam.rotation * ec.frame.axis_y;
  m.col(2) = cam.rotation * ec.frame.origin + cam.translation;
  const Eigen::Matrix3d h = cam.intrinsics() * m;
  for (int k = 0; k < 200; ++k) {
    const GroundPoint g{test::uniform(rng, -6, 6), test::uniform(rng, 0, 15)};
    const Eigen::Vector2d want = test::project_matrix(h, g.x, g.y);
    const PixelPoint got = ec.ground_to_image.to_image(g);
    EXPECT_LT(std::hypot(got.u - want.x(), got.v - want.y()), 1e-4);
  }
}

TEST(Correspondences, CameraInFootPlane) {
  Rng rng(86);
  std::vector<Eigen::Vector3d> feet;
  for (int k = 0; k < 90; ++k) feet.emplace_back(test::uniform(rng, -5, 5), test::uniform(rng, -5, 5), 0.0);
  try {
    build_eval_correspondences(feet, CameraModel{}, 1);
    FAIL() << "degenerate geometry accepted";
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::BehindCamera || e.kind() == ErrorKind::DegenerateConfiguration) << e.what();
  }
}

TEST(Matching, Cases) {
  const std::vector<GroundPoint> one{{0, 0}};
  auto m = match_frame(one, std::vector<GroundPoint>{{0.3, 0}}, 0.5);
  EXPECT_EQ(m.true_positives, 1u);
  EXPECT_EQ(m.false_positives, 0u);
  EXPECT_EQ(m.false_negatives, 0u);

  m = match_frame(std::vector<GroundPoint>{{0, 0}, {0.4, 0}}, std::vector<GroundPoint>{{0.2, 0}}, 0.5);
  EXPECT_EQ(m.true_positives, 1u);
  EXPECT_EQ(m.false_negatives, 1u);
  EXPECT_EQ(m.false_positives, 0u);

  m = match_frame(one, std::vector<GroundPoint>{{0.5, 0}}, 0.5);
  EXPECT_EQ(m.true_positives, 1u);

  m = match_frame({}, one, 0.5);
  EXPECT_EQ(m.false_positives, 1u);
  EXPECT_THROW_KIND(match_frame(one, one, 0.0), ErrorKind::InvalidArgument);
}

TEST(Matching, GreedyWouldFail) {
  // Greedy takes (g0, p0) at 0.1 and strands g1; the optimum matches both.
  const std::vector<GroundPoint> gt{{0, 0}, {0.9, 0}};
  const std::vector<GroundPoint> pred{{0.1, 0}, {-0.8, 0}};
  EXPECT_EQ(match_frame(gt, pred, 1.0).true_positives, 2u);
}

TEST(Matching, EqualsExhaustiveSearch) {
  Rng rng(87);
  for (int trial = 0; trial < 300; ++trial) {
    const auto gt = random_points(rng, rng() % 7, 3.0);
    const auto pred = random_points(rng, rng() % 7, 3.0);
    const double t = test::uniform(rng, 0.2, 1.5);
    const MatchResult m = match_frame(gt, pred, t);
    const Best b = exhaustive(gt, pred, t);
    ASSERT_EQ(m.true_positives, b.count);
    double total = 0.0;
    for (const auto& p : m.pairs) {
      EXPECT_LE(p.distance, t);
      total += p.distance;
    }
    EXPECT_NEAR(total, b.total, 1e-9);
    EXPECT_EQ(m.true_positives + m.false_positives, pred.size());
    EXPECT_EQ(m.true_positives + m.false_negatives, gt.size());
  }
}

TEST(RangeFilter, GtByCameraDistance) {
  CameraModel cam;  // center at the origin
  const PlaneFrame f = PlaneFrame::make(Plane{Eigen::Vector3d::UnitZ(), -1.0});
  EvalFrame fr;
  fr.gt_feet_3d = {{0, 5, -1}, {0, 15, -1}};
  fr.predicted_ground = {{0, 5}, {0, 15}};
  const EvalFrame kept = apply_range_filter(fr, f, cam, 10.0);
  ASSERT_EQ(kept.gt_feet_3d.size(), 1u);
  EXPECT_EQ(kept.gt_feet_3d[0].y(), 5);
  EXPECT_EQ(kept.predicted_ground.size(), 1u);
  EXPECT_EQ(apply_range_filter(fr, f, cam, 100.0).gt_feet_3d.size(), 2u);
}

TEST(Scores, Conventions) {
  const Scores perfect = scores_from_counts(0, 0, 0);
  EXPECT_EQ(perfect.precision, 100);
  EXPECT_EQ(perfect.f1, 100);
  const Scores mix = scores_from_counts(8, 2, 2);
  EXPECT_DOUBLE_EQ(mix.precision, 80);
  EXPECT_DOUBLE_EQ(mix.recall, 80);
  EXPECT_DOUBLE_EQ(mix.f1, 80);
  const Scores none = scores_from_counts(0, 0, 3);
  EXPECT_EQ(none.precision, 0);
  EXPECT_EQ(none.recall, 0);
  EXPECT_EQ(none.f1, 0);
  const Scores spurious = scores_from_counts(0, 2, 0);
  EXPECT_EQ(spurious.precision, 0);
  EXPECT_EQ(spurious.recall, 0);
}

TEST(Metrics, PerfectPredictions) {
  Rng rng(88);
  const CameraModel cam = floor_camera();
  const auto geo = floor_geometry(cam);
  const auto frames = synthetic_frames(rng, geo, 20, 0.0);
  std::vector<EvalFrame> perfect = frames;
  for (auto& f : perfect) f.predicted_ground = plane_coordinates(geo.frame, f.gt_feet_3d);
  const auto table = compute_metrics(perfect, {{"0", geo}}, kDefaultThresholds, kDefaultRanges, 1);
  // GT is bucketed by 3D camera distance, predictions by floor distance to the
  // camera footprint, so a perfect prediction whose GT lies just beyond the
  // range still counts as a false positive.
  const Eigen::Vector3d c = cam.center();
  for (double r : kDefaultRanges) {
    std::size_t kept = 0, band = 0;
    for (const auto& f : perfect)
      for (const auto& g : f.gt_feet_3d) {
        const bool gt_in = (g - c).norm() <= r;
        const bool pred_in = std::hypot(g.x() - c.x(), g.y() - c.y()) <= r;
        kept += gt_in;
        band += pred_in && !gt_in;
      }
    for (double t : kDefaultThresholds) {
      const auto& cell = table.at(r, t);
      EXPECT_EQ(cell.true_positives, kept);
      EXPECT_EQ(cell.false_negatives, 0u);
      EXPECT_EQ(cell.false_positives, band);
    }
  }
  for (double t : kDefaultThresholds) {
    EXPECT_EQ(table.at(100, t).aggregate.f1, 100);
    EXPECT_EQ(table.at(100, t).macro.precision, 100);
  }
}

TEST(Metrics, StrideSelectsFrames) {
  Rng rng(89);
  const auto geo = floor_geometry(floor_camera());
  const auto frames = synthetic_frames(rng, geo, 100, 0.1);
  EXPECT_EQ(compute_metrics(frames, {{"0", geo}}, kDefaultThresholds, kDefaultRanges, 10).frames_scored, 10u);
  EXPECT_EQ(compute_metrics(frames, {{"0", geo}}, kDefaultThresholds, kDefaultRanges, 1).frames_scored, 100u);
  EXPECT_THROW_KIND(compute_metrics(frames, {{"0", geo}}, kDefaultThresholds, kDefaultRanges, 0),
                    ErrorKind::InvalidArgument);
  EXPECT_THROW_KIND(compute_metrics(frames, {{"other", geo}}, kDefaultThresholds, kDefaultRanges, 1),
                    ErrorKind::InvalidArgument);
}

TEST(Metrics, HandCountedTable) {
  const auto geo = floor_geometry(floor_camera());
  auto at = [&](double x, double y) { return geo.frame.to_plane({x, y, 0}); };
  EvalFrame f;
  f.gt_feet_3d = {{0, 4, 0}, {2, 4, 0}, {-2, 6, 0}, {0, 30, 0}};
  const GroundPoint a = at(0, 4);
  const GroundPoint b = at(2, 4);
  const GroundPoint c = at(-2, 6);
  // a exact, b off by 0.8, c off by 1.2, (0,30) missed, one spurious near the camera
  f.predicted_ground = {a, {b.x + 0.8, b.y}, {c.x, c.y + 1.2}, at(5, 5)};
  const std::vector<double> th{0.5, 1.0, 1.5};
  const std::vector<double> rg{20.0, 100.0};
  const auto table = compute_metrics(std::vector<EvalFrame>{f}, {{"0", geo}}, th, rg, 1);
  // range 20 keeps the three near GT and all four predictions
  EXPECT_EQ(table.at(20, 0.5).true_positives, 1u);
  EXPECT_EQ(table.at(20, 0.5).false_positives, 3u);
  EXPECT_EQ(table.at(20, 0.5).false_negatives, 2u);
  EXPECT_EQ(table.at(20, 1.0).true_positives, 2u);
  EXPECT_EQ(table.at(20, 1.5).true_positives, 3u);
  EXPECT_EQ(table.at(20, 1.5).false_negatives, 0u);
  EXPECT_EQ(table.at(100, 1.5).false_negatives, 1u);
  EXPECT_DOUBLE_EQ(table.at(100, 1.5).aggregate.precision, 75.0);
  EXPECT_DOUBLE_EQ(table.at(100, 1.5).aggregate.recall, 75.0);
}

TEST(Metrics, ParallelEqualsReferenceAndOrderInvariant) {
  Rng rng(90);
  const auto geo = floor_geometry(floor_camera());
  auto frames = synthetic_frames(rng, geo, 200, 0.4);
  for (std::size_t k = 0; k < frames.size(); ++k) frames[k].sequence_id = k % 3 ? "a" : "b";
  const std::map<std::string, SequenceGeometry> g{{"a", geo}, {"b", geo}};
  const auto par = compute_metrics(frames, g, kDefaultThresholds, kDefaultRanges, 2);
  const auto ser = reference::compute_metrics(frames, g, kDefaultThresholds, kDefaultRanges, 2);
  std::shuffle(frames.begin(), frames.end(), rng);
  const auto shuffled = compute_metrics(frames, g, kDefaultThresholds, kDefaultRanges, 2);
  EXPECT_EQ(metrics_to_csv(par), metrics_to_csv(ser));
  EXPECT_EQ(metrics_to_json(par), metrics_to_json(shuffled));
  for (std::size_t c = 0; c < par.cells.size(); ++c) EXPECT_EQ(par.cells[c].macro.f1, ser.cells[c].macro.f1);
}

TEST(Metrics, ThresholdMonotone) {
  Rng rng(91);
  const auto geo = floor_geometry(floor_camera());
  for (int trial = 0; trial < 20; ++trial) {
    const auto frames = synthetic_frames(rng, geo, 30, test::uniform(rng, 0.1, 1.0));
    const auto table = compute_metrics(frames, {{"0", geo}}, kDefaultThresholds, kDefaultRanges, 1);
    for (double r : kDefaultRanges) {
      EXPECT_LE(table.at(r, 0.5).true_positives, table.at(r, 1.0).true_positives);
      EXPECT_LE(table.at(r, 1.0).true_positives, table.at(r, 1.5).true_positives);
      EXPECT_LE(table.at(r, 0.5).aggregate.f1, table.at(r, 1.0).aggregate.f1);
      EXPECT_LE(table.at(r, 1.0).aggregate.f1, table.at(r, 1.5).aggregate.f1);
    }
  }
}

TEST(Metrics, CsvLayout) {
  const auto geo = floor_geometry(floor_camera());
  const auto table = compute_metrics(std::vector<EvalFrame>{}, {{"0", geo}}, kDefaultThresholds, kDefaultRanges, 1);
  const std::string csv = metrics_to_csv(table);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "max_range_m,variant,PR@0.5,RE@0.5,F1@0.5,PR@1,RE@1,F1@1,PR@1.5,RE@1.5,F1@1.5");
  EXPECT_NE(csv.find("10,aggregate,100.0000"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  EXPECT_FALSE(metrics_to_text(table).empty());
  EXPECT_THROW_KIND(table.at(7, 0.5), ErrorKind::InvalidArgument);
}

TEST(EvalIo, ParseFrameAndCamera) {
  const auto in = parse_eval_frame(
      R"({"frame_id":4,"sequence_id":"seq_1","gt_feet_3d":[[1,2,3]],"predicted_ground":[[0.5,1]],"predicted_pixels":[[10,20]]})");
  EXPECT_EQ(in.frame.frame_id, 4);
  EXPECT_EQ(in.frame.sequence_id, "seq_1");
  EXPECT_EQ(in.frame.gt_feet_3d.size(), 1u);
  ASSERT_TRUE(in.predicted_pixels);
  EXPECT_EQ(in.predicted_pixels->size(), 1u);
  EXPECT_THROW_KIND(parse_eval_frame(R"({"frame_id":1,"gt_feet_3d":[[1,2]],"predicted_ground":[]})", 3),
                    ErrorKind::ParseError);
  EXPECT_THROW_KIND(parse_eval_frame(R"({"frame_id":1,"gt_feet_3d":[]})"), ErrorKind::ParseError);

  const CameraModel cam = floor_camera();
  const CameraModel back = camera_from_json(camera_to_json(cam));
  EXPECT_TRUE(back.rotation.isApprox(cam.rotation, 1e-15));
  EXPECT_TRUE(back.translation.isApprox(cam.translation, 1e-15));
  const CameraModel plain = camera_from_json(R"({"fx":1000,"fy":1000,"cx":960,"cy":540})");
  EXPECT_TRUE(plain.rotation.isIdentity());
  EXPECT_THROW_KIND(camera_from_json(R"({"fx":1000})"), ErrorKind::ParseError);
  EXPECT_THROW_KIND(read_eval_frames("/nonexistent/eval.jsonl"), ErrorKind::StorageError);
}
