#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

#include "ih/analytics.hpp"
#include "test_util.hpp"

using namespace ih;
using ih::test::Rng;

namespace {

const WalkingArea kSquare({{0, 0}, {10, 0}, {10, 10}, {0, 10}});

MapGrid random_map(Rng& rng, const MapGrid& like) {
  MapGrid m = like;
  for (auto& v : m.values) v = test::uniform(rng, 0, 1);
  return m;
}

LogRecord record(double ts, std::size_t people, double d, std::size_t infractions = 0) {
  LogRecord r;
  r.timestamp = ts;
  r.camera_id = "cam";
  r.people_count = people;
  for (std::size_t k = 0; k < people; ++k) r.positions.push_back({static_cast<double>(k), 0.5});
  r.global_risk = d;
  r.dynamic_risk = d;
  r.infraction_pairs = infractions;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 2024-03-01T00:00:00Z
constexpr double kDay = 1709251200.0;

}  // namespace

TEST(MapGridTest, GeometryAndBudget) {
  const MapGrid g = make_map_grid(kSquare, 0.25);
  EXPECT_EQ(g.width, 40u);
  EXPECT_EQ(g.height, 40u);
  EXPECT_DOUBLE_EQ(g.cell_center(0, 0).x, 0.125);
  EXPECT_DOUBLE_EQ(g.cell_center(2, 1).y, 0.625);
  EXPECT_THROW_KIND(make_map_grid(kSquare, 0.001, 1000), ErrorKind::GridTooLarge);
  EXPECT_THROW_KIND(make_map_grid(kSquare, 0.0), ErrorKind::InvalidArgument);
}

TEST(DynamicMap, Cases) {
  const RiskParams p;
  const MapGrid empty = dynamic_risk_map(p, SceneSnapshot{}, kSquare);
  for (double v : empty.values) EXPECT_EQ(v, 0.0);

  RiskParams q;
  q.eta = 0.7;
  const MapGrid one = dynamic_risk_map(q, SceneSnapshot{0, {{5.125, 5.125}}}, kSquare);
  EXPECT_EQ(one.at(20, 20), 0.7);

  // Cell (0, 0) center is (0.5, 0.5) at cell size 1; person 1 + ln 2 to its right.
  const MapGrid half = dynamic_risk_map(p, SceneSnapshot{0, {{0.5 + 1.0 + std::log(2.0), 0.5}}}, kSquare, 1.0);
  EXPECT_NEAR(half.at(0, 0), 0.5, 1e-15);
}

TEST(DynamicMap, OutsideAreaStaysZero) {
  const WalkingArea tri({{0, 0}, {4, 0}, {0, 4}});
  const MapGrid m = dynamic_risk_map(RiskParams{}, SceneSnapshot{0, {{1, 1}}}, tri, 0.5);
  for (std::size_t r = 0; r < m.height; ++r)
    for (std::size_t c = 0; c < m.width; ++c)
      if (!tri.contains(m.cell_center(r, c))) EXPECT_EQ(m.at(r, c), 0.0);
}

TEST(DynamicMap, KernelMatchesReferenceAndBounded) {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    RiskParams p;
    p.eta = test::uniform(rng, 0.1, 1);
    p.tau = test::uniform(rng, 0.5, 2);
    std::vector<GroundPoint> pts;
    for (int k = 0; k < 1 + trial; ++k) pts.push_back({test::uniform(rng, 0, 10), test::uniform(rng, 0, 10)});
    const auto a = kernels::dynamic_risk_map(p, pts, kSquare, 0.5);
    const auto b = reference::dynamic_risk_map(p, pts, kSquare, 0.5);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      EXPECT_NEAR(a.values[k], b.values[k], 1e-12);
      EXPECT_LE(a.values[k], p.eta);
    }
  }
}

TEST(DynamicMap, MonotoneInNearestDistance) {
  Rng rng(72);
  std::vector<GroundPoint> pts;
  for (int k = 0; k < 5; ++k) pts.push_back({test::uniform(rng, 0, 10), test::uniform(rng, 0, 10)});
  const auto m = dynamic_risk_map(RiskParams{}, SceneSnapshot{0, pts}, kSquare, 0.25);
  std::vector<std::pair<double, double>> dv;
  for (std::size_t r = 0; r < m.height; ++r) {
    for (std::size_t c = 0; c < m.width; ++c) {
      const GroundPoint cc = m.cell_center(r, c);
      double nearest = 1e300;
      for (const auto& p : pts) nearest = std::min(nearest, std::hypot(cc.x - p.x, cc.y - p.y));
      dv.emplace_back(nearest, m.at(r, c));
    }
  }
  std::sort(dv.begin(), dv.end());
  for (std::size_t k = 1; k < dv.size(); ++k) EXPECT_LE(dv[k].second, dv[k - 1].second + 1e-12);
}

TEST(Occupation, Folds) {
  Rng rng(73);
  const MapGrid zero = make_map_grid(kSquare, 1.0);
  OccupationAccumulator same(zero);
  const MapGrid m = random_map(rng, zero);
  for (int k = 0; k < 5; ++k) same.fold(m);
  for (std::size_t k = 0; k < m.values.size(); ++k) EXPECT_NEAR(same.mean().values[k], m.values[k], 1e-15);

  OccupationAccumulator half(zero);
  MapGrid ones = zero;
  std::fill(ones.values.begin(), ones.values.end(), 1.0);
  half.fold(zero);
  half.fold(ones);
  for (double v : half.mean().values) EXPECT_DOUBLE_EQ(v, 0.5);
  EXPECT_EQ(half.samples(), 2u);

  half.reset();
  EXPECT_EQ(half.samples(), 0u);
  EXPECT_THROW_KIND(half.fold(make_map_grid(kSquare, 0.5)), ErrorKind::GridMismatch);
}

TEST(Occupation, BatchMeanAndOrderIndependence) {
  Rng rng(74);
  const MapGrid zero = make_map_grid(kSquare, 0.5);
  std::vector<MapGrid> maps;
  for (int k = 0; k < 50; ++k) maps.push_back(random_map(rng, zero));
  OccupationAccumulator forward;
  for (const auto& m : maps) forward.fold(m);
  OccupationAccumulator backward(zero);
  for (auto it = maps.rbegin(); it != maps.rend(); ++it) backward.fold(*it);
  for (std::size_t k = 0; k < zero.values.size(); ++k) {
    double sum = 0.0;
    for (const auto& m : maps) sum += m.values[k];
    EXPECT_NEAR(forward.mean().values[k], sum / maps.size(), 1e-12);
    EXPECT_NEAR(forward.mean().values[k], backward.mean().values[k], 1e-9);
  }
}

TEST(Infractions, Counts) {
  const RiskParams p;
  EXPECT_EQ(count_infractions(p, SceneSnapshot{0, {{0, 0}}}), 0u);
  EXPECT_EQ(count_infractions(p, SceneSnapshot{0, {{0, 0}, {0.5, 0}, {0, 0.5}}}), 3u);
  EXPECT_EQ(count_infractions(p, SceneSnapshot{0, {{0, 0}, {1.0, 0}}}), 0u);
  Rng rng(75);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<GroundPoint> pts;
    for (std::size_t k = 0; k < 1 + rng() % 50; ++k) pts.push_back({test::uniform(rng, 0, 8), test::uniform(rng, 0, 8)});
    std::size_t want = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (i < j && std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) < p.tau) ++want;
    EXPECT_EQ(count_infractions(p, SceneSnapshot{0, pts}), want);
    std::shuffle(pts.begin(), pts.end(), rng);
    EXPECT_EQ(count_infractions(p, SceneSnapshot{0, pts}), want);
  }
}

TEST(MapExport, CsvAndPgm) {
  const auto dir = test::temp_dir("maps");
  MapGrid g = make_map_grid(WalkingArea({{0, 0}, {3, 0}, {3, 2}, {0, 2}}), 1.0);
  g.at(0, 0) = 1.0;
  g.at(1, 2) = 0.5;
  write_map_csv(g, dir / "m.csv");
  write_map_pgm(g, dir / "m.pgm");
  EXPECT_EQ(slurp(dir / "m.csv"), "1,0,0\n0,0,0.5\n");
  EXPECT_EQ(slurp(dir / "m.pgm"), "P2\n3 2\n255\n255 0 0\n0 0 128\n");
  EXPECT_THROW_KIND(write_map_csv(g, dir / "no" / "m.csv"), ErrorKind::StorageError);
  std::filesystem::remove_all(dir);
}

TEST(Dates, KeysAndMidnight) {
  EXPECT_EQ(date_key(kDay), "2024-03-01");
  EXPECT_EQ(date_key(kDay - 1), "2024-02-29");
  EXPECT_EQ(date_key(kDay - 1, 3600), "2024-03-01");
  EXPECT_DOUBLE_EQ(day_start(kDay + 5000), kDay);
  EXPECT_DOUBLE_EQ(day_start(kDay + 5000, 3600), kDay - 3600);
}

TEST(LogStoreTest, RoundTripAndOrder) {
  const auto dir = test::temp_dir("logs");
  JsonlLogStore store(dir);
  LogRecord a = record(kDay + 10, 2, 0.25, 1);
  a.positions = {{0.1, 1.0 / 3.0}, {-2.5e-7, 1e5}};
  const LogRecord b = record(kDay + 20, 0, 0.0);
  store.append(a);
  store.append(b);
  EXPECT_EQ(store.file_for("cam", kDay + 10).filename(), "log_cam_2024-03-01.jsonl");
  const auto got = store.read_all("cam");
  ASSERT_EQ(got.records.size(), 2u);
  EXPECT_EQ(got.records[0].timestamp, a.timestamp);
  EXPECT_EQ(got.records[0].positions[0].y, 1.0 / 3.0);
  EXPECT_EQ(got.records[0].positions[1].x, -2.5e-7);
  EXPECT_EQ(got.records[0].infraction_pairs, 1u);
  EXPECT_EQ(got.records[1].timestamp, b.timestamp);
  EXPECT_TRUE(store.read_all("other").records.empty());
  std::filesystem::remove_all(dir);
}

TEST(LogStoreTest, Errors) {
  const auto dir = test::temp_dir("logerr");
  JsonlLogStore bad(dir / "missing");
  EXPECT_THROW_KIND(bad.append(record(kDay, 1, 0.1)), ErrorKind::StorageError);
  EXPECT_THROW_KIND(bad.read_all("cam"), ErrorKind::StorageError);
  LogRecord nan = record(kDay, 1, 0.1);
  nan.dynamic_risk = std::nan("");
  EXPECT_THROW_KIND(log_record_to_json(nan), ErrorKind::InvalidArgument);
  LogRecord inf = record(kDay, 1, 0.1);
  inf.positions[0].x = INFINITY;
  EXPECT_THROW_KIND(log_record_to_json(inf), ErrorKind::InvalidArgument);

  JsonlLogStore store(dir);
  store.append(record(kDay, 1, 0.1));
  {
    std::ofstream out(store.file_for("cam", kDay), std::ios::app);
    out << R"({"timestamp":)";
  }
  const auto got = store.read_all("cam");
  EXPECT_EQ(got.records.size(), 1u);
  EXPECT_EQ(got.skipped_lines, 1u);
  {
    std::ofstream out(store.file_for("cam", kDay), std::ios::app);
    out << "\n" << log_record_to_json(record(kDay + 1, 1, 0.1)) << "\n";
  }
  EXPECT_THROW_KIND(store.read_all("cam"), ErrorKind::StorageError);
  std::filesystem::remove_all(dir);
}

TEST(Report, EmptyStore) {
  const auto dir = test::temp_dir("rep_empty");
  const Report r = build_report(JsonlLogStore(dir), ReportPeriod::Day, "cam");
  EXPECT_EQ(r.buckets.size(), 24u);
  EXPECT_FALSE(r.start);
  for (const auto& b : r.buckets) EXPECT_TRUE(b.empty);
  EXPECT_EQ(build_report(JsonlLogStore(dir), ReportPeriod::Week, "cam").buckets.size(), 168u);
  std::filesystem::remove_all(dir);
}

TEST(Report, SingleRecordBucket) {
  const auto dir = test::temp_dir("rep_one");
  JsonlLogStore store(dir);
  store.append(record(kDay + 14.5 * 3600, 5, 0.3));
  const Report r = build_report(store, ReportPeriod::Day, "cam");
  for (std::size_t h = 0; h < 24; ++h) EXPECT_EQ(r.buckets[h].empty, h != 14) << h;
  EXPECT_DOUBLE_EQ(r.buckets[14].avg_people, 5);
  EXPECT_DOUBLE_EQ(r.buckets[14].start, kDay + 14 * 3600);
  ASSERT_EQ(r.occupation_maps.size(), 1u);
  EXPECT_EQ(r.occupation_maps[0].csv, "occupation_cam_2024-03-01.csv");
  const auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j["buckets"][14]["avg_people"], 5.0);
  EXPECT_EQ(j["period"], "day");
  std::filesystem::remove_all(dir);
}

TEST(Report, MatchesIndependentFold) {
  Rng rng(76);
  const auto dir = test::temp_dir("rep_fold");
  JsonlLogStore store(dir);
  std::map<int, std::vector<LogRecord>> by_hour;
  for (double t = kDay; t < kDay + 86400; t += test::uniform(rng, 30, 900)) {
    const LogRecord r = record(t, rng() % 30, test::uniform(rng, 0, 1), rng() % 5);
    store.append(r);
    by_hour[static_cast<int>((t - kDay) / 3600)].push_back(r);
  }
  const Report rep = build_report(store, ReportPeriod::Day, "cam");
  for (int h = 0; h < 24; ++h) {
    const auto& recs = by_hour[h];
    const auto& b = rep.buckets[static_cast<std::size_t>(h)];
    EXPECT_EQ(b.samples, recs.size());
    double people = 0, d = 0, dmax = 0;
    std::size_t pmax = 0, inf = 0;
    for (const auto& r : recs) {
      people += static_cast<double>(r.people_count);
      d += r.dynamic_risk;
      dmax = std::max(dmax, r.dynamic_risk);
      pmax = std::max(pmax, r.people_count);
      inf += r.infraction_pairs;
    }
    if (recs.empty()) continue;
    EXPECT_NEAR(b.avg_people, people / recs.size(), 1e-12);
    EXPECT_NEAR(b.avg_dynamic_risk, d / recs.size(), 1e-12);
    EXPECT_EQ(b.max_dynamic_risk, dmax);
    EXPECT_EQ(b.max_people, pmax);
    EXPECT_EQ(b.infraction_count, inf);
  }
  std::filesystem::remove_all(dir);
}
