#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "deepagg/error.hpp"
#include "deepagg/retrieval.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace deepagg;
namespace fs = std::filesystem;

namespace {

QueryGroundTruth truth(std::set<std::string> pos, std::set<std::string> junk = {}) {
  QueryGroundTruth gt;
  gt.query_id = "q";
  gt.query_image = "q";
  gt.positives = std::move(pos);
  gt.junk = std::move(junk);
  return gt;
}

GlobalDescriptor unit(std::vector<double> v, std::string id) {
  return GlobalDescriptor::normalized(std::move(v), std::move(id));
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_lines(const fs::path& p, std::initializer_list<const char*> lines) {
  std::ofstream out(p);
  for (const char* l : lines) out << l << "\n";
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no deepagg::Error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(BuildIndex, SizesAndErrors) {
  EXPECT_TRUE(build_index({}).empty());
  std::vector<GlobalDescriptor> three{unit({1, 0}, "a"), unit({0, 1}, "b"), unit({1, 1}, "c")};
  const auto idx = build_index(three);
  EXPECT_EQ(idx.size(), 3u);
  EXPECT_EQ(idx.dim(), 2u);
  std::vector<GlobalDescriptor> mixed{unit({1, 0}, "a"), unit({1, 0, 0}, "b")};
  EXPECT_EQ(code_of([&] { build_index(mixed); }), ErrorCode::DimensionMismatch);
  std::vector<GlobalDescriptor> dup{unit({1, 0}, "a"), unit({0, 1}, "a")};
  EXPECT_EQ(code_of([&] { build_index(dup); }), ErrorCode::DuplicateId);
}

TEST(Search, ExactMatchFirstAndOrthogonalTies) {
  std::vector<GlobalDescriptor> db{unit({0, 1, 0}, "b"), unit({1, 0, 0}, "a"), unit({0, 0, 1}, "c")};
  const auto idx = build_index(db);
  const auto r = search(idx, unit({1, 0, 0}, "q"));
  EXPECT_EQ(r[0].image_id, "a");
  EXPECT_DOUBLE_EQ(r[0].score, 1.0);

  std::vector<GlobalDescriptor> flat{unit({0, 1, 0}, "z"), unit({0, 0, 1}, "m"), unit({0, 1, 1}, "b")};
  const auto r2 = search(build_index(flat), unit({1, 0, 0}, "q"));
  ASSERT_EQ(r2.size(), 3u);
  EXPECT_EQ(r2[0].image_id, "b");
  EXPECT_EQ(r2[1].image_id, "m");
  EXPECT_EQ(r2[2].image_id, "z");
  for (const auto& s : r2) EXPECT_EQ(s.score, 0.0);
}

TEST(Search, MatchesBruteForceSort) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GlobalDescriptor> db;
    for (int n = 0; n < 10; ++n) db.push_back(unit(testgen::random_unit(rng, 6), "id" + std::to_string(n)));
    const auto q = unit(testgen::random_unit(rng, 6), "q");
    std::vector<std::pair<double, std::string>> expect;
    for (const auto& d : db) {
      double s = 0;
      for (std::size_t k = 0; k < 6; ++k) s += d.values()[k] * q.values()[k];
      expect.emplace_back(-s, d.image_id());
    }
    std::sort(expect.begin(), expect.end());
    const auto r = search(build_index(db), q);
    for (std::size_t n = 0; n < 10; ++n) EXPECT_EQ(r[n].image_id, expect[n].second);
  }
}

TEST(AveragePrecision, PerfectRanking) {
  const std::vector<std::string> ranking{"p1", "p2", "n1"};
  for (auto mode : {ApMode::Trapezoid, ApMode::Standard})
    EXPECT_DOUBLE_EQ(average_precision(ranking, truth({"p1", "p2"}), mode), 1.0);
}

TEST(AveragePrecision, PosNegPosWorkedValues) {
  const std::vector<std::string> ranking{"p1", "n", "p2"};
  EXPECT_NEAR(average_precision(ranking, truth({"p1", "p2"}), ApMode::Standard), 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(average_precision(ranking, truth({"p1", "p2"}), ApMode::Trapezoid), 19.0 / 24.0, 1e-12);
}

TEST(AveragePrecision, JunkIsRemovedBeforeScoring) {
  const std::vector<std::string> clean{"p1", "n", "p2"};
  const std::vector<std::string> with_junk{"j1", "p1", "j2", "n", "p2", "j3"};
  const auto gt = truth({"p1", "p2"}, {"j1", "j2", "j3"});
  for (auto mode : {ApMode::Trapezoid, ApMode::Standard})
    EXPECT_DOUBLE_EQ(average_precision(with_junk, gt, mode), average_precision(clean, gt, mode));
}

TEST(AveragePrecision, StandardMatchesDefinitionOracle) {
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<int> label(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = testgen::between(rng, 1, 20);
    std::vector<std::string> ranking;
    std::set<std::string> pos, junk;
    for (std::size_t r = 0; r < n; ++r) {
      ranking.push_back("i" + std::to_string(r));
      const int l = label(rng);
      if (l == 0) pos.insert(ranking.back());
      if (l == 1) junk.insert(ranking.back());
    }
    if (pos.empty()) continue;
    std::shuffle(ranking.begin(), ranking.end(), rng);
    EXPECT_EQ(average_precision(ranking, truth(pos, junk), ApMode::Standard),
              oracle::ap_definition(ranking, pos, junk));
  }
}

TEST(AveragePrecision, EmptyPositivesRejected) {
  const std::vector<std::string> ranking{"a"};
  EXPECT_EQ(code_of([&] { average_precision(ranking, truth({})); }), ErrorCode::EmptyPositives);
}

TEST(ApModeNames, RoundTrip) {
  EXPECT_EQ(parse_ap_mode("trapezoid"), ApMode::Trapezoid);
  EXPECT_EQ(parse_ap_mode(to_string(ApMode::Standard)), ApMode::Standard);
  EXPECT_THROW(parse_ap_mode("area"), Error);
}

TEST(Evaluate, MeanOfPerQueryAps) {
  std::vector<GlobalDescriptor> db{unit({1, 0}, "a"), unit({0.8, 0.6}, "b"), unit({0, 1}, "c")};
  const auto idx = build_index(db);
  std::vector<QueryCase> queries;
  auto g1 = truth({"a"});
  g1.query_id = "q1";
  queries.push_back({unit({1, 0}, "q1"), g1});
  auto g2 = truth({"a"});
  g2.query_id = "q2";
  queries.push_back({unit({0, 1}, "q2"), g2});  // ranks c, b, a
  const auto rep = evaluate(idx, queries, ApMode::Standard);
  ASSERT_EQ(rep.per_query.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.per_query[0].ap, 1.0);
  EXPECT_DOUBLE_EQ(rep.per_query[1].ap, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(rep.map, (1.0 + 1.0 / 3.0) / 2.0);
  EXPECT_EQ(mean_average_precision(idx, queries, ApMode::Standard), rep.map);
  EXPECT_EQ(code_of([&] { evaluate(idx, std::span<const QueryCase>{}); }), ErrorCode::InvalidArgument);
}

TEST(PairQueries, ByIdThenImage) {
  std::vector<GlobalDescriptor> ds{unit({1, 0}, "all_souls_1"), unit({0, 1}, "img_7")};
  auto a = truth({"x"});
  a.query_id = "all_souls_1";
  a.query_image = "all_souls_000013";
  auto b = truth({"x"});
  b.query_id = "radcliffe_2";
  b.query_image = "img_7";
  std::vector<QueryGroundTruth> truths{a, b};
  const auto cases = pair_queries(ds, truths);
  ASSERT_EQ(cases.size(), 2u);
  EXPECT_EQ(cases[0].descriptor.image_id(), "all_souls_1");
  EXPECT_EQ(cases[1].descriptor.image_id(), "img_7");
  truths[1].query_image = "missing";
  EXPECT_EQ(code_of([&] { pair_queries(ds, truths); }), ErrorCode::MalformedGroundTruth);
}

TEST(OxfordGroundTruth, UnionOfGoodAndOk) {
  const auto dir = fresh_dir("deepagg_gt_basic");
  write_lines(dir / "tower_1_query.txt", {"oxc1_tower_000042 10.5 20 110 220.25"});
  write_lines(dir / "tower_1_good.txt", {"g1", "g2"});
  write_lines(dir / "tower_1_ok.txt", {"o1", "o2", "o3"});
  write_lines(dir / "tower_1_junk.txt", {"j1"});
  const auto gts = load_oxford_ground_truth(dir);
  ASSERT_EQ(gts.size(), 1u);
  EXPECT_EQ(gts[0].query_id, "tower_1");
  EXPECT_EQ(gts[0].query_image, "tower_000042");
  EXPECT_EQ(gts[0].positives.size(), 5u);
  EXPECT_EQ(gts[0].junk.size(), 1u);
  ASSERT_TRUE(gts[0].crop.has_value());
  EXPECT_DOUBLE_EQ(gts[0].crop->x1, 10.5);
  EXPECT_DOUBLE_EQ(gts[0].crop->y2, 220.25);
}

TEST(OxfordGroundTruth, MissingGoodFile) {
  const auto dir = fresh_dir("deepagg_gt_missing");
  write_lines(dir / "tower_1_query.txt", {"tower_000042 0 0 10 10"});
  write_lines(dir / "tower_1_ok.txt", {"o1"});
  write_lines(dir / "tower_1_junk.txt", {});
  EXPECT_EQ(code_of([&] { load_oxford_ground_truth(dir); }), ErrorCode::MalformedGroundTruth);
}

TEST(OxfordGroundTruth, FiftyFiveQueriesOverElevenLandmarks) {
  const auto dir = fresh_dir("deepagg_gt_55");
  std::vector<QueryGroundTruth> truths;
  for (int l = 0; l < 11; ++l) {
    for (int q = 1; q <= 5; ++q) {
      QueryGroundTruth gt;
      gt.query_id = "landmark" + std::to_string(l) + "_" + std::to_string(q);
      gt.query_image = "landmark" + std::to_string(l) + "_00000" + std::to_string(q);
      gt.crop = CropBox{1, 2, 30, 40};
      gt.positives = {"landmark" + std::to_string(l) + "_1000"};
      gt.junk = {gt.query_image};
      truths.push_back(gt);
    }
  }
  save_oxford_ground_truth(truths, dir);
  const auto back = load_oxford_ground_truth(dir);
  ASSERT_EQ(back.size(), 55u);
  EXPECT_TRUE(std::is_sorted(back.begin(), back.end(),
                             [](const auto& a, const auto& b) { return a.query_id < b.query_id; }));
  for (const auto& gt : back) EXPECT_EQ(gt.positives.size(), 1u);
}

TEST(ListGroundTruth, ParsesTabSeparatedRows) {
  const auto dir = fresh_dir("deepagg_gt_list");
  write_lines(dir / "gt.tsv", {"# holidays", "100000\t100001 100002\t", "100100\t100101\t100100"});
  const auto gts = load_list_ground_truth(dir / "gt.tsv");
  ASSERT_EQ(gts.size(), 2u);
  EXPECT_EQ(gts[0].positives, (std::set<std::string>{"100001", "100002"}));
  EXPECT_TRUE(gts[0].junk.empty());
  EXPECT_EQ(gts[1].junk, (std::set<std::string>{"100100"}));
}
