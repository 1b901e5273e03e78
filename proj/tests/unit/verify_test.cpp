#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rlab/cli/emit.hpp"
#include "rlab/verify/experiments.hpp"
#include "rlab/verify/report.hpp"

using namespace rlab;

namespace {

// Brute-force oracle: distribution of S over all permutations of 0..n-1.
std::pair<double, double> brute_kendall(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  auto score = [n](const std::vector<double>& v) {
    long s = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += (v[j] > v[i]) - (v[j] < v[i]);
    return s;
  };
  const long s0 = score(x);
  std::vector<double> p(n);
  std::iota(p.begin(), p.end(), 0.0);
  double up = 0, down = 0, total = 0;
  do {
    const long s = score(p);
    up += s >= s0, down += s <= s0, ++total;
  } while (std::next_permutation(p.begin(), p.end()));
  return {up / total, down / total};
}

ExperimentConfig small_srt(const std::string& mode) {
  ExperimentConfig c;
  c.mode = mode;
  c.N = 3000;
  c.t_start = 50;
  c.t_end = 400;
  c.output_dir = "unused";
  return c;
}

nlohmann::ordered_json without_timings(const ExperimentReport& r) {
  auto j = report_to_json(r);
  j.erase("timings");
  return j;
}

}  // namespace

TEST(Kendall, MahonianNumbersSumToOne) {
  for (int n : {1, 2, 5, 9}) {
    const auto d = inversion_distribution(n);
    EXPECT_EQ(d.size(), static_cast<std::size_t>(n * (n - 1) / 2 + 1));
    EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-14);
  }
  // n = 4: 1 3 5 6 5 3 1 over 24
  const auto d4 = inversion_distribution(4);
  const double m4[] = {1, 3, 5, 6, 5, 3, 1};
  for (int k = 0; k < 7; ++k) EXPECT_NEAR(d4[k] * 24, m4[k], 1e-12);
}

TEST(Kendall, ExactPValuesMatchEnumeration) {
  const std::vector<std::vector<double>> cases{
      {1, 2, 3, 4}, {4, 3, 2, 1}, {2, 1, 4, 3, 5}, {0.3, 0.1, 0.7, 0.2, 0.5, 0.9, 0.4}, {5, 1, 4, 2, 3, 0}};
  for (const auto& x : cases) {
    const auto k = kendall_trend(x);
    const auto [up, down] = brute_kendall(x);
    EXPECT_TRUE(k.exact);
    EXPECT_NEAR(k.p_up, up, 1e-12);
    EXPECT_NEAR(k.p_down, down, 1e-12);
  }
}

TEST(Kendall, TrendRule) {
  EXPECT_EQ(trend_check("t", {1, 2, 3, 4, 5}).verdict, Verdict::fail);  // p_up = 1/120
  EXPECT_EQ(trend_check("t", {5, 4, 3, 2, 1}).verdict, Verdict::pass);
  EXPECT_EQ(trend_check("t", {1, 2}).verdict, Verdict::inconclusive);
  const auto tied = kendall_trend({1, 1, 1, 1});
  EXPECT_FALSE(tied.exact);
  EXPECT_EQ(trend_check("t", {1, 1, 1, 1}).verdict, Verdict::pass);
}

TEST(Report, VerdictAggregation) {
  ExperimentReport r;
  r.checks.push_back(band_check("a", 0.5, 0, 1));
  EXPECT_EQ(r.verdict(), Verdict::pass);
  r.checks.push_back(verify_detail::inconclusive("b", "x"));
  EXPECT_EQ(r.verdict(), Verdict::inconclusive);
  r.checks.push_back(band_check("c", 2, 0, 1));
  EXPECT_EQ(r.verdict(), Verdict::fail);
  EXPECT_EQ(r.find("c")->verdict, Verdict::fail);
  EXPECT_EQ(r.find("zz"), nullptr);
}

TEST(Report, TableReferencesSurviveGrowth) {
  ExperimentReport r;
  auto& first = r.table("first", {"x"});
  for (int i = 0; i < 50; ++i) r.table("t" + std::to_string(i), {"y"});
  first.rows.push_back({1.0});
  EXPECT_EQ(r.tables.front().rows.size(), 1u);
}

TEST(Ladder, GeometricFromTheTop) {
  const auto l = verify_detail::geometric_ladder(100, 1e4, 2);
  EXPECT_DOUBLE_EQ(l.back(), 1e4);
  EXPECT_GE(l.front(), 100);
  EXPECT_LT(l.front() / 2, 100);
  EXPECT_TRUE(std::is_sorted(l.begin(), l.end()));
}

TEST(Experiments, SrtRefusesBetaBelowHalf) {
  ExperimentConfig c;
  c.gamma1 = 2.5;
  EXPECT_NEAR(c.derived_beta(), 0.4, 1e-15);
  EXPECT_THROW(run_srt(c), domain_error);
  c = {};
  c.mode = "iid";
  c.iid_beta = 0.5;
  EXPECT_THROW(run_srt(c), domain_error);
}

TEST(Experiments, SpectralRefusesIid) {
  ExperimentConfig c;
  c.mode = "iid";
  EXPECT_THROW(run_spectral(c), domain_error);
}

TEST(Experiments, ShardCountDoesNotChangeResults) {
  for (const char* mode : {"iid", "deterministic"}) {
    auto c = small_srt(mode);
    const auto one = run_srt(c);
    c.shards = 8;
    c.threads = 2;
    const auto eight = run_srt(c);
    auto a = without_timings(one), b = without_timings(eight);
    a.erase("config"), b.erase("config");
    EXPECT_EQ(a.dump(), b.dump()) << mode;
  }
}

TEST(Experiments, RepeatRunsAreIdentical) {
  const auto c = small_srt("deterministic");
  EXPECT_EQ(without_timings(run_srt(c)).dump(), without_timings(run_srt(c)).dump());
  auto d = c;
  d.seed = 7;
  EXPECT_NE(without_timings(run_srt(c))["tables"].dump(), without_timings(run_srt(d))["tables"].dump());
}

TEST(Experiments, SrtReportShape) {
  const auto r = run_srt(small_srt("iid"));
  for (const char* name : {"srt.final_ratio", "srt.trend", "srt.discards"}) EXPECT_NE(r.find(name), nullptr) << name;
  ASSERT_FALSE(r.tables.empty());
  const auto& t = r.tables.front();
  EXPECT_EQ(t.columns.front(), "t");
  EXPECT_EQ(t.rows.size(), verify_detail::geometric_ladder(50, 400, 2).size());
}
