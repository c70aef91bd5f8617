// tests/test_scores.cc

// Copyright 2026  bwex authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "bwex/common.h"
#include "bwex/rng.h"
#include "bwex/scores.h"

namespace bwex {
namespace {

namespace fs = std::filesystem;

ScoreSet MakeSet(const std::vector<double>& target_scores,
                 const std::vector<double>& nontarget_scores) {
  ScoreSet s;
  int64_t id = 0;
  for (double v : target_scores) {
    Trial t;
    t.enroll_id = "e" + std::to_string(id);
    t.test_id = "t" + std::to_string(id++);
    t.is_target = true;
    s.trials.push_back(t);
    s.scores.push_back(v);
  }
  for (double v : nontarget_scores) {
    Trial t;
    t.enroll_id = "e" + std::to_string(id);
    t.test_id = "t" + std::to_string(id++);
    t.is_target = false;
    s.trials.push_back(t);
    s.scores.push_back(v);
  }
  return s;
}

// Independent oracle: enumerate every achievable threshold by direct
// counting, then apply the declared linear interpolation at the crossing.
struct NaivePoint {
  double fa, fr, theta;
};

std::vector<NaivePoint> NaiveSweep(const ScoreSet& s) {
  std::vector<double> distinct = s.scores;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  std::vector<double> thetas;
  thetas.push_back(distinct.front() - 1.0);
  for (size_t i = 0; i + 1 < distinct.size(); ++i)
    thetas.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  thetas.push_back(distinct.back() + 1.0);

  int64_t n_tgt = 0, n_non = 0;
  for (const Trial& t : s.trials) (t.is_target ? n_tgt : n_non) += 1;
  std::vector<NaivePoint> points;
  for (double theta : thetas) {
    int64_t fa = 0, fr = 0;
    for (size_t i = 0; i < s.scores.size(); ++i) {
      if (s.trials[i].is_target && s.scores[i] < theta) ++fr;
      if (!s.trials[i].is_target && s.scores[i] >= theta) ++fa;
    }
    points.push_back({static_cast<double>(fa) / static_cast<double>(n_non),
                      static_cast<double>(fr) / static_cast<double>(n_tgt),
                      theta});
  }
  return points;
}

EerResult NaiveEer(const ScoreSet& s) {
  const std::vector<NaivePoint> points = NaiveSweep(s);
  for (size_t k = 1; k < points.size(); ++k) {
    if (points[k].fr < points[k].fa) continue;
    const NaivePoint& a = points[k - 1];
    const NaivePoint& b = points[k];
    const double open = a.fa - a.fr;
    const double close = b.fr - b.fa;
    const double t = open / (open + close);
    return {100.0 * (a.fa + t * (b.fa - a.fa)),
            a.theta + t * (b.theta - a.theta)};
  }
  return {100.0, points.back().theta};
}

DcfResult NaiveMinDcf(const ScoreSet& s, const DcfParams& p) {
  DcfResult best;
  best.min_dcf = HUGE_VAL;
  for (const NaivePoint& pt : NaiveSweep(s)) {
    const double c = (1.0 - p.p_tar) * p.c_fa * pt.fa + p.p_tar * p.c_fr * pt.fr;
    if (c < best.min_dcf) {
      best.min_dcf = c;
      best.threshold = pt.theta;
    }
  }
  return best;
}

ScoreSet RandomSet(uint64_t seed) {
  Rng rng(seed);
  const int64_t n_tgt = 1 + rng.UniformInt(100);
  const int64_t n_non = 1 + rng.UniformInt(100);
  std::vector<double> tgt, non;
  const double sep = rng.Uniform(0.0, 3.0);
  for (int64_t i = 0; i < n_tgt; ++i) tgt.push_back(sep + rng.Normal());
  for (int64_t i = 0; i < n_non; ++i) non.push_back(rng.Normal());
  // Force some exact ties across and within classes.
  if (n_tgt > 2 && n_non > 2) {
    tgt[1] = non[0];
    non[1] = non[2];
  }
  return MakeSet(tgt, non);
}

TEST_CASE("eer on pinned examples") {
  CHECK(Eer(MakeSet({2, 3}, {0, 1})).eer_percent == 0.0);
  CHECK(Eer(MakeSet({0, 1}, {2, 3})).eer_percent == 100.0);
  CHECK(Eer(MakeSet({1, 3}, {0, 2})).eer_percent == 50.0);
  CHECK(Eer(MakeSet({1, 1, 1}, {1, 1})).eer_percent == 50.0);

  // Perfect separation: the crossing threshold separates the classes.
  const EerResult r = Eer(MakeSet({2, 3}, {0, 1}));
  CHECK(r.threshold > 1.0);
  CHECK(r.threshold <= 2.0);

  CHECK_THROWS_AS(Eer(MakeSet({1, 2}, {})), InvalidArgument);
  CHECK_THROWS_AS(Eer(MakeSet({}, {1, 2})), InvalidArgument);
  ScoreSet bad = MakeSet({1}, {0});
  bad.scores[0] = HUGE_VAL;
  CHECK_THROWS_AS(Eer(bad), InvalidArgument);
  bad.scores.pop_back();
  CHECK_THROWS_AS(Eer(bad), InvalidArgument);
}

TEST_CASE("min dcf on pinned examples") {
  DcfParams p;
  p.p_tar = 0.05;
  CHECK(MinDcf(MakeSet({2, 3}, {0, 1}), p).min_dcf == 0.0);

  // All scores equal: accept-all or reject-all, whichever is cheaper.
  CHECK(MinDcf(MakeSet({1, 1}, {1, 1, 1}), p).min_dcf == 0.05);
  p.p_tar = 0.9;
  CHECK(MinDcf(MakeSet({1, 1}, {1, 1, 1}), p).min_dcf ==
        doctest::Approx(0.1).epsilon(1e-15));

  p.p_tar = 1.5;
  CHECK_THROWS_AS(MinDcf(MakeSet({1}, {0}), p), InvalidArgument);
  p.p_tar = 0.5;
  p.c_fa = 0.0;
  CHECK_THROWS_AS(MinDcf(MakeSet({1}, {0}), p), InvalidArgument);
}

TEST_CASE("eer and min dcf match exhaustive enumeration") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    const ScoreSet s = RandomSet(seed);
    DcfParams p;
    p.p_tar = seed % 3 == 0 ? 0.5 : 0.05;

    const EerResult got = Eer(s);
    const EerResult want = NaiveEer(s);
    CHECK(got.eer_percent == want.eer_percent);
    CHECK(got.threshold == want.threshold);

    const DcfResult gd = MinDcf(s, p);
    const DcfResult wd = NaiveMinDcf(s, p);
    CHECK(gd.min_dcf == wd.min_dcf);
    CHECK(gd.threshold == wd.threshold);

    // The minimum is no worse than operating at the EER threshold.
    int64_t fa = 0, fr = 0, n_tgt = 0, n_non = 0;
    for (size_t i = 0; i < s.scores.size(); ++i) {
      if (s.trials[i].is_target) {
        ++n_tgt;
        if (s.scores[i] < got.threshold) ++fr;
      } else {
        ++n_non;
        if (s.scores[i] >= got.threshold) ++fa;
      }
    }
    const double dcf_at_eer =
        (1.0 - p.p_tar) * p.c_fa * static_cast<double>(fa) /
            static_cast<double>(n_non) +
        p.p_tar * p.c_fr * static_cast<double>(fr) / static_cast<double>(n_tgt);
    CHECK(gd.min_dcf <= dcf_at_eer);
  }
}

TEST_CASE("eer and min dcf are monotone-transform invariant") {
  for (uint64_t seed = 30; seed < 36; ++seed) {
    const ScoreSet s = RandomSet(seed);
    const DcfParams p;
    const double eer = Eer(s).eer_percent;
    const double dcf = MinDcf(s, p).min_dcf;

    ScoreSet affine = s;
    for (double& v : affine.scores) v = 2.0 * v + 3.0;
    CHECK(Eer(affine).eer_percent == eer);
    CHECK(MinDcf(affine, p).min_dcf == dcf);

    ScoreSet squashed = s;
    for (double& v : squashed.scores) v = v / (1.0 + std::fabs(v));
    CHECK(Eer(squashed).eer_percent == eer);
    CHECK(MinDcf(squashed, p).min_dcf == dcf);
  }
}

TEST_CASE("per-condition report recomputes each slice") {
  ScoreSet s;
  Rng rng(41);
  int64_t id = 0;
  const auto add = [&](const std::string& src, bool tgt, double score) {
    Trial t;
    t.enroll_id = "e" + std::to_string(id);
    t.test_id = "t" + std::to_string(id++);
    t.is_target = tgt;
    t.conditions["source"] = src;
    s.trials.push_back(t);
    s.scores.push_back(score);
  };
  // Clean condition: separable. Hard condition: heavy overlap, 12 each.
  for (int i = 0; i < 12; ++i) add("AFV-AFV", true, 5.0 + rng.Normal());
  for (int i = 0; i < 12; ++i) add("AFV-AFV", false, -5.0 + rng.Normal());
  for (int i = 0; i < 12; ++i) add("AFV-CTS", true, 0.3 + rng.Normal());
  for (int i = 0; i < 12; ++i) add("AFV-CTS", false, rng.Normal());

  const std::vector<ConditionRow> rows = PerConditionReport(s, {"source"});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].condition == "source=AFV-AFV");
  CHECK(rows[1].condition == "source=AFV-CTS");
  CHECK(rows[2].condition == "Overall");
  CHECK(rows[0].num_target + rows[1].num_target == rows[2].num_target);
  CHECK(rows[0].num_nontarget + rows[1].num_nontarget ==
        rows[2].num_nontarget);
  CHECK_FALSE(rows[0].low_confidence);

  // Row metrics equal a direct computation on the slice.
  for (int64_t r = 0; r < 2; ++r) {
    ScoreSet slice;
    for (size_t i = 0; i < s.trials.size(); ++i)
      if (StrCat("source=", s.trials[i].conditions.at("source")) ==
          rows[static_cast<size_t>(r)].condition) {
        slice.trials.push_back(s.trials[i]);
        slice.scores.push_back(s.scores[i]);
      }
    CHECK(rows[static_cast<size_t>(r)].eer_percent ==
          Eer(slice).eer_percent);
    CHECK(rows[static_cast<size_t>(r)].min_dcf == MinDcf(slice).min_dcf);
  }
  CHECK(rows[2].eer_percent == Eer(s).eer_percent);

  // Single condition value: its row equals Overall.
  ScoreSet uni;
  std::swap(uni, s);
  id = 0;
  s = ScoreSet();
  for (int i = 0; i < 15; ++i) add("CTS-CTS", true, 1.0 + rng.Normal());
  for (int i = 0; i < 15; ++i) add("CTS-CTS", false, rng.Normal());
  const std::vector<ConditionRow> one = PerConditionReport(s, {"source"});
  REQUIRE(one.size() == 2);
  CHECK(one[0].eer_percent == one[1].eer_percent);
  CHECK(one[0].min_dcf == one[1].min_dcf);

  // Sparse slices are flagged; one-class slices get no metric.
  add("CTS-AFV", true, 2.0);
  const std::vector<ConditionRow> sparse = PerConditionReport(s, {"source"});
  REQUIRE(sparse.size() == 3);
  CHECK(sparse[1].condition == "source=CTS-AFV");
  CHECK(sparse[1].low_confidence);
  CHECK(std::isnan(sparse[1].eer_percent));
  CHECK(std::isnan(sparse[1].min_dcf));

  CHECK_THROWS_AS(PerConditionReport(s, {"band"}), InvalidArgument);
  CHECK_THROWS_AS(PerConditionReport(s, {"language"}), InvalidArgument);

  const std::string table = FormatConditionReport(sparse);
  CHECK(table.find("condition\ttargets") == 0);
  CHECK(table.find("source=CTS-AFV\t1\t0\t-\t-\tlow_confidence") !=
        std::string::npos);
}

TEST_CASE("pair tags are order-insensitive") {
  CHECK(PairTag("CTS", "AFV") == PairTag("AFV", "CTS"));
  CHECK(PairTag("CTS", "CTS") == "CTS-CTS");
}

TEST_CASE("score histograms and distribution statistics") {
  ScoreSet before;
  Rng rng(55);
  int64_t id = 0;
  const auto add = [&](const std::string& src, bool tgt, double score) {
    Trial t;
    t.enroll_id = "e" + std::to_string(id);
    t.test_id = "t" + std::to_string(id++);
    t.is_target = tgt;
    t.conditions["source"] = src;
    before.trials.push_back(t);
    before.scores.push_back(score);
  };
  const std::vector<std::string> srcs = {"CTS-CTS", "AFV-CTS", "AFV-AFV"};
  const std::vector<double> offsets = {4.0, 1.0, -2.0};
  for (size_t g = 0; g < srcs.size(); ++g)
    for (int i = 0; i < 20; ++i) {
      add(srcs[g], true, offsets[g] + rng.Normal());
      add(srcs[g], false, offsets[g] - 6.0 + rng.Normal());
    }

  SUBCASE("identical systems give identical histograms") {
    const HistogramReport r = ScoreHistograms(before, before, 20);
    CHECK(r.target_before == r.target_after);
    CHECK(r.nontarget_before == r.nontarget_after);
    CHECK(r.variance_ratio_target == 1.0);
    int64_t tgt_total = 0, non_total = 0;
    for (int64_t c : r.target_before) tgt_total += c;
    for (int64_t c : r.nontarget_before) non_total += c;
    CHECK(tgt_total == 60);
    CHECK(non_total == 60);
    CHECK(r.num_common_trials == 120);
    CHECK(r.mean_gap_target_before == r.mean_gap_target_after);
  }

  SUBCASE("mean-preserving shrink reports variance ratio one quarter") {
    // Shrink each class around its own mean by half.
    double mean_t = 0.0, mean_n = 0.0;
    int64_t n_t = 0, n_n = 0;
    for (size_t i = 0; i < before.scores.size(); ++i) {
      if (before.trials[i].is_target) {
        mean_t += before.scores[i];
        ++n_t;
      } else {
        mean_n += before.scores[i];
        ++n_n;
      }
    }
    mean_t /= static_cast<double>(n_t);
    mean_n /= static_cast<double>(n_n);
    ScoreSet after = before;
    for (size_t i = 0; i < after.scores.size(); ++i) {
      const double m = after.trials[i].is_target ? mean_t : mean_n;
      after.scores[i] = 0.5 * (after.scores[i] - m) + m;
    }
    const HistogramReport r = ScoreHistograms(before, after, 20);
    CHECK(r.variance_ratio_target == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.variance_ratio_nontarget == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.stats_target_after.mean ==
          doctest::Approx(r.stats_target_before.mean).epsilon(1e-12));
    // Shrinking around per-class global means also narrows the per-source
    // mean gap by exactly one half.
    CHECK(r.mean_gap_target_after ==
          doctest::Approx(0.5 * r.mean_gap_target_before).epsilon(1e-9));
    CHECK(r.group_means_target_before.size() == 3);
  }

  SUBCASE("group means match hand computation") {
    const HistogramReport r = ScoreHistograms(before, before, 8);
    for (size_t g = 0; g < srcs.size(); ++g) {
      double acc = 0.0;
      int64_t n = 0;
      for (size_t i = 0; i < before.scores.size(); ++i)
        if (before.trials[i].is_target &&
            before.trials[i].conditions.at("source") == srcs[g]) {
          acc += before.scores[i];
          ++n;
        }
      CHECK(r.group_means_target_before.at(srcs[g]) ==
            doctest::Approx(acc / static_cast<double>(n)).epsilon(1e-12));
    }
  }

  SUBCASE("condition filter restricts the counts") {
    const HistogramReport r =
        ScoreHistograms(before, before, 10, "source", "CTS-CTS");
    int64_t tgt_total = 0;
    for (int64_t c : r.target_before) tgt_total += c;
    CHECK(tgt_total == 20);
  }

  SUBCASE("disjoint trial keys are rejected") {
    ScoreSet other = before;
    for (Trial& t : other.trials) t.enroll_id += "_x";
    CHECK_THROWS_AS(ScoreHistograms(before, other, 10), InvalidArgument);
  }

  SUBCASE("formatted dump has one line per bin") {
    const HistogramReport r = ScoreHistograms(before, before, 12);
    const std::string dump = FormatHistogramReport(r);
    CHECK(dump.find("bin_lo\tbin_hi") == 0);
    int64_t lines = std::count(dump.begin(), dump.end(), '\n');
    CHECK(lines == 13);
  }
}

TEST_CASE("trial list and score file round trip") {
  const std::string tdir = fs::temp_directory_path().string();
  const std::string tpath = tdir + "/bwex_trials.txt";
  const std::string spath = tdir + "/bwex_scores.txt";

  std::vector<Trial> trials(3);
  trials[0] = {"spk1", "utt9", true, {{"source", "CTS-CTS"}, {"gender", "f"}}};
  trials[1] = {"spk2", "utt3", false, {}};
  trials[2] = {"spk1", "utt3", false, {{"language", "eng-yue"}}};
  WriteTrialList(tpath, trials);
  const std::vector<Trial> back = ReadTrialList(tpath);
  REQUIRE(back.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(back[i].enroll_id == trials[i].enroll_id);
    CHECK(back[i].test_id == trials[i].test_id);
    CHECK(back[i].is_target == trials[i].is_target);
    CHECK(back[i].conditions == trials[i].conditions);
  }

  const std::vector<double> scores = {1.5, -0.25, 3.0e-7};
  WriteScoreFile(spath, scores);
  CHECK(ReadScoreFile(spath) == scores);

  const ScoreSet s = ReadScoreSet(tpath, spath);
  CHECK(s.trials.size() == 3);
  CHECK(s.scores == scores);

  {
    std::ofstream out(spath);
    out << "1.0\n2.0\n";
  }
  CHECK_THROWS_AS(ReadScoreSet(tpath, spath), InvalidArgument);

  const auto expect_bad_line = [&](const std::string& line) {
    std::ofstream out(tpath);
    out << line << "\n";
    out.close();
    CHECK_THROWS_AS(ReadTrialList(tpath), InvalidArgument);
  };
  expect_bad_line("a b maybe");
  expect_bad_line("a b");
  expect_bad_line("a b tgt source:CTS");
  expect_bad_line("a b tgt tag=source");
  {
    std::ofstream out(spath);
    out << "abc\n";
  }
  CHECK_THROWS_AS(ReadScoreFile(spath), InvalidArgument);
  fs::remove(tpath);
  fs::remove(spath);
}

Array ThreeClusters(int64_t per_cluster, int64_t d, uint64_t seed,
                    std::vector<int64_t>* labels) {
  Rng rng(seed);
  Array x({3 * per_cluster, d});
  labels->clear();
  for (int64_t c = 0; c < 3; ++c)
    for (int64_t i = 0; i < per_cluster; ++i) {
      labels->push_back(c);
      for (int64_t k = 0; k < d; ++k) {
        const double center =
            8.0 * std::cos(2.0 * M_PI * static_cast<double>(c) / 3.0 +
                           1.1 * static_cast<double>(k));
        x.v[static_cast<size_t>(((c * per_cluster) + i) * d + k)] =
            center + rng.Normal();
      }
    }
  return x;
}

TEST_CASE("tsne separates well-spaced clusters") {
  std::vector<int64_t> labels;
  const Array x = ThreeClusters(50, 5, 71, &labels);
  TsneConfig cfg;
  cfg.perplexity = 20.0;
  cfg.iterations = 600;
  cfg.seed = 7;
  const TsneResult r = Tsne(x, cfg);
  REQUIRE(r.coords.dims == std::vector<int64_t>{150, 2});
  CHECK(r.coords.AllFinite());
  CHECK(r.warnings.empty());
  CHECK(Silhouette(r.coords, labels) > 0.5);

  // Objective is reported every 50 iterations and keeps falling once the
  // exaggeration phase is over.
  REQUIRE(r.kl_history.size() == 12);
  CHECK(r.kl_history.front().first == 50);
  CHECK(r.kl_history.back().first == 600);
  for (size_t k = 1; k < r.kl_history.size(); ++k) {
    if (r.kl_history[k - 1].first <= cfg.exaggeration_iters) continue;
    CHECK(r.kl_history[k].second <= r.kl_history[k - 1].second + 1e-3);
  }

  // Same seed, same coordinates; different seed, different coordinates.
  const TsneResult r2 = Tsne(x, cfg);
  CHECK(r2.coords.v == r.coords.v);
  TsneConfig other = cfg;
  other.seed = 8;
  CHECK(Tsne(x, other).coords.v != r.coords.v);
}

TEST_CASE("tsne input validation and degenerate input") {
  std::vector<int64_t> labels;
  const Array x = ThreeClusters(5, 3, 72, &labels);  // n = 15
  TsneConfig cfg;
  cfg.perplexity = 30.0;  // 3 * 30 >= 15
  CHECK_THROWS_AS(Tsne(x, cfg), InvalidArgument);

  Array tiny({9, 2});
  CHECK_THROWS_AS(Tsne(tiny, TsneConfig()), InvalidArgument);

  // All points identical: jitter with a warning, still finite output.
  Array dup({12, 3});
  for (double& v : dup.v) v = 1.0;
  TsneConfig dcfg;
  dcfg.perplexity = 3.0;
  dcfg.iterations = 120;
  const TsneResult r = Tsne(dup, dcfg);
  REQUIRE(!r.warnings.empty());
  CHECK(r.warnings[0].find("jitter") != std::string::npos);
  CHECK(r.coords.AllFinite());
}

TEST_CASE("silhouette matches a hand-computed configuration") {
  Array coords({4, 2});
  coords.v = {0.0, 0.0, 0.0, 1.0, 10.0, 0.0, 10.0, 1.0};
  const std::vector<int64_t> labels = {0, 0, 1, 1};
  const double b = 0.5 * (10.0 + std::sqrt(101.0));
  CHECK(Silhouette(coords, labels) ==
        doctest::Approx((b - 1.0) / b).epsilon(1e-12));

  CHECK(Silhouette(coords, {0, 0, 0, 1}) < Silhouette(coords, labels));
  CHECK_THROWS_AS(Silhouette(coords, {0, 0, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(Silhouette(coords, {0, 1}), InvalidArgument);
}

}  // namespace
}  // namespace bwex
