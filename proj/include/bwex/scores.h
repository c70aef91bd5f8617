// include/bwex/scores.h

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

// Trial scoring analytics: EER, minimum decision cost, per-condition
// breakdowns, score histograms, and exact t-SNE for embedding plots.

#ifndef BWEX_SCORES_H_
#define BWEX_SCORES_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bwex/array.h"

namespace bwex {

// One verification trial: does the test utterance match the enrolled speaker.
struct Trial {
  std::string enroll_id;
  std::string test_id;
  bool is_target = false;
  std::map<std::string, std::string> conditions;
};

// Trials with aligned scores. Higher score means more target-like; a trial
// is accepted at threshold t iff score >= t.
struct ScoreSet {
  std::vector<Trial> trials;
  std::vector<double> scores;
};

// Throws InvalidArgument unless trials/scores align and scores are finite.
void CheckScoreSet(const ScoreSet& s);

struct DcfParams {
  double p_tar = 0.05;
  double c_fa = 1.0;
  double c_fr = 1.0;
};

// Condition tag keys admitted in trial lists and reports.
extern const std::vector<std::string> kConditionKeys;

// Canonical order-insensitive pair tag, e.g. PairTag("CTS","AFV") ==
// PairTag("AFV","CTS").
std::string PairTag(const std::string& a, const std::string& b);

struct EerResult {
  double eer_percent = 0.0;
  double threshold = 0.0;
};

struct DcfResult {
  double min_dcf = 0.0;
  double threshold = 0.0;
};

// Equal error rate in percent, with linear interpolation on the ROC between
// the two adjacent operating points that bracket the P_FA = P_FR crossing.
EerResult Eer(const ScoreSet& s);

// Minimum of (1-p_tar) c_fa P_FA + p_tar c_fr P_FR over all thresholds.
// Operating points are taken at every midpoint of adjacent distinct scores
// plus one threshold below and one above all scores.
DcfResult MinDcf(const ScoreSet& s, const DcfParams& p = DcfParams());

struct ConditionRow {
  std::string condition;  // "key=value" or "Overall"
  int64_t num_target = 0;
  int64_t num_nontarget = 0;
  double eer_percent = 0.0;  // NaN when a class is absent
  double min_dcf = 0.0;      // NaN when a class is absent
  bool low_confidence = false;
};

// One row per observed value of each requested condition key, plus Overall.
// Rows with fewer than 10 targets or 10 non-targets are flagged.
std::vector<ConditionRow> PerConditionReport(
    const ScoreSet& s, const std::vector<std::string>& keys,
    const DcfParams& p = DcfParams());

// Tab-separated table with a header row.
std::string FormatConditionReport(const std::vector<ConditionRow>& rows);

struct ClassStats {
  double mean = 0.0;
  double variance = 0.0;  // population variance
  int64_t count = 0;
};

// Score distributions of two systems over their shared trials, binned on
// common edges, with per-class moments and mean gaps across source pairs.
struct HistogramReport {
  std::vector<double> bin_edges;  // num_bins + 1, last bin right-inclusive
  std::vector<int64_t> target_before;
  std::vector<int64_t> nontarget_before;
  std::vector<int64_t> target_after;
  std::vector<int64_t> nontarget_after;
  ClassStats stats_target_before, stats_nontarget_before;
  ClassStats stats_target_after, stats_nontarget_after;
  double variance_ratio_target = 0.0;  // after over before
  double variance_ratio_nontarget = 0.0;
  // Per-source-pair mean scores and the max minus min gap between them.
  std::map<std::string, double> group_means_target_before;
  std::map<std::string, double> group_means_target_after;
  std::map<std::string, double> group_means_nontarget_before;
  std::map<std::string, double> group_means_nontarget_after;
  double mean_gap_target_before = 0.0, mean_gap_target_after = 0.0;
  double mean_gap_nontarget_before = 0.0, mean_gap_nontarget_after = 0.0;
  int64_t num_common_trials = 0;
};

// Trials are matched across systems by (enroll_id, test_id). An optional
// condition filter keeps only trials whose tag `filter_key` equals
// `filter_value`. Throws InvalidArgument when no trials are shared.
HistogramReport ScoreHistograms(const ScoreSet& before, const ScoreSet& after,
                                int64_t num_bins = 30,
                                const std::string& filter_key = "",
                                const std::string& filter_value = "");

// Plot-ready tab-separated dump of the binned counts.
std::string FormatHistogramReport(const HistogramReport& r);

// Trial list file: one trial per line, "enroll test tgt|non tag=k:v,...".
std::vector<Trial> ReadTrialList(const std::string& path);
void WriteTrialList(const std::string& path, const std::vector<Trial>& trials);

// Score file aligned with a trial list, one score per line.
std::vector<double> ReadScoreFile(const std::string& path);
void WriteScoreFile(const std::string& path, const std::vector<double>& scores);

ScoreSet ReadScoreSet(const std::string& trials_path,
                      const std::string& scores_path);

struct TsneConfig {
  double perplexity = 30.0;
  int64_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int64_t exaggeration_iters = 250;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int64_t momentum_switch_iter = 250;
  uint64_t seed = 0;
};

struct TsneResult {
  Array coords;  // (n, 2)
  // KL divergence against the unexaggerated affinities, every 50 iterations.
  std::vector<std::pair<int64_t, double>> kl_history;
  std::vector<std::string> warnings;
};

// Exact quadratic t-SNE of row vectors x (n, d). Requires 10 <= n <= 10000
// and perplexity < n/3. An all-duplicate input is jittered with a warning.
TsneResult Tsne(const Array& x, const TsneConfig& cfg = TsneConfig());

// Mean silhouette value of 2-D points under the given cluster labels.
double Silhouette(const Array& coords, const std::vector<int64_t>& labels);

}  // namespace bwex

#endif  // BWEX_SCORES_H_
