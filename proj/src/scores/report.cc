// src/scores/report.cc

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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "bwex/common.h"
#include "bwex/scores.h"

namespace bwex {
namespace {

constexpr int64_t kLowConfidenceCount = 10;

ScoreSet Subset(const ScoreSet& s, const std::vector<size_t>& idx) {
  ScoreSet out;
  for (size_t i : idx) {
    out.trials.push_back(s.trials[i]);
    out.scores.push_back(s.scores[i]);
  }
  return out;
}

ConditionRow MakeRow(const std::string& name, const ScoreSet& subset,
                     const DcfParams& p) {
  ConditionRow row;
  row.condition = name;
  for (const Trial& t : subset.trials) (t.is_target ? row.num_target
                                                    : row.num_nontarget) += 1;
  if (row.num_target > 0 && row.num_nontarget > 0) {
    row.eer_percent = Eer(subset).eer_percent;
    row.min_dcf = MinDcf(subset, p).min_dcf;
  } else {
    // A one-class slice has no operating characteristic to report.
    row.eer_percent = std::numeric_limits<double>::quiet_NaN();
    row.min_dcf = std::numeric_limits<double>::quiet_NaN();
  }
  row.low_confidence = row.num_target < kLowConfidenceCount ||
                       row.num_nontarget < kLowConfidenceCount;
  return row;
}

std::string FormatMetric(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double Mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

ClassStats MakeStats(const std::vector<double>& v) {
  ClassStats s;
  s.count = static_cast<int64_t>(v.size());
  if (v.empty()) return s;
  s.mean = Mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - s.mean) * (x - s.mean);
  s.variance = acc / static_cast<double>(v.size());
  return s;
}

double MeanGap(const std::map<std::string, double>& group_means) {
  if (group_means.size() < 2) return 0.0;
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const auto& kv : group_means) {
    lo = std::min(lo, kv.second);
    hi = std::max(hi, kv.second);
  }
  return hi - lo;
}

std::map<std::string, double> GroupMeans(
    const std::vector<std::string>& groups, const std::vector<double>& scores) {
  std::map<std::string, std::vector<double>> buckets;
  for (size_t i = 0; i < groups.size(); ++i)
    if (!groups[i].empty()) buckets[groups[i]].push_back(scores[i]);
  std::map<std::string, double> means;
  for (const auto& kv : buckets) means[kv.first] = Mean(kv.second);
  return means;
}

}  // namespace

std::vector<ConditionRow> PerConditionReport(const ScoreSet& s,
                                             const std::vector<std::string>& keys,
                                             const DcfParams& p) {
  CheckScoreSet(s);
  for (const std::string& key : keys) {
    if (std::find(kConditionKeys.begin(), kConditionKeys.end(), key) ==
        kConditionKeys.end())
      throw InvalidArgument(StrCat("unknown condition key: ", key));
    for (const Trial& t : s.trials)
      if (t.conditions.find(key) == t.conditions.end())
        throw InvalidArgument(
            StrCat("trial ", t.enroll_id, " ", t.test_id, " lacks tag ", key));
  }

  // Collect per-value slices for each key, preserving key order.
  std::vector<std::pair<std::string, std::vector<size_t>>> slices;
  for (const std::string& key : keys) {
    std::map<std::string, std::vector<size_t>> by_value;
    for (size_t i = 0; i < s.trials.size(); ++i)
      by_value[s.trials[i].conditions.at(key)].push_back(i);
    for (auto& kv : by_value)
      slices.emplace_back(StrCat(key, "=", kv.first), std::move(kv.second));
  }

  std::vector<ConditionRow> rows(slices.size() + 1);
#pragma omp parallel for schedule(dynamic)
  for (int64_t r = 0; r < static_cast<int64_t>(slices.size()); ++r)
    rows[static_cast<size_t>(r)] =
        MakeRow(slices[static_cast<size_t>(r)].first,
                Subset(s, slices[static_cast<size_t>(r)].second), p);
  rows.back() = MakeRow("Overall", s, p);
  return rows;
}

std::string FormatConditionReport(const std::vector<ConditionRow>& rows) {
  std::ostringstream out;
  out << "condition\ttargets\tnontargets\teer_percent\tmin_dcf\tnote\n";
  for (const ConditionRow& r : rows) {
    out << r.condition << '\t' << r.num_target << '\t' << r.num_nontarget
        << '\t' << FormatMetric(r.eer_percent) << '\t'
        << FormatMetric(r.min_dcf) << '\t'
        << (r.low_confidence ? "low_confidence" : "-") << '\n';
  }
  return out.str();
}

HistogramReport ScoreHistograms(const ScoreSet& before, const ScoreSet& after,
                                int64_t num_bins,
                                const std::string& filter_key,
                                const std::string& filter_value) {
  CheckScoreSet(before);
  CheckScoreSet(after);
  if (num_bins < 1) throw InvalidArgument("need at least one bin");

  std::map<std::pair<std::string, std::string>, size_t> after_index;
  for (size_t i = 0; i < after.trials.size(); ++i)
    after_index[{after.trials[i].enroll_id, after.trials[i].test_id}] = i;

  // Shared trials in before-set order, with before-set condition tags.
  std::vector<double> tgt_b, non_b, tgt_a, non_a;
  std::vector<std::string> tgt_group, non_group;
  int64_t common = 0;
  for (size_t i = 0; i < before.trials.size(); ++i) {
    const Trial& t = before.trials[i];
    const auto it = after_index.find({t.enroll_id, t.test_id});
    if (it == after_index.end()) continue;
    ++common;
    if (!filter_key.empty()) {
      const auto tag = t.conditions.find(filter_key);
      if (tag == t.conditions.end() || tag->second != filter_value) continue;
    }
    const auto src = t.conditions.find("source");
    const std::string group = src == t.conditions.end() ? "" : src->second;
    if (t.is_target) {
      tgt_b.push_back(before.scores[i]);
      tgt_a.push_back(after.scores[it->second]);
      tgt_group.push_back(group);
    } else {
      non_b.push_back(before.scores[i]);
      non_a.push_back(after.scores[it->second]);
      non_group.push_back(group);
    }
  }
  if (common == 0)
    throw InvalidArgument("score sets share no (enroll_id, test_id) trials");

  HistogramReport r;
  r.num_common_trials = common;

  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const std::vector<double>* v : {&tgt_b, &non_b, &tgt_a, &non_a})
    for (double x : *v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  if (!(lo <= hi)) {  // filter removed everything
    lo = 0.0;
    hi = 1.0;
  }
  if (lo == hi) hi = lo + 1.0;
  r.bin_edges.resize(static_cast<size_t>(num_bins) + 1);
  for (int64_t i = 0; i <= num_bins; ++i)
    r.bin_edges[static_cast<size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(num_bins);

  const auto bin_counts = [&](const std::vector<double>& v) {
    std::vector<int64_t> counts(static_cast<size_t>(num_bins), 0);
    for (double x : v) {
      int64_t b = static_cast<int64_t>(
          std::floor((x - lo) / (hi - lo) * static_cast<double>(num_bins)));
      b = std::max<int64_t>(0, std::min(num_bins - 1, b));
      counts[static_cast<size_t>(b)] += 1;
    }
    return counts;
  };
  r.target_before = bin_counts(tgt_b);
  r.nontarget_before = bin_counts(non_b);
  r.target_after = bin_counts(tgt_a);
  r.nontarget_after = bin_counts(non_a);

  r.stats_target_before = MakeStats(tgt_b);
  r.stats_nontarget_before = MakeStats(non_b);
  r.stats_target_after = MakeStats(tgt_a);
  r.stats_nontarget_after = MakeStats(non_a);
  r.variance_ratio_target =
      r.stats_target_before.variance > 0.0
          ? r.stats_target_after.variance / r.stats_target_before.variance
          : 0.0;
  r.variance_ratio_nontarget =
      r.stats_nontarget_before.variance > 0.0
          ? r.stats_nontarget_after.variance / r.stats_nontarget_before.variance
          : 0.0;

  r.group_means_target_before = GroupMeans(tgt_group, tgt_b);
  r.group_means_target_after = GroupMeans(tgt_group, tgt_a);
  r.group_means_nontarget_before = GroupMeans(non_group, non_b);
  r.group_means_nontarget_after = GroupMeans(non_group, non_a);
  r.mean_gap_target_before = MeanGap(r.group_means_target_before);
  r.mean_gap_target_after = MeanGap(r.group_means_target_after);
  r.mean_gap_nontarget_before = MeanGap(r.group_means_nontarget_before);
  r.mean_gap_nontarget_after = MeanGap(r.group_means_nontarget_after);
  return r;
}

std::string FormatHistogramReport(const HistogramReport& r) {
  std::ostringstream out;
  out << "bin_lo\tbin_hi\ttarget_before\tnontarget_before\ttarget_after"
         "\tnontarget_after\n";
  char buf[32];
  for (size_t b = 0; b + 1 < r.bin_edges.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%.6g", r.bin_edges[b]);
    out << buf << '\t';
    std::snprintf(buf, sizeof(buf), "%.6g", r.bin_edges[b + 1]);
    out << buf << '\t' << r.target_before[b] << '\t' << r.nontarget_before[b]
        << '\t' << r.target_after[b] << '\t' << r.nontarget_after[b] << '\n';
  }
  return out.str();
}

}  // namespace bwex
