// src/scores/trial.cc

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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bwex/common.h"
#include "bwex/scores.h"

namespace bwex {

const std::vector<std::string> kConditionKeys = {"source", "language",
                                                 "gender", "device"};

std::string PairTag(const std::string& a, const std::string& b) {
  return a <= b ? a + "-" + b : b + "-" + a;
}

void CheckScoreSet(const ScoreSet& s) {
  if (s.trials.size() != s.scores.size())
    throw InvalidArgument(StrCat("trial/score length mismatch: ",
                                 s.trials.size(), " vs ", s.scores.size()));
  for (double v : s.scores)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite score");
}

namespace {

std::vector<std::string> SplitWs(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> fields;
  std::string f;
  while (in >> f) fields.push_back(f);
  return fields;
}

}  // namespace

std::vector<Trial> ReadTrialList(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError(StrCat("cannot read ", path));
  std::vector<Trial> trials;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> fields = SplitWs(line);
    if (fields.size() < 3 || fields.size() > 4)
      throw InvalidArgument(
          StrCat(path, ":", lineno, ": expected 3 or 4 fields"));
    Trial t;
    t.enroll_id = fields[0];
    t.test_id = fields[1];
    if (fields[2] == "tgt") {
      t.is_target = true;
    } else if (fields[2] == "non") {
      t.is_target = false;
    } else {
      throw InvalidArgument(
          StrCat(path, ":", lineno, ": label must be tgt or non, got ",
                 fields[2]));
    }
    if (fields.size() == 4) {
      const std::string& f = fields[3];
      if (f.rfind("tag=", 0) != 0)
        throw InvalidArgument(
            StrCat(path, ":", lineno, ": fourth field must start with tag="));
      std::istringstream tags(f.substr(4));
      std::string item;
      while (std::getline(tags, item, ',')) {
        const size_t colon = item.find(':');
        if (colon == std::string::npos || colon == 0 ||
            colon + 1 == item.size())
          throw InvalidArgument(
              StrCat(path, ":", lineno, ": tag must be key:value, got ", item));
        t.conditions[item.substr(0, colon)] = item.substr(colon + 1);
      }
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

void WriteTrialList(const std::string& path,
                    const std::vector<Trial>& trials) {
  std::ofstream out(path);
  if (!out) throw RuntimeError(StrCat("cannot write ", path));
  for (const Trial& t : trials) {
    out << t.enroll_id << ' ' << t.test_id << ' '
        << (t.is_target ? "tgt" : "non");
    if (!t.conditions.empty()) {
      out << " tag=";
      bool first = true;
      for (const auto& kv : t.conditions) {
        if (!first) out << ',';
        first = false;
        out << kv.first << ':' << kv.second;
      }
    }
    out << '\n';
  }
}

std::vector<double> ReadScoreFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError(StrCat("cannot read ", path));
  std::vector<double> scores;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str())
      throw InvalidArgument(StrCat(path, ":", lineno, ": not a number"));
    scores.push_back(v);
  }
  return scores;
}

void WriteScoreFile(const std::string& path,
                    const std::vector<double>& scores) {
  std::ofstream out(path);
  if (!out) throw RuntimeError(StrCat("cannot write ", path));
  char buf[32];
  for (double v : scores) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << '\n';
  }
}

ScoreSet ReadScoreSet(const std::string& trials_path,
                      const std::string& scores_path) {
  ScoreSet s;
  s.trials = ReadTrialList(trials_path);
  s.scores = ReadScoreFile(scores_path);
  CheckScoreSet(s);
  return s;
}

}  // namespace bwex
