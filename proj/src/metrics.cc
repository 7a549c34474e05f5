// Copyright 2026 The docgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "docgraph/metrics.h"

#include <algorithm>

#include "docgraph/embeddings.h"
#include "docgraph/error.h"
#include "json.hpp"

namespace docgraph {
namespace {

double f1(double overlap, double candidate_total, double reference_total) {
  if (overlap <= 0.0 || candidate_total <= 0.0 || reference_total <= 0.0) return 0.0;
  double p = overlap / candidate_total;
  double r = overlap / reference_total;
  return 2.0 * p * r / (p + r);
}

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string> &tokens, size_t n) {
  std::map<std::vector<std::string>, int> counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

double ngram_f1(const std::vector<std::string> &cand, const std::vector<std::string> &ref, size_t n) {
  auto c = ngram_counts(cand, n);
  auto r = ngram_counts(ref, n);
  int overlap = 0;
  for (const auto &[gram, count] : c) {
    auto it = r.find(gram);
    if (it != r.end()) overlap += std::min(count, it->second);
  }
  double ct = cand.size() >= n ? static_cast<double>(cand.size() - n + 1) : 0.0;
  double rt = ref.size() >= n ? static_cast<double>(ref.size() - n + 1) : 0.0;
  return f1(overlap, ct, rt);
}

size_t lcs_length(const std::vector<std::string> &a, const std::vector<std::string> &b) {
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::vector<std::string> RankedSelection::ids() const {
  std::vector<std::string> out;
  out.reserve(ranking.size());
  for (const auto &entry : ranking) out.push_back(entry.first);
  return out;
}

double average_precision(const std::vector<std::string> &ranked, const std::set<std::string> &gold) {
  if (gold.empty()) throw Error(ErrorCode::kMissingGold, "average precision needs at least one gold item");
  double sum = 0.0;
  int hits = 0;
  for (size_t i = 0; i < ranked.size(); ++i) {
    if (gold.count(ranked[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(gold.size());
}

double reciprocal_rank(const std::vector<std::string> &ranked, const std::set<std::string> &gold) {
  for (size_t i = 0; i < ranked.size(); ++i) {
    if (gold.count(ranked[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

RankingReport eval_ranking(const std::vector<RankedSelection> &selections,
                           const std::map<std::string, std::vector<std::string>> &gold) {
  RankingReport report;
  for (const RankedSelection &sel : selections) {
    auto it = gold.find(sel.turn_key);
    if (it == gold.end() || it->second.empty()) {
      throw Error(ErrorCode::kMissingGold, "turn " + sel.turn_key + " has no gold sentence");
    }
    std::set<std::string> g(it->second.begin(), it->second.end());
    std::vector<std::string> ranked = sel.ids();
    double ap = average_precision(ranked, g);
    report.per_turn.push_back(ap);
    report.map += ap;
    report.mrr += reciprocal_rank(ranked, g);
    if (!ranked.empty() && g.count(ranked.front())) report.precision_at_1 += 1.0;
  }
  report.n_turns = static_cast<int>(selections.size());
  if (report.n_turns > 0) {
    double n = report.n_turns;
    report.precision_at_1 /= n;
    report.map /= n;
    report.mrr /= n;
  }
  return report;
}

std::string report_to_json(const RankingReport &report) {
  nlohmann::json j = {{"p_at_1", report.precision_at_1},
                      {"map", report.map},
                      {"mrr", report.mrr},
                      {"n_turns", report.n_turns},
                      {"per_turn", report.per_turn}};
  return j.dump(2);
}

RougeScores rouge(std::string_view candidate, const std::vector<std::string> &references) {
  RougeScores best;
  std::vector<std::string> cand = simple_tokenize(candidate);
  if (cand.empty()) return best;
  for (const std::string &reference : references) {
    std::vector<std::string> ref = simple_tokenize(reference);
    best.r1 = std::max(best.r1, ngram_f1(cand, ref, 1));
    best.r2 = std::max(best.r2, ngram_f1(cand, ref, 2));
    best.rl = std::max(best.rl, f1(static_cast<double>(lcs_length(cand, ref)), static_cast<double>(cand.size()),
                                   static_cast<double>(ref.size())));
  }
  return best;
}

}  // namespace docgraph
