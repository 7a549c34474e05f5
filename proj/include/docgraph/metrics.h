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

#ifndef DOCGRAPH_METRICS_H_
#define DOCGRAPH_METRICS_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace docgraph {

// Candidates of one turn, best first.
struct RankedSelection {
  std::string turn_key;
  std::vector<std::pair<std::string, double>> ranking;
  // Concept node id -> relevance probability.
  std::map<std::string, double> concept_probabilities;

  std::vector<std::string> ids() const;
};

struct RankingReport {
  double precision_at_1 = 0.0;
  double map = 0.0;
  double mrr = 0.0;
  int n_turns = 0;
  std::vector<double> per_turn;  // average precision, input order
};

// Gold items absent from `ranked` count as never retrieved.
double average_precision(const std::vector<std::string> &ranked, const std::set<std::string> &gold);
double reciprocal_rank(const std::vector<std::string> &ranked, const std::set<std::string> &gold);

// `gold` maps turn keys to gold sentence ids. Throws Error(kMissingGold)
// when a selection has no gold entry or an empty one.
RankingReport eval_ranking(const std::vector<RankedSelection> &selections,
                           const std::map<std::string, std::vector<std::string>> &gold);

std::string report_to_json(const RankingReport &report);

struct RougeScores {
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
};

// F1 of unigram overlap, bigram overlap and longest common subsequence,
// each maximised over the references. An empty candidate scores zero.
RougeScores rouge(std::string_view candidate, const std::vector<std::string> &references);

}  // namespace docgraph

#endif  // DOCGRAPH_METRICS_H_
