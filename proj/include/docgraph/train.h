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

#ifndef DOCGRAPH_TRAIN_H_
#define DOCGRAPH_TRAIN_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "docgraph/amr.h"
#include "docgraph/dialog.h"
#include "docgraph/egat.h"
#include "docgraph/embeddings.h"
#include "docgraph/metrics.h"
#include "docgraph/semgraph.h"

namespace docgraph {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamConfig &) const = default;
};

struct TrainConfig {
  double learning_rate = 3e-5;
  int batch_size = 16;  // turns per optimizer step
  int epochs = 3;
  uint64_t seed = 0;
  AdamConfig adam;
  EgatConfig egat;
  // Feed every node and edge type id as 0 regardless of the graph variant.
  bool collapse_types = false;

  void validate() const;
  bool operator==(const TrainConfig &) const = default;
};

class Adam {
 public:
  Adam(std::vector<nd::Parameter *> params, double learning_rate, AdamConfig config = {});
  // Applies one update from the gradients currently stored in the
  // parameters, each multiplied by `grad_scale` first.
  void step(double grad_scale = 1.0);
  int steps() const { return t_; }

 private:
  std::vector<nd::Parameter *> params_;
  double lr_;
  AdamConfig config_;
  std::vector<nd::Tensor> m_, v_;
  int t_ = 0;
};

struct PreparedTurn {
  DialogTurn turn;
  DialogGraph graph;
  const EmbeddingTable *embeddings = nullptr;
  // Aligned with the concept nodes of the base graph in node order; empty
  // for unlabeled turns.
  std::vector<double> concept_labels;
};

// Owns the document graphs and node embeddings that prepared turns point
// into. Not copyable; moving keeps the pointers valid.
struct Workspace {
  std::map<std::string, DocumentSemanticGraph> graphs;
  std::map<std::string, EmbeddingTable> embeddings;
  std::map<std::string, GraphDiagnostics> diagnostics;
  std::vector<PreparedTurn> turns;

  Workspace() = default;
  Workspace(const Workspace &) = delete;
  Workspace &operator=(const Workspace &) = delete;
  Workspace(Workspace &&) = default;
  Workspace &operator=(Workspace &&) = default;

  int input_dim() const;
  std::map<std::string, std::vector<std::string>> gold() const;
};

// Builds the graph of every document and the dialog graph of every turn.
// Turns whose document is absent raise Error(kUnknownSentence). Labels are
// derived for turns carrying gold annotation.
Workspace prepare_workspace(const std::vector<CorpusDocument> &docs, const std::vector<CorefClusters> &coref,
                            GraphVariant variant, const EmbeddingSource &node_embeddings,
                            const ContextEncoder &context_encoder, const std::vector<DialogTurn> &turns,
                            int window = 2);

// Candidate indices for one training step: the gold candidate plus up to
// `k` distinct negatives drawn from a stream keyed by the turn and epoch.
// Returned in candidate order; `positive` receives the gold position.
std::vector<int> sample_candidates(const DialogTurn &turn, int gold, int k, uint64_t seed, int epoch,
                                   size_t *positive);

struct LossRecord {
  int epoch = 0;
  int step = 0;
  double loss_c = 0.0;
  double loss_n = 0.0;
  double loss_total = 0.0;
};

struct TrainResult {
  EgatParams params;
  std::vector<LossRecord> steps;        // one per optimizer step, batch means
  std::vector<LossRecord> epoch_means;  // step holds the epoch's step count
};

std::string loss_log_csv(const std::vector<LossRecord> &records);

using EpochCallback = std::function<void(int epoch, const LossRecord &mean, const EgatParams &params)>;

// Trains from freshly initialised parameters on every labeled turn.
// Throws Error(kNoLabeledTurns) when there is none.
TrainResult train(const Workspace &workspace, const TrainConfig &config, const EpochCallback &on_epoch = {});

// Scores every candidate of the turn in one forward pass.
RankedSelection select_knowledge(EgatParams &params, const EgatConfig &config, const PreparedTurn &turn,
                                 bool collapse_types = false);

std::vector<RankedSelection> select_all(EgatParams &params, const EgatConfig &config, const Workspace &workspace,
                                        bool collapse_types = false);

// Mean average precision of concept rankings over turns with at least one
// relevant concept; `turns_counted` receives how many qualified.
double concept_map(const std::vector<RankedSelection> &selections, const Workspace &workspace,
                   int *turns_counted = nullptr);

std::string selection_to_json_line(const RankedSelection &selection);
RankedSelection selection_from_json_line(std::string_view line);

}  // namespace docgraph

#endif  // DOCGRAPH_TRAIN_H_
