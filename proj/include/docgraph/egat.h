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

#ifndef DOCGRAPH_EGAT_H_
#define DOCGRAPH_EGAT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "docgraph/dialog.h"
#include "docgraph/embeddings.h"
#include "docgraph/tensor.h"

namespace docgraph {

struct EgatConfig {
  int hidden_dim = 200;
  int layers = 2;
  int type_dim = 20;
  int input_dim = 0;  // taken from the embeddings when 0
  double beta = 1.0;
  int negatives = 5;

  void validate() const;
  bool operator==(const EgatConfig &) const = default;
};

// Every trainable tensor. Linear maps act on row vectors: y = x W + b.
struct EgatParams {
  nd::Parameter input_w, input_b;          // input_dim -> D
  nd::Parameter node_type_emb;             // |NodeType| x type_dim
  nd::Parameter edge_type_emb;             // |EdgeType| x type_dim
  nd::Parameter wv, bv;                    // (D + type_dim) -> D
  nd::Parameter we;                        // type_dim -> D
  nd::Parameter wq, bq;                    // (D + type_dim) -> D
  nd::Parameter wk, bk;                    // (D + 2 type_dim) -> D
  nd::Parameter agg_w1, agg_b1, agg_w2, agg_b2;  // D -> D -> D
  nd::Parameter ctx_w1, ctx_b1, ctx_w2, ctx_b2;  // 2D -> D -> 1
  nd::Parameter cpt_w1, cpt_b1, cpt_w2, cpt_b2;  // D -> D -> 1

  // Glorot-uniform weights from a seeded generator, zero biases.
  static EgatParams init(const EgatConfig &config, uint64_t seed);

  std::vector<nd::Parameter *> all();
  std::vector<const nd::Parameter *> all() const;
  void zero_grad();
  bool all_finite() const;

  void save(const std::string &path) const;
  static EgatParams load(const std::string &path);
};

// Parameters recorded on a tape for one forward pass.
struct BoundParams {
  nd::Var input_w, input_b, node_type_emb, edge_type_emb, wv, bv, we, wq, bq, wk, bk;
  nd::Var agg_w1, agg_b1, agg_w2, agg_b2, ctx_w1, ctx_b1, ctx_w2, ctx_b2, cpt_w1, cpt_b1, cpt_w2, cpt_b2;
};

BoundParams bind(nd::Tape &tape, EgatParams &params);

// Flattened network input: base nodes first, then the selected context
// nodes in candidate order.
struct GraphInput {
  nd::Tensor features;
  std::vector<int> node_types;
  std::vector<int> edge_src, edge_dst, edge_types;
  std::vector<int> context_nodes;
  std::vector<int> context_candidates;
  std::vector<int> concept_nodes;

  size_t num_nodes() const { return node_types.size(); }
  size_t num_edges() const { return edge_src.size(); }
};

// `candidates` selects the context nodes to keep (all when empty).
// `collapse_types` maps every node and edge type id to 0.
GraphInput pack_graph(const DialogGraph &graph, const EmbeddingTable &node_embeddings,
                      std::span<const int> candidates = {}, bool collapse_types = false);

struct NodeStates {
  std::vector<nd::Var> layers;  // h^0 .. h^L
  // Attention weight of every edge (input edge order), per layer.
  std::vector<std::vector<double>> attention;
};

NodeStates egat_forward(nd::Tape &tape, const GraphInput &input, const BoundParams &p, const EgatConfig &config);

// Logits for the input's context nodes (m x 1).
nd::Var score_contexts(const GraphInput &input, const NodeStates &states, const BoundParams &p);
// Relevance probabilities for the input's concept nodes (n x 1).
nd::Var score_concepts(const GraphInput &input, const NodeStates &states, const BoundParams &p);

// Single-vector forms of the building blocks, evaluated on a scratch tape.
Vector message(const Vector &h_source, int source_type, int edge_type, EgatParams &params);

struct Neighbor {
  Vector state;
  int node_type = 0;
  int edge_type = 0;
};
std::vector<double> attention_weights(const Vector &h_target, int target_type, const std::vector<Neighbor> &neighbors,
                                      EgatParams &params);
double score_context(const Vector &h_last, const Vector &h_first, EgatParams &params);
double score_concept(const Vector &h_last, EgatParams &params);

// -log softmax(scores)[positive]; scores hold the positive and its sampled
// negatives.
nd::Var loss_sentence(nd::Var scores, size_t positive);
double loss_sentence(std::span<const double> scores, size_t positive);

struct ConceptLoss {
  double value = 0.0;
  bool empty = false;  // no concept nodes; value is 0
};
// Full two-term binary cross entropy averaged over all concept nodes.
nd::Var loss_concept(nd::Var probs, std::span<const double> labels);
ConceptLoss loss_concept(std::span<const double> probs, std::span<const double> labels);

nd::Var total_loss(nd::Var sentence_loss, nd::Var concept_loss, double beta);
double total_loss(double sentence_loss, double concept_loss, double beta);

struct TurnLoss {
  nd::Var total;
  double sentence = 0.0;
  double concept_value = 0.0;
  bool concept_empty = false;
};

// Joint loss on one packed turn. `positive` indexes input.context_nodes;
// `concept_labels` aligns with input.concept_nodes.
TurnLoss turn_loss(nd::Tape &tape, const GraphInput &input, const BoundParams &p, const EgatConfig &config,
                   size_t positive, std::span<const double> concept_labels);

}  // namespace docgraph

#endif  // DOCGRAPH_EGAT_H_
