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

#include "docgraph/egat.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "docgraph/error.h"

namespace docgraph {
namespace {

using nd::Parameter;
using nd::Tape;
using nd::Tensor;
using nd::Var;

uint64_t splitmix(uint64_t &state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Parameter glorot(const std::string &name, size_t rows, size_t cols, uint64_t &state) {
  Tensor w({rows, cols});
  double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (size_t i = 0; i < w.size(); ++i) {
    double u = static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
    w[i] = (2.0 * u - 1.0) * limit;
  }
  return Parameter(name, std::move(w));
}

Parameter bias(const std::string &name, size_t cols) { return Parameter(name, Tensor({1, cols})); }

Var linear(Var x, Var w, Var b) { return nd::add_row(nd::matmul(x, w), b); }

Var mlp(Var x, Var w1, Var b1, Var w2, Var b2) { return linear(nd::gelu(linear(x, w1, b1)), w2, b2); }

Var row_input(Tape &tape, const Vector &v) { return tape.constant(Tensor::row(v)); }

}  // namespace

void EgatConfig::validate() const {
  if (hidden_dim <= 0 || layers < 0 || type_dim <= 0 || input_dim <= 0 || negatives < 0 || beta < 0) {
    throw Error(ErrorCode::kConfig, "EGAT dimensions must be positive");
  }
}

EgatParams EgatParams::init(const EgatConfig &config, uint64_t seed) {
  config.validate();
  const size_t d = static_cast<size_t>(config.hidden_dim);
  const size_t t = static_cast<size_t>(config.type_dim);
  const size_t in = static_cast<size_t>(config.input_dim);
  uint64_t state = seed;
  EgatParams p;
  p.input_w = glorot("input_w", in, d, state);
  p.input_b = bias("input_b", d);
  p.node_type_emb = glorot("node_type_emb", kNumNodeTypes, t, state);
  p.edge_type_emb = glorot("edge_type_emb", kNumEdgeTypes, t, state);
  p.wv = glorot("wv", d + t, d, state);
  p.bv = bias("bv", d);
  p.we = glorot("we", t, d, state);
  p.wq = glorot("wq", d + t, d, state);
  p.bq = bias("bq", d);
  p.wk = glorot("wk", d + 2 * t, d, state);
  p.bk = bias("bk", d);
  p.agg_w1 = glorot("agg_w1", d, d, state);
  p.agg_b1 = bias("agg_b1", d);
  p.agg_w2 = glorot("agg_w2", d, d, state);
  p.agg_b2 = bias("agg_b2", d);
  p.ctx_w1 = glorot("ctx_w1", 2 * d, d, state);
  p.ctx_b1 = bias("ctx_b1", d);
  p.ctx_w2 = glorot("ctx_w2", d, 1, state);
  p.ctx_b2 = bias("ctx_b2", 1);
  p.cpt_w1 = glorot("cpt_w1", d, d, state);
  p.cpt_b1 = bias("cpt_b1", d);
  p.cpt_w2 = glorot("cpt_w2", d, 1, state);
  p.cpt_b2 = bias("cpt_b2", 1);
  return p;
}

std::vector<Parameter *> EgatParams::all() {
  return {&input_w, &input_b, &node_type_emb, &edge_type_emb, &wv, &bv, &we, &wq, &bq, &wk, &bk, &agg_w1,
          &agg_b1, &agg_w2, &agg_b2, &ctx_w1, &ctx_b1, &ctx_w2, &ctx_b2, &cpt_w1, &cpt_b1, &cpt_w2, &cpt_b2};
}

std::vector<const Parameter *> EgatParams::all() const {
  auto mut = const_cast<EgatParams *>(this)->all();
  return {mut.begin(), mut.end()};
}

void EgatParams::zero_grad() {
  for (Parameter *p : all()) p->grad = Tensor(p->value.shape());
}

bool EgatParams::all_finite() const {
  auto params = all();
  return std::all_of(params.begin(), params.end(), [](const Parameter *p) { return p->value.all_finite(); });
}

void EgatParams::save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  auto params = all();
  nd::write_checkpoint(out, params);
}

EgatParams EgatParams::load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<Parameter> loaded = nd::read_checkpoint(in);
  EgatParams p;
  auto slots = p.all();
  std::vector<std::string> names = {"input_w", "input_b", "node_type_emb", "edge_type_emb", "wv", "bv",
                                    "we",      "wq",      "bq",            "wk",            "bk", "agg_w1",
                                    "agg_b1",  "agg_w2",  "agg_b2",        "ctx_w1",        "ctx_b1", "ctx_w2",
                                    "ctx_b2",  "cpt_w1",  "cpt_b1",        "cpt_w2",        "cpt_b2"};
  for (size_t i = 0; i < slots.size(); ++i) {
    auto it = std::find_if(loaded.begin(), loaded.end(), [&](const Parameter &q) { return q.name == names[i]; });
    if (it == loaded.end()) throw Error(ErrorCode::kFormat, path + ": missing tensor " + names[i]);
    if (it->value.rank() != 2) throw Error(ErrorCode::kFormat, path + ": tensor " + names[i] + " is not a matrix");
    *slots[i] = Parameter(it->name, it->value);
  }
  const size_t d = p.input_w.value.cols();
  const size_t t = p.node_type_emb.value.cols();
  if (p.wv.value.rows() != d + t || p.wk.value.rows() != d + 2 * t || p.ctx_w1.value.rows() != 2 * d ||
      p.node_type_emb.value.rows() != kNumNodeTypes || p.edge_type_emb.value.rows() != kNumEdgeTypes) {
    throw Error(ErrorCode::kFormat, path + ": inconsistent tensor shapes");
  }
  return p;
}

BoundParams bind(Tape &tape, EgatParams &p) {
  return {tape.param(p.input_w), tape.param(p.input_b), tape.param(p.node_type_emb), tape.param(p.edge_type_emb),
          tape.param(p.wv),      tape.param(p.bv),      tape.param(p.we),            tape.param(p.wq),
          tape.param(p.bq),      tape.param(p.wk),      tape.param(p.bk),            tape.param(p.agg_w1),
          tape.param(p.agg_b1),  tape.param(p.agg_w2),  tape.param(p.agg_b2),        tape.param(p.ctx_w1),
          tape.param(p.ctx_b1),  tape.param(p.ctx_w2),  tape.param(p.ctx_b2),        tape.param(p.cpt_w1),
          tape.param(p.cpt_b1),  tape.param(p.cpt_w2),  tape.param(p.cpt_b2)};
}

GraphInput pack_graph(const DialogGraph &graph, const EmbeddingTable &node_embeddings, std::span<const int> candidates,
                      bool collapse_types) {
  const DocumentSemanticGraph &base = *graph.base;
  if (node_embeddings.vectors.size() != base.nodes.size()) {
    throw Error(ErrorCode::kShapeMismatch, "embedding table does not match graph " + base.doc_id);
  }
  std::vector<int> keep;
  if (candidates.empty()) {
    keep.resize(graph.context_nodes.size());
    std::iota(keep.begin(), keep.end(), 0);
  } else {
    keep.assign(candidates.begin(), candidates.end());
  }

  GraphInput in;
  const size_t dim = static_cast<size_t>(node_embeddings.dim);
  const size_t n = base.nodes.size() + keep.size();
  in.features = Tensor::zeros(n, dim);
  const bool collapse = collapse_types || base.variant == GraphVariant::kHomogeneous;
  for (size_t i = 0; i < base.nodes.size(); ++i) {
    std::copy(node_embeddings.vectors[i].begin(), node_embeddings.vectors[i].end(),
              in.features.data().begin() + static_cast<std::ptrdiff_t>(i * dim));
    in.node_types.push_back(collapse ? 0 : static_cast<int>(base.nodes[i].type));
    if (base.nodes[i].type == NodeType::kConcept) in.concept_nodes.push_back(static_cast<int>(i));
  }
  for (size_t e = 0; e < base.edges.size(); ++e) {
    in.edge_src.push_back(base.edges[e].src);
    in.edge_dst.push_back(base.edges[e].dst);
    in.edge_types.push_back(collapse ? 0 : static_cast<int>(base.edges[e].type));
  }
  for (size_t k = 0; k < keep.size(); ++k) {
    const ContextNode &c = graph.context_nodes.at(static_cast<size_t>(keep[k]));
    if (c.embedding.size() != dim) throw Error(ErrorCode::kShapeMismatch, "context embedding dim");
    int node = static_cast<int>(base.nodes.size() + k);
    std::copy(c.embedding.begin(), c.embedding.end(),
              in.features.data().begin() + static_cast<std::ptrdiff_t>(static_cast<size_t>(node) * dim));
    in.node_types.push_back(collapse ? 0 : static_cast<int>(NodeType::kContext));
    in.context_nodes.push_back(node);
    in.context_candidates.push_back(keep[k]);
    const int link = collapse ? 0 : static_cast<int>(EdgeType::kContextLink);
    in.edge_src.push_back(node);
    in.edge_dst.push_back(c.sentence_node);
    in.edge_types.push_back(link);
    in.edge_src.push_back(c.sentence_node);
    in.edge_dst.push_back(node);
    in.edge_types.push_back(link);
  }
  return in;
}

NodeStates egat_forward(Tape &tape, const GraphInput &input, const BoundParams &p, const EgatConfig &config) {
  const size_t n = input.num_nodes();
  const size_t m = input.num_edges();
  const size_t d = static_cast<size_t>(config.hidden_dim);
  const size_t t = static_cast<size_t>(config.type_dim);
  if (p.input_w.rows() != input.features.cols() || p.input_w.cols() != d) {
    throw Error(ErrorCode::kShapeMismatch, "input projection does not match features or hidden_dim");
  }

  // Edges grouped by target, keeping input order within a group.
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return input.edge_dst[a] < input.edge_dst[b]; });
  std::vector<int> src(m), dst(m), etype(m);
  for (size_t i = 0; i < m; ++i) {
    src[i] = input.edge_src[order[i]];
    dst[i] = input.edge_dst[order[i]];
    etype[i] = input.edge_types[order[i]];
  }
  std::vector<size_t> offsets{0};
  for (size_t i = 1; i <= m; ++i) {
    if (i == m || dst[i] != dst[i - 1]) offsets.push_back(i);
  }

  NodeStates states;
  Var x = tape.constant(input.features);
  states.layers.push_back(linear(x, p.input_w, p.input_b));
  if (config.layers == 0) return states;

  Var node_types = nd::gather_rows(p.node_type_emb, input.node_types);
  Var key_node_w = nd::slice_rows(p.wk, 0, d + t);
  std::optional<Var> edge_msg, edge_key;
  if (m > 0) {
    Var edge_types = nd::gather_rows(p.edge_type_emb, etype);
    edge_msg = nd::matmul(edge_types, p.we);
    edge_key = nd::matmul(edge_types, nd::slice_rows(p.wk, d + t, d + 2 * t));
  }
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  for (int layer = 0; layer < config.layers; ++layer) {
    Var h = states.layers.back();
    Var aggregated;
    if (m > 0) {
      std::array<Var, 2> parts{h, node_types};
      Var typed = nd::concat_cols(parts);
      Var msg_node = linear(typed, p.wv, p.bv);
      Var query_node = linear(typed, p.wq, p.bq);
      Var key_node = nd::add_row(nd::matmul(typed, key_node_w), p.bk);
      Var messages = nd::add(nd::gather_rows(msg_node, src), *edge_msg);
      Var queries = nd::gather_rows(query_node, src);
      Var keys = nd::add(nd::gather_rows(key_node, dst), *edge_key);
      Var logits = nd::scale(nd::row_dot(queries, keys), inv_sqrt_d);
      Var alpha = nd::segment_softmax(logits, offsets);
      aggregated = nd::scatter_sum_rows(nd::scale_rows(messages, alpha), dst, n);

      std::vector<double> weights(m);
      for (size_t i = 0; i < m; ++i) weights[order[i]] = alpha.value()[i];
      states.attention.push_back(std::move(weights));
    } else {
      aggregated = tape.constant(Tensor::zeros(n, d));
      states.attention.emplace_back();
    }
    Var update = mlp(aggregated, p.agg_w1, p.agg_b1, p.agg_w2, p.agg_b2);
    try {
      states.layers.push_back(nd::gelu(nd::add(update, h)));
    } catch (const Error &e) {
      throw Error(e.code(), "layer " + std::to_string(layer + 1) + ": " + e.what());
    }
  }
  return states;
}

Var score_contexts(const GraphInput &input, const NodeStates &states, const BoundParams &p) {
  std::array<Var, 2> parts{nd::gather_rows(states.layers.back(), input.context_nodes),
                           nd::gather_rows(states.layers.front(), input.context_nodes)};
  return mlp(nd::concat_cols(parts), p.ctx_w1, p.ctx_b1, p.ctx_w2, p.ctx_b2);
}

Var score_concepts(const GraphInput &input, const NodeStates &states, const BoundParams &p) {
  Var h = nd::gather_rows(states.layers.back(), input.concept_nodes);
  return nd::sigmoid(mlp(h, p.cpt_w1, p.cpt_b1, p.cpt_w2, p.cpt_b2));
}

Vector message(const Vector &h_source, int source_type, int edge_type, EgatParams &params) {
  Tape tape;
  BoundParams p = bind(tape, params);
  std::array<Var, 2> parts{row_input(tape, h_source), nd::gather_rows(p.node_type_emb, std::vector<int>{source_type})};
  Var edge = nd::gather_rows(p.edge_type_emb, std::vector<int>{edge_type});
  Var out = nd::add(linear(nd::concat_cols(parts), p.wv, p.bv), nd::matmul(edge, p.we));
  return out.value().row_vector(0);
}

std::vector<double> attention_weights(const Vector &h_target, int target_type, const std::vector<Neighbor> &neighbors,
                                      EgatParams &params) {
  if (neighbors.empty()) throw Error(ErrorCode::kEmptySegment, "attention over an empty neighborhood");
  Tape tape;
  BoundParams p = bind(tape, params);
  std::vector<Var> logits;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(h_target.size()));
  for (const Neighbor &nb : neighbors) {
    std::array<Var, 2> q_parts{row_input(tape, nb.state), nd::gather_rows(p.node_type_emb, std::vector<int>{nb.node_type})};
    std::array<Var, 3> k_parts{row_input(tape, h_target),
                               nd::gather_rows(p.node_type_emb, std::vector<int>{target_type}),
                               nd::gather_rows(p.edge_type_emb, std::vector<int>{nb.edge_type})};
    Var q = linear(nd::concat_cols(q_parts), p.wq, p.bq);
    Var k = linear(nd::concat_cols(k_parts), p.wk, p.bk);
    logits.push_back(nd::scale(nd::row_dot(q, k), inv_sqrt_d));
  }
  Tensor column = Tensor::zeros(logits.size(), 1);
  for (size_t i = 0; i < logits.size(); ++i) column[i] = logits[i].item();
  std::vector<size_t> offsets{0, logits.size()};
  Var alpha = nd::segment_softmax(tape.constant(column), offsets);
  return {alpha.value().data().begin(), alpha.value().data().end()};
}

double score_context(const Vector &h_last, const Vector &h_first, EgatParams &params) {
  Tape tape;
  BoundParams p = bind(tape, params);
  std::array<Var, 2> parts{row_input(tape, h_last), row_input(tape, h_first)};
  return mlp(nd::concat_cols(parts), p.ctx_w1, p.ctx_b1, p.ctx_w2, p.ctx_b2).item();
}

double score_concept(const Vector &h_last, EgatParams &params) {
  Tape tape;
  BoundParams p = bind(tape, params);
  return nd::sigmoid(mlp(row_input(tape, h_last), p.cpt_w1, p.cpt_b1, p.cpt_w2, p.cpt_b2)).item();
}

Var loss_sentence(Var scores, size_t positive) {
  if (positive >= scores.value().size()) throw Error(ErrorCode::kNoPositive, "positive index out of range");
  return nd::sub(nd::logsumexp(scores), nd::pick(scores, positive));
}

double loss_sentence(std::span<const double> scores, size_t positive) {
  if (scores.empty()) throw Error(ErrorCode::kNoPositive, "no scores");
  Tape tape;
  return loss_sentence(tape.constant(Tensor::column({scores.begin(), scores.end()})), positive).item();
}

Var loss_concept(Var probs, std::span<const double> labels) { return nd::binary_cross_entropy(probs, labels); }

ConceptLoss loss_concept(std::span<const double> probs, std::span<const double> labels) {
  if (probs.empty()) return {0.0, true};
  Tape tape;
  return {loss_concept(tape.constant(Tensor::column({probs.begin(), probs.end()})), labels).item(), false};
}

Var total_loss(Var sentence_loss, Var concept_loss, double beta) {
  return nd::add(sentence_loss, nd::scale(concept_loss, beta));
}

double total_loss(double sentence_loss, double concept_loss, double beta) {
  return sentence_loss + beta * concept_loss;
}

TurnLoss turn_loss(Tape &tape, const GraphInput &input, const BoundParams &p, const EgatConfig &config,
                   size_t positive, std::span<const double> concept_labels) {
  NodeStates states = egat_forward(tape, input, p, config);
  TurnLoss out;
  Var lc = loss_sentence(score_contexts(input, states, p), positive);
  out.sentence = lc.item();
  if (input.concept_nodes.empty()) {
    out.concept_empty = true;
    out.total = lc;
    return out;
  }
  if (concept_labels.size() != input.concept_nodes.size()) {
    throw Error(ErrorCode::kShapeMismatch, "concept labels do not match concept nodes");
  }
  Var ln = loss_concept(score_concepts(input, states, p), concept_labels);
  out.concept_value = ln.item();
  out.total = total_loss(lc, ln, config.beta);
  return out;
}

}  // namespace docgraph
