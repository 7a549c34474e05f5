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

#include "docgraph/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "docgraph/error.h"
#include "rng.h"
#include "json.hpp"

namespace docgraph {
namespace {

using rng::draw;
using rng::keyed_stream;

std::vector<int> concept_node_order(const DocumentSemanticGraph &g) {
  std::vector<int> out;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].type == NodeType::kConcept) out.push_back(static_cast<int>(i));
  }
  return out;
}

struct TurnOutcome {
  double loss_c = 0.0;
  double loss_n = 0.0;
  double total = 0.0;
};

TurnOutcome run_turn(EgatParams &params, const TrainConfig &config, const PreparedTurn &turn, int epoch) {
  const LabelSet &labels = *turn.graph.labels;
  size_t positive = 0;
  std::vector<int> picked = sample_candidates(turn.turn, labels.positive_candidate, config.egat.negatives,
                                              config.seed, epoch, &positive);
  GraphInput input = pack_graph(turn.graph, *turn.embeddings, picked, config.collapse_types);

  nd::Tape tape;
  BoundParams p = bind(tape, params);
  TurnOutcome out;
  if (config.egat.beta == 0.0) {
    NodeStates states = egat_forward(tape, input, p, config.egat);
    nd::Var lc = loss_sentence(score_contexts(input, states, p), positive);
    out.loss_c = out.total = lc.item();
    tape.backward(lc);
    return out;
  }
  TurnLoss loss = turn_loss(tape, input, p, config.egat, positive, turn.concept_labels);
  out.loss_c = loss.sentence;
  out.loss_n = loss.concept_value;
  out.total = loss.total.item();
  tape.backward(loss.total);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || batch_size <= 0 || epochs < 0) {
    throw Error(ErrorCode::kConfig, "learning_rate and batch_size must be positive, epochs non-negative");
  }
  if (!(adam.beta1 >= 0 && adam.beta1 < 1 && adam.beta2 >= 0 && adam.beta2 < 1 && adam.epsilon > 0)) {
    throw Error(ErrorCode::kConfig, "invalid optimizer settings");
  }
}

Adam::Adam(std::vector<nd::Parameter *> params, double learning_rate, AdamConfig config)
    : params_(std::move(params)), lr_(learning_rate), config_(config) {
  for (nd::Parameter *p : params_) {
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

void Adam::step(double grad_scale) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, t_);
  const double c2 = 1.0 - std::pow(config_.beta2, t_);
  for (size_t k = 0; k < params_.size(); ++k) {
    nd::Parameter &p = *params_[k];
    for (size_t i = 0; i < p.value.size(); ++i) {
      double g = p.grad[i] * grad_scale;
      m_[k][i] = config_.beta1 * m_[k][i] + (1.0 - config_.beta1) * g;
      v_[k][i] = config_.beta2 * v_[k][i] + (1.0 - config_.beta2) * g * g;
      p.value[i] -= lr_ * (m_[k][i] / c1) / (std::sqrt(v_[k][i] / c2) + config_.epsilon);
    }
    if (!p.value.all_finite()) throw Error(ErrorCode::kNonFinite, "parameter " + p.name + " after update");
  }
}

int Workspace::input_dim() const {
  if (embeddings.empty()) return 0;
  return embeddings.begin()->second.dim;
}

std::map<std::string, std::vector<std::string>> Workspace::gold() const {
  std::map<std::string, std::vector<std::string>> out;
  for (const PreparedTurn &t : turns) {
    if (auto g = t.turn.gold_sentence()) out[t.turn.key()].push_back(*g);
  }
  return out;
}

Workspace prepare_workspace(const std::vector<CorpusDocument> &docs, const std::vector<CorefClusters> &coref,
                            GraphVariant variant, const EmbeddingSource &node_embeddings,
                            const ContextEncoder &context_encoder, const std::vector<DialogTurn> &turns,
                            int window) {
  if (context_encoder.dim() != node_embeddings.dim()) {
    throw Error(ErrorCode::kShapeMismatch, "context and node embeddings differ in dimension");
  }
  Workspace ws;
  for (const CorpusDocument &doc : docs) {
    CorefClusters clusters{doc.doc_id, {}};
    for (const CorefClusters &c : coref) {
      if (c.doc_id == doc.doc_id) clusters = c;
    }
    GraphDiagnostics diag;
    DocumentSemanticGraph graph = build_document_graph(doc, clusters, variant, &diag);
    EmbeddingTable table = init_node_embeddings(graph, node_embeddings);
    ws.graphs.emplace(doc.doc_id, std::move(graph));
    ws.embeddings.emplace(doc.doc_id, std::move(table));
    ws.diagnostics.emplace(doc.doc_id, std::move(diag));
  }
  for (const DialogTurn &turn : turns) {
    auto it = ws.graphs.find(turn.doc_id);
    if (it == ws.graphs.end()) {
      throw Error(ErrorCode::kUnknownSentence, turn.key() + ": unknown document " + turn.doc_id);
    }
    PreparedTurn prepared;
    prepared.turn = turn;
    prepared.graph = build_dialog_graph(it->second, turn, context_encoder, window);
    prepared.embeddings = &ws.embeddings.at(turn.doc_id);
    if (turn.gold_sentence()) {
      LabelSet labels = derive_labels(turn, it->second);
      for (int node : concept_node_order(it->second)) {
        prepared.concept_labels.push_back(labels.concept_relevance.at(node));
      }
      prepared.graph.labels = std::move(labels);
    }
    ws.turns.push_back(std::move(prepared));
  }
  return ws;
}

std::vector<int> sample_candidates(const DialogTurn &turn, int gold, int k, uint64_t seed, int epoch,
                                   size_t *positive) {
  std::vector<int> pool;
  for (int i = 0; i < static_cast<int>(turn.candidates.size()); ++i) {
    if (i != gold) pool.push_back(i);
  }
  auto rng = keyed_stream(seed, turn.dialog_id + '\x1f' + std::to_string(turn.turn_index) + '\x1f' +
                                    std::to_string(epoch));
  const size_t take = std::min(pool.size(), static_cast<size_t>(std::max(k, 0)));
  for (size_t i = 0; i < take; ++i) {
    std::swap(pool[i], pool[i + draw(rng, pool.size() - i)]);
  }
  std::vector<int> picked(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  picked.push_back(gold);
  std::sort(picked.begin(), picked.end());
  if (positive) *positive = static_cast<size_t>(std::find(picked.begin(), picked.end(), gold) - picked.begin());
  return picked;
}

std::string loss_log_csv(const std::vector<LossRecord> &records) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,step,loss_c,loss_n,loss_total\n";
  for (const LossRecord &r : records) {
    out << r.epoch << ',' << r.step << ',' << r.loss_c << ',' << r.loss_n << ',' << r.loss_total << '\n';
  }
  return out.str();
}

TrainResult train(const Workspace &workspace, const TrainConfig &config, const EpochCallback &on_epoch) {
  config.validate();
  std::vector<const PreparedTurn *> labeled;
  for (const PreparedTurn &t : workspace.turns) {
    if (t.graph.labels) labeled.push_back(&t);
  }
  if (labeled.empty()) throw Error(ErrorCode::kNoLabeledTurns, "no training turn carries a gold label");

  EgatConfig egat = config.egat;
  if (egat.input_dim == 0) egat.input_dim = workspace.input_dim();
  TrainConfig cfg = config;
  cfg.egat = egat;

  TrainResult result{EgatParams::init(egat, config.seed), {}, {}};
  result.params.zero_grad();
  Adam adam(result.params.all(), config.learning_rate, config.adam);
  int global_step = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<const PreparedTurn *> order = labeled;
    auto rng = keyed_stream(config.seed, "epoch\x1f" + std::to_string(epoch));
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[draw(rng, i)]);

    LossRecord epoch_sum{epoch, 0, 0, 0, 0};
    for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(order.size(), begin + static_cast<size_t>(config.batch_size));
      LossRecord batch{epoch, ++global_step, 0, 0, 0};
      for (size_t i = begin; i < end; ++i) {
        TurnOutcome o = run_turn(result.params, cfg, *order[i], epoch);
        batch.loss_c += o.loss_c;
        batch.loss_n += o.loss_n;
        batch.loss_total += o.total;
      }
      const double n = static_cast<double>(end - begin);
      adam.step(1.0 / n);
      result.params.zero_grad();
      epoch_sum.loss_c += batch.loss_c;
      epoch_sum.loss_n += batch.loss_n;
      epoch_sum.loss_total += batch.loss_total;
      ++epoch_sum.step;
      batch.loss_c /= n;
      batch.loss_n /= n;
      batch.loss_total /= n;
      result.steps.push_back(batch);
    }
    const double n = static_cast<double>(order.size());
    epoch_sum.loss_c /= n;
    epoch_sum.loss_n /= n;
    epoch_sum.loss_total /= n;
    result.epoch_means.push_back(epoch_sum);
    if (on_epoch) on_epoch(epoch, epoch_sum, result.params);
  }
  return result;
}

RankedSelection select_knowledge(EgatParams &params, const EgatConfig &config, const PreparedTurn &turn,
                                 bool collapse_types) {
  GraphInput input = pack_graph(turn.graph, *turn.embeddings, {}, collapse_types);
  nd::Tape tape;
  BoundParams p = bind(tape, params);
  NodeStates states = egat_forward(tape, input, p, config);
  nd::Var scores = score_contexts(input, states, p);

  const DocumentSemanticGraph &base = *turn.graph.base;
  std::vector<size_t> order(turn.graph.context_nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    double sa = scores.value()[a], sb = scores.value()[b];
    if (sa != sb) return sa > sb;
    return turn.graph.context_nodes[a].sentence_node < turn.graph.context_nodes[b].sentence_node;
  });
  RankedSelection sel;
  sel.turn_key = turn.turn.key();
  for (size_t i : order) sel.ranking.emplace_back(turn.graph.context_nodes[i].sentence_id, scores.value()[i]);
  if (!input.concept_nodes.empty()) {
    nd::Var probs = score_concepts(input, states, p);
    for (size_t i = 0; i < input.concept_nodes.size(); ++i) {
      sel.concept_probabilities[base.nodes[static_cast<size_t>(input.concept_nodes[i])].id] = probs.value()[i];
    }
  }
  return sel;
}

std::vector<RankedSelection> select_all(EgatParams &params, const EgatConfig &config, const Workspace &workspace,
                                        bool collapse_types) {
  std::vector<RankedSelection> out;
  out.reserve(workspace.turns.size());
  for (const PreparedTurn &t : workspace.turns) out.push_back(select_knowledge(params, config, t, collapse_types));
  return out;
}

double concept_map(const std::vector<RankedSelection> &selections, const Workspace &workspace, int *turns_counted) {
  std::map<std::string, const PreparedTurn *> by_key;
  for (const PreparedTurn &t : workspace.turns) by_key[t.turn.key()] = &t;
  double sum = 0.0;
  int counted = 0;
  for (const RankedSelection &sel : selections) {
    auto it = by_key.find(sel.turn_key);
    if (it == by_key.end() || !it->second->graph.labels) continue;
    const PreparedTurn &t = *it->second;
    const DocumentSemanticGraph &base = *t.graph.base;
    std::set<std::string> relevant;
    for (const auto &[node, r] : t.graph.labels->concept_relevance) {
      if (r == 1) relevant.insert(base.nodes[static_cast<size_t>(node)].id);
    }
    if (relevant.empty()) continue;
    std::vector<std::pair<std::string, double>> ranked(sel.concept_probabilities.begin(),
                                                       sel.concept_probabilities.end());
    std::stable_sort(ranked.begin(), ranked.end(), [&](const auto &a, const auto &b) {
      if (a.second != b.second) return a.second > b.second;
      return base.find_node(a.first) < base.find_node(b.first);
    });
    std::vector<std::string> ids;
    for (const auto &r : ranked) ids.push_back(r.first);
    sum += average_precision(ids, relevant);
    ++counted;
  }
  if (turns_counted) *turns_counted = counted;
  return counted ? sum / counted : 0.0;
}

std::string selection_to_json_line(const RankedSelection &selection) {
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto &[sid, score] : selection.ranking) ranking.push_back({{"sentence_id", sid}, {"score", score}});
  nlohmann::json j = {{"turn", selection.turn_key},
                      {"ranking", ranking},
                      {"concepts", selection.concept_probabilities}};
  return j.dump();
}

RankedSelection selection_from_json_line(std::string_view line) {
  try {
    nlohmann::json j = nlohmann::json::parse(line);
    RankedSelection sel;
    sel.turn_key = j.at("turn").get<std::string>();
    for (const auto &r : j.at("ranking")) {
      sel.ranking.emplace_back(r.at("sentence_id").get<std::string>(), r.at("score").get<double>());
    }
    if (j.contains("concepts")) sel.concept_probabilities = j.at("concepts").get<std::map<std::string, double>>();
    return sel;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kFormat, std::string("selection line: ") + e.what());
  }
}

}  // namespace docgraph
