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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>

#include "docgraph/error.h"
#include "egat_oracle.h"
#include "test_util.h"

namespace docgraph {
namespace {

using nd::Tape;
using nd::Tensor;
using nd::Var;
using oracle::DenseEgat;
using oracle::Row;

EgatConfig small_config(int input_dim = 5) {
  EgatConfig c;
  c.hidden_dim = 6;
  c.type_dim = 3;
  c.input_dim = input_dim;
  return c;
}

// Glorot init leaves biases at zero; give them values so the oracle sees
// every term.
EgatParams random_params(const EgatConfig &config, uint64_t seed) {
  EgatParams p = EgatParams::init(config, seed);
  std::mt19937_64 rng(seed + 1);
  for (nd::Parameter *q : p.all()) {
    if (q->name.find("_b") != std::string::npos || q->name.starts_with("b")) {
      q->value = testing::random_tensor(rng, q->value.rows(), q->value.cols(), -0.5, 0.5);
    }
  }
  return p;
}

void expect_rows_near(const std::vector<double> &got, const Row &want, double tol) {
  ASSERT_EQ(static_cast<Eigen::Index>(got.size()), want.size());
  for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want(static_cast<Eigen::Index>(i)), tol);
}

TEST(Message, ZeroInputsGiveZero) {
  EgatConfig c = small_config();
  EgatParams p = EgatParams::init(c, 1);
  p.node_type_emb.value.fill(0.0);
  p.edge_type_emb.value.fill(0.0);
  Vector m = message(Vector(6, 0.0), 2, 3, p);
  for (double x : m) EXPECT_EQ(x, 0.0);
}

TEST(Message, ZeroEdgeWeightsIgnoreEdgeType) {
  EgatConfig c = small_config();
  EgatParams p = random_params(c, 2);
  p.we.value.fill(0.0);
  Vector h{0.1, -0.2, 0.3, 0.4, -0.5, 0.6};
  EXPECT_EQ(message(h, 1, 0, p), message(h, 1, 13, p));
}

TEST(Message, MatchesDenseEvaluation) {
  EgatConfig c = small_config();
  EgatParams p = random_params(c, 3);
  DenseEgat dense{p};
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    Vector h = testing::random_values(rng, 6);
    int nt = static_cast<int>(rng() % kNumNodeTypes), et = static_cast<int>(rng() % kNumEdgeTypes);
    expect_rows_near(message(h, nt, et, p), dense.message(oracle::row(h), nt, et), 1e-12);
  }
}

TEST(Attention, Examples) {
  EgatConfig c = small_config();
  EgatParams p = random_params(c, 5);
  Vector target{0.3, 0.1, -0.2, 0.5, 0.0, 1.0};
  Vector h{1.0, 2.0, -1.0, 0.5, 0.25, -0.75};
  EXPECT_EQ(attention_weights(target, 1, {{h, 2, 4}}, p), std::vector<double>{1.0});
  std::vector<double> two = attention_weights(target, 1, {{h, 2, 4}, {h, 2, 4}}, p);
  EXPECT_EQ(two, (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(attention_weights(target, 1, {}, p), Error);
}

TEST(Attention, MatchesBruteForceSoftmax) {
  EgatConfig c = small_config();
  EgatParams p = random_params(c, 6);
  DenseEgat dense{p};
  std::mt19937_64 rng(7);
  Vector target = testing::random_values(rng, 6);
  std::vector<Neighbor> nbs;
  std::vector<double> logits;
  for (int i = 0; i < 4; ++i) {
    Neighbor nb{testing::random_values(rng, 6), static_cast<int>(rng() % kNumNodeTypes),
                static_cast<int>(rng() % kNumEdgeTypes)};
    logits.push_back(dense.logit(oracle::row(nb.state), nb.node_type, oracle::row(target), 2, nb.edge_type));
    nbs.push_back(nb);
  }
  double z = 0.0;
  for (double l : logits) z += std::exp(l);
  std::vector<double> alpha = attention_weights(target, 2, nbs, p);
  for (size_t i = 0; i < 4; ++i) EXPECT_NEAR(alpha[i], std::exp(logits[i]) / z, 1e-12);
}

TEST(Forward, ZeroLayersKeepsInputProjection) {
  EgatConfig c = small_config();
  c.layers = 0;
  EgatParams p = random_params(c, 8);
  std::mt19937_64 rng(9);
  GraphInput in = testing::random_graph_input(rng, 5, 1, 5, 4);
  Tape tape;
  NodeStates s = egat_forward(tape, in, bind(tape, p), c);
  EXPECT_EQ(s.layers.size(), 1u);
  EXPECT_TRUE(s.attention.empty());
}

TEST(Forward, IsolatedNodeUsesEmptyAggregate) {
  EgatConfig c = small_config();
  c.layers = 1;
  EgatParams p = random_params(c, 10);
  std::mt19937_64 rng(11);
  GraphInput in = testing::random_graph_input(rng, 4, 0, 5, 0);
  in.edge_src = {0};
  in.edge_dst = {1};
  in.edge_types = {0};
  Tape tape;
  NodeStates s = egat_forward(tape, in, bind(tape, p), c);
  for (size_t v : {0u, 2u, 3u}) {
    Row h0 = oracle::row(s.layers[0].value().row_vector(v));
    Row zero = Row::Zero(6);
    Row want = oracle::gelu(oracle::mlp(zero, p.agg_w1, p.agg_b1, p.agg_w2, p.agg_b2) + h0);
    expect_rows_near(s.layers[1].value().row_vector(v), want, 1e-12);
  }
}

TEST(Forward, NoEdgesAtAll) {
  EgatConfig c = small_config();
  EgatParams p = random_params(c, 12);
  std::mt19937_64 rng(13);
  GraphInput in = testing::random_graph_input(rng, 3, 0, 5, 0);
  Tape tape;
  NodeStates s = egat_forward(tape, in, bind(tape, p), c);
  EXPECT_EQ(s.layers.size(), 3u);
}

TEST(Forward, MatchesDenseEvaluation) {
  EgatConfig c = small_config();
  EgatParams p = random_params(c, 14);
  std::mt19937_64 rng(15);
  GraphInput in = testing::random_graph_input(rng, 9, 3, 5, 8);
  Tape tape;
  NodeStates s = egat_forward(tape, in, bind(tape, p), c);
  DenseEgat dense{p};
  auto want = dense.forward(in, c.layers);
  for (size_t l = 0; l < want.size(); ++l) {
    for (size_t v = 0; v < in.num_nodes(); ++v) expect_rows_near(s.layers[l].value().row_vector(v), want[l][v], 1e-12);
  }
  // Attention weights into each node sum to one.
  std::vector<double> total(in.num_nodes(), 0.0);
  for (size_t e = 0; e < in.num_edges(); ++e) total[static_cast<size_t>(in.edge_dst[e])] += s.attention[0][e];
  for (size_t v = 0; v < in.num_nodes(); ++v) {
    bool has_in = std::find(in.edge_dst.begin(), in.edge_dst.end(), static_cast<int>(v)) != in.edge_dst.end();
    if (has_in) {
      EXPECT_NEAR(total[v], 1.0, 1e-12);
    }
  }
}

TEST(Forward, NodeRelabelingPermutesStates) {
  EgatConfig c = small_config();
  EgatParams p = random_params(c, 16);
  std::mt19937_64 rng(17);
  GraphInput in = testing::random_graph_input(rng, 6, 1, 5, 6);
  std::vector<int> pi{3, 5, 0, 4, 1, 2};  // old index -> new index
  GraphInput perm = in;
  for (size_t v = 0; v < 6; ++v) {
    size_t to = static_cast<size_t>(pi[v]);
    for (size_t k = 0; k < in.features.cols(); ++k) perm.features(to, k) = in.features(v, k);
    perm.node_types[to] = in.node_types[v];
  }
  for (size_t e = 0; e < in.num_edges(); ++e) {
    perm.edge_src[e] = pi[static_cast<size_t>(in.edge_src[e])];
    perm.edge_dst[e] = pi[static_cast<size_t>(in.edge_dst[e])];
  }
  Tape t1, t2;
  NodeStates a = egat_forward(t1, in, bind(t1, p), c);
  NodeStates b = egat_forward(t2, perm, bind(t2, p), c);
  for (size_t l = 0; l < a.layers.size(); ++l) {
    for (size_t v = 0; v < 6; ++v) {
      EXPECT_EQ(a.layers[l].value().row_vector(v), b.layers[l].value().row_vector(static_cast<size_t>(pi[v])));
    }
  }
  EXPECT_EQ(a.attention, b.attention);
}

TEST(ScoreContext, Examples) {
  EgatConfig c = small_config();
  EgatParams zero = EgatParams::init(c, 18);
  for (auto *q : {&zero.ctx_w1, &zero.ctx_b1, &zero.ctx_w2, &zero.ctx_b2}) q->value.fill(0.0);
  Vector a{1, 2, 3, 4, 5, 6}, b{-1, 0, 1, 0, -1, 0};
  EXPECT_EQ(score_context(a, b, zero), 0.0);
  EgatParams p = random_params(c, 19);
  EXPECT_EQ(score_context(a, b, p), score_context(a, b, p));
  EXPECT_NEAR(score_context(a, b, p), DenseEgat{p}.context_score(oracle::row(a), oracle::row(b)), 1e-12);
}

TEST(ScoreConcept, Examples) {
  EgatConfig c = small_config();
  EgatParams zero = EgatParams::init(c, 20);
  for (auto *q : {&zero.cpt_w1, &zero.cpt_b1, &zero.cpt_w2, &zero.cpt_b2}) q->value.fill(0.0);
  Vector a{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(score_concept(a, zero), 0.5);
  EgatParams p = random_params(c, 21);
  std::mt19937_64 rng(22);
  for (int i = 0; i < 20; ++i) {
    Vector h = testing::random_values(rng, 6, -30.0, 30.0);
    double s = score_concept(h, p);
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
    EXPECT_NEAR(s, DenseEgat{p}.concept_score(oracle::row(h)), 1e-12);
  }
}

TEST(ScoreBatch, MatchesSingleVectorForms) {
  EgatConfig c = small_config();
  EgatParams p = random_params(c, 23);
  std::mt19937_64 rng(24);
  GraphInput in = testing::random_graph_input(rng, 8, 3, 5, 6);
  Tape tape;
  BoundParams bp = bind(tape, p);
  NodeStates s = egat_forward(tape, in, bp, c);
  Var ctx = score_contexts(in, s, bp);
  Var cpt = score_concepts(in, s, bp);
  for (size_t i = 0; i < in.context_nodes.size(); ++i) {
    size_t v = static_cast<size_t>(in.context_nodes[i]);
    EXPECT_NEAR(ctx.value()[i], score_context(s.layers.back().value().row_vector(v), s.layers[0].value().row_vector(v), p),
                1e-12);
  }
  for (size_t i = 0; i < in.concept_nodes.size(); ++i) {
    size_t v = static_cast<size_t>(in.concept_nodes[i]);
    EXPECT_NEAR(cpt.value()[i], score_concept(s.layers.back().value().row_vector(v), p), 1e-12);
  }
}

TEST(LossSentence, Examples) {
  std::vector<double> equal(6, 0.4);
  EXPECT_NEAR(loss_sentence(equal, 0), std::log(6.0), 1e-12);
  std::vector<double> gap{50.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  EXPECT_LT(loss_sentence(gap, 0), 1e-20);
  std::vector<double> single{3.7};
  EXPECT_EQ(loss_sentence(single, 0), 0.0);
  EXPECT_THROW(loss_sentence(single, 1), Error);
}

TEST(LossConcept, Examples) {
  std::vector<double> half(4, 0.5), labels{1, 0, 1, 1};
  EXPECT_NEAR(loss_concept(half, labels).value, std::log(2.0), 1e-12);
  std::vector<double> perfect{1.0, 0.0, 1.0, 1.0};
  EXPECT_LT(loss_concept(perfect, labels).value, 1e-10);
  std::vector<double> one{std::exp(-1.0)}, r{1.0};
  EXPECT_NEAR(loss_concept(one, r).value, 1.0, 1e-12);
  EXPECT_TRUE(loss_concept(std::vector<double>{}, std::vector<double>{}).empty);
}

TEST(TotalLoss, Arithmetic) {
  EXPECT_EQ(total_loss(1.0, 2.0, 1.0), 3.0);
  EXPECT_EQ(total_loss(2.0, 2.0, 0.5), 3.0);
  EXPECT_EQ(total_loss(1.25, 7.0, 0.0), 1.25);
}

TEST(TurnLoss, GradientMatchesFiniteDifferences) {
  EgatConfig c = small_config(4);
  EgatParams p = random_params(c, 25);
  std::mt19937_64 rng(26);
  GraphInput in = testing::random_graph_input(rng, 5, 2, 4, 4);
  std::vector<double> labels(in.concept_nodes.size());
  for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<double>(i % 2);
  auto f = [&](Tape &tape) { return turn_loss(tape, in, bind(tape, p), c, 1, labels).total; };
  std::vector<nd::Parameter *> params = p.all();
  nd::GradCheckReport report = nd::grad_check(f, params, 1e-5);
  EXPECT_LT(report.max_relative_error, 1e-4) << report.worst;
}

TEST(TurnLoss, BetaZeroIsSentenceLoss) {
  EgatConfig c = small_config(4);
  c.beta = 0.0;
  EgatParams p = random_params(c, 27);
  std::mt19937_64 rng(28);
  GraphInput in = testing::random_graph_input(rng, 6, 3, 4, 5);
  std::vector<double> labels(in.concept_nodes.size(), 1.0);
  Tape tape;
  TurnLoss l = turn_loss(tape, in, bind(tape, p), c, 0, labels);
  EXPECT_EQ(l.total.item(), l.sentence);
  EXPECT_GT(l.concept_value, 0.0);
}

TEST(Params, InitIsSeeded) {
  EgatConfig c = small_config();
  EgatParams a = EgatParams::init(c, 5), b = EgatParams::init(c, 5), d = EgatParams::init(c, 6);
  EXPECT_EQ(a.wq.value, b.wq.value);
  EXPECT_NE(a.wq.value, d.wq.value);
  EXPECT_EQ(a.all().size(), 23u);
}

TEST(Params, SaveLoadIsBitwise) {
  EgatConfig c = small_config();
  EgatParams p = random_params(c, 29);
  auto path = std::filesystem::temp_directory_path() / "egat_params_test.ckpt";
  p.save(path.string());
  EgatParams back = EgatParams::load(path.string());
  auto a = p.all();
  auto b = back.all();
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->name, b[i]->name);
    EXPECT_EQ(a[i]->value, b[i]->value);
  }
  std::filesystem::remove(path);
  EXPECT_THROW(EgatParams::load((path.parent_path() / "no_such.ckpt").string()), Error);
}

TEST(PackGraph, ContextNodesAndCollapse) {
  DocumentSemanticGraph base = build_document_graph(testing::rango_document(), testing::rango_coref());
  HashEncoder encoder(4, 1);
  std::vector<CorpusDocument> docs{testing::rango_document()};
  TableEmbeddingSource source(hash_embed_corpus(docs, encoder));
  EmbeddingTable table = init_node_embeddings(base, source);
  DialogTurn turn;
  turn.dialog_id = "d";
  turn.candidates = {{"s1", "a"}, {"s2", "b"}, {"s4", "c"}};
  DialogGraph g = build_dialog_graph(base, turn, HashContextEncoder(encoder));

  std::vector<int> keep{2, 0};
  GraphInput in = pack_graph(g, table, keep);
  EXPECT_EQ(in.num_nodes(), base.nodes.size() + 2);
  EXPECT_EQ(in.num_edges(), base.edges.size() + 4);
  EXPECT_EQ(in.context_candidates, keep);
  EXPECT_EQ(in.node_types.back(), static_cast<int>(NodeType::kContext));
  EXPECT_EQ(in.edge_dst[base.edges.size()], base.sentence_node("s4"));
  EXPECT_EQ(static_cast<int>(in.concept_nodes.size()), base.count(NodeType::kConcept));
  EXPECT_EQ(in.features.row_vector(in.num_nodes() - 1), g.context_nodes[0].embedding);

  GraphInput flat = pack_graph(g, table, {}, true);
  EXPECT_EQ(flat.num_nodes(), base.nodes.size() + 3);
  for (int t : flat.node_types) EXPECT_EQ(t, 0);
  for (int t : flat.edge_types) EXPECT_EQ(t, 0);
}

}  // namespace
}  // namespace docgraph
