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


#include "docgraph/dialog.h"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "docgraph/error.h"
#include "test_util.h"

namespace docgraph {
namespace {

std::vector<Utterance> history(int n) {
  std::vector<Utterance> h;
  for (int i = 1; i <= n; ++i) h.push_back({i % 2 ? "user" : "system", "t" + std::to_string(i), {}});
  return h;
}

std::vector<DialogTurn> rango_turns() {
  std::ifstream in(testing::data_path("rango/dialogs.jsonl"));
  return parse_dialogs(in);
}

// Context vectors that record which candidate they belong to.
class IndexEncoder : public ContextEncoder {
 public:
  int dim() const override { return 2; }
  Vector encode(const DialogTurn &turn, const Candidate &c, std::string_view) const override {
    return {static_cast<double>(turn.candidate_index(c.sentence_id)), 1.0};
  }
};

TEST(MakeContext, Window) {
  EXPECT_EQ(make_context(history(5), 2), "S: t4 U: t5");
  EXPECT_EQ(make_context(history(1), 2), "U: t1");
  EXPECT_EQ(make_context({}, 2), "");
  EXPECT_EQ(make_context(history(3), 5), "U: t1 S: t2 U: t3");
  EXPECT_THROW(make_context(history(2), 0), Error);
}

TEST(ParseDialogs, Fixture) {
  std::vector<DialogTurn> turns = rango_turns();
  ASSERT_EQ(turns.size(), 2u);
  EXPECT_EQ(turns[0].key(), "d1:0");
  EXPECT_EQ(turns[0].history.size(), 3u);
  EXPECT_EQ(turns[0].gold_sentence(), "s2");
  EXPECT_EQ(turns[1].gold_sentence(), "s4");
  EXPECT_EQ(turns[1].gold_span->end, 5);
  std::istringstream again(dialog_to_json_line(turns[1]) + "\n");
  DialogTurn back = parse_dialogs(again).front();
  EXPECT_EQ(back.key(), turns[1].key());
  EXPECT_EQ(back.candidates.size(), 4u);
  EXPECT_EQ(back.gold_span->sentence_id, "s4");
}

TEST(ParseDialogs, GoldOutsideCandidatesNamesLine) {
  std::istringstream in(
      "\n{\"dialog_id\": \"d\", \"turn_index\": 0, \"history\": [], \"candidates\": [{\"sentence_id\": \"s1\"}], "
      "\"gold_sentence_id\": \"s7\"}\n");
  try {
    parse_dialogs(in, "x.jsonl");
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("x.jsonl:2"), std::string::npos) << e.what();
  }
}

TEST(BuildDialogGraph, OneContextNodePerCandidate) {
  DocumentSemanticGraph base = build_document_graph(testing::rango_document(), testing::rango_coref());
  DialogTurn turn = rango_turns()[0];
  turn.candidates.pop_back();
  DialogGraph g = build_dialog_graph(base, turn, IndexEncoder());
  ASSERT_EQ(g.context_nodes.size(), 3u);
  EXPECT_EQ(g.context_edges.size(), 6u);
  for (size_t i = 0; i < 3; ++i) {
    int ctx = g.context_node_index(i);
    EXPECT_EQ(ctx, static_cast<int>(base.nodes.size() + i));
    EXPECT_EQ(g.context_nodes[i].embedding[0], static_cast<double>(i));
    EXPECT_EQ(g.context_edges[2 * i], (Edge{ctx, EdgeType::kContextLink, g.context_nodes[i].sentence_node, {}}));
    EXPECT_EQ(g.context_edges[2 * i + 1], (Edge{g.context_nodes[i].sentence_node, EdgeType::kContextLink, ctx, {}}));
  }
  EXPECT_EQ(g.context_nodes[1].id, "ctx:s2");
}

TEST(BuildDialogGraph, UnknownSentence) {
  DocumentSemanticGraph base = build_document_graph(testing::rango_document(), testing::rango_coref());
  DialogTurn turn = rango_turns()[0];
  turn.candidates.push_back({"s99", ""});
  try {
    build_dialog_graph(base, turn, IndexEncoder());
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownSentence);
    EXPECT_NE(std::string(e.what()).find("s99"), std::string::npos);
  }
}

TEST(BuildDialogGraph, MissingPrecomputedPair) {
  DocumentSemanticGraph base = build_document_graph(testing::rango_document(), testing::rango_coref());
  DialogTurn turn = rango_turns()[0];
  EmbeddingFile f;
  f.dim = 2;
  for (const auto &c : turn.candidates) {
    if (c.sentence_id != "s3") f.records.push_back({PrecomputedContextEncoder::key(turn, c.sentence_id), {{1, 2}, {}}});
  }
  PrecomputedContextEncoder encoder(f);
  try {
    build_dialog_graph(base, turn, encoder);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingContextEmbedding);
  }
}

TEST(DeriveLabels, SpanContainment) {
  DocumentSemanticGraph base = build_document_graph(testing::rango_document(), testing::rango_coref());
  std::vector<DialogTurn> turns = rango_turns();

  // Span s4[0,5) contains the merged Rango mention and the sheriff.
  LabelSet span = derive_labels(turns[1], base);
  EXPECT_EQ(span.positive_candidate, 3);
  EXPECT_EQ(span.positive_context_id, "ctx:s4");
  EXPECT_EQ(span.concept_relevance.at(base.find_node("s1/r")), 1);
  EXPECT_EQ(span.concept_relevance.at(base.find_node("s4/s")), 1);
  EXPECT_EQ(span.concept_relevance.at(base.find_node("s3/t")), 0);
  EXPECT_EQ(static_cast<int>(span.concept_relevance.size()), base.count(NodeType::kConcept));

  DialogTurn narrow = turns[1];
  narrow.gold_span = GoldSpan{"s4", 3, 5};
  LabelSet n = derive_labels(narrow, base);
  EXPECT_EQ(n.concept_relevance.at(base.find_node("s1/r")), 0);
  EXPECT_EQ(n.concept_relevance.at(base.find_node("s4/s")), 1);

  // No span: the whole gold sentence counts; s2 only mentions the merged node.
  LabelSet whole = derive_labels(turns[0], base);
  int relevant = 0;
  for (const auto &[node, r] : whole.concept_relevance) relevant += r;
  EXPECT_EQ(relevant, 1);
  EXPECT_EQ(whole.concept_relevance.at(base.find_node("s1/r")), 1);

  DialogTurn unlabeled = turns[0];
  unlabeled.gold_sentence_id.reset();
  try {
    derive_labels(unlabeled, base);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoGoldLabel);
  }
}

}  // namespace
}  // namespace docgraph
