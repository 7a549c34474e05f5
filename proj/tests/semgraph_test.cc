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


#include "docgraph/semgraph.h"

#include <gtest/gtest.h>

#include "docgraph/error.h"
#include "test_util.h"

namespace docgraph {
namespace {

using testing::document_from;
using testing::rango_coref;
using testing::rango_document;

const char *kTwoSentences =
    "# ::id s1\n# ::tok the boy wants to go\n"
    "(w / want-01~e.2 :ARG0 (b / boy~e.1) :ARG1 (g / go-02~e.4 :ARG0 b))\n\n"
    "# ::id s2\n# ::tok a girl sleeps\n"
    "(s / sleep-01~e.2 :ARG0 (g / girl~e.1))\n";

int edge_between(const DocumentSemanticGraph &g, const std::string &a, EdgeType type, const std::string &b) {
  int ia = g.find_node(a), ib = g.find_node(b);
  int n = 0;
  for (const Edge &e : g.edges) n += e.src == ia && e.dst == ib && e.type == type;
  return n;
}

TEST(EdgeTypes, InverseIsInvolution) {
  for (int t = 0; t < kNumEdgeTypes; ++t) {
    EdgeType type = static_cast<EdgeType>(t);
    EXPECT_EQ(inverse(inverse(type)), type);
    EXPECT_EQ(edge_type_from_name(edge_type_name(type)), type);
  }
  EXPECT_EQ(inverse(EdgeType::kArg0), EdgeType::kArg0Inv);
  EXPECT_EQ(inverse(EdgeType::kSentenceMembership), EdgeType::kSentenceMembership);
  EXPECT_EQ(inverse(EdgeType::kNarrativeNext), EdgeType::kNarrativePrev);
}

TEST(EdgeTypes, BucketRole) {
  EXPECT_EQ(bucket_role(":ARG0"), EdgeType::kArg0);
  EXPECT_EQ(bucket_role("ARG5"), EdgeType::kArg5);
  EXPECT_EQ(bucket_role(":mod"), EdgeType::kMod);
  EXPECT_EQ(bucket_role(":location"), EdgeType::kOtherRole);
  EXPECT_EQ(bucket_role(":ARG7"), EdgeType::kOtherRole);
}

TEST(ExtractMentions, WantFixture) {
  AmrGraph amr = parse_amr("(w / want-01 :ARG0 (b / boy~e.1) :ARG1 (g / go-02~e.3 :ARG0 b))");
  std::vector<std::string> tokens{"the", "boy", "wants", "go"};
  std::vector<Mention> m = extract_mentions(amr, tokens);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].variable, "b");
  EXPECT_EQ(m[0].start, 1);
  EXPECT_EQ(m[0].end, 2);
  EXPECT_EQ(m[1].variable, "g");
  EXPECT_EQ(m[1].surface, "go");
}

TEST(ExtractMentions, ModOnlyGraphHasNone) {
  AmrGraph amr = parse_amr("(h / house~e.1 :mod (b / big~e.0))");
  EXPECT_TRUE(extract_mentions(amr, {"big", "house"}).empty());
}

TEST(ExtractMentions, NamedEntitySpan) {
  AmrGraph amr = parse_amr("(r / run-01~e.1 :ARG0 (p / person :name (n / name :op1 \"Rango\"~e.0)))");
  std::vector<Mention> m = extract_mentions(amr, {"Rango", "runs"});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].variable, "p");
  EXPECT_EQ(m[0].start, 0);
  EXPECT_EQ(m[0].end, 1);
  EXPECT_EQ(m[0].surface, "Rango");
}

TEST(ExtractMentions, InverseRoleMarksSource) {
  AmrGraph amr = parse_amr("(l / lizard~e.0 :ARG0-of (w / wear-01~e.1))");
  std::vector<Mention> m = extract_mentions(amr, {"lizard", "wearing"});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].variable, "l");
}

TEST(ExtractMentions, UnalignedFillerIsReported) {
  AmrGraph amr = parse_amr("(w / want-01 :ARG0 (b / boy))");
  std::vector<std::string> diag;
  EXPECT_TRUE(extract_mentions(amr, {"x"}, &diag).empty());
  EXPECT_EQ(diag.size(), 1u);
}

TEST(BuildGraph, TwoSentencesNoCoref) {
  CorpusDocument doc = document_from(kTwoSentences);
  DocumentSemanticGraph g = build_document_graph(doc, {});
  EXPECT_EQ(g.count(NodeType::kSource), 1);
  EXPECT_EQ(g.count(NodeType::kSentence), 2);
  EXPECT_EQ(g.count(NodeType::kConcept), 5);
  EXPECT_EQ(edge_between(g, "s1", EdgeType::kNarrativeNext, "s2"), 1);
  EXPECT_EQ(edge_between(g, "s2", EdgeType::kNarrativePrev, "s1"), 1);
  for (const Node &n : g.nodes) {
    if (n.type != NodeType::kConcept) continue;
    EXPECT_EQ(edge_between(g, n.sentence_id, EdgeType::kSentenceMembership, n.id), 1) << n.id;
  }
  EXPECT_EQ(edge_between(g, "s1/w", EdgeType::kArg0, "s1/b"), 1);
  EXPECT_EQ(edge_between(g, "s1/b", EdgeType::kArg0Inv, "s1/w"), 1);
  EXPECT_EQ(edge_between(g, "s1/g", EdgeType::kArg0, "s1/b"), 1);
  EXPECT_NO_THROW(g.validate());
}

TEST(BuildGraph, CoreferenceMergeKeepsLongestMention) {
  CorpusDocument doc = rango_document();
  CorefClusters coref;
  coref.clusters = {{{"s1", 0, 3}, {"s2", 0, 1}}};
  GraphDiagnostics diag;
  DocumentSemanticGraph merged = build_document_graph(doc, coref, GraphVariant::kFull, &diag);
  DocumentSemanticGraph plain = build_document_graph(doc, {});
  EXPECT_EQ(merged.nodes.size() + 1, plain.nodes.size());
  EXPECT_EQ(diag.merges, 1);
  int node = merged.find_node("s1/r");
  ASSERT_GE(node, 0);
  EXPECT_EQ(merged.nodes[static_cast<size_t>(node)].name, "Rango the lizard");
  EXPECT_EQ(merged.nodes[static_cast<size_t>(node)].members.size(), 2u);
  EXPECT_EQ(merged.find_node("s2/h"), -1);
  EXPECT_EQ(edge_between(merged, "s2/f", EdgeType::kArg1, "s1/r"), 1);
  EXPECT_NO_THROW(merged.validate());
}

TEST(BuildGraph, EmptyClusterListIsNoOp) {
  CorpusDocument doc = rango_document();
  CorefClusters none;
  none.doc_id = "rango";
  EXPECT_TRUE(graphs_isomorphic(build_document_graph(doc, none), build_document_graph(doc, {})));
}

// Hand count of the fixture: 2 sources, 4 sentences, 16 AMR variables of
// which three corefer, 34 undirected relations.
TEST(BuildGraph, FixtureCounts) {
  DocumentSemanticGraph g = build_document_graph(rango_document(), rango_coref());
  EXPECT_EQ(g.count(NodeType::kSource), 2);
  EXPECT_EQ(g.count(NodeType::kSentence), 4);
  EXPECT_EQ(g.count(NodeType::kConcept), 14);
  EXPECT_EQ(g.edges.size(), 68u);
  EXPECT_EQ(g.count(EdgeType::kSourceContains), 4);
  EXPECT_EQ(g.count(EdgeType::kNarrativeNext), 2);
  EXPECT_EQ(g.count(EdgeType::kSentenceMembership), 32);
  EXPECT_EQ(edge_between(g, "s3", EdgeType::kNarrativeNext, "s4"), 0);
}

TEST(BuildGraph, UnresolvableMentionIsDropped) {
  CorefClusters coref;
  coref.clusters = {{{"s1", 0, 3}, {"s3", 6, 7}, {"s9", 0, 1}}};
  GraphDiagnostics diag;
  build_document_graph(rango_document(), coref, GraphVariant::kFull, &diag);
  EXPECT_EQ(diag.dropped_mentions, 2);
  EXPECT_EQ(diag.merges, 0);
}

TEST(Variants, Definitions) {
  DocumentSemanticGraph full = build_document_graph(rango_document(), rango_coref());
  DocumentSemanticGraph sentence = apply_variant(full, GraphVariant::kSentenceOnly);
  EXPECT_EQ(sentence.count(NodeType::kConcept), 0);
  EXPECT_EQ(sentence.nodes.size(), 6u);
  EXPECT_NO_THROW(sentence.validate());

  DocumentSemanticGraph coref = apply_variant(full, GraphVariant::kCorefOnly);
  for (const Edge &e : coref.edges) EXPECT_FALSE(is_arg_edge(e.type));
  EXPECT_EQ(coref.count(EdgeType::kSentenceMembership), full.count(EdgeType::kSentenceMembership));
  EXPECT_NO_THROW(coref.validate());

  DocumentSemanticGraph homo = apply_variant(full, GraphVariant::kHomogeneous);
  EXPECT_EQ(homo.nodes.size(), full.nodes.size());
  EXPECT_EQ(homo.edges.size(), full.edges.size());
  for (size_t i = 0; i < homo.nodes.size(); ++i) EXPECT_EQ(homo.node_type_id(static_cast<int>(i)), 0);
  for (size_t i = 0; i < homo.edges.size(); ++i) EXPECT_EQ(homo.edge_type_id(static_cast<int>(i)), 0);

  DocumentSemanticGraph built = build_document_graph(rango_document(), rango_coref(), GraphVariant::kSentenceOnly);
  EXPECT_TRUE(graphs_isomorphic(built, sentence));
}

TEST(Variants, NamesRoundTrip) {
  for (auto v : {GraphVariant::kFull, GraphVariant::kSentenceOnly, GraphVariant::kCorefOnly,
                 GraphVariant::kHomogeneous}) {
    EXPECT_EQ(variant_from_name(variant_name(v)), v);
  }
  EXPECT_EQ(variant_from_name("sentence"), GraphVariant::kSentenceOnly);
}

TEST(Validate, RejectsMissingInverse) {
  DocumentSemanticGraph g = build_document_graph(rango_document(), rango_coref());
  g.edges.pop_back();
  try {
    g.validate();
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidGraph);
  }
}

TEST(LinearizePaths, Examples) {
  DocumentSemanticGraph g = build_document_graph(document_from(kTwoSentences), {});
  EXPECT_TRUE(linearize_paths(g, "s1", 0).empty());
  std::vector<PathTuple> paths = linearize_paths(g, "s1", 2);
  EXPECT_NE(std::find(paths.begin(), paths.end(), PathTuple{{"want-01", "ARG0", "boy"}}), paths.end());
  EXPECT_NE(std::find(paths.begin(), paths.end(), PathTuple{{"go", "ARG0", "boy"}}), paths.end());

  DocumentSemanticGraph rango = build_document_graph(rango_document(), rango_coref());
  std::vector<PathTuple> s4 = linearize_paths(rango, "s4", 2);
  EXPECT_NE(std::find(s4.begin(), s4.end(), PathTuple{{"new", "sheriff"}}), s4.end());
  EXPECT_NE(std::find(s4.begin(), s4.end(), PathTuple{{"become-01", "ARG1", "Rango the lizard"}}), s4.end());
  EXPECT_THROW(linearize_paths(rango, "s9", 1), Error);
}

TEST(GraphJson, RoundTrip) {
  DocumentSemanticGraph g = build_document_graph(rango_document(), rango_coref());
  DocumentSemanticGraph back = graph_from_json(graph_to_json(g));
  EXPECT_TRUE(graphs_isomorphic(g, back));
  EXPECT_EQ(back.edges, g.edges);
  EXPECT_EQ(graph_to_json(back), graph_to_json(g));
}

TEST(Coref, SerializeRoundTrip) {
  CorefClusters c = rango_coref();
  CorefClusters back = parse_coref(serialize_coref(c));
  EXPECT_EQ(back.doc_id, "rango");
  ASSERT_EQ(back.clusters.size(), 1u);
  EXPECT_EQ(back.clusters[0].size(), 3u);
  EXPECT_EQ(back.clusters[0][0].end, 3);
  EXPECT_THROW(parse_coref("{\"clusters\": 3}"), Error);
}

}  // namespace
}  // namespace docgraph
