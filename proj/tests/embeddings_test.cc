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


#include "docgraph/embeddings.h"

#include <gtest/gtest.h>

#include <sstream>

#include "docgraph/error.h"
#include "test_util.h"

namespace docgraph {
namespace {

EmbeddingFile two_token_file() {
  EmbeddingFile f;
  f.dim = 2;
  f.records.push_back({"s1", {{9.0, 9.0}, {{1.0, 0.0}, {0.0, 1.0}, {5.0, 5.0}}}});
  return f;
}

DocumentSemanticGraph two_token_graph() {
  CorpusDocument doc = testing::document_from("# ::id s1\n# ::tok big dog runs\n(r / run-01 :ARG0 (d / dog~e.0,1))\n");
  return build_document_graph(doc, {});
}

TEST(InitNodeEmbeddings, ConceptAveragesItsTokens) {
  DocumentSemanticGraph g = two_token_graph();
  TableEmbeddingSource source(two_token_file());
  EmbeddingTable table = init_node_embeddings(g, source);
  EXPECT_EQ(table.at("s1/d"), (Vector{0.5, 0.5}));
  EXPECT_EQ(table.at("s1"), (Vector{9.0, 9.0}));
  EXPECT_EQ(table.at("s1/r"), (Vector{9.0, 9.0}));
  EXPECT_EQ(table.at("source:doc"), (Vector{9.0, 9.0}));
  EXPECT_EQ(table.node_ids.size(), g.nodes.size());
}

TEST(InitNodeEmbeddings, MergedConceptPoolsAllMentions) {
  DocumentSemanticGraph g = build_document_graph(testing::rango_document(), testing::rango_coref());
  HashEncoder encoder(8, 3);
  std::vector<CorpusDocument> docs{testing::rango_document()};
  TableEmbeddingSource source(hash_embed_corpus(docs, encoder));
  EmbeddingTable table = init_node_embeddings(g, source);
  // "Rango the lizard" in s1, "He" in s2, "Rango" in s4.
  std::vector<std::string> tokens{"Rango", "the", "lizard", "He", "Rango"};
  for (size_t k = 0; k < 8; ++k) {
    double mean = 0.0;
    for (const auto &t : tokens) mean += encoder.token_vector(t)[k];
    EXPECT_NEAR(table.at("s1/r")[k], mean / 5.0, 1e-12);
  }
}

TEST(InitNodeEmbeddings, MissingSentence) {
  DocumentSemanticGraph g = two_token_graph();
  g.nodes[1].sentence_id = "s9";
  g.nodes[1].id = "s9";
  TableEmbeddingSource source(two_token_file());
  try {
    init_node_embeddings(g, source);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingEmbedding);
    EXPECT_NE(std::string(e.what()).find("s9"), std::string::npos);
  }
}

TEST(EmbeddingFile, RoundTripAndTruncation) {
  EmbeddingFile f = two_token_file();
  f.records.push_back({"s2", {{0.25, -1.5}, {}}});
  std::stringstream buffer;
  write_embedding_file(buffer, f);
  std::string bytes = buffer.str();
  std::istringstream in(bytes);
  EmbeddingFile back = read_embedding_file(in);
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_EQ(back.dim, 2);
  EXPECT_EQ(back.records[0].second.tokens, f.records[0].second.tokens);
  EXPECT_EQ(back.records[1].second.cls, f.records[1].second.cls);
  std::istringstream cut(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_embedding_file(cut), Error);
}

TEST(HashEncoder, DeterministicAndCaseInsensitive) {
  HashEncoder a(16, 5), b(16, 5), c(16, 6);
  EXPECT_EQ(a.token_vector("Lizard"), b.token_vector("lizard"));
  EXPECT_NE(a.token_vector("lizard"), c.token_vector("lizard"));
  EXPECT_EQ(a.encode_pair("a b", "c"), b.encode_pair("a b", "c"));
  EXPECT_EQ(a.encode_pair("x", "y").size(), 16u);
}

TEST(SimpleTokenize, LowercasesAndSplits) {
  EXPECT_EQ(simple_tokenize("The cat's  hat-2!"), (std::vector<std::string>{"the", "cat", "s", "hat", "2"}));
  EXPECT_TRUE(simple_tokenize(" ,. ").empty());
}

}  // namespace
}  // namespace docgraph
