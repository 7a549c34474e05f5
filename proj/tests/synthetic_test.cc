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


#include "docgraph/synthetic.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "docgraph/config.h"
#include "docgraph/error.h"

namespace docgraph {
namespace {

SyntheticConfig small() {
  SyntheticConfig c;
  c.docs = 3;
  c.sentences_per_doc = 6;
  c.turns_per_doc = 3;
  c.background_sentences = 2;
  c.dim = 8;
  return c;
}

std::string bytes(const EmbeddingFile &f) {
  std::ostringstream out;
  write_embedding_file(out, f);
  return out.str();
}

std::set<int> concepts_of(const DocumentSemanticGraph &g, int sentence) {
  std::set<int> out;
  for (const Edge &e : g.edges) {
    if (e.type == EdgeType::kSentenceMembership && e.src == sentence && g.nodes[e.dst].type == NodeType::kConcept) {
      out.insert(e.dst);
    }
  }
  return out;
}

TEST(Synthetic, SameSeedSameData) {
  SyntheticDataset a = gen_synthetic(9, small()), b = gen_synthetic(9, small());
  ASSERT_EQ(a.docs.size(), b.docs.size());
  for (size_t i = 0; i < a.docs.size(); ++i) {
    ASSERT_EQ(a.docs[i].sentences.size(), b.docs[i].sentences.size());
    for (size_t j = 0; j < a.docs[i].sentences.size(); ++j) {
      EXPECT_EQ(a.docs[i].sentences[j].tokens, b.docs[i].sentences[j].tokens);
    }
  }
  EXPECT_EQ(a.turn_entities, b.turn_entities);
  EXPECT_EQ(bytes(a.node_embeddings), bytes(b.node_embeddings));
  EXPECT_EQ(bytes(a.context_embeddings), bytes(b.context_embeddings));
  EXPECT_NE(bytes(gen_synthetic(10, small()).node_embeddings), bytes(a.node_embeddings));
}

TEST(Synthetic, Shape) {
  SyntheticDataset d = gen_synthetic(1, small());
  ASSERT_EQ(d.docs.size(), 3u);
  EXPECT_EQ(d.docs[0].sentences.size(), 8u);
  EXPECT_EQ(d.turns.size(), 9u);
  EXPECT_EQ(d.turn_entities.size(), d.turns.size());
  EXPECT_EQ(d.node_embeddings.dim, 8);
  for (const DialogTurn &t : d.turns) {
    EXPECT_EQ(t.candidates.size(), 3u);
    ASSERT_TRUE(t.gold_sentence_id.has_value());
    ASSERT_TRUE(t.gold_span.has_value());
    EXPECT_EQ(t.gold_span->sentence_id, *t.gold_sentence_id);
  }
}

TEST(Synthetic, GoldSharesAMergedConceptWithTheAskedEntity) {
  SyntheticDataset d = gen_synthetic(2, small());
  std::map<std::string, DocumentSemanticGraph> graphs;
  for (size_t i = 0; i < d.docs.size(); ++i) graphs[d.docs[i].doc_id] = build_document_graph(d.docs[i], d.coref[i]);
  for (size_t i = 0; i < d.turns.size(); ++i) {
    const DialogTurn &t = d.turns[i];
    const std::string doc = t.gold_sentence_id->substr(0, t.gold_sentence_id->find('.'));
    const DocumentSemanticGraph &g = graphs.at(doc);
    std::set<int> gold = concepts_of(g, g.sentence_node(*t.gold_sentence_id));
    bool shared = false;
    for (int c : gold) shared |= g.nodes[c].name == d.turn_entities[i];
    EXPECT_TRUE(shared) << t.key();
    for (const Candidate &c : t.candidates) {
      if (c.sentence_id == *t.gold_sentence_id) continue;
      for (int n : concepts_of(g, g.sentence_node(c.sentence_id))) EXPECT_NE(g.nodes[n].name, d.turn_entities[i]);
    }
  }
}

TEST(Synthetic, NoCorefGivesSingletons) {
  SyntheticConfig c = small();
  c.coref_rate = 0.0;
  SyntheticDataset d = gen_synthetic(2, c);
  for (const CorefClusters &cc : d.coref) {
    for (const auto &cluster : cc.clusters) EXPECT_LT(cluster.size(), 2u);
  }
  GraphDiagnostics diag;
  build_document_graph(d.docs[0], d.coref[0], GraphVariant::kFull, &diag);
  EXPECT_EQ(diag.merges, 0);
}

TEST(Synthetic, InvalidConfig) {
  SyntheticConfig c = small();
  c.sentences_per_doc = 1;
  EXPECT_THROW(gen_synthetic(1, c), Error);
  c = small();
  c.docs = 0;
  EXPECT_THROW(gen_synthetic(1, c), Error);
}

TEST(Synthetic, WrittenFilesLoadBack) {
  SyntheticDataset d = gen_synthetic(4, small());
  auto dir = std::filesystem::temp_directory_path() / "docgraph_synthetic_test";
  std::filesystem::remove_all(dir);
  write_synthetic(d, dir);
  RunPaths paths;
  paths.corpus = (dir / "corpus.amr").string();
  paths.manifest = (dir / "manifest.json").string();
  paths.coref = (dir / "coref.jsonl").string();
  paths.embeddings = (dir / "embeddings.bin").string();
  paths.context_embeddings = (dir / "context_embeddings.bin").string();
  paths.dialogs = (dir / "dialogs.jsonl").string();
  Dataset back = load_dataset(paths, true);
  ASSERT_EQ(back.docs.size(), d.docs.size());
  EXPECT_EQ(back.docs[1].sentences.back().tokens, d.docs[1].sentences.back().tokens);
  EXPECT_EQ(back.docs[0].passages.size(), d.docs[0].passages.size());
  EXPECT_EQ(back.coref.size(), d.coref.size());
  EXPECT_EQ(back.turns.size(), d.turns.size());
  EXPECT_EQ(back.turns[2].gold_sentence_id, d.turns[2].gold_sentence_id);
  EXPECT_EQ(bytes(back.node_embeddings), bytes(d.node_embeddings));
  EXPECT_EQ(bytes(back.context_embeddings), bytes(d.context_embeddings));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace docgraph
