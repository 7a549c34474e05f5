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

#ifndef DOCGRAPH_EMBEDDINGS_H_
#define DOCGRAPH_EMBEDDINGS_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "docgraph/amr.h"
#include "docgraph/semgraph.h"

namespace docgraph {

using Vector = std::vector<double>;

// Contextual embeddings of one sentence: the [CLS]-style sentence vector and
// one vector per token.
struct SentenceEmbedding {
  Vector cls;
  std::vector<Vector> tokens;
};

// Little-endian binary file: u32 record_count, u32 dim, then per record a
// u32-length-prefixed UTF-8 key, `dim` f32 values, u32 token_count and
// token_count * dim f32 values.
struct EmbeddingFile {
  int dim = 0;
  std::vector<std::pair<std::string, SentenceEmbedding>> records;
};

EmbeddingFile read_embedding_file(std::istream &in);
void write_embedding_file(std::ostream &out, const EmbeddingFile &file);
EmbeddingFile load_embedding_file(const std::string &path);
void save_embedding_file(const std::string &path, const EmbeddingFile &file);

class EmbeddingSource {
 public:
  virtual ~EmbeddingSource() = default;
  virtual int dim() const = 0;
  // nullptr when the sentence is unknown.
  virtual const SentenceEmbedding *find(std::string_view sentence_id) const = 0;
};

class TableEmbeddingSource : public EmbeddingSource {
 public:
  explicit TableEmbeddingSource(EmbeddingFile file);
  int dim() const override { return file_.dim; }
  const SentenceEmbedding *find(std::string_view sentence_id) const override;

 private:
  EmbeddingFile file_;
  std::map<std::string, size_t, std::less<>> index_;
};

// Deterministic stand-in for a pretrained encoder: every lowercased token
// maps to a fixed pseudo-random vector derived from (seed, token).
class HashEncoder {
 public:
  HashEncoder(int dim, uint64_t seed);

  int dim() const { return dim_; }
  Vector token_vector(std::string_view token) const;
  SentenceEmbedding encode_sentence(const std::vector<std::string> &tokens) const;
  // Mean of candidate tokens and mean of context tokens, concatenated and
  // projected back to `dim` by a fixed seeded matrix.
  Vector encode_pair(std::string_view candidate, std::string_view context) const;

 private:
  int dim_;
  uint64_t seed_;
  std::vector<double> projection_;  // dim x 2*dim, row-major
};

// Embeds every sentence of the given documents with a HashEncoder.
EmbeddingFile hash_embed_corpus(const std::vector<CorpusDocument> &docs, const HashEncoder &encoder);

struct EmbeddingTable {
  int dim = 0;
  // Aligned with the graph's node list.
  std::vector<std::string> node_ids;
  std::vector<Vector> vectors;

  const Vector &at(std::string_view node_id) const;
};

// Sentence nodes take the sentence vector, concept nodes the mean token
// vector over all provenance spans pooled together (sentence vector when a
// concept has no grounded mention), source nodes the mean of their
// sentences.
EmbeddingTable init_node_embeddings(const DocumentSemanticGraph &graph, const EmbeddingSource &source);

// Lowercase, split on non-alphanumeric characters.
std::vector<std::string> simple_tokenize(std::string_view text);

uint64_t fnv1a64(std::string_view text, uint64_t seed = 0);

}  // namespace docgraph

#endif  // DOCGRAPH_EMBEDDINGS_H_
