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

#ifndef DOCGRAPH_DIALOG_H_
#define DOCGRAPH_DIALOG_H_

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docgraph/embeddings.h"
#include "docgraph/semgraph.h"

namespace docgraph {

struct Utterance {
  std::string speaker;
  std::string text;
  std::vector<std::string> tokens;
};

struct Candidate {
  std::string sentence_id;
  std::string text;
};

struct GoldSpan {
  std::string sentence_id;
  int start = 0;
  int end = 0;
};

struct DialogTurn {
  std::string dialog_id;
  int turn_index = 0;
  std::string doc_id;
  std::vector<Utterance> history;
  std::vector<Candidate> candidates;
  std::optional<std::string> gold_sentence_id;
  std::optional<GoldSpan> gold_span;

  // "dialog_id:turn_index"
  std::string key() const;
  int candidate_index(std::string_view sentence_id) const;
  // Gold sentence from gold_sentence_id, else from gold_span.
  std::optional<std::string> gold_sentence() const;
  void validate() const;
};

// One JSON object per line.
std::vector<DialogTurn> parse_dialogs(std::istream &in, std::string_view source_name = "<dialogs>");
std::string dialog_to_json_line(const DialogTurn &turn);

// The last `window` utterances, oldest first, each prefixed with `U:` (user)
// or `S:` (any other speaker) and joined by single spaces.
std::string make_context(const std::vector<Utterance> &history, int window = 2);

// Produces the initial embedding of a context node from a candidate
// sentence and the dialog context.
class ContextEncoder {
 public:
  virtual ~ContextEncoder() = default;
  virtual int dim() const = 0;
  virtual Vector encode(const DialogTurn &turn, const Candidate &candidate, std::string_view context) const = 0;
};

// Looks vectors up by "dialog_id:turn_index:sentence_id" in an embedding
// file (sentence vector slot).
class PrecomputedContextEncoder : public ContextEncoder {
 public:
  explicit PrecomputedContextEncoder(EmbeddingFile file);
  int dim() const override { return file_.dim; }
  Vector encode(const DialogTurn &turn, const Candidate &candidate, std::string_view context) const override;

  static std::string key(const DialogTurn &turn, std::string_view sentence_id);

 private:
  EmbeddingFile file_;
  std::map<std::string, size_t, std::less<>> index_;
};

class HashContextEncoder : public ContextEncoder {
 public:
  explicit HashContextEncoder(HashEncoder encoder) : encoder_(std::move(encoder)) {}
  int dim() const override { return encoder_.dim(); }
  Vector encode(const DialogTurn &turn, const Candidate &candidate, std::string_view context) const override;

 private:
  HashEncoder encoder_;
};

struct ContextNode {
  std::string id;  // "ctx:<sentence_id>"
  std::string sentence_id;
  int sentence_node = -1;
  Vector embedding;
};

struct LabelSet {
  int positive_candidate = -1;
  std::string positive_context_id;
  // Concept node index -> relevance in {0, 1}, for every concept node.
  std::map<int, int> concept_relevance;
};

// The base graph plus one context node per candidate. Context node i has
// index base->nodes.size() + i in the combined numbering used by
// `context_edges`.
struct DialogGraph {
  const DocumentSemanticGraph *base = nullptr;
  std::string turn_key;
  std::vector<ContextNode> context_nodes;
  std::vector<Edge> context_edges;
  std::optional<LabelSet> labels;

  int context_node_index(size_t i) const { return static_cast<int>(base->nodes.size() + i); }
};

DialogGraph build_dialog_graph(const DocumentSemanticGraph &base, const DialogTurn &turn,
                               const ContextEncoder &encoder, int window = 2);

// Throws Error(kNoGoldLabel) for turns without any gold annotation.
LabelSet derive_labels(const DialogTurn &turn, const DocumentSemanticGraph &base);

}  // namespace docgraph

#endif  // DOCGRAPH_DIALOG_H_
