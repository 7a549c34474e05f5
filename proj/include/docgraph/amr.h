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

#ifndef DOCGRAPH_AMR_H_
#define DOCGRAPH_AMR_H_

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docgraph {

struct AmrVariable {
  std::string name;
  std::string concept_label;

  bool operator==(const AmrVariable &) const = default;
};

// A role edge as read from PENMAN. Roles are kept verbatim including the
// leading colon and any "-of" suffix. When the target is a constant
// (string literal, number, polarity) `target` holds its text and
// `target_alignment` its optional token alignment.
struct AmrEdge {
  std::string source;
  std::string role;
  std::string target;
  bool target_is_constant = false;
  bool target_is_quoted = false;
  std::vector<int> target_alignment;

  bool operator==(const AmrEdge &) const = default;
};

struct AmrGraph {
  std::string sentence_id;
  std::vector<AmrVariable> variables;
  std::vector<AmrEdge> edges;
  std::map<std::string, std::vector<int>> alignments;
  std::string top;

  const AmrVariable *find_variable(std::string_view name) const;
  bool has_variable(std::string_view name) const { return find_variable(name) != nullptr; }

  // Throws Error(kInvalidGraph) when a type invariant does not hold.
  void validate() const;

  // Number of variables referenced two or more times across edge
  // endpoints and the top position.
  int reentrancy_count() const;
};

// Parses one PENMAN s-expression. Alignment suffixes `~e.i,j` and `~i`
// are accepted on concepts and constants.
AmrGraph parse_amr(std::string_view text);

std::string serialize_amr(const AmrGraph &graph);

// Isomorphism on labeled graphs: same variable/concept pairs, same edge
// multiset (constants compared by text) and same alignments.
bool amr_isomorphic(const AmrGraph &a, const AmrGraph &b);

struct CorpusSentence {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  AmrGraph amr;
  int line = 0;
};

struct Passage {
  std::string id;
  std::vector<std::string> sentence_ids;
};

struct CorpusDocument {
  std::string doc_id;
  std::vector<Passage> passages;
  // Sentences in corpus order.
  std::vector<CorpusSentence> sentences;

  const CorpusSentence *find_sentence(std::string_view id) const;
  int sentence_index(std::string_view id) const;
  void validate() const;
};

// doc_id -> ordered passages.
struct DocumentManifest {
  std::vector<std::pair<std::string, std::vector<Passage>>> documents;
};

DocumentManifest parse_manifest(std::string_view json_text);
std::string serialize_manifest(const DocumentManifest &manifest);

// Reads the blank-line separated block format. Without a manifest every
// sentence goes into a single document named `default_doc_id` with no
// passages. `source_name` is used in diagnostics.
std::vector<CorpusDocument> parse_corpus(std::istream &stream,
                                         const DocumentManifest *manifest = nullptr,
                                         std::string_view source_name = "<corpus>",
                                         std::string_view default_doc_id = "doc");

std::string serialize_corpus_block(const CorpusSentence &sentence);

}  // namespace docgraph

#endif  // DOCGRAPH_AMR_H_
