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

#ifndef DOCGRAPH_SEMGRAPH_H_
#define DOCGRAPH_SEMGRAPH_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docgraph/amr.h"

namespace docgraph {

enum class NodeType { kSource = 0, kSentence, kConcept, kContext };
inline constexpr int kNumNodeTypes = 4;

enum class EdgeType {
  kArg0 = 0, kArg1, kArg2, kArg3, kArg4, kArg5,
  kArg0Inv, kArg1Inv, kArg2Inv, kArg3Inv, kArg4Inv, kArg5Inv,
  kMod, kModInv,
  kOtherRole, kOtherRoleInv,
  kSentenceMembership,
  kNarrativeNext, kNarrativePrev,
  kSourceContains, kSourceContainsInv,
  kContextLink,
};
inline constexpr int kNumEdgeTypes = 22;

// Membership and context links are undirected relations and act as their
// own inverse; every other type has a distinct partner.
EdgeType inverse(EdgeType type);
bool is_forward(EdgeType type);
bool is_role_edge(EdgeType type);
bool is_arg_edge(EdgeType type);

std::string_view node_type_name(NodeType type);
std::string_view edge_type_name(EdgeType type);
NodeType node_type_from_name(std::string_view name);
EdgeType edge_type_from_name(std::string_view name);

// Buckets an AMR role (with or without colon, forward form) to a forward
// edge type: ARG0..ARG5, mod, or OtherRole.
EdgeType bucket_role(std::string_view role);

enum class GraphVariant { kFull, kSentenceOnly, kCorefOnly, kHomogeneous };
std::string_view variant_name(GraphVariant variant);
// Accepts the CLI spellings full|sentence|coref|homogeneous.
GraphVariant variant_from_name(std::string_view name);

struct Mention {
  std::string sentence_id;
  std::string variable;
  int start = 0;  // half-open token span
  int end = 0;
  std::string surface;

  int length() const { return end - start; }
  bool operator==(const Mention &) const = default;
};

struct Node {
  std::string id;
  NodeType type = NodeType::kConcept;
  std::string name;
  // Concept nodes: AMR concept label of the first member variable.
  std::string concept_label;
  // Sentence nodes: the sentence. Concept nodes: sentence of first member.
  std::string sentence_id;
  // Concept nodes: core-role mentions, corpus order.
  std::vector<Mention> provenance;
  // Concept nodes: (sentence_id, variable) of every merged AMR variable.
  std::vector<std::pair<std::string, std::string>> members;
};

struct Edge {
  int src = 0;
  EdgeType type = EdgeType::kSentenceMembership;
  int dst = 0;
  // Forward AMR role without colon for role edges, empty otherwise.
  std::string role;

  bool operator==(const Edge &) const = default;
};

struct CorefMention {
  std::string sentence_id;
  int start = 0;
  int end = 0;
};

struct CorefClusters {
  std::string doc_id;
  std::vector<std::vector<CorefMention>> clusters;
};

CorefClusters parse_coref(std::string_view json_text);
std::string serialize_coref(const CorefClusters &coref);

struct GraphDiagnostics {
  std::vector<std::string> messages;
  int merges = 0;
  int dropped_mentions = 0;
};

struct DocumentSemanticGraph {
  std::string doc_id;
  GraphVariant variant = GraphVariant::kFull;
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  int find_node(std::string_view id) const;
  int sentence_node(std::string_view sentence_id) const;
  int count(NodeType type) const;
  int count(EdgeType type) const;

  // Type id fed to the network; Homogeneous collapses everything to 0.
  int node_type_id(int node) const;
  int edge_type_id(int edge) const;

  // Throws Error(kInvalidGraph) naming the first violated invariant.
  void validate() const;
};

std::vector<Mention> extract_mentions(const AmrGraph &amr, const std::vector<std::string> &tokens,
                                      std::vector<std::string> *diagnostics = nullptr);

DocumentSemanticGraph build_document_graph(const CorpusDocument &doc, const CorefClusters &coref,
                                           GraphVariant variant = GraphVariant::kFull,
                                           GraphDiagnostics *diagnostics = nullptr);

DocumentSemanticGraph apply_variant(const DocumentSemanticGraph &graph, GraphVariant variant);

// Structural equality up to node renumbering, matching nodes by id.
bool graphs_isomorphic(const DocumentSemanticGraph &a, const DocumentSemanticGraph &b);

struct PathTuple {
  // (subject, predicate, object) or (modifier, subject).
  std::vector<std::string> parts;
  bool operator==(const PathTuple &) const = default;
};

std::vector<PathTuple> linearize_paths(const DocumentSemanticGraph &graph,
                                       std::string_view start_sentence_id, int max_hops);

std::string graph_to_json(const DocumentSemanticGraph &graph);
DocumentSemanticGraph graph_from_json(std::string_view json_text);

}  // namespace docgraph

#endif  // DOCGRAPH_SEMGRAPH_H_
