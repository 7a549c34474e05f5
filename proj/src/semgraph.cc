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

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

#include "docgraph/error.h"
#include "json.hpp"

namespace docgraph {
namespace {

constexpr std::array<std::string_view, kNumNodeTypes> kNodeTypeNames = {"Source", "Sentence", "Concept",
                                                                         "Context"};
constexpr std::array<std::string_view, kNumEdgeTypes> kEdgeTypeNames = {
    "Arg0",          "Arg1",           "Arg2",     "Arg3",       "Arg4",
    "Arg5",          "Arg0Inv",        "Arg1Inv",  "Arg2Inv",    "Arg3Inv",
    "Arg4Inv",       "Arg5Inv",        "Mod",      "ModInv",     "OtherRole",
    "OtherRoleInv",  "SentenceMembership", "NarrativeNext", "NarrativePrev", "SourceContains",
    "SourceContainsInv", "ContextLink"};

std::string_view strip_colon(std::string_view role) {
  if (!role.empty() && role.front() == ':') role.remove_prefix(1);
  return role;
}

// Roles that end in "-of" without being inverses.
bool is_lexical_of_role(std::string_view role) {
  return role == "consist-of" || role == "prep-out-of" || role == "prep-on-behalf-of";
}

// Splits ":ARG0-of" into ("ARG0", true).
std::pair<std::string, bool> normalize_role(std::string_view role) {
  role = strip_colon(role);
  if (role.size() > 3 && role.ends_with("-of") && !is_lexical_of_role(role)) {
    return {std::string(role.substr(0, role.size() - 3)), true};
  }
  return {std::string(role), false};
}

int core_role_index(std::string_view role) {
  role = strip_colon(role);
  if (role.size() == 4 && role.starts_with("ARG") && role[3] >= '0' && role[3] <= '5') return role[3] - '0';
  return -1;
}

// Token hull of a variable's alignment, widened by its :name subtree.
std::optional<std::pair<int, int>> variable_span(const AmrGraph &amr, const std::string &var) {
  std::vector<int> indices;
  if (auto it = amr.alignments.find(var); it != amr.alignments.end()) indices = it->second;
  for (const auto &e : amr.edges) {
    if (e.source != var || strip_colon(e.role) != "name" || e.target_is_constant) continue;
    if (auto it = amr.alignments.find(e.target); it != amr.alignments.end()) {
      indices.insert(indices.end(), it->second.begin(), it->second.end());
    }
    for (const auto &op : amr.edges) {
      if (op.source == e.target && op.target_is_constant) {
        indices.insert(indices.end(), op.target_alignment.begin(), op.target_alignment.end());
      }
    }
  }
  if (indices.empty()) return std::nullopt;
  auto [lo, hi] = std::minmax_element(indices.begin(), indices.end());
  return std::make_pair(*lo, *hi + 1);
}

std::string join_span(const std::vector<std::string> &tokens, int start, int end) {
  std::string out;
  for (int i = start; i < end && i < static_cast<int>(tokens.size()); ++i) {
    if (i > start) out += ' ';
    out += tokens[static_cast<size_t>(i)];
  }
  return out;
}

int find_root(std::vector<int> &parent, int x) {
  while (parent[static_cast<size_t>(x)] != x) {
    parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    x = parent[static_cast<size_t>(x)];
  }
  return x;
}

void unite(std::vector<int> &parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  // The smaller (earlier) index stays representative.
  if (a < b) {
    parent[static_cast<size_t>(b)] = a;
  } else {
    parent[static_cast<size_t>(a)] = b;
  }
}

class EdgeSink {
 public:
  explicit EdgeSink(std::vector<Edge> &edges) : edges_(edges) {}

  // Adds the edge and its inverse unless already present.
  void add_pair(int src, EdgeType type, int dst, const std::string &role = {}) {
    add(src, type, dst, role);
    add(dst, inverse(type), src, role);
  }

 private:
  void add(int src, EdgeType type, int dst, const std::string &role) {
    if (seen_.insert({src, static_cast<int>(type), dst}).second) edges_.push_back({src, type, dst, role});
  }

  std::vector<Edge> &edges_;
  std::set<std::tuple<int, int, int>> seen_;
};

}  // namespace

EdgeType inverse(EdgeType type) {
  int t = static_cast<int>(type);
  if (t <= static_cast<int>(EdgeType::kArg5)) return static_cast<EdgeType>(t + 6);
  if (t <= static_cast<int>(EdgeType::kArg5Inv)) return static_cast<EdgeType>(t - 6);
  switch (type) {
    case EdgeType::kMod: return EdgeType::kModInv;
    case EdgeType::kModInv: return EdgeType::kMod;
    case EdgeType::kOtherRole: return EdgeType::kOtherRoleInv;
    case EdgeType::kOtherRoleInv: return EdgeType::kOtherRole;
    case EdgeType::kNarrativeNext: return EdgeType::kNarrativePrev;
    case EdgeType::kNarrativePrev: return EdgeType::kNarrativeNext;
    case EdgeType::kSourceContains: return EdgeType::kSourceContainsInv;
    case EdgeType::kSourceContainsInv: return EdgeType::kSourceContains;
    default: return type;
  }
}

bool is_forward(EdgeType type) {
  switch (type) {
    case EdgeType::kArg0Inv: case EdgeType::kArg1Inv: case EdgeType::kArg2Inv:
    case EdgeType::kArg3Inv: case EdgeType::kArg4Inv: case EdgeType::kArg5Inv:
    case EdgeType::kModInv: case EdgeType::kOtherRoleInv: case EdgeType::kNarrativePrev:
    case EdgeType::kSourceContainsInv:
      return false;
    default:
      return true;
  }
}

bool is_arg_edge(EdgeType type) { return static_cast<int>(type) <= static_cast<int>(EdgeType::kArg5Inv); }

bool is_role_edge(EdgeType type) {
  return static_cast<int>(type) <= static_cast<int>(EdgeType::kOtherRoleInv);
}

std::string_view node_type_name(NodeType type) { return kNodeTypeNames[static_cast<size_t>(type)]; }
std::string_view edge_type_name(EdgeType type) { return kEdgeTypeNames[static_cast<size_t>(type)]; }

NodeType node_type_from_name(std::string_view name) {
  for (size_t i = 0; i < kNodeTypeNames.size(); ++i) {
    if (kNodeTypeNames[i] == name) return static_cast<NodeType>(i);
  }
  throw Error(ErrorCode::kFormat, "unknown node type " + std::string(name));
}

EdgeType edge_type_from_name(std::string_view name) {
  for (size_t i = 0; i < kEdgeTypeNames.size(); ++i) {
    if (kEdgeTypeNames[i] == name) return static_cast<EdgeType>(i);
  }
  throw Error(ErrorCode::kFormat, "unknown edge type " + std::string(name));
}

EdgeType bucket_role(std::string_view role) {
  role = strip_colon(role);
  if (int k = core_role_index(role); k >= 0) return static_cast<EdgeType>(k);
  if (role == "mod") return EdgeType::kMod;
  return EdgeType::kOtherRole;
}

std::string_view variant_name(GraphVariant variant) {
  switch (variant) {
    case GraphVariant::kFull: return "full";
    case GraphVariant::kSentenceOnly: return "sentence";
    case GraphVariant::kCorefOnly: return "coref";
    case GraphVariant::kHomogeneous: return "homogeneous";
  }
  return "full";
}

GraphVariant variant_from_name(std::string_view name) {
  if (name == "full") return GraphVariant::kFull;
  if (name == "sentence") return GraphVariant::kSentenceOnly;
  if (name == "coref") return GraphVariant::kCorefOnly;
  if (name == "homogeneous") return GraphVariant::kHomogeneous;
  throw Error(ErrorCode::kConfig, "unknown graph variant '" + std::string(name) + "'");
}

CorefClusters parse_coref(std::string_view json_text) {
  CorefClusters coref;
  try {
    auto j = nlohmann::json::parse(json_text);
    coref.doc_id = j.value("doc_id", std::string());
    for (const auto &cluster : j.at("clusters")) {
      std::vector<CorefMention> mentions;
      for (const auto &m : cluster) {
        mentions.push_back({m.at("sentence_id").get<std::string>(), m.at("start").get<int>(),
                            m.at("end").get<int>()});
      }
      coref.clusters.push_back(std::move(mentions));
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kFormat, std::string("coreference file: ") + e.what());
  }
  return coref;
}

std::string serialize_coref(const CorefClusters &coref) {
  nlohmann::ordered_json j;
  j["doc_id"] = coref.doc_id;
  j["clusters"] = nlohmann::ordered_json::array();
  for (const auto &cluster : coref.clusters) {
    auto c = nlohmann::ordered_json::array();
    for (const auto &m : cluster) c.push_back({{"sentence_id", m.sentence_id}, {"start", m.start}, {"end", m.end}});
    j["clusters"].push_back(std::move(c));
  }
  return j.dump();
}

int DocumentSemanticGraph::find_node(std::string_view id) const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int DocumentSemanticGraph::sentence_node(std::string_view sentence_id) const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].type == NodeType::kSentence && nodes[i].sentence_id == sentence_id) return static_cast<int>(i);
  }
  return -1;
}

int DocumentSemanticGraph::count(NodeType type) const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [&](const Node &n) { return n.type == type; }));
}

int DocumentSemanticGraph::count(EdgeType type) const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(), [&](const Edge &e) { return e.type == type; }));
}

int DocumentSemanticGraph::node_type_id(int node) const {
  if (variant == GraphVariant::kHomogeneous) return 0;
  return static_cast<int>(nodes[static_cast<size_t>(node)].type);
}

int DocumentSemanticGraph::edge_type_id(int edge) const {
  if (variant == GraphVariant::kHomogeneous) return 0;
  return static_cast<int>(edges[static_cast<size_t>(edge)].type);
}

void DocumentSemanticGraph::validate() const {
  auto fail = [](const std::string &what) { throw Error(ErrorCode::kInvalidGraph, what); };
  const int n = static_cast<int>(nodes.size());
  std::set<std::tuple<int, int, int>> edge_set;
  for (const auto &e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) fail("edge endpoint out of range");
    edge_set.insert({e.src, static_cast<int>(e.type), e.dst});
  }
  for (const auto &e : edges) {
    if (!edge_set.contains({e.dst, static_cast<int>(inverse(e.type)), e.src})) {
      fail("edge " + nodes[static_cast<size_t>(e.src)].id + " -" + std::string(edge_type_name(e.type)) + "-> " +
           nodes[static_cast<size_t>(e.dst)].id + " has no inverse");
    }
  }

  std::vector<int> membership(static_cast<size_t>(n), 0), contained(static_cast<size_t>(n), 0);
  std::vector<int> next_out(static_cast<size_t>(n), -1);
  for (const auto &e : edges) {
    const Node &src = nodes[static_cast<size_t>(e.src)];
    const Node &dst = nodes[static_cast<size_t>(e.dst)];
    if (e.type == EdgeType::kSentenceMembership && src.type == NodeType::kSentence && dst.type == NodeType::kConcept) {
      ++membership[static_cast<size_t>(e.dst)];
    }
    if (e.type == EdgeType::kSourceContains && src.type == NodeType::kSource && dst.type == NodeType::kSentence) {
      ++contained[static_cast<size_t>(e.dst)];
    }
    if (e.type == EdgeType::kNarrativeNext) next_out[static_cast<size_t>(e.src)] = e.dst;
  }

  std::map<int, std::vector<int>> by_source;
  for (int i = 0; i < n; ++i) {
    const Node &node = nodes[static_cast<size_t>(i)];
    switch (node.type) {
      case NodeType::kContext:
        fail("context node " + node.id + " in a document graph");
        break;
      case NodeType::kConcept: {
        if (variant == GraphVariant::kSentenceOnly) fail("concept node in sentence-only graph");
        if (membership[static_cast<size_t>(i)] == 0) fail("concept " + node.id + " has no sentence");
        if (node.members.size() >= 2) {
          if (node.provenance.size() < 2) fail("merged concept " + node.id + " has fewer than 2 mentions");
          const Mention *longest = &node.provenance.front();
          for (const auto &m : node.provenance) {
            if (m.length() > longest->length()) longest = &m;
          }
          if (node.name != longest->surface) fail("merged concept " + node.id + " is not named by its longest mention");
        }
        break;
      }
      case NodeType::kSentence:
        if (contained[static_cast<size_t>(i)] != 1) fail("sentence " + node.id + " not in exactly one source");
        break;
      case NodeType::kSource:
        break;
    }
  }
  for (const auto &e : edges) {
    if (e.type == EdgeType::kSourceContains) by_source[e.src].push_back(e.dst);
  }
  int expected_next = 0;
  for (auto &[source, sentences] : by_source) {
    std::sort(sentences.begin(), sentences.end());
    for (size_t i = 0; i + 1 < sentences.size(); ++i) {
      if (next_out[static_cast<size_t>(sentences[i])] != sentences[i + 1]) {
        fail("narrative chain broken after " + nodes[static_cast<size_t>(sentences[i])].id);
      }
      ++expected_next;
    }
  }
  if (count(EdgeType::kNarrativeNext) != expected_next) fail("narrative edge crosses sources");
}

std::vector<Mention> extract_mentions(const AmrGraph &amr, const std::vector<std::string> &tokens,
                                      std::vector<std::string> *diagnostics) {
  // Variables filling a core role, in variable order.
  std::set<std::string> fillers;
  for (const auto &e : amr.edges) {
    auto [role, inverted] = normalize_role(e.role);
    if (core_role_index(role) < 0) continue;
    if (inverted) {
      fillers.insert(e.source);
    } else if (!e.target_is_constant) {
      fillers.insert(e.target);
    }
  }
  std::vector<Mention> out;
  for (const auto &v : amr.variables) {
    if (!fillers.contains(v.name)) continue;
    auto span = variable_span(amr, v.name);
    if (!span) {
      if (diagnostics) diagnostics->push_back(amr.sentence_id + "/" + v.name + ": unaligned core-role concept skipped");
      continue;
    }
    out.push_back({amr.sentence_id, v.name, span->first, span->second, join_span(tokens, span->first, span->second)});
  }
  return out;
}

DocumentSemanticGraph build_document_graph(const CorpusDocument &doc, const CorefClusters &coref,
                                           GraphVariant variant, GraphDiagnostics *diagnostics) {
  GraphDiagnostics local;
  GraphDiagnostics &diag = diagnostics ? *diagnostics : local;
  DocumentSemanticGraph g;
  g.doc_id = doc.doc_id;

  // Source nodes.
  std::unordered_map<std::string, int> source_of_sentence;
  std::vector<std::vector<int>> source_sentences;
  if (doc.passages.empty()) {
    g.nodes.push_back({"source:" + doc.doc_id, NodeType::kSource, doc.doc_id, {}, {}, {}, {}});
    source_sentences.emplace_back();
    for (const auto &s : doc.sentences) source_of_sentence[s.id] = 0;
  } else {
    for (const auto &p : doc.passages) {
      int src = static_cast<int>(g.nodes.size());
      g.nodes.push_back({"source:" + p.id, NodeType::kSource, p.id, {}, {}, {}, {}});
      source_sentences.emplace_back();
      for (const auto &sid : p.sentence_ids) source_of_sentence.emplace(sid, src);
    }
  }

  // Sentence nodes.
  std::vector<int> sentence_node(doc.sentences.size());
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto &s = doc.sentences[i];
    sentence_node[i] = static_cast<int>(g.nodes.size());
    g.nodes.push_back({s.id, NodeType::kSentence, s.text, {}, s.id, {}, {}});
    source_sentences[static_cast<size_t>(source_of_sentence.at(s.id))].push_back(sentence_node[i]);
  }

  // One unit per AMR variable, in corpus order.
  struct Unit {
    size_t sentence;
    std::string var;
    std::string label;
    std::optional<Mention> mention;
  };
  std::vector<Unit> units;
  std::map<std::pair<size_t, std::string>, int> unit_of;
  std::vector<std::vector<int>> mention_units(doc.sentences.size());
  for (size_t si = 0; si < doc.sentences.size(); ++si) {
    const auto &s = doc.sentences[si];
    std::vector<Mention> mentions = extract_mentions(s.amr, s.tokens, &diag.messages);
    for (const auto &v : s.amr.variables) {
      int id = static_cast<int>(units.size());
      unit_of[{si, v.name}] = id;
      Unit u{si, v.name, v.concept_label, std::nullopt};
      for (const auto &m : mentions) {
        if (m.variable == v.name) u.mention = m;
      }
      if (u.mention) mention_units[si].push_back(id);
      units.push_back(std::move(u));
    }
  }

  // Coreference: resolve each cluster mention to the AMR mention with the
  // largest token overlap, ties to the shorter span, then the earlier one.
  std::vector<int> parent(units.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto &cluster : coref.clusters) {
    std::vector<int> resolved;
    for (const auto &cm : cluster) {
      int si = doc.sentence_index(cm.sentence_id);
      int best = -1, best_overlap = 0, best_len = 0, best_start = 0;
      if (si >= 0) {
        for (int u : mention_units[static_cast<size_t>(si)]) {
          const Mention &m = *units[static_cast<size_t>(u)].mention;
          int overlap = std::min(cm.end, m.end) - std::max(cm.start, m.start);
          if (overlap <= 0) continue;
          if (best < 0 || overlap > best_overlap || (overlap == best_overlap && m.length() < best_len) ||
              (overlap == best_overlap && m.length() == best_len && m.start < best_start)) {
            best = u;
            best_overlap = overlap;
            best_len = m.length();
            best_start = m.start;
          }
        }
      }
      if (best < 0) {
        ++diag.dropped_mentions;
        diag.messages.push_back("UnresolvableCorefMention: " + cm.sentence_id + "[" + std::to_string(cm.start) + "," +
                                std::to_string(cm.end) + ")");
        continue;
      }
      resolved.push_back(best);
    }
    for (size_t i = 1; i < resolved.size(); ++i) unite(parent, resolved[0], resolved[i]);
  }

  // Concept nodes, one per union-find class, ordered by first member.
  std::vector<int> node_of_unit(units.size(), -1);
  for (size_t u = 0; u < units.size(); ++u) {
    int root = find_root(parent, static_cast<int>(u));
    if (node_of_unit[static_cast<size_t>(root)] < 0) {
      node_of_unit[static_cast<size_t>(root)] = static_cast<int>(g.nodes.size());
      const Unit &first = units[static_cast<size_t>(root)];
      const std::string &sid = doc.sentences[first.sentence].id;
      g.nodes.push_back({sid + "/" + first.var, NodeType::kConcept, first.label, first.label, sid, {}, {}});
    } else {
      ++diag.merges;
    }
    node_of_unit[u] = node_of_unit[static_cast<size_t>(root)];
    Node &node = g.nodes[static_cast<size_t>(node_of_unit[u])];
    node.members.emplace_back(doc.sentences[units[u].sentence].id, units[u].var);
    if (units[u].mention) node.provenance.push_back(*units[u].mention);
  }
  for (auto &node : g.nodes) {
    if (node.type != NodeType::kConcept || node.provenance.empty()) continue;
    const Mention *longest = &node.provenance.front();
    for (const auto &m : node.provenance) {
      if (m.length() > longest->length()) longest = &m;
    }
    node.name = longest->surface;
  }

  EdgeSink sink(g.edges);
  for (size_t src = 0; src < source_sentences.size(); ++src) {
    for (int s : source_sentences[src]) sink.add_pair(static_cast<int>(src), EdgeType::kSourceContains, s);
  }
  for (const auto &chain : source_sentences) {
    for (size_t i = 0; i + 1 < chain.size(); ++i) sink.add_pair(chain[i], EdgeType::kNarrativeNext, chain[i + 1]);
  }
  for (size_t u = 0; u < units.size(); ++u) {
    sink.add_pair(sentence_node[units[u].sentence], EdgeType::kSentenceMembership, node_of_unit[u]);
  }
  for (size_t si = 0; si < doc.sentences.size(); ++si) {
    for (const auto &e : doc.sentences[si].amr.edges) {
      if (e.target_is_constant) continue;
      auto [role, inverted] = normalize_role(e.role);
      int a = node_of_unit[static_cast<size_t>(unit_of.at({si, e.source}))];
      int b = node_of_unit[static_cast<size_t>(unit_of.at({si, e.target}))];
      if (inverted) std::swap(a, b);
      if (a == b) continue;
      sink.add_pair(a, bucket_role(role), b, role);
    }
  }

  if (variant != GraphVariant::kFull) g = apply_variant(g, variant);
  return g;
}

DocumentSemanticGraph apply_variant(const DocumentSemanticGraph &graph, GraphVariant variant) {
  if (graph.variant == variant) return graph;
  if (graph.variant != GraphVariant::kFull) {
    throw Error(ErrorCode::kConfig, "variants apply to full graphs only");
  }
  DocumentSemanticGraph out;
  out.doc_id = graph.doc_id;
  out.variant = variant;
  switch (variant) {
    case GraphVariant::kFull:
    case GraphVariant::kHomogeneous:
      out.nodes = graph.nodes;
      out.edges = graph.edges;
      break;
    case GraphVariant::kSentenceOnly: {
      std::vector<int> remap(graph.nodes.size(), -1);
      for (size_t i = 0; i < graph.nodes.size(); ++i) {
        if (graph.nodes[i].type == NodeType::kConcept) continue;
        remap[i] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(graph.nodes[i]);
      }
      for (const auto &e : graph.edges) {
        int s = remap[static_cast<size_t>(e.src)], d = remap[static_cast<size_t>(e.dst)];
        if (s >= 0 && d >= 0) out.edges.push_back({s, e.type, d, e.role});
      }
      break;
    }
    case GraphVariant::kCorefOnly:
      out.nodes = graph.nodes;
      for (const auto &e : graph.edges) {
        if (!is_role_edge(e.type)) out.edges.push_back(e);
      }
      break;
  }
  return out;
}

bool graphs_isomorphic(const DocumentSemanticGraph &a, const DocumentSemanticGraph &b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size() || a.variant != b.variant) return false;
  auto node_key = [](const Node &n) {
    std::vector<std::tuple<std::string, int, int>> prov;
    for (const auto &m : n.provenance) prov.emplace_back(m.sentence_id, m.start, m.end);
    std::sort(prov.begin(), prov.end());
    auto members = n.members;
    std::sort(members.begin(), members.end());
    return std::make_tuple(n.id, static_cast<int>(n.type), n.name, prov, members);
  };
  auto nodes = [&](const DocumentSemanticGraph &g) {
    std::multiset<decltype(node_key(g.nodes[0]))> s;
    for (const auto &n : g.nodes) s.insert(node_key(n));
    return s;
  };
  auto edges = [](const DocumentSemanticGraph &g) {
    std::multiset<std::tuple<std::string, int, std::string>> s;
    for (const auto &e : g.edges) {
      s.insert({g.nodes[static_cast<size_t>(e.src)].id, static_cast<int>(e.type), g.nodes[static_cast<size_t>(e.dst)].id});
    }
    return s;
  };
  return nodes(a) == nodes(b) && edges(a) == edges(b);
}

std::vector<PathTuple> linearize_paths(const DocumentSemanticGraph &graph, std::string_view start_sentence_id,
                                       int max_hops) {
  int start = graph.sentence_node(start_sentence_id);
  if (start < 0) throw Error(ErrorCode::kUnknownSentence, std::string(start_sentence_id));
  std::vector<std::vector<int>> out_edges(graph.nodes.size());
  for (size_t i = 0; i < graph.edges.size(); ++i) out_edges[static_cast<size_t>(graph.edges[i].src)].push_back(static_cast<int>(i));

  std::vector<PathTuple> tuples;
  std::set<std::vector<std::string>> seen;
  std::vector<int> depth(graph.nodes.size(), -1);
  std::deque<int> queue{start};
  depth[static_cast<size_t>(start)] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (depth[static_cast<size_t>(u)] >= max_hops) continue;
    for (int ei : out_edges[static_cast<size_t>(u)]) {
      const Edge &e = graph.edges[static_cast<size_t>(ei)];
      if (is_role_edge(e.type)) {
        int subject = is_forward(e.type) ? e.src : e.dst;
        int object = is_forward(e.type) ? e.dst : e.src;
        const std::string &sname = graph.nodes[static_cast<size_t>(subject)].name;
        const std::string &oname = graph.nodes[static_cast<size_t>(object)].name;
        EdgeType forward = is_forward(e.type) ? e.type : inverse(e.type);
        std::vector<std::string> parts;
        if (forward == EdgeType::kMod) {
          parts = {oname, sname};
        } else {
          parts = {sname, e.role, oname};
        }
        if (seen.insert(parts).second) tuples.push_back({std::move(parts)});
      }
      if (depth[static_cast<size_t>(e.dst)] < 0) {
        depth[static_cast<size_t>(e.dst)] = depth[static_cast<size_t>(u)] + 1;
        queue.push_back(e.dst);
      }
    }
  }
  return tuples;
}

std::string graph_to_json(const DocumentSemanticGraph &graph) {
  nlohmann::ordered_json j;
  j["doc_id"] = graph.doc_id;
  j["variant"] = std::string(variant_name(graph.variant));
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto &n : graph.nodes) {
    nlohmann::ordered_json node{{"id", n.id}, {"type", std::string(node_type_name(n.type))}, {"name", n.name}};
    if (n.type == NodeType::kConcept) {
      node["concept"] = n.concept_label;
      auto prov = nlohmann::ordered_json::array();
      for (const auto &m : n.provenance) {
        prov.push_back({{"sentence_id", m.sentence_id}, {"variable", m.variable}, {"start", m.start},
                        {"end", m.end}, {"surface", m.surface}});
      }
      node["provenance"] = std::move(prov);
      auto members = nlohmann::ordered_json::array();
      for (const auto &[sid, var] : n.members) members.push_back({sid, var});
      node["members"] = std::move(members);
    }
    if (!n.sentence_id.empty()) node["sentence_id"] = n.sentence_id;
    j["nodes"].push_back(std::move(node));
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto &e : graph.edges) {
    nlohmann::ordered_json edge{{"src", graph.nodes[static_cast<size_t>(e.src)].id},
                                {"type", std::string(edge_type_name(e.type))},
                                {"dst", graph.nodes[static_cast<size_t>(e.dst)].id}};
    if (!e.role.empty()) edge["role"] = e.role;
    j["edges"].push_back(std::move(edge));
  }
  return j.dump(1);
}

DocumentSemanticGraph graph_from_json(std::string_view json_text) {
  DocumentSemanticGraph g;
  try {
    auto j = nlohmann::json::parse(json_text);
    g.doc_id = j.at("doc_id").get<std::string>();
    g.variant = variant_from_name(j.at("variant").get<std::string>());
    std::unordered_map<std::string, int> index;
    for (const auto &jn : j.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<std::string>();
      n.type = node_type_from_name(jn.at("type").get<std::string>());
      n.name = jn.at("name").get<std::string>();
      n.concept_label = jn.value("concept", std::string());
      n.sentence_id = jn.value("sentence_id", std::string());
      if (jn.contains("provenance")) {
        for (const auto &m : jn["provenance"]) {
          n.provenance.push_back({m.at("sentence_id").get<std::string>(), m.at("variable").get<std::string>(),
                                  m.at("start").get<int>(), m.at("end").get<int>(), m.at("surface").get<std::string>()});
        }
      }
      if (jn.contains("members")) {
        for (const auto &m : jn["members"]) n.members.emplace_back(m.at(0).get<std::string>(), m.at(1).get<std::string>());
      }
      index[n.id] = static_cast<int>(g.nodes.size());
      g.nodes.push_back(std::move(n));
    }
    for (const auto &je : j.at("edges")) {
      g.edges.push_back({index.at(je.at("src").get<std::string>()), edge_type_from_name(je.at("type").get<std::string>()),
                         index.at(je.at("dst").get<std::string>()), je.value("role", std::string())});
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kFormat, std::string("graph dump: ") + e.what());
  } catch (const std::out_of_range &) {
    throw Error(ErrorCode::kFormat, "graph dump: edge references unknown node");
  }
  return g;
}

}  // namespace docgraph
