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


#ifndef DOCGRAPH_TESTS_TEST_UTIL_H_
#define DOCGRAPH_TESTS_TEST_UTIL_H_

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "docgraph/amr.h"
#include "docgraph/egat.h"
#include "docgraph/semgraph.h"
#include "docgraph/tensor.h"

namespace docgraph::testing {

inline std::vector<double> random_values(std::mt19937_64 &rng, size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (double &v : out) v = dist(rng);
  return out;
}

inline nd::Tensor random_tensor(std::mt19937_64 &rng, size_t rows, size_t cols, double lo = -1.0, double hi = 1.0) {
  return nd::Tensor(rows, cols, random_values(rng, rows * cols, lo, hi));
}

inline std::string data_path(const std::string &name) { return std::string(DOCGRAPH_TEST_DATA) + "/" + name; }

// Graphs of a fixture file, one per blank-line separated block.
inline std::vector<std::string> read_penman_blocks(const std::string &path) {
  std::ifstream in(path);
  std::vector<std::string> blocks;
  std::string line, current;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (!current.empty()) blocks.push_back(current);
      current.clear();
      continue;
    }
    current += line + "\n";
  }
  if (!current.empty()) blocks.push_back(current);
  return blocks;
}

inline std::string read_text(const std::string &path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// The hand-written four-sentence fixture document and its coreference.
inline CorpusDocument rango_document() {
  DocumentManifest manifest = parse_manifest(read_text(data_path("rango/manifest.json")));
  std::ifstream in(data_path("rango/corpus.amr"));
  return parse_corpus(in, &manifest).front();
}

inline CorefClusters rango_coref() { return parse_coref(read_text(data_path("rango/coref.json"))); }

inline CorpusDocument document_from(const std::string &corpus_text, const std::string &doc_id = "doc") {
  std::istringstream in(corpus_text);
  return parse_corpus(in, nullptr, "<fixture>", doc_id).front();
}

// A random typed graph whose last `contexts` nodes are context nodes, each
// linked both ways to a random earlier node; the rest are concepts or
// sentences joined by random typed edges with their inverses.
inline GraphInput random_graph_input(std::mt19937_64 &rng, size_t nodes, size_t contexts, size_t input_dim,
                                     size_t extra_edges) {
  GraphInput in;
  in.features = random_tensor(rng, nodes, input_dim);
  size_t base = nodes - contexts;
  for (size_t i = 0; i < base; ++i) {
    NodeType t = i % 2 ? NodeType::kConcept : NodeType::kSentence;
    in.node_types.push_back(static_cast<int>(t));
    if (t == NodeType::kConcept) in.concept_nodes.push_back(static_cast<int>(i));
  }
  auto link = [&](int a, int b, EdgeType t) {
    in.edge_src.push_back(a);
    in.edge_dst.push_back(b);
    in.edge_types.push_back(static_cast<int>(t));
    in.edge_src.push_back(b);
    in.edge_dst.push_back(a);
    in.edge_types.push_back(static_cast<int>(inverse(t)));
  };
  for (size_t e = 0; e < extra_edges; ++e) {
    int a = static_cast<int>(rng() % base), b = static_cast<int>(rng() % base);
    if (a == b) continue;
    link(a, b, static_cast<EdgeType>(rng() % static_cast<uint64_t>(EdgeType::kContextLink)));
  }
  for (size_t k = 0; k < contexts; ++k) {
    int node = static_cast<int>(base + k);
    in.node_types.push_back(static_cast<int>(NodeType::kContext));
    in.context_nodes.push_back(node);
    in.context_candidates.push_back(static_cast<int>(k));
    link(node, static_cast<int>(rng() % base), EdgeType::kContextLink);
  }
  return in;
}

}  // namespace docgraph::testing

#endif  // DOCGRAPH_TESTS_TEST_UTIL_H_
