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


#ifndef DOCGRAPH_TESTS_PENMAN_ORACLE_H_
#define DOCGRAPH_TESTS_PENMAN_ORACLE_H_

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "docgraph/amr.h"

namespace docgraph::oracle {

using Triple = std::tuple<std::string, std::string, std::string, std::string>;

// Reference triple view of a graph: instances, role edges with their
// constant flags, and alignments. Two graphs with the same variable names
// are isomorphic exactly when these sets agree.
inline std::multiset<Triple> triples(const AmrGraph &g) {
  std::multiset<Triple> out;
  auto join = [](const std::vector<int> &v) {
    std::string s;
    for (int i : v) s += std::to_string(i) + ",";
    return s;
  };
  for (const auto &v : g.variables) out.insert({"instance", v.name, v.concept_label, ""});
  for (const auto &e : g.edges) {
    std::string kind = e.target_is_constant ? (e.target_is_quoted ? "quoted" : "constant") : "var";
    out.insert({e.source, e.role, e.target, kind + "|" + join(e.target_alignment)});
  }
  for (const auto &[var, idx] : g.alignments) out.insert({"align", var, join(idx), ""});
  out.insert({"top", g.top, "", ""});
  return out;
}

}  // namespace docgraph::oracle

#endif  // DOCGRAPH_TESTS_PENMAN_ORACLE_H_
