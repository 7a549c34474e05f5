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

#include "docgraph/dialog.h"

#include <cctype>
#include <limits>
#include <sstream>

#include "docgraph/error.h"
#include "json.hpp"

namespace docgraph {
namespace {

bool is_user(std::string_view speaker) {
  std::string lower(speaker);
  for (auto &c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower == "u" || lower == "user";
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string DialogTurn::key() const { return dialog_id + ":" + std::to_string(turn_index); }

int DialogTurn::candidate_index(std::string_view sentence_id) const {
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].sentence_id == sentence_id) return static_cast<int>(i);
  }
  return -1;
}

std::optional<std::string> DialogTurn::gold_sentence() const {
  if (gold_sentence_id) return gold_sentence_id;
  if (gold_span) return gold_span->sentence_id;
  return std::nullopt;
}

void DialogTurn::validate() const {
  if (auto gold = gold_sentence(); gold && candidate_index(*gold) < 0) {
    throw Error(ErrorCode::kFormat, key() + ": gold sentence " + *gold + " is not a candidate");
  }
  if (gold_span) {
    if (gold_span->start < 0 || gold_span->end <= gold_span->start) {
      throw Error(ErrorCode::kFormat, key() + ": invalid gold span");
    }
    if (gold_sentence_id && *gold_sentence_id != gold_span->sentence_id) {
      throw Error(ErrorCode::kFormat, key() + ": gold span lies outside the gold sentence");
    }
  }
}

std::vector<DialogTurn> parse_dialogs(std::istream &in, std::string_view source_name) {
  std::vector<DialogTurn> turns;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    DialogTurn turn;
    try {
      auto j = nlohmann::json::parse(line);
      turn.dialog_id = j.at("dialog_id").get<std::string>();
      turn.turn_index = j.at("turn_index").get<int>();
      turn.doc_id = j.value("doc_id", std::string());
      for (const auto &h : j.at("history")) {
        Utterance u{h.at("speaker").get<std::string>(), h.at("text").get<std::string>(), {}};
        u.tokens = whitespace_tokens(u.text);
        turn.history.push_back(std::move(u));
      }
      for (const auto &c : j.at("candidates")) {
        turn.candidates.push_back({c.at("sentence_id").get<std::string>(), c.value("text", std::string())});
      }
      if (j.contains("gold_sentence_id") && !j["gold_sentence_id"].is_null()) {
        turn.gold_sentence_id = j["gold_sentence_id"].get<std::string>();
      }
      if (j.contains("gold_span") && !j["gold_span"].is_null()) {
        const auto &s = j["gold_span"];
        turn.gold_span = GoldSpan{s.at("sentence_id").get<std::string>(), s.at("start").get<int>(),
                                  s.at("end").get<int>()};
      }
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kFormat, where + ": " + e.what());
    }
    try {
      turn.validate();
    } catch (const Error &e) {
      throw Error(e.code(), where + ": " + e.what());
    }
    turns.push_back(std::move(turn));
  }
  return turns;
}

std::string dialog_to_json_line(const DialogTurn &turn) {
  nlohmann::ordered_json j;
  j["dialog_id"] = turn.dialog_id;
  j["turn_index"] = turn.turn_index;
  j["doc_id"] = turn.doc_id;
  j["history"] = nlohmann::ordered_json::array();
  for (const auto &u : turn.history) j["history"].push_back({{"speaker", u.speaker}, {"text", u.text}});
  j["candidates"] = nlohmann::ordered_json::array();
  for (const auto &c : turn.candidates) j["candidates"].push_back({{"sentence_id", c.sentence_id}, {"text", c.text}});
  j["gold_sentence_id"] = turn.gold_sentence_id ? nlohmann::ordered_json(*turn.gold_sentence_id) : nullptr;
  if (turn.gold_span) {
    j["gold_span"] = {{"sentence_id", turn.gold_span->sentence_id}, {"start", turn.gold_span->start},
                      {"end", turn.gold_span->end}};
  } else {
    j["gold_span"] = nullptr;
  }
  return j.dump();
}

std::string make_context(const std::vector<Utterance> &history, int window) {
  if (window < 1) throw Error(ErrorCode::kConfig, "context window must be >= 1");
  size_t begin = history.size() > static_cast<size_t>(window) ? history.size() - static_cast<size_t>(window) : 0;
  std::string out;
  for (size_t i = begin; i < history.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += is_user(history[i].speaker) ? "U: " : "S: ";
    out += history[i].text;
  }
  return out;
}

PrecomputedContextEncoder::PrecomputedContextEncoder(EmbeddingFile file) : file_(std::move(file)) {
  for (size_t i = 0; i < file_.records.size(); ++i) index_.emplace(file_.records[i].first, i);
}

std::string PrecomputedContextEncoder::key(const DialogTurn &turn, std::string_view sentence_id) {
  return turn.key() + ":" + std::string(sentence_id);
}

Vector PrecomputedContextEncoder::encode(const DialogTurn &turn, const Candidate &candidate, std::string_view) const {
  auto it = index_.find(key(turn, candidate.sentence_id));
  if (it == index_.end()) throw Error(ErrorCode::kMissingContextEmbedding, key(turn, candidate.sentence_id));
  return file_.records[it->second].second.cls;
}

Vector HashContextEncoder::encode(const DialogTurn &, const Candidate &candidate, std::string_view context) const {
  return encoder_.encode_pair(candidate.text, context);
}

DialogGraph build_dialog_graph(const DocumentSemanticGraph &base, const DialogTurn &turn,
                               const ContextEncoder &encoder, int window) {
  DialogGraph g;
  g.base = &base;
  g.turn_key = turn.key();
  const std::string context = make_context(turn.history, window);
  for (size_t i = 0; i < turn.candidates.size(); ++i) {
    const Candidate &c = turn.candidates[i];
    int s = base.sentence_node(c.sentence_id);
    if (s < 0) throw Error(ErrorCode::kUnknownSentence, c.sentence_id);
    Vector h = encoder.encode(turn, c, context);
    if (static_cast<int>(h.size()) != encoder.dim()) throw Error(ErrorCode::kShapeMismatch, "context embedding");
    g.context_nodes.push_back({"ctx:" + c.sentence_id, c.sentence_id, s, std::move(h)});
    int ctx = g.context_node_index(i);
    g.context_edges.push_back({ctx, EdgeType::kContextLink, s, {}});
    g.context_edges.push_back({s, EdgeType::kContextLink, ctx, {}});
  }
  return g;
}

LabelSet derive_labels(const DialogTurn &turn, const DocumentSemanticGraph &base) {
  auto gold = turn.gold_sentence();
  if (!gold) throw Error(ErrorCode::kNoGoldLabel, turn.key());
  LabelSet labels;
  labels.positive_candidate = turn.candidate_index(*gold);
  if (labels.positive_candidate < 0) throw Error(ErrorCode::kNoGoldLabel, turn.key() + ": gold not among candidates");
  labels.positive_context_id = "ctx:" + *gold;
  // Without a span the whole gold sentence is the snippet.
  int start = turn.gold_span ? turn.gold_span->start : 0;
  int end = turn.gold_span ? turn.gold_span->end : std::numeric_limits<int>::max();
  for (size_t i = 0; i < base.nodes.size(); ++i) {
    const Node &n = base.nodes[i];
    if (n.type != NodeType::kConcept) continue;
    int relevant = 0;
    for (const auto &m : n.provenance) {
      if (m.sentence_id == *gold && m.start >= start && m.end <= end) relevant = 1;
    }
    labels.concept_relevance[static_cast<int>(i)] = relevant;
  }
  return labels;
}

}  // namespace docgraph
