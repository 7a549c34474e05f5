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

#include "docgraph/amr.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "docgraph/error.h"
#include "json.hpp"

namespace docgraph {
namespace {

enum class TokenKind { kOpen, kClose, kSlash, kRole, kSymbol, kString, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  std::vector<int> alignment;
  size_t offset = 0;
};

bool is_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '/' ||
         c == '~' || c == '"';
}

std::vector<int> parse_alignment(std::string_view text) {
  if (text.starts_with("e.")) text.remove_prefix(2);
  std::vector<int> out;
  if (text.empty()) throw Error(ErrorCode::kBadAlignment, "empty alignment");
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view part = text.substr(pos, comma - pos);
    int value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || value < 0) {
      throw Error(ErrorCode::kBadAlignment, "non-numeric alignment index '" + std::string(part) + "'");
    }
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    Token tok;
    tok.offset = pos_;
    if (pos_ >= text_.size()) {
      tok.kind = TokenKind::kEnd;
      return tok;
    }
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      tok.kind = TokenKind::kOpen;
    } else if (c == ')') {
      ++pos_;
      tok.kind = TokenKind::kClose;
    } else if (c == '/') {
      ++pos_;
      tok.kind = TokenKind::kSlash;
    } else if (c == '"') {
      tok.kind = TokenKind::kString;
      tok.text = read_string();
      tok.alignment = read_alignment();
    } else if (c == ':') {
      tok.kind = TokenKind::kRole;
      size_t start = pos_;
      while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
      tok.text = std::string(text_.substr(start, pos_ - start));
      if (tok.text.size() < 2) malformed("empty role", tok.offset);
    } else if (c == '~') {
      malformed("alignment without a symbol", pos_);
    } else {
      tok.kind = TokenKind::kSymbol;
      size_t start = pos_;
      while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
      tok.text = std::string(text_.substr(start, pos_ - start));
      tok.alignment = read_alignment();
    }
    return tok;
  }

  [[noreturn]] void malformed(const std::string &what, size_t offset) const {
    throw Error(ErrorCode::kMalformedPenman, what + " at offset " + std::to_string(offset));
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_string() {
    size_t start = pos_;
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) malformed("unterminated string", start);
    ++pos_;
    return out;
  }

  std::vector<int> read_alignment() {
    if (pos_ >= text_.size() || text_[pos_] != '~') return {};
    ++pos_;
    size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    return parse_alignment(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  AmrGraph parse() {
    if (current_.kind != TokenKind::kOpen) lexer_.malformed("expected '('", current_.offset);
    graph_.top = parse_node();
    if (current_.kind != TokenKind::kEnd) lexer_.malformed("trailing input", current_.offset);
    // Bare symbols naming a variable are references; everything else is a constant.
    for (size_t i = 0; i < graph_.edges.size(); ++i) {
      AmrEdge &edge = graph_.edges[i];
      if (!bare_symbol_.contains(i)) continue;
      if (graph_.has_variable(edge.target)) {
        if (!edge.target_alignment.empty()) {
          throw Error(ErrorCode::kBadAlignment,
                      "alignment on variable reference '" + edge.target + "'");
        }
        edge.target_is_constant = false;
      }
    }
    return std::move(graph_);
  }

 private:
  void advance() { current_ = lexer_.next(); }

  std::string parse_node() {
    advance();  // '('
    if (current_.kind != TokenKind::kSymbol || !current_.alignment.empty()) {
      lexer_.malformed("expected variable", current_.offset);
    }
    std::string var = current_.text;
    advance();
    if (current_.kind != TokenKind::kSlash) lexer_.malformed("missing '/' after variable '" + var + "'", current_.offset);
    advance();
    if (current_.kind != TokenKind::kSymbol && current_.kind != TokenKind::kString) {
      lexer_.malformed("expected concept", current_.offset);
    }
    if (graph_.has_variable(var)) throw Error(ErrorCode::kDuplicateVariable, var);
    graph_.variables.push_back({var, current_.text});
    if (!current_.alignment.empty()) graph_.alignments[var] = current_.alignment;
    advance();

    while (current_.kind == TokenKind::kRole) {
      std::string role = current_.text;
      size_t role_offset = current_.offset;
      advance();
      AmrEdge edge;
      edge.source = var;
      edge.role = role;
      if (current_.kind == TokenKind::kOpen) {
        size_t slot = graph_.edges.size();
        graph_.edges.push_back(edge);
        std::string child = parse_node();
        graph_.edges[slot].target = child;
        continue;
      }
      if (current_.kind == TokenKind::kSymbol) {
        edge.target = current_.text;
        edge.target_is_constant = true;
        edge.target_alignment = current_.alignment;
        bare_symbol_.insert(graph_.edges.size());
      } else if (current_.kind == TokenKind::kString) {
        edge.target = current_.text;
        edge.target_is_constant = true;
        edge.target_is_quoted = true;
        edge.target_alignment = current_.alignment;
      } else {
        lexer_.malformed("dangling role " + role, role_offset);
      }
      graph_.edges.push_back(std::move(edge));
      advance();
    }
    if (current_.kind != TokenKind::kClose) lexer_.malformed("expected ')'", current_.offset);
    advance();
    return var;
  }

  Lexer lexer_;
  Token current_;
  AmrGraph graph_;
  std::unordered_set<size_t> bare_symbol_;
};

std::string format_alignment(const std::vector<int> &indices) {
  if (indices.empty()) return {};
  std::string out = "~e.";
  for (size_t i = 0; i < indices.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(indices[i]);
  }
  return out;
}

std::string quote(const std::string &text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

const AmrVariable *AmrGraph::find_variable(std::string_view name) const {
  for (const auto &v : variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

void AmrGraph::validate() const {
  std::set<std::string> names;
  for (const auto &v : variables) {
    if (!names.insert(v.name).second) throw Error(ErrorCode::kDuplicateVariable, v.name);
  }
  if (!names.contains(top)) throw Error(ErrorCode::kInvalidGraph, "top '" + top + "' is not a variable");
  for (const auto &e : edges) {
    if (!names.contains(e.source)) {
      throw Error(ErrorCode::kInvalidGraph, "edge source '" + e.source + "' is not a variable");
    }
    if (!e.target_is_constant && !names.contains(e.target)) {
      throw Error(ErrorCode::kInvalidGraph, "edge target '" + e.target + "' is not a variable");
    }
    for (int i : e.target_alignment) {
      if (i < 0) throw Error(ErrorCode::kBadAlignment, "negative index");
    }
  }
  for (const auto &[var, idx] : alignments) {
    if (!names.contains(var)) throw Error(ErrorCode::kInvalidGraph, "alignment for unknown variable " + var);
    for (int i : idx) {
      if (i < 0) throw Error(ErrorCode::kBadAlignment, "negative index");
    }
  }
}

int AmrGraph::reentrancy_count() const {
  std::map<std::string, int> refs;
  for (const auto &e : edges) {
    if (!e.target_is_constant) ++refs[e.target];
  }
  int count = 0;
  for (const auto &[name, n] : refs) {
    if (n + (name == top ? 1 : 0) >= 2) ++count;
  }
  return count;
}

AmrGraph parse_amr(std::string_view text) {
  AmrGraph graph = Parser(text).parse();
  graph.validate();
  return graph;
}

std::string serialize_amr(const AmrGraph &graph) {
  graph.validate();
  std::unordered_map<std::string, std::vector<const AmrEdge *>> outgoing;
  for (const auto &e : graph.edges) outgoing[e.source].push_back(&e);
  std::unordered_set<std::string> emitted;
  std::ostringstream out;

  std::function<void(const std::string &, int)> emit = [&](const std::string &var, int depth) {
    emitted.insert(var);
    const AmrVariable *v = graph.find_variable(var);
    out << '(' << var << " / " << v->concept_label;
    if (auto it = graph.alignments.find(var); it != graph.alignments.end()) {
      out << format_alignment(it->second);
    }
    for (const AmrEdge *e : outgoing[var]) {
      out << '\n' << std::string(static_cast<size_t>(depth + 1) * 6, ' ') << e->role << ' ';
      if (e->target_is_constant) {
        out << (e->target_is_quoted ? quote(e->target) : e->target)
            << format_alignment(e->target_alignment);
      } else if (emitted.contains(e->target)) {
        out << e->target;
      } else {
        emit(e->target, depth + 1);
      }
    }
    out << ')';
  };
  emit(graph.top, 0);
  if (emitted.size() != graph.variables.size()) {
    throw Error(ErrorCode::kInvalidGraph, "variables unreachable from top");
  }
  return out.str();
}

bool amr_isomorphic(const AmrGraph &a, const AmrGraph &b) {
  auto vars = [](const AmrGraph &g) {
    std::multiset<std::pair<std::string, std::string>> s;
    for (const auto &v : g.variables) s.insert({v.name, v.concept_label});
    return s;
  };
  auto edges = [](const AmrGraph &g) {
    std::multiset<std::tuple<std::string, std::string, std::string, bool, std::vector<int>>> s;
    for (const auto &e : g.edges) {
      s.insert({e.source, e.role, e.target, e.target_is_constant, e.target_alignment});
    }
    return s;
  };
  return a.top == b.top && vars(a) == vars(b) && edges(a) == edges(b) && a.alignments == b.alignments;
}

const CorpusSentence *CorpusDocument::find_sentence(std::string_view id) const {
  int i = sentence_index(id);
  return i < 0 ? nullptr : &sentences[static_cast<size_t>(i)];
}

int CorpusDocument::sentence_index(std::string_view id) const {
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

void CorpusDocument::validate() const {
  std::set<std::string> ids;
  for (const auto &s : sentences) {
    if (!ids.insert(s.id).second) throw Error(ErrorCode::kDuplicateSentence, s.id);
    s.amr.validate();
    auto check = [&](const std::vector<int> &idx) {
      for (int i : idx) {
        if (i >= static_cast<int>(s.tokens.size())) {
          throw Error(ErrorCode::kBadAlignment, "sentence " + s.id + ": alignment index " +
                                                    std::to_string(i) + " out of range");
        }
      }
    };
    for (const auto &[var, idx] : s.amr.alignments) check(idx);
    for (const auto &e : s.amr.edges) check(e.target_alignment);
  }
  for (const auto &p : passages) {
    for (const auto &sid : p.sentence_ids) {
      if (!ids.contains(sid)) {
        throw Error(ErrorCode::kUnknownSentence, "passage " + p.id + " references " + sid);
      }
    }
  }
}

DocumentManifest parse_manifest(std::string_view json_text) {
  DocumentManifest manifest;
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kFormat, std::string("manifest: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kFormat, "manifest must be an object");
  try {
    for (const auto &[doc_id, passages] : j.items()) {
      std::vector<Passage> list;
      for (const auto &p : passages) {
        list.push_back({p.at("passage_id").get<std::string>(),
                        p.at("sentence_ids").get<std::vector<std::string>>()});
      }
      manifest.documents.emplace_back(doc_id, std::move(list));
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kFormat, std::string("manifest: ") + e.what());
  }
  return manifest;
}

std::string serialize_manifest(const DocumentManifest &manifest) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto &[doc_id, passages] : manifest.documents) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto &p : passages) {
      list.push_back({{"passage_id", p.id}, {"sentence_ids", p.sentence_ids}});
    }
    j[doc_id] = std::move(list);
  }
  return j.dump(2);
}

std::vector<CorpusDocument> parse_corpus(std::istream &stream, const DocumentManifest *manifest,
                                         std::string_view source_name,
                                         std::string_view default_doc_id) {
  std::vector<CorpusSentence> sentences;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;

  struct Block {
    int start_line = 0;
    std::optional<std::string> id, snt, tok;
    std::string penman;
    bool any = false;
  } block;

  auto where = [&](int at) { return std::string(source_name) + ":" + std::to_string(at); };

  auto flush = [&] {
    if (!block.any) return;
    if (!block.id) throw Error(ErrorCode::kMissingMetadata, where(block.start_line) + ": missing # ::id");
    if (!block.tok) {
      throw Error(ErrorCode::kMissingMetadata, where(block.start_line) + ": sentence " + *block.id + " missing # ::tok");
    }
    if (block.penman.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw Error(ErrorCode::kMissingMetadata, where(block.start_line) + ": sentence " + *block.id + " has no graph");
    }
    if (!seen.insert(*block.id).second) {
      throw Error(ErrorCode::kDuplicateSentence, where(block.start_line) + ": " + *block.id);
    }
    CorpusSentence s;
    s.id = *block.id;
    s.tokens = split_tokens(*block.tok);
    s.text = block.snt.value_or(*block.tok);
    s.line = block.start_line;
    try {
      s.amr = parse_amr(block.penman);
    } catch (const Error &e) {
      throw Error(e.code(), where(block.start_line) + ": sentence " + s.id + ": " + e.what());
    }
    s.amr.sentence_id = s.id;
    sentences.push_back(std::move(s));
    block = Block{};
  };

  // Returns the value of a `# ::key value` line when the line starts with that key.
  auto metadata = [](std::string_view text, std::string_view key) -> std::optional<std::string> {
    size_t start = text.find_first_not_of("# \t");
    if (start == std::string_view::npos) return std::nullopt;
    text.remove_prefix(start);
    if (!text.starts_with(key)) return std::nullopt;
    text.remove_prefix(key.size());
    if (!text.empty() && text.front() != ' ' && text.front() != '\t') return std::nullopt;
    size_t value = text.find_first_not_of(" \t");
    if (value == std::string_view::npos) return std::string();
    text.remove_prefix(value);
    while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) text.remove_suffix(1);
    return std::string(text);
  };

  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush();
      continue;
    }
    if (!block.any) {
      block.any = true;
      block.start_line = line_no;
    }
    if (line.starts_with("#")) {
      if (auto v = metadata(line, "::id")) {
        // `# ::id x ::date ...` carries extra fields after the id.
        block.id = split_tokens(*v).empty() ? std::string() : split_tokens(*v).front();
      } else if (auto s = metadata(line, "::snt")) {
        block.snt = *s;
      } else if (auto t = metadata(line, "::tok")) {
        block.tok = *t;
      }
      continue;
    }
    block.penman += line;
    block.penman += '\n';
  }
  flush();

  std::vector<CorpusDocument> docs;
  if (manifest == nullptr) {
    CorpusDocument doc;
    doc.doc_id = std::string(default_doc_id);
    doc.sentences = std::move(sentences);
    doc.validate();
    docs.push_back(std::move(doc));
    return docs;
  }

  std::unordered_map<std::string, size_t> by_id;
  for (size_t i = 0; i < sentences.size(); ++i) by_id[sentences[i].id] = i;
  for (const auto &[doc_id, passages] : manifest->documents) {
    CorpusDocument doc;
    doc.doc_id = doc_id;
    doc.passages = passages;
    for (const auto &p : passages) {
      for (const auto &sid : p.sentence_ids) {
        auto it = by_id.find(sid);
        if (it == by_id.end()) {
          throw Error(ErrorCode::kUnknownSentence, "manifest document " + doc_id + " references " + sid);
        }
        doc.sentences.push_back(sentences[it->second]);
      }
    }
    doc.validate();
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string serialize_corpus_block(const CorpusSentence &sentence) {
  std::ostringstream out;
  out << "# ::id " << sentence.id << '\n';
  out << "# ::snt " << sentence.text << '\n';
  out << "# ::tok ";
  for (size_t i = 0; i < sentence.tokens.size(); ++i) out << (i ? " " : "") << sentence.tokens[i];
  out << '\n' << serialize_amr(sentence.amr) << '\n';
  return out.str();
}

}  // namespace docgraph
