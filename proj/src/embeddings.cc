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

#include "docgraph/embeddings.h"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "binary_io.h"
#include "docgraph/error.h"

namespace docgraph {
namespace {

uint64_t splitmix64(uint64_t &state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [-1, 1).
double next_symmetric(uint64_t &state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
}

Vector mean_of(const std::vector<Vector> &rows, int dim) {
  Vector out(static_cast<size_t>(dim), 0.0);
  if (rows.empty()) return out;
  for (const auto &r : rows) {
    for (int i = 0; i < dim; ++i) out[static_cast<size_t>(i)] += r[static_cast<size_t>(i)];
  }
  for (auto &v : out) v /= static_cast<double>(rows.size());
  return out;
}

void check_finite(const Vector &v, const std::string &where) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kNonFinite, "embedding for " + where);
  }
}

}  // namespace

uint64_t fnv1a64(std::string_view text, uint64_t seed) {
  uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> simple_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

EmbeddingFile read_embedding_file(std::istream &in) {
  EmbeddingFile file;
  uint32_t count = binary::get_u32(in);
  uint32_t dim = binary::get_u32(in);
  if (dim == 0) throw Error(ErrorCode::kFormat, "embedding dim must be positive");
  file.dim = static_cast<int>(dim);
  auto read_vec = [&] {
    Vector v(dim);
    for (auto &x : v) x = binary::get_f32(in);
    return v;
  };
  for (uint32_t r = 0; r < count; ++r) {
    std::string key = binary::get_string(in);
    SentenceEmbedding e;
    e.cls = read_vec();
    uint32_t tokens = binary::get_u32(in);
    for (uint32_t t = 0; t < tokens; ++t) e.tokens.push_back(read_vec());
    check_finite(e.cls, key);
    for (const auto &t : e.tokens) check_finite(t, key);
    file.records.emplace_back(std::move(key), std::move(e));
  }
  return file;
}

void write_embedding_file(std::ostream &out, const EmbeddingFile &file) {
  binary::put_u32(out, static_cast<uint32_t>(file.records.size()));
  binary::put_u32(out, static_cast<uint32_t>(file.dim));
  auto write_vec = [&](const Vector &v) {
    if (static_cast<int>(v.size()) != file.dim) throw Error(ErrorCode::kShapeMismatch, "embedding vector length");
    for (double x : v) binary::put_f32(out, static_cast<float>(x));
  };
  for (const auto &[key, e] : file.records) {
    binary::put_string(out, key);
    write_vec(e.cls);
    binary::put_u32(out, static_cast<uint32_t>(e.tokens.size()));
    for (const auto &t : e.tokens) write_vec(t);
  }
}

EmbeddingFile load_embedding_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return read_embedding_file(in);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_embedding_file(const std::string &path, const EmbeddingFile &file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  write_embedding_file(out, file);
}

TableEmbeddingSource::TableEmbeddingSource(EmbeddingFile file) : file_(std::move(file)) {
  for (size_t i = 0; i < file_.records.size(); ++i) index_.emplace(file_.records[i].first, i);
}

const SentenceEmbedding *TableEmbeddingSource::find(std::string_view sentence_id) const {
  auto it = index_.find(sentence_id);
  return it == index_.end() ? nullptr : &file_.records[it->second].second;
}

HashEncoder::HashEncoder(int dim, uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim <= 0) throw Error(ErrorCode::kConfig, "encoder dim must be positive");
  uint64_t state = seed ^ 0x5eedULL;
  projection_.resize(static_cast<size_t>(dim) * 2 * static_cast<size_t>(dim));
  double scale = std::sqrt(3.0 / (2.0 * dim));
  for (auto &w : projection_) w = next_symmetric(state) * scale;
}

Vector HashEncoder::token_vector(std::string_view token) const {
  std::string lower(token);
  for (auto &c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  uint64_t state = fnv1a64(lower, seed_);
  Vector v(static_cast<size_t>(dim_));
  double scale = std::sqrt(3.0 / dim_);
  for (auto &x : v) x = next_symmetric(state) * scale;
  return v;
}

SentenceEmbedding HashEncoder::encode_sentence(const std::vector<std::string> &tokens) const {
  SentenceEmbedding e;
  for (const auto &t : tokens) e.tokens.push_back(token_vector(t));
  e.cls = mean_of(e.tokens, dim_);
  return e;
}

Vector HashEncoder::encode_pair(std::string_view candidate, std::string_view context) const {
  auto mean_tokens = [&](std::string_view text) {
    std::vector<Vector> rows;
    for (const auto &t : simple_tokenize(text)) rows.push_back(token_vector(t));
    return mean_of(rows, dim_);
  };
  Vector joint = mean_tokens(candidate);
  Vector ctx = mean_tokens(context);
  joint.insert(joint.end(), ctx.begin(), ctx.end());
  Vector out(static_cast<size_t>(dim_), 0.0);
  const size_t width = 2 * static_cast<size_t>(dim_);
  for (size_t i = 0; i < out.size(); ++i) {
    for (size_t j = 0; j < width; ++j) out[i] += projection_[i * width + j] * joint[j];
  }
  return out;
}

EmbeddingFile hash_embed_corpus(const std::vector<CorpusDocument> &docs, const HashEncoder &encoder) {
  EmbeddingFile file;
  file.dim = encoder.dim();
  for (const auto &doc : docs) {
    for (const auto &s : doc.sentences) file.records.emplace_back(s.id, encoder.encode_sentence(s.tokens));
  }
  return file;
}

const Vector &EmbeddingTable::at(std::string_view node_id) const {
  for (size_t i = 0; i < node_ids.size(); ++i) {
    if (node_ids[i] == node_id) return vectors[i];
  }
  throw Error(ErrorCode::kMissingEmbedding, std::string(node_id));
}

EmbeddingTable init_node_embeddings(const DocumentSemanticGraph &graph, const EmbeddingSource &source) {
  EmbeddingTable table;
  table.dim = source.dim();
  const size_t dim = static_cast<size_t>(table.dim);
  auto lookup = [&](const std::string &sid) -> const SentenceEmbedding & {
    const SentenceEmbedding *e = source.find(sid);
    if (e == nullptr) throw Error(ErrorCode::kMissingEmbedding, sid);
    if (e->cls.size() != dim) throw Error(ErrorCode::kShapeMismatch, "sentence vector for " + sid);
    return *e;
  };

  table.node_ids.reserve(graph.nodes.size());
  table.vectors.assign(graph.nodes.size(), Vector(dim, 0.0));
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    const Node &node = graph.nodes[i];
    table.node_ids.push_back(node.id);
    if (node.type == NodeType::kSentence) {
      table.vectors[i] = lookup(node.sentence_id).cls;
    } else if (node.type == NodeType::kConcept) {
      std::vector<Vector> pooled;
      for (const auto &m : node.provenance) {
        const SentenceEmbedding &e = lookup(m.sentence_id);
        for (int t = m.start; t < m.end; ++t) {
          if (t < 0 || t >= static_cast<int>(e.tokens.size())) {
            throw Error(ErrorCode::kMissingEmbedding, m.sentence_id + " token " + std::to_string(t));
          }
          pooled.push_back(e.tokens[static_cast<size_t>(t)]);
        }
      }
      table.vectors[i] = pooled.empty() ? lookup(node.sentence_id).cls : mean_of(pooled, table.dim);
    }
  }
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    if (graph.nodes[i].type != NodeType::kSource) continue;
    std::vector<Vector> sentences;
    for (const auto &e : graph.edges) {
      if (e.type == EdgeType::kSourceContains && e.src == static_cast<int>(i)) {
        sentences.push_back(table.vectors[static_cast<size_t>(e.dst)]);
      }
    }
    table.vectors[i] = mean_of(sentences, table.dim);
  }
  return table;
}

}  // namespace docgraph
