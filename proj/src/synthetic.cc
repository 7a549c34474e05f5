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

#include "docgraph/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "docgraph/error.h"
#include "rng.h"
#include "json.hpp"

namespace docgraph {
namespace {

constexpr std::string_view kOnsets = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string make_word(std::mt19937_64 &rng) {
  std::string w;
  for (int s = 0; s < 3; ++s) {
    w += kOnsets[rng::draw(rng, kOnsets.size())];
    w += kVowels[rng::draw(rng, kVowels.size())];
  }
  return w;
}

std::vector<std::string> make_pool(std::mt19937_64 &rng, int size, std::set<std::string> &used) {
  std::vector<std::string> pool;
  while (static_cast<int>(pool.size()) < size) {
    std::string w = make_word(rng);
    if (used.insert(w).second) pool.push_back(w);
  }
  return pool;
}

std::vector<size_t> pick_distinct(std::mt19937_64 &rng, size_t pool, size_t count) {
  std::vector<size_t> idx(pool);
  std::iota(idx.begin(), idx.end(), 0);
  for (size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng::draw(rng, pool - i)]);
  idx.resize(count);
  return idx;
}

CorpusSentence make_sentence(std::string id, const std::vector<std::string> &tokens, const std::string &penman) {
  CorpusSentence s;
  s.id = std::move(id);
  for (const auto &t : tokens) s.text += (s.text.empty() ? "" : " ") + t;
  s.tokens = tokens;
  s.amr = parse_amr(penman);
  s.amr.sentence_id = s.id;
  return s;
}

std::string capitalize(std::string w) {
  w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

std::string doc_name(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "syn%03d", k);
  return buf;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (docs < 1 || sentences_per_doc < 2 || turns_per_doc < 1 || dim < 1) {
    throw Error(ErrorCode::kConfig, "synthetic sizes must be positive (sentences_per_doc >= 2)");
  }
  if (vocab < sentences_per_doc / 2) throw Error(ErrorCode::kConfig, "vocab smaller than entities per document");
  if (background_sentences < 0) throw Error(ErrorCode::kConfig, "background_sentences must be non-negative");
  if (filler_vocab < 1) throw Error(ErrorCode::kConfig, "filler_vocab must be positive");
  if (!(coref_rate >= 0.0 && coref_rate <= 1.0)) throw Error(ErrorCode::kConfig, "coref_rate outside [0, 1]");
}

SyntheticDataset gen_synthetic(uint64_t seed, const SyntheticConfig &config) {
  config.validate();
  SyntheticDataset data;
  auto words = rng::keyed_stream(seed, "vocabulary");
  std::set<std::string> used = {"appears", "in", "the", "story", "they", "what", "would", "you", "like",
                                "to", "talk", "about", "tell", "me", "name", "person", "appear", "lies", "near", "lie"};
  const size_t entities = static_cast<size_t>(config.sentences_per_doc / 2);
  const std::vector<std::string> names = make_pool(words, config.vocab, used);
  const std::vector<std::string> verbs = make_pool(words, config.filler_vocab, used);
  const std::vector<std::string> objects = make_pool(words, config.filler_vocab, used);
  const std::vector<std::string> scenery = make_pool(words, 50, used);

  for (int k = 0; k < config.docs; ++k) {
    const std::string doc_id = doc_name(k);
    auto rng = rng::keyed_stream(seed, "doc\x1f" + doc_id);
    std::vector<size_t> name_idx = pick_distinct(rng, names.size(), entities);
    std::vector<size_t> verb_idx(entities), object_idx(entities);
    for (size_t e = 0; e < entities; ++e) {
      verb_idx[e] = rng::draw(rng, verbs.size());
      object_idx[e] = rng::draw(rng, objects.size());
    }

    CorpusDocument doc;
    doc.doc_id = doc_id;
    Passage cast{doc_id + "-cast", {}};
    Passage plot{doc_id + "-plot", {}};
    CorefClusters coref{doc_id, {}};
    std::vector<CorpusSentence> plot_sentences;
    for (size_t e = 0; e < entities; ++e) {
      const std::string name = capitalize(names[name_idx[e]]);
      const std::string &verb = verbs[verb_idx[e]];
      const std::string &object = objects[object_idx[e]];
      const std::string cast_id = doc_id + ".c" + std::to_string(e);
      const std::string plot_id = doc_id + ".p" + std::to_string(e);
      doc.sentences.push_back(make_sentence(
          cast_id, {name, "appears", "in", "the", "story"},
          "(a / appear-01~e.1 :ARG1 (p / person :name (n / name :op1 \"" + name +
              "\"~e.0)) :location (s / story~e.4))"));
      plot_sentences.push_back(make_sentence(plot_id, {"they", verb, "the", object},
                                             "(v / " + verb + "-01~e.1 :ARG0 (t / they~e.0) :ARG1 (o / " + object +
                                                 "~e.3))"));
      cast.sentence_ids.push_back(cast_id);
      plot.sentence_ids.push_back(plot_id);
      std::vector<CorefMention> cluster{{cast_id, 0, 1}};
      if (rng::unit(rng) < config.coref_rate) cluster.push_back({plot_id, 0, 1});
      coref.clusters.push_back(std::move(cluster));
    }
    for (auto &s : plot_sentences) doc.sentences.push_back(std::move(s));
    doc.passages = {cast, plot};
    // Entity-free scenery: concepts that are never relevant.
    if (config.background_sentences > 0) {
      Passage setting{doc_id + "-setting", {}};
      for (int b = 0; b < config.background_sentences; ++b) {
        const std::string id = doc_id + ".s" + std::to_string(b);
        const std::string &thing = scenery[rng::draw(rng, scenery.size())];
        const std::string &place = scenery[rng::draw(rng, scenery.size())];
        doc.sentences.push_back(make_sentence(id, {"the", thing, "lies", "near", "the", place},
                                              "(l / lie-07~e.2 :ARG1 (t / " + thing + "~e.1) :location (p / " +
                                                  place + "~e.5))"));
        setting.sentence_ids.push_back(id);
      }
      doc.passages.push_back(setting);
    }
    data.manifest.documents.emplace_back(doc_id, doc.passages);
    data.coref.push_back(std::move(coref));

    std::vector<size_t> asked;
    while (asked.size() < static_cast<size_t>(config.turns_per_doc)) {
      size_t take = std::min(entities, static_cast<size_t>(config.turns_per_doc) - asked.size());
      auto more = pick_distinct(rng, entities, take);
      asked.insert(asked.end(), more.begin(), more.end());
    }
    for (int t = 0; t < config.turns_per_doc; ++t) {
      const size_t e = asked[static_cast<size_t>(t)];
      const std::string name = capitalize(names[name_idx[e]]);
      DialogTurn turn;
      turn.dialog_id = doc_id + "-dlg";
      turn.turn_index = t;
      turn.doc_id = doc_id;
      turn.history = {{"S", "What would you like to talk about?", {}}, {"U", "Tell me about " + name + ".", {}}};
      for (auto &u : turn.history) u.tokens = simple_tokenize(u.text);
      for (size_t j = 0; j < entities; ++j) {
        const CorpusSentence &s = doc.sentences[entities + j];  // event sentences follow the cast
        turn.candidates.push_back({s.id, s.text});
      }
      const std::string gold = doc_id + ".p" + std::to_string(e);
      turn.gold_sentence_id = gold;
      turn.gold_span = GoldSpan{gold, 0, 4};
      data.turns.push_back(std::move(turn));
      data.turn_entities.push_back(name);
    }
    data.docs.push_back(std::move(doc));
  }

  // Hash vectors have unit norm; scale them to unit variance per coordinate,
  // the rough magnitude of pretrained encoder states.
  HashEncoder encoder(config.dim, seed);
  const double scale = std::sqrt(static_cast<double>(config.dim));
  data.node_embeddings = hash_embed_corpus(data.docs, encoder);
  for (auto &[id, emb] : data.node_embeddings.records) {
    for (double &x : emb.cls) x *= scale;
    for (auto &token : emb.tokens) {
      for (double &x : token) x *= scale;
    }
  }
  std::map<std::string, const SentenceEmbedding *> by_id;
  for (const auto &[id, emb] : data.node_embeddings.records) by_id[id] = &emb;
  data.context_embeddings.dim = config.dim;
  for (size_t i = 0; i < data.turns.size(); ++i) {
    const DialogTurn &turn = data.turns[i];
    Vector entity = encoder.token_vector(data.turn_entities[i]);
    for (double &x : entity) x *= scale;
    for (const Candidate &c : turn.candidates) {
      SentenceEmbedding ctx;
      ctx.cls = by_id.at(c.sentence_id)->cls;
      for (size_t d = 0; d < ctx.cls.size(); ++d) ctx.cls[d] += config.context_weight * entity[d];
      data.context_embeddings.records.emplace_back(PrecomputedContextEncoder::key(turn, c.sentence_id),
                                                   std::move(ctx));
    }
  }
  return data;
}

void write_synthetic(const SyntheticDataset &data, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  std::string corpus;
  for (const auto &doc : data.docs) {
    for (const auto &s : doc.sentences) corpus += serialize_corpus_block(s) + "\n";
  }
  write_text(dir / "corpus.amr", corpus);
  write_text(dir / "manifest.json", serialize_manifest(data.manifest) + "\n");
  std::string coref;
  for (const auto &c : data.coref) coref += serialize_coref(c) + "\n";
  write_text(dir / "coref.jsonl", coref);
  std::string dialogs;
  for (const auto &t : data.turns) dialogs += dialog_to_json_line(t) + "\n";
  write_text(dir / "dialogs.jsonl", dialogs);
  save_embedding_file((dir / "embeddings.bin").string(), data.node_embeddings);
  save_embedding_file((dir / "context_embeddings.bin").string(), data.context_embeddings);
}

}  // namespace docgraph
