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

#ifndef DOCGRAPH_SYNTHETIC_H_
#define DOCGRAPH_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "docgraph/amr.h"
#include "docgraph/dialog.h"
#include "docgraph/embeddings.h"
#include "docgraph/semgraph.h"

namespace docgraph {

// Documents of planted entities. Each entity gets an introduction sentence
// ("<Name> appears in the story") in a cast passage and an event sentence
// ("they <verb> the <object>") in a plot passage; a coreference cluster
// ties the pronoun to the name with probability `coref_rate`. Each
// document casts distinct names from a pool of `vocab`; verbs and objects
// are drawn with replacement from `filler_vocab` words each, so event
// sentences look alike unless the graph links them to a name. A turn asks
// about one entity by name; its gold is that entity's event sentence, and
// the candidates are all event sentences of the document.
struct SyntheticConfig {
  int docs = 10;
  int sentences_per_doc = 8;  // two per entity
  int vocab = 12;         // entity names
  int filler_vocab = 1;   // verbs and objects
  double coref_rate = 1.0;
  int turns_per_doc = 5;
  int background_sentences = 4;  // entity-free sentences in a third passage
  int dim = 16;
  double context_weight = 3.0;  // asked entity's share of a context vector

  void validate() const;
  bool operator==(const SyntheticConfig &) const = default;
};

struct SyntheticDataset {
  std::vector<CorpusDocument> docs;
  DocumentManifest manifest;
  std::vector<CorefClusters> coref;
  std::vector<DialogTurn> turns;
  EmbeddingFile node_embeddings;
  // Keyed "dialog_id:turn_index:sentence_id": the asked entity's name
  // vector plus the candidate's sentence vector.
  EmbeddingFile context_embeddings;
  // Name of the entity each turn asks about, aligned with `turns`.
  std::vector<std::string> turn_entities;
};

SyntheticDataset gen_synthetic(uint64_t seed, const SyntheticConfig &config);

// corpus.amr, manifest.json, coref.jsonl, dialogs.jsonl, embeddings.bin,
// context_embeddings.bin
void write_synthetic(const SyntheticDataset &data, const std::filesystem::path &dir);

}  // namespace docgraph

#endif  // DOCGRAPH_SYNTHETIC_H_
