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

#ifndef DOCGRAPH_CONFIG_H_
#define DOCGRAPH_CONFIG_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "docgraph/amr.h"
#include "docgraph/dialog.h"
#include "docgraph/egat.h"
#include "docgraph/embeddings.h"
#include "docgraph/semgraph.h"
#include "docgraph/train.h"

namespace docgraph {

enum class LossMode { kJoint, kSentence };

std::string_view loss_mode_name(LossMode mode);
LossMode loss_mode_from_name(std::string_view name);

struct RunPaths {
  std::string corpus;
  std::string manifest;
  std::string coref;
  std::string embeddings;
  std::string context_embeddings;  // optional; hashed fallback when empty
  std::string dialogs;
  std::string checkpoint;
  std::string output_dir;

  bool operator==(const RunPaths &) const = default;
};

struct RunConfig {
  TrainConfig train;
  GraphVariant variant = GraphVariant::kFull;
  LossMode loss = LossMode::kJoint;
  int context_window = 2;
  RunPaths paths;

  // Training settings with the loss mode applied (beta = 0 for sentence).
  TrainConfig effective_train() const;
  void validate() const;
  bool operator==(const RunConfig &) const = default;
};

// Keys mirror the struct fields: {"train": {...,"adam": {...}},
// "model": {...}, "variant", "loss", "context_window", "paths": {...}}.
// Missing keys keep their defaults; unknown keys throw Error(kConfig).
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::string &path);
std::string run_config_to_json(const RunConfig &config);

std::string egat_config_to_json(const EgatConfig &config);
EgatConfig egat_config_from_json(std::string_view json_text);

// Everything a run reads from disk.
struct Dataset {
  std::vector<CorpusDocument> docs;
  std::vector<CorefClusters> coref;
  std::vector<DialogTurn> turns;
  EmbeddingFile node_embeddings;
  EmbeddingFile context_embeddings;  // dim 0 when not configured
};

std::string read_file(const std::string &path);
// A single coreference object, a JSON array of them, or one per line.
std::vector<CorefClusters> load_coref_file(const std::string &path);
std::vector<DialogTurn> load_dialogs(const std::string &path);
std::vector<CorpusDocument> load_corpus(const std::string &corpus_path, const std::string &manifest_path);

Dataset load_dataset(const RunPaths &paths, bool with_dialogs);

// Context encoder for the run: the precomputed table when present,
// otherwise hashed vectors seeded by `seed`.
std::unique_ptr<ContextEncoder> make_context_encoder(const Dataset &data, uint64_t seed);

Workspace prepare_workspace(const Dataset &data, const RunConfig &config);

}  // namespace docgraph

#endif  // DOCGRAPH_CONFIG_H_
