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

#include "docgraph/config.h"

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "docgraph/error.h"
#include "json.hpp"

namespace docgraph {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown(const json &j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, std::string(where) + " must be an object");
  for (const auto &[key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw Error(ErrorCode::kConfig, "unknown key \"" + key + "\" in " + std::string(where));
  }
}

template <typename T>
void read(const json &j, const char *key, T &out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

EgatConfig egat_from(const json &j, EgatConfig cfg) {
  reject_unknown(j, "model", {"hidden_dim", "layers", "type_dim", "input_dim", "beta", "negatives"});
  read(j, "hidden_dim", cfg.hidden_dim);
  read(j, "layers", cfg.layers);
  read(j, "type_dim", cfg.type_dim);
  read(j, "input_dim", cfg.input_dim);
  read(j, "beta", cfg.beta);
  read(j, "negatives", cfg.negatives);
  return cfg;
}

ordered_json egat_to(const EgatConfig &c) {
  return {{"hidden_dim", c.hidden_dim}, {"layers", c.layers},  {"type_dim", c.type_dim},
          {"input_dim", c.input_dim},   {"beta", c.beta},      {"negatives", c.negatives}};
}

}  // namespace

std::string_view loss_mode_name(LossMode mode) { return mode == LossMode::kJoint ? "joint" : "sentence"; }

LossMode loss_mode_from_name(std::string_view name) {
  if (name == "joint") return LossMode::kJoint;
  if (name == "sentence") return LossMode::kSentence;
  throw Error(ErrorCode::kConfig, "unknown loss mode \"" + std::string(name) + "\" (joint | sentence)");
}

TrainConfig RunConfig::effective_train() const {
  TrainConfig t = train;
  if (loss == LossMode::kSentence) t.egat.beta = 0.0;
  return t;
}

void RunConfig::validate() const {
  train.validate();
  if (context_window < 1) throw Error(ErrorCode::kConfig, "context_window must be at least 1");
  if (train.egat.hidden_dim <= 0 || train.egat.layers < 0 || train.egat.type_dim <= 0 || train.egat.negatives < 0 ||
      train.egat.input_dim < 0 || train.egat.beta < 0) {
    throw Error(ErrorCode::kConfig, "invalid model settings");
  }
}

RunConfig parse_run_config(std::string_view json_text) {
  RunConfig cfg;
  try {
    json j = json::parse(json_text);
    reject_unknown(j, "config", {"train", "model", "variant", "loss", "context_window", "paths"});
    if (j.contains("train")) {
      const json &t = j.at("train");
      reject_unknown(t, "train", {"learning_rate", "batch_size", "epochs", "seed", "adam"});
      read(t, "learning_rate", cfg.train.learning_rate);
      read(t, "batch_size", cfg.train.batch_size);
      read(t, "epochs", cfg.train.epochs);
      read(t, "seed", cfg.train.seed);
      if (t.contains("adam")) {
        const json &a = t.at("adam");
        reject_unknown(a, "adam", {"beta1", "beta2", "epsilon"});
        read(a, "beta1", cfg.train.adam.beta1);
        read(a, "beta2", cfg.train.adam.beta2);
        read(a, "epsilon", cfg.train.adam.epsilon);
      }
    }
    if (j.contains("model")) cfg.train.egat = egat_from(j.at("model"), cfg.train.egat);
    if (j.contains("variant")) cfg.variant = variant_from_name(j.at("variant").get<std::string>());
    if (j.contains("loss")) cfg.loss = loss_mode_from_name(j.at("loss").get<std::string>());
    read(j, "context_window", cfg.context_window);
    if (j.contains("paths")) {
      const json &p = j.at("paths");
      reject_unknown(p, "paths",
                     {"corpus", "manifest", "coref", "embeddings", "context_embeddings", "dialogs", "checkpoint",
                      "output_dir"});
      read(p, "corpus", cfg.paths.corpus);
      read(p, "manifest", cfg.paths.manifest);
      read(p, "coref", cfg.paths.coref);
      read(p, "embeddings", cfg.paths.embeddings);
      read(p, "context_embeddings", cfg.paths.context_embeddings);
      read(p, "dialogs", cfg.paths.dialogs);
      read(p, "checkpoint", cfg.paths.checkpoint);
      read(p, "output_dir", cfg.paths.output_dir);
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string &path) {
  try {
    return parse_run_config(read_file(path));
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string run_config_to_json(const RunConfig &c) {
  ordered_json j;
  j["train"] = {{"learning_rate", c.train.learning_rate},
                {"batch_size", c.train.batch_size},
                {"epochs", c.train.epochs},
                {"seed", c.train.seed},
                {"adam", {{"beta1", c.train.adam.beta1}, {"beta2", c.train.adam.beta2}, {"epsilon", c.train.adam.epsilon}}}};
  j["model"] = egat_to(c.train.egat);
  j["variant"] = std::string(variant_name(c.variant));
  j["loss"] = std::string(loss_mode_name(c.loss));
  j["context_window"] = c.context_window;
  j["paths"] = {{"corpus", c.paths.corpus},
                {"manifest", c.paths.manifest},
                {"coref", c.paths.coref},
                {"embeddings", c.paths.embeddings},
                {"context_embeddings", c.paths.context_embeddings},
                {"dialogs", c.paths.dialogs},
                {"checkpoint", c.paths.checkpoint},
                {"output_dir", c.paths.output_dir}};
  return j.dump(2);
}

std::string egat_config_to_json(const EgatConfig &config) { return egat_to(config).dump(2); }

EgatConfig egat_config_from_json(std::string_view json_text) {
  try {
    return egat_from(json::parse(json_text), EgatConfig{});
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfig, std::string("model manifest: ") + e.what());
  }
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<CorefClusters> load_coref_file(const std::string &path) {
  const std::string text = read_file(path);
  std::vector<CorefClusters> out;
  json whole = json::parse(text, nullptr, false);
  if (!whole.is_discarded()) {
    if (whole.is_array()) {
      for (const auto &item : whole) out.push_back(parse_coref(item.dump()));
    } else {
      out.push_back(parse_coref(text));
    }
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_coref(line));
    } catch (const Error &e) {
      throw Error(e.code(), path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<DialogTurn> load_dialogs(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return parse_dialogs(in, path);
}

std::vector<CorpusDocument> load_corpus(const std::string &corpus_path, const std::string &manifest_path) {
  std::ifstream in(corpus_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + corpus_path);
  if (manifest_path.empty()) return parse_corpus(in, nullptr, corpus_path);
  DocumentManifest manifest;
  try {
    manifest = parse_manifest(read_file(manifest_path));
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), manifest_path + ": " + e.what());
  }
  return parse_corpus(in, &manifest, corpus_path);
}

Dataset load_dataset(const RunPaths &paths, bool with_dialogs) {
  auto require = [](const std::string &value, const char *what) {
    if (value.empty()) throw Error(ErrorCode::kConfig, std::string("no ") + what + " path configured");
  };
  require(paths.corpus, "corpus");
  require(paths.coref, "coref");
  require(paths.embeddings, "embeddings");
  Dataset data;
  data.docs = load_corpus(paths.corpus, paths.manifest);
  data.coref = load_coref_file(paths.coref);
  data.node_embeddings = load_embedding_file(paths.embeddings);
  if (!paths.context_embeddings.empty()) data.context_embeddings = load_embedding_file(paths.context_embeddings);
  if (with_dialogs) {
    require(paths.dialogs, "dialogs");
    data.turns = load_dialogs(paths.dialogs);
  }
  return data;
}

std::unique_ptr<ContextEncoder> make_context_encoder(const Dataset &data, uint64_t seed) {
  if (data.context_embeddings.dim > 0) return std::make_unique<PrecomputedContextEncoder>(data.context_embeddings);
  return std::make_unique<HashContextEncoder>(HashEncoder(data.node_embeddings.dim, seed));
}

Workspace prepare_workspace(const Dataset &data, const RunConfig &config) {
  auto encoder = make_context_encoder(data, config.train.seed);
  TableEmbeddingSource source(data.node_embeddings);
  return prepare_workspace(data.docs, data.coref, config.variant, source, *encoder, data.turns,
                           config.context_window);
}

}  // namespace docgraph
