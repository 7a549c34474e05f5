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


// docgraph command line: graph building, training, selection, evaluation,
// synthetic data and an interactive graph inspector.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "docgraph/config.h"
#include "docgraph/error.h"
#include "docgraph/metrics.h"
#include "docgraph/semgraph.h"
#include "docgraph/synthetic.h"
#include "docgraph/train.h"

namespace fs = std::filesystem;

namespace docgraph {
namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

// Flags shared by the run commands. Anything set here overrides the config
// file.
struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::string variant;
  std::string loss;
  std::string out;
  RunPaths paths;
  std::optional<int> epochs;
};

void add_common(CLI::App *cmd, CommonFlags &f) {
  cmd->add_option("--config", f.config, "Run config JSON");
  cmd->add_option("--seed", f.seed, "Seed for every random stream");
  cmd->add_option("--variant", f.variant, "Graph variant")
      ->check(CLI::IsMember({"full", "sentence", "coref", "homogeneous"}));
  cmd->add_option("--loss", f.loss, "Training loss")->check(CLI::IsMember({"joint", "sentence"}));
  cmd->add_option("--out", f.out, "Output directory or file");
  cmd->add_option("--corpus", f.paths.corpus, "AMR corpus file");
  cmd->add_option("--manifest", f.paths.manifest, "Document manifest JSON");
  cmd->add_option("--coref", f.paths.coref, "Coreference clusters (JSON or JSONL)");
  cmd->add_option("--embeddings", f.paths.embeddings, "Sentence embedding file");
  cmd->add_option("--context-embeddings", f.paths.context_embeddings, "Context embedding file");
  cmd->add_option("--dialogs", f.paths.dialogs, "Dialog turns JSONL");
  cmd->add_option("--checkpoint", f.paths.checkpoint, "Model checkpoint");
}

RunConfig resolve(const CommonFlags &f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  if (f.seed) c.train.seed = *f.seed;
  if (!f.variant.empty()) c.variant = variant_from_name(f.variant);
  if (!f.loss.empty()) c.loss = loss_mode_from_name(f.loss);
  if (f.epochs) c.train.epochs = *f.epochs;
  auto take = [](std::string &dst, const std::string &src) {
    if (!src.empty()) dst = src;
  };
  take(c.paths.corpus, f.paths.corpus);
  take(c.paths.manifest, f.paths.manifest);
  take(c.paths.coref, f.paths.coref);
  take(c.paths.embeddings, f.paths.embeddings);
  take(c.paths.context_embeddings, f.paths.context_embeddings);
  take(c.paths.dialogs, f.paths.dialogs);
  take(c.paths.checkpoint, f.paths.checkpoint);
  take(c.paths.output_dir, f.out);
  c.validate();
  return c;
}

void write_file(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

// The model settings travel next to the checkpoint.
std::string model_manifest_path(const std::string &checkpoint) { return checkpoint + ".json"; }

std::string require_checkpoint(const RunConfig &c) {
  if (c.paths.checkpoint.empty()) throw Error(ErrorCode::kConfig, "no checkpoint path configured (--checkpoint)");
  return c.paths.checkpoint;
}

struct Model {
  EgatParams params;
  EgatConfig config;
};

Model load_model(const std::string &checkpoint) {
  return {EgatParams::load(checkpoint), egat_config_from_json(read_file(model_manifest_path(checkpoint)))};
}

int cmd_build_graph(const CommonFlags &f) {
  RunConfig c = resolve(f);
  if (c.paths.corpus.empty() || c.paths.coref.empty()) {
    throw Error(ErrorCode::kConfig, "build-graph needs --corpus and --coref");
  }
  std::vector<CorpusDocument> docs = load_corpus(c.paths.corpus, c.paths.manifest);
  std::vector<CorefClusters> coref = load_coref_file(c.paths.coref);
  const fs::path out = c.paths.output_dir.empty() ? fs::path("graphs") : fs::path(c.paths.output_dir);
  for (const CorpusDocument &doc : docs) {
    CorefClusters clusters{doc.doc_id, {}};
    for (const CorefClusters &cc : coref) {
      if (cc.doc_id == doc.doc_id) clusters = cc;
    }
    GraphDiagnostics diag;
    DocumentSemanticGraph g = build_document_graph(doc, clusters, c.variant, &diag);
    write_file(out / (doc.doc_id + ".graph.json"), graph_to_json(g));
    std::printf("%s nodes=%zu edges=%zu merges=%d dropped_mentions=%d\n", doc.doc_id.c_str(), g.nodes.size(),
                g.edges.size(), diag.merges, diag.dropped_mentions);
    for (const std::string &m : diag.messages) std::fprintf(stderr, "%s: %s\n", doc.doc_id.c_str(), m.c_str());
  }
  return 0;
}

int cmd_train(const CommonFlags &f) {
  RunConfig c = resolve(f);
  Dataset data = load_dataset(c.paths, true);
  Workspace ws = prepare_workspace(data, c);
  TrainConfig tc = c.effective_train();
  const fs::path out = c.paths.output_dir.empty() ? fs::path("run") : fs::path(c.paths.output_dir);
  const std::string checkpoint = c.paths.checkpoint.empty() ? (out / "model.ckpt").string() : c.paths.checkpoint;
  TrainResult r = train(ws, tc, [&](int epoch, const LossRecord &m, const EgatParams &) {
    std::fprintf(stderr, "epoch %d loss_c=%.6f loss_n=%.6f loss_total=%.6f\n", epoch, m.loss_c, m.loss_n,
                 m.loss_total);
  });
  fs::create_directories(out);
  if (fs::path(checkpoint).has_parent_path()) fs::create_directories(fs::path(checkpoint).parent_path());
  r.params.save(checkpoint);
  EgatConfig model = tc.egat;
  model.input_dim = data.node_embeddings.dim;
  write_file(model_manifest_path(checkpoint), egat_config_to_json(model));
  write_file(out / "loss_log.csv", loss_log_csv(r.steps));
  RunConfig archived = c;
  archived.paths.checkpoint = checkpoint;
  archived.paths.output_dir = out.string();
  write_file(out / "run_config.json", run_config_to_json(archived));
  std::printf("checkpoint %s\nloss log %s\n", checkpoint.c_str(), (out / "loss_log.csv").string().c_str());
  return 0;
}

void emit(const std::string &out, const std::string &text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
}

int cmd_select(const CommonFlags &f) {
  RunConfig c = resolve(f);
  Model model = load_model(require_checkpoint(c));
  Dataset data = load_dataset(c.paths, true);
  Workspace ws = prepare_workspace(data, c);
  std::string text;
  for (const RankedSelection &s : select_all(model.params, model.config, ws)) text += selection_to_json_line(s) + "\n";
  emit(f.out, text);
  return 0;
}

int cmd_evaluate(const CommonFlags &f, const std::string &selections_path) {
  RunConfig c = resolve(f);
  if (c.paths.dialogs.empty()) throw Error(ErrorCode::kConfig, "evaluate needs --dialogs for the gold labels");
  std::map<std::string, std::vector<std::string>> gold;
  for (const DialogTurn &t : load_dialogs(c.paths.dialogs)) {
    if (auto g = t.gold_sentence()) gold[t.key()].push_back(*g);
  }
  std::vector<RankedSelection> selections;
  std::istringstream lines(read_file(selections_path));
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      selections.push_back(selection_from_json_line(line));
    } catch (const Error &e) {
      throw Error(e.code(), selections_path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  emit(f.out, report_to_json(eval_ranking(selections, gold)) + "\n");
  return 0;
}

int cmd_synth(uint64_t seed, const SyntheticConfig &sc, const std::string &out) {
  SyntheticDataset data = gen_synthetic(seed, sc);
  const fs::path dir = out.empty() ? fs::path("synthetic") : fs::path(out);
  write_synthetic(data, dir);
  std::printf("%zu documents, %zu turns written to %s\n", data.docs.size(), data.turns.size(), dir.string().c_str());
  return 0;
}

// Interactive inspector over document graphs loaded from dumps or built
// from the configured corpus.
class Inspector {
 public:
  Inspector(RunConfig config, const std::vector<std::string> &graph_files) : config_(std::move(config)) {
    for (const std::string &path : graph_files) add(graph_from_json(read_file(path)));
    if (graph_files.empty()) {
      if (config_.paths.corpus.empty()) throw Error(ErrorCode::kConfig, "inspect needs --graph or --corpus");
      std::vector<CorefClusters> coref;
      if (!config_.paths.coref.empty()) coref = load_coref_file(config_.paths.coref);
      for (const CorpusDocument &doc : load_corpus(config_.paths.corpus, config_.paths.manifest)) {
        CorefClusters clusters{doc.doc_id, {}};
        for (const CorefClusters &cc : coref) {
          if (cc.doc_id == doc.doc_id) clusters = cc;
        }
        add(build_document_graph(doc, clusters, config_.variant));
      }
    }
  }

  void run(std::istream &in, std::ostream &out) {
    std::string line;
    while (out << "> " << std::flush, std::getline(in, line)) {
      std::istringstream words(line);
      std::string cmd;
      if (!(words >> cmd)) continue;
      if (cmd == "quit" || cmd == "exit") break;
      try {
        dispatch(cmd, words, out);
      } catch (const Error &e) {
        out << "error: " << e.what() << "\n";
      }
    }
    out << "\n";
  }

 private:
  void add(DocumentSemanticGraph g) {
    const std::string id = g.doc_id;
    graphs_.emplace(id, std::move(g));
  }

  std::pair<const DocumentSemanticGraph *, int> find(const std::string &id) const {
    for (const auto &[doc, g] : graphs_) {
      int n = g.find_node(id);
      if (n >= 0) return {&g, n};
    }
    throw Error(ErrorCode::kUnknownSentence, "no node " + id);
  }

  static void help(std::ostream &out) {
    out << "commands:\n"
           "  node <id>                      node type, name and members\n"
           "  neighbors <id>                 typed outgoing edges\n"
           "  paths <sentence_id> <hops>     linearized semantic paths\n"
           "  score <dialog_id> <turn>       rank the turn's candidates (needs --checkpoint)\n"
           "  help | quit\n";
  }

  void dispatch(const std::string &cmd, std::istringstream &args, std::ostream &out) {
    std::string id;
    if (cmd == "node" && args >> id) {
      auto [g, n] = find(id);
      const Node &node = g->nodes[static_cast<size_t>(n)];
      out << node.id << " type=" << node_type_name(node.type) << " name=\"" << node.name << "\"";
      if (!node.concept_label.empty()) out << " concept=" << node.concept_label;
      if (!node.sentence_id.empty()) out << " sentence=" << node.sentence_id;
      out << "\n";
      for (const auto &[sid, var] : node.members) out << "  member " << sid << "/" << var << "\n";
      for (const Mention &m : node.provenance) {
        out << "  mention " << m.sentence_id << " [" << m.start << "," << m.end << ") \"" << m.surface << "\"\n";
      }
    } else if (cmd == "neighbors" && args >> id) {
      auto [g, n] = find(id);
      for (const Edge &e : g->edges) {
        if (e.src != n) continue;
        out << edge_type_name(e.type) << (e.role.empty() ? "" : " :" + e.role) << " -> "
            << g->nodes[static_cast<size_t>(e.dst)].id << "\n";
      }
    } else if (cmd == "paths" && args >> id) {
      int hops = 0;
      if (!(args >> hops) || hops < 0) return help(out);
      const DocumentSemanticGraph *g = nullptr;
      for (const auto &[doc, candidate] : graphs_) {
        if (candidate.sentence_node(id) >= 0) g = &candidate;
      }
      if (!g) throw Error(ErrorCode::kUnknownSentence, "no sentence " + id);
      for (const PathTuple &p : linearize_paths(*g, id, hops)) {
        out << "(";
        for (size_t i = 0; i < p.parts.size(); ++i) out << (i ? ", " : "") << p.parts[i];
        out << ")\n";
      }
    } else if (cmd == "score" && args >> id) {
      int turn = 0;
      if (!(args >> turn)) return help(out);
      score(id + ":" + std::to_string(turn), out);
    } else {
      help(out);
    }
  }

  void score(const std::string &key, std::ostream &out) {
    if (config_.paths.checkpoint.empty()) {
      out << "score needs a trained model: restart inspect with --checkpoint <file> plus the dialog and "
             "embedding paths\n";
      return;
    }
    if (!workspace_) {
      model_ = std::make_unique<Model>(load_model(config_.paths.checkpoint));
      Dataset data = load_dataset(config_.paths, true);
      workspace_ = std::make_unique<Workspace>(prepare_workspace(data, config_));
    }
    for (const PreparedTurn &t : workspace_->turns) {
      if (t.turn.key() != key) continue;
      RankedSelection s = select_knowledge(model_->params, model_->config, t);
      for (size_t i = 0; i < s.ranking.size(); ++i) {
        out << i + 1 << " " << s.ranking[i].first << " " << s.ranking[i].second << "\n";
      }
      return;
    }
    out << "no turn " << key << "\n";
  }

  RunConfig config_;
  std::map<std::string, DocumentSemanticGraph> graphs_;
  std::unique_ptr<Model> model_;
  std::unique_ptr<Workspace> workspace_;
};

int run(int argc, char **argv) {
  CLI::App app{"Document semantic graphs and knowledge selection"};
  app.require_subcommand(1);
  CommonFlags build, train_flags, select, evaluate, inspect;

  CLI::App *build_cmd = app.add_subcommand("build-graph", "Build document graphs and write one JSON dump per document");
  add_common(build_cmd, build);

  CLI::App *train_cmd = app.add_subcommand("train", "Train the selector and write checkpoint and loss log");
  add_common(train_cmd, train_flags);
  train_cmd->add_option("--epochs", train_flags.epochs, "Override the number of epochs");

  CLI::App *select_cmd = app.add_subcommand("select", "Rank candidates of every turn as JSONL");
  add_common(select_cmd, select);

  std::string selections;
  CLI::App *eval_cmd = app.add_subcommand("evaluate", "Score a selection file against dialog gold labels");
  add_common(eval_cmd, evaluate);
  eval_cmd->add_option("--selections", selections, "Selection JSONL from select")->required();

  uint64_t synth_seed = 0;
  std::string synth_out;
  SyntheticConfig sc;
  CLI::App *synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic dataset directory");
  synth_cmd->add_option("--seed", synth_seed, "Generator seed");
  synth_cmd->add_option("--out", synth_out, "Output directory");
  synth_cmd->add_option("--docs", sc.docs, "Documents");
  synth_cmd->add_option("--sentences-per-doc", sc.sentences_per_doc, "Entity sentences per document (even)");
  synth_cmd->add_option("--turns-per-doc", sc.turns_per_doc, "Dialog turns per document");
  synth_cmd->add_option("--vocab", sc.vocab, "Entity name pool size");
  synth_cmd->add_option("--filler-vocab", sc.filler_vocab, "Verb and object pool size");
  synth_cmd->add_option("--coref-rate", sc.coref_rate, "Probability a plot mention joins its entity's cluster");
  synth_cmd->add_option("--background", sc.background_sentences, "Entity-free sentences per document");
  synth_cmd->add_option("--dim", sc.dim, "Embedding dimension");
  synth_cmd->add_option("--context-weight", sc.context_weight, "Entity share of context vectors");

  std::vector<std::string> graph_files;
  CLI::App *inspect_cmd = app.add_subcommand("inspect", "Interactive graph inspector reading commands from stdin");
  add_common(inspect_cmd, inspect);
  inspect_cmd->add_option("--graph", graph_files, "Graph dump(s) from build-graph");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*build_cmd) return cmd_build_graph(build);
    if (*train_cmd) return cmd_train(train_flags);
    if (*select_cmd) return cmd_select(select);
    if (*eval_cmd) return cmd_evaluate(evaluate, selections);
    if (*synth_cmd) return cmd_synth(synth_seed, sc, synth_out);
    if (*inspect_cmd) {
      Inspector(resolve(inspect), graph_files).run(std::cin, std::cout);
      return 0;
    }
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::kNonFinite ? kExitNumeric : kExitInput;
  } catch (const fs::filesystem_error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return 0;
}

}  // namespace
}  // namespace docgraph

int main(int argc, char **argv) { return docgraph::run(argc, argv); }
