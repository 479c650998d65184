// Copyright 2026 The Extrap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EXTRAP_CLI_HPP
#define EXTRAP_CLI_HPP

// Command-line front end. Subcommands:
//
//   identity   train the five identity models, write a train/test MSE table
//   relation   synthetic pair classification, baseline vs symmetric head
//   embed      train CBOW embeddings (linear or broken-stick score)
//   analogy    3CosAdd accuracy of saved embeddings on a questions file
//   grid       write the synthetic grid corpus and its analogy questions
//   replay     re-run the command recorded in a manifest
//
// Every run writes <out>/<subcommand>.manifest.json next to its results.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif

#include "extrap/embeddings.hpp"
#include "extrap/identity.hpp"
#include "extrap/relation.hpp"

namespace extrap::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct CommonFlags {
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string format = "both";

  bool want_md() const { return format != "csv"; }
  bool want_csv() const { return format != "md"; }
};

inline void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Seed for every random draw")->capture_default_str();
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--format", f.format, "Table format")
      ->check(CLI::IsMember({"md", "csv", "both"}))
      ->capture_default_str();
}

/// Plain-text table rendered as markdown or CSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string markdown() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
      os << '|';
      for (const auto& c : cells) os << ' ' << c << " |";
      os << '\n';
    };
    line(header);
    os << '|';
    for (std::size_t i = 0; i < header.size(); ++i) os << "---|";
    os << '\n';
    for (const auto& r : rows) line(r);
    return os.str();
  }

  std::string csv() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string sci(double v) { return fmt("%.6e", v); }
inline std::string fixed4(double v) { return fmt("%.4f", v); }

/// Collects output files and writes the manifest at the end of a run.
class Run {
 public:
  Run(std::string subcommand, const CommonFlags& flags, std::vector<std::string> argv)
      : subcommand_(std::move(subcommand)),
        flags_(flags),
        argv_(std::move(argv)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(flags_.out);
  }

  fs::path path(const std::string& name) const { return fs::path(flags_.out) / name; }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = path(name);
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
    outputs_.push_back(p.string());
  }

  void record(const std::string& output_path) { outputs_.push_back(output_path); }

  void write_table(const std::string& stem, const Table& t) {
    if (flags_.want_md()) write(stem + ".md", t.markdown());
    if (flags_.want_csv()) write(stem + ".csv", t.csv());
  }

  json& config() { return config_; }

  void finish() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m;
    m["subcommand"] = subcommand_;
    m["argv"] = argv_;
    m["seed"] = flags_.seed;
    m["config"] = config_;
    m["deterministic"] = deterministic_;
    m["duration_seconds"] = secs;
    m["outputs"] = outputs_;
    const fs::path p = path(subcommand_ + ".manifest.json");
    std::ofstream out(p);
    out << m.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + p.string());
  }

 private:
  std::string subcommand_;
  CommonFlags flags_;
  std::vector<std::string> argv_;
  std::chrono::steady_clock::time_point start_;
  json config_ = json::object();
  std::vector<std::string> outputs_;
  bool deterministic_ = true;
};

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------------------

struct IdentityFlags {
  CommonFlags common;
  std::string models = "slp,flip,ortho,conv,proj";
  int epochs = 1000;
  double lr = 0.0;  // 0 → per-model default
  double beta = std::numbers::ln2;
  std::size_t proj_dim = 1;
};

inline int cmd_identity(const IdentityFlags& f, const std::vector<std::string>& argv,
                        std::ostream& out) {
  std::vector<identity::ModelKind> kinds;
  for (const auto& name : split_csv(f.models)) {
    auto k = identity::parse_model_kind(name);
    if (!k) throw CLI::ValidationError("--models", "unknown model '" + name + "'");
    kinds.push_back(*k);
  }
  if (kinds.empty()) throw CLI::ValidationError("--models", "no models selected");
  identity::TrainConfig cfg;
  cfg.epochs = f.epochs;
  cfg.seed = f.common.seed;
  cfg.beta = f.beta;
  cfg.proj_dim = f.proj_dim;
  if (f.lr > 0.0) cfg.learning_rate = f.lr;

  Run run("identity", f.common, argv);
  const auto rows = identity::run_suite(cfg, kinds);

  Table csv{{"model", "train_mse", "test_mse"}, {}};
  Table md{{"model", "train_mse", "test_mse", "decoded_train_mse", "decoded_test_mse"}, {}};
  json lrs = json::object();
  for (const auto& r : rows) {
    const std::string name(identity::to_string(r.kind));
    csv.rows.push_back({name, sci(r.report.train_mse), sci(r.report.test_mse)});
    md.rows.push_back({name, sci(r.report.train_mse), sci(r.report.test_mse),
                       r.report.decoded_train_mse ? sci(*r.report.decoded_train_mse) : "-",
                       r.report.decoded_test_mse ? sci(*r.report.decoded_test_mse) : "-"});
    lrs[name] = cfg.lr_for(r.kind);
  }
  if (f.common.want_md()) run.write("identity.md", md.markdown());
  if (f.common.want_csv()) run.write("identity.csv", csv.csv());
  run.config() = {{"models", f.models},   {"epochs", f.epochs},     {"learning_rates", lrs},
                  {"beta", f.beta},       {"proj_dim", f.proj_dim}, {"init_scale", cfg.init_scale},
                  {"format", f.common.format}};
  run.finish();
  out << md.markdown();
  return 0;
}

// ---------------------------------------------------------------------------

struct RelationFlags {
  CommonFlags common;
  std::size_t vocab = 40;
  std::size_t n_train = 300;
  std::size_t n_test = 300;
  double bias = 1.0;
  std::size_t dim = 16;
  std::size_t hidden = 16;
  int epochs = 500;
  double lr = 0.5;
  bool dump_data = false;
  std::string train_file;
  std::string test_file;
};

inline std::vector<relation::PairExample> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  return relation::read_dataset(in);
}

inline int cmd_relation(const RelationFlags& f, const std::vector<std::string>& argv,
                        std::ostream& out) {
  using namespace relation;
  if (f.train_file.empty() != f.test_file.empty()) {
    throw CLI::ValidationError("--train-file/--test-file", "give both or neither");
  }
  Run run("relation", f.common, argv);
  SynthData data;
  std::size_t vocab = f.vocab;
  if (!f.train_file.empty()) {
    data.train = read_pairs(f.train_file);
    data.test = read_pairs(f.test_file);
    for (const auto* split : {&data.train, &data.test})
      for (const auto& ex : *split) {
        for (auto t : ex.premise) vocab = std::max(vocab, t + 1);
        for (auto t : ex.hypothesis) vocab = std::max(vocab, t + 1);
      }
  } else {
    SynthConfig sc{f.vocab, f.n_train, f.n_test, f.bias, f.common.seed};
    data = gen_synthetic(sc);
  }
  if (f.dump_data) {
    std::ostringstream tr, te;
    write_dataset(tr, data.train);
    write_dataset(te, data.test);
    run.write("relation_train.tsv", tr.str());
    run.write("relation_test.tsv", te.str());
  }
  RelationTrainConfig tc{f.dim, f.hidden, f.epochs, f.lr, f.common.seed};
  const RelationModel baseline = train_relation(HeadVariant::baseline, tc, data.train, vocab);
  const RelationModel symmetric = train_relation(HeadVariant::symmetric, tc, data.train, vocab);
  const ReversalReport rb = reversal_report(baseline, data.test);
  const ReversalReport rs = reversal_report(symmetric, data.test);

  Table t{{"instances", "baseline", "symmetric"},
          {{"whole_test_set", fixed4(rb.whole), fixed4(rs.whole)},
           {"contradictions", fixed4(rb.contradictions), fixed4(rs.contradictions)},
           {"reversed_contradictions", fixed4(rb.reversed), fixed4(rs.reversed)}}};
  run.write_table("relation", t);
  run.config() = {{"vocab", vocab},
                  {"n_train", data.train.size()},
                  {"n_test", data.test.size()},
                  {"bias", f.bias},
                  {"dim", f.dim},
                  {"hidden", f.hidden},
                  {"epochs", f.epochs},
                  {"lr", f.lr},
                  {"train_file", f.train_file},
                  {"test_file", f.test_file},
                  {"format", f.common.format}};
  run.finish();
  out << t.markdown();
  return 0;
}

// ---------------------------------------------------------------------------

struct EmbedFlags {
  CommonFlags common;
  std::string corpus;
  std::string mode = "linear";
  std::string output;  // default <out>/embeddings_<mode>.txt
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  int epochs = 5;
  double lr = 0.05;
  std::uint64_t min_count = 5;
  double sample = 0.0;
  double stick_init = 0.5;
  double stick_lr_scale = 1.0;
  bool lowercase = false;
};

inline int cmd_embed(const EmbedFlags& f, const std::vector<std::string>& argv,
                     std::ostream& out) {
  using namespace embeddings;
  const auto mode = parse_score_mode(f.mode);
  if (!mode) throw CLI::ValidationError("--mode", "must be linear or stick");
  if (!fs::exists(f.corpus)) throw std::runtime_error("corpus '" + f.corpus + "' not found");
  Run run("embed", f.common, argv);
  const Corpus corpus = read_corpus_file(f.corpus, f.min_count, f.lowercase);
  if (corpus.vocab.empty()) {
    throw std::runtime_error("empty vocabulary after min_count=" + std::to_string(f.min_count));
  }
  TrainCfg cfg;
  cfg.dim = f.dim;
  cfg.window = f.window;
  cfg.negatives = f.negatives;
  cfg.epochs = f.epochs;
  cfg.learning_rate = f.lr;
  cfg.min_count = f.min_count;
  cfg.seed = f.common.seed;
  cfg.sample = f.sample;
  cfg.stick_init_scale = f.stick_init;
  cfg.stick_lr_scale = f.stick_lr_scale;
  TrainStats stats;
  const CbowModel model = train_cbow(corpus, cfg, *mode, &stats);

  const std::string emb_path =
      f.output.empty() ? run.path("embeddings_" + std::string(to_string(*mode)) + ".txt").string()
                       : f.output;
  if (auto parent = fs::path(emb_path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  save_embeddings(model, emb_path);
  run.record(emb_path);

  Table t{{"epoch", "mean_loss"}, {}};
  for (std::size_t e = 0; e < stats.epoch_mean_loss.size(); ++e)
    t.rows.push_back({std::to_string(e + 1), fmt("%.6f", stats.epoch_mean_loss[e])});
  run.write_table("embed_loss", t);
  run.config() = {{"corpus", f.corpus},
                  {"mode", f.mode},
                  {"output", emb_path},
                  {"vocab_size", corpus.vocab.size()},
                  {"tokens", corpus.n_tokens()},
                  {"dim", f.dim},
                  {"window", f.window},
                  {"negatives", f.negatives},
                  {"epochs", f.epochs},
                  {"lr", f.lr},
                  {"min_count", f.min_count},
                  {"sample", f.sample},
                  {"stick_init", f.stick_init},
                  {"stick_lr_scale", f.stick_lr_scale},
                  {"lowercase", f.lowercase},
                  {"threads", 1},
                  {"format", f.common.format}};
  run.finish();
  out << "vocab " << corpus.vocab.size() << ", tokens " << corpus.n_tokens() << '\n'
      << "final mean loss " << fmt("%.6f", stats.epoch_mean_loss.back()) << '\n'
      << "embeddings written to " << emb_path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct AnalogyFlags {
  CommonFlags common;
  std::string embeddings;
  std::string compare;
  std::string questions;
  bool lowercase = false;
};

class NoScoreable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int cmd_analogy(const AnalogyFlags& f, const std::vector<std::string>& argv,
                       std::ostream& out) {
  using namespace embeddings;
  const auto questions = read_questions_file(f.questions, f.lowercase);
  Run run("analogy", f.common, argv);
  std::vector<std::pair<std::string, AnalogyResult>> results;
  for (const auto& path : {f.embeddings, f.compare}) {
    if (path.empty()) continue;
    const CbowModel model = load_embeddings(path);
    try {
      results.emplace_back(path, analogy_eval(model, questions));
    } catch (const NoScoreableQueries& e) {
      out << "accuracy n/a, scored 0, skipped " << e.skipped() << '\n';
      throw NoScoreable(path + ": " + e.what());
    }
  }
  Table t{{"embeddings", "accuracy", "scored", "skipped"}, {}};
  for (const auto& [path, r] : results) {
    t.rows.push_back({fs::path(path).filename().string(), fixed4(r.accuracy),
                      std::to_string(r.scored), std::to_string(r.skipped)});
    out << path << ": accuracy " << fixed4(r.accuracy) << ", scored " << r.scored
        << ", skipped " << r.skipped << '\n';
  }
  if (results.size() == 2) {
    const double diff = results[0].second.accuracy - results[1].second.accuracy;
    t.rows.push_back({"difference", fmt("%+.4f", diff), "-", "-"});
    out << "difference (first - second): " << fmt("%+.4f", diff) << '\n';
  }
  run.write_table("analogy", t);
  run.config() = {{"embeddings", f.embeddings},
                  {"compare", f.compare},
                  {"questions", f.questions},
                  {"lowercase", f.lowercase},
                  {"format", f.common.format}};
  run.finish();
  return 0;
}

// ---------------------------------------------------------------------------

struct GridFlags {
  CommonFlags common;
  embeddings::GridConfig grid;
};

inline int cmd_grid(const GridFlags& f, const std::vector<std::string>& argv,
                    std::ostream& out) {
  using namespace embeddings;
  GridConfig g = f.grid;
  g.seed = f.common.seed;
  Run run("grid", f.common, argv);
  std::ostringstream corpus, questions;
  write_grid_corpus(g, corpus);
  const auto qs = grid_questions(g);
  write_questions(qs, questions);
  run.write("grid_corpus.txt", corpus.str());
  run.write("grid_questions.txt", questions.str());
  run.config() = {{"rows", g.rows},
                  {"cols", g.cols},
                  {"tokens", g.n_tokens},
                  {"sentence_length", g.sentence_length},
                  {"noise", g.noise}};
  run.finish();
  out << "wrote " << run.path("grid_corpus.txt").string() << " and "
      << run.path("grid_questions.txt").string() << " (" << qs.size() << " questions)\n";
  return 0;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr);

/// Re-runs the argv stored in a manifest, optionally redirecting --out.
inline int cmd_replay(const std::string& manifest_path, const std::string& out_override,
                      std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest '" + manifest_path + "'");
  const json m = json::parse(in);
  auto args = m.at("argv").get<std::vector<std::string>>();
  if (!out_override.empty()) {
    bool replaced = false;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--out") {
        args[i + 1] = out_override;
        replaced = true;
      }
    }
    if (!replaced) {
      args.push_back("--out");
      args.push_back(out_override);
    }
  }
  return run(args, out, err);
}

/// `args[0]` is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extrapolation benchmarks: identity learning, symmetric inference heads, "
               "linear vs broken-stick CBOW"};
  app.name("extrap");
  app.require_subcommand(1);

  IdentityFlags idf;
  auto* identity_cmd = app.add_subcommand("identity", "Train the five identity-function models");
  add_common(identity_cmd, idf.common);
  identity_cmd->add_option("--models", idf.models, "Comma-separated subset of slp,flip,ortho,conv,proj")
      ->capture_default_str();
  identity_cmd->add_option("--epochs", idf.epochs, "Full-batch gradient steps per model")->capture_default_str()->check(CLI::PositiveNumber);
  identity_cmd->add_option("--lr", idf.lr, "Learning rate for every model (default: per model)")
      ->check(CLI::PositiveNumber);
  identity_cmd->add_option("--beta", idf.beta, "Projection exponent for proj")->capture_default_str();
  identity_cmd->add_option("--proj-dim", idf.proj_dim, "Projected dimension n for proj")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  RelationFlags rf;
  auto* relation_cmd =
      app.add_subcommand("relation", "Baseline vs symmetric head on synthetic sentence pairs");
  add_common(relation_cmd, rf.common);
  relation_cmd->add_option("--vocab", rf.vocab, "Synthetic vocabulary size")->capture_default_str()->check(CLI::Range(8, 1 << 20));
  relation_cmd->add_option("--n-train", rf.n_train, "Generated training pairs")->capture_default_str()->check(CLI::PositiveNumber);
  relation_cmd->add_option("--n-test", rf.n_test, "Generated test pairs")->capture_default_str()->check(CLI::PositiveNumber);
  relation_cmd->add_option("--bias", rf.bias, "Fraction of training contradictions with NOT in the hypothesis")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  relation_cmd->add_option("--dim", rf.dim, "Embedding size d")->capture_default_str()->check(CLI::Range(2, 4096));
  relation_cmd->add_option("--hidden", rf.hidden, "Head transform size h")->capture_default_str()->check(CLI::PositiveNumber);
  relation_cmd->add_option("--epochs", rf.epochs, "Full-batch gradient steps per head")->capture_default_str()->check(CLI::PositiveNumber);
  relation_cmd->add_option("--lr", rf.lr, "Learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  relation_cmd->add_flag("--dump-data", rf.dump_data, "Write the generated train/test pairs as TSV");
  relation_cmd->add_option("--train-file", rf.train_file, "Load training pairs instead of generating");
  relation_cmd->add_option("--test-file", rf.test_file, "Load test pairs instead of generating");

  EmbedFlags ef;
  auto* embed_cmd = app.add_subcommand("embed", "Train CBOW embeddings with negative sampling");
  add_common(embed_cmd, ef.common);
  embed_cmd->add_option("--corpus", ef.corpus, "Plain-text corpus, one sentence per line")->required();
  embed_cmd->add_option("--mode", ef.mode, "Score function")
      ->check(CLI::IsMember({"linear", "stick"}))
      ->capture_default_str();
  embed_cmd->add_option("--output", ef.output, "Embeddings file (default <out>/embeddings_<mode>.txt)");
  embed_cmd->add_option("--dim", ef.dim, "Vector size")->capture_default_str()->check(CLI::PositiveNumber);
  embed_cmd->add_option("--window", ef.window, "Context words on each side")->capture_default_str()->check(CLI::PositiveNumber);
  embed_cmd->add_option("--negative", ef.negatives, "Noise words per position")->capture_default_str()->check(CLI::PositiveNumber);
  embed_cmd->add_option("--epochs", ef.epochs, "Passes over the corpus")->capture_default_str()->check(CLI::PositiveNumber);
  embed_cmd->add_option("--lr", ef.lr, "Starting learning rate, decayed linearly")->capture_default_str()->check(CLI::PositiveNumber);
  embed_cmd->add_option("--min-count", ef.min_count, "Drop words rarer than this")->capture_default_str();
  embed_cmd->add_option("--sample", ef.sample, "Subsampling threshold, 0 disables")->capture_default_str();
  embed_cmd->add_option("--stick-init", ef.stick_init, "Initial stick parameter range")->capture_default_str();
  embed_cmd->add_option("--stick-lr-scale", ef.stick_lr_scale, "Learning-rate multiplier for stick parameters")->capture_default_str();
  embed_cmd->add_flag("--lowercase", ef.lowercase, "Lowercase the corpus");

  AnalogyFlags af;
  auto* analogy_cmd = app.add_subcommand("analogy", "3CosAdd analogy accuracy");
  add_common(analogy_cmd, af.common);
  analogy_cmd->add_option("--embeddings", af.embeddings, "Embeddings file to evaluate")->required();
  analogy_cmd->add_option("--compare", af.compare, "Second embeddings file to compare against");
  analogy_cmd->add_option("--questions", af.questions, "word2vec-format questions file")->required();
  analogy_cmd->add_flag("--lowercase", af.lowercase, "Lowercase the questions");

  GridFlags gf;
  auto* grid_cmd = app.add_subcommand("grid", "Write the synthetic grid corpus and analogy questions");
  add_common(grid_cmd, gf.common);
  grid_cmd->add_option("--rows", gf.grid.rows, "Grid rows")->capture_default_str()->check(CLI::Range(2, 1000));
  grid_cmd->add_option("--cols", gf.grid.cols, "Grid columns")->capture_default_str()->check(CLI::Range(2, 1000));
  grid_cmd->add_option("--tokens", gf.grid.n_tokens, "Corpus length in tokens")->capture_default_str()->check(CLI::PositiveNumber);
  grid_cmd->add_option("--sentence-length", gf.grid.sentence_length, "Words per line")->capture_default_str()->check(CLI::Range(2, 10000));
  grid_cmd->add_option("--noise", gf.grid.noise, "Probability of a uniformly random token")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  std::string manifest;
  std::string replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest, "Manifest written by an earlier run")->required();
  replay_cmd->add_option("--out", replay_out, "Write results here instead of the recorded directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help and --version report success; every other parse failure is a usage error
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (identity_cmd->parsed()) return cmd_identity(idf, args, out);
    if (relation_cmd->parsed()) return cmd_relation(rf, args, out);
    if (embed_cmd->parsed()) return cmd_embed(ef, args, out);
    if (analogy_cmd->parsed()) return cmd_analogy(af, args, out);
    if (grid_cmd->parsed()) return cmd_grid(gf, args, out);
    if (replay_cmd->parsed()) return cmd_replay(manifest, replay_out, out, err);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace extrap::cli

#endif  // EXTRAP_CLI_HPP
