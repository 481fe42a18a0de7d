// Copyright 2026 The lexattn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.h"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "CLI11.hpp"
#include "lexattn/errors.h"
#include "lexattn/report.h"
#include "lexattn/rng.h"
#include "lexattn/synthetic.h"
#include "lexattn/train.h"
#include "lexattn/util.h"

namespace lexattn::cli {
namespace fs = std::filesystem;
namespace {

// Removes what a failed command wrote. Directories are only removed if
// this guard created them.
class OutputGuard {
 public:
  void make_dir(const fs::path& dir) {
    std::vector<fs::path> created;
    for (fs::path p = dir; !p.empty() && !fs::exists(p); p = p.parent_path()) {
      created.push_back(p);
      if (p == p.parent_path()) break;
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    dirs_.insert(dirs_.end(), created.begin(), created.end());
  }

  void write(const fs::path& path, std::string_view contents) {
    files_.push_back(path);
    write_file_atomic(path, contents);
  }

  void commit() { committed_ = true; }

  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    // dirs_ runs deepest first per make_dir call; only empty ones go.
    for (const auto& d : dirs_) fs::remove(d, ec);
  }

 private:
  std::vector<fs::path> files_;
  std::vector<fs::path> dirs_;
  bool committed_ = false;
};

std::vector<Example> read_nonempty(const fs::path& path, std::string_view what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw ConfigError(std::string(what) + " file not found: " + path.string());
  }
  auto examples = read_dataset(path);
  if (examples.empty()) throw ConfigError(std::string(what) + " file is empty: " + path.string());
  return examples;
}

std::string metrics_text(const ConfusionMatrix& cm) {
  return "accuracy\t" + format_double(accuracy(cm)) + "\nmacro_f1\t" +
         format_double(macro_f1(cm)) + '\n';
}

RunConfig resolve_paths(RunConfig config) {
  auto abs = [](std::string& p) {
    if (!p.empty()) p = fs::absolute(p).lexically_normal().string();
  };
  abs(config.train_path);
  abs(config.val_path);
  abs(config.test_path);
  abs(config.embeddings);
  abs(config.output_dir);
  for (auto& l : config.lexicons) {
    LexiconSpec spec = parse_lexicon_spec(l);
    l = spec.name + ':' + std::to_string(spec.dims) + ':' + std::string(to_string(spec.value_kind)) +
        ':' + fs::absolute(spec.source_path).lexically_normal().string();
  }
  return config;
}

LexiconFeatureTable compile_lexicons(const std::vector<std::string>& specs, bool minmax,
                                     std::ostream* out) {
  std::vector<ParsedLexicon> parsed;
  for (const auto& s : specs) {
    const LexiconSpec spec = parse_lexicon_spec(s);
    std::error_code ec;
    if (!fs::is_regular_file(spec.source_path, ec)) {
      throw ConfigError("lexicon file not found: " + spec.source_path.string());
    }
    parsed.push_back(parse_lexicon(spec.source_path, spec));
    if (out != nullptr) {
      const auto& p = parsed.back();
      *out << p.spec.name << "\twords " << p.entries.size() << "\tduplicates "
           << p.duplicate_warnings << '\n';
    }
  }
  LexiconFeatureTable table = build_feature_table(parsed);
  if (minmax) table.scale_blocks_minmax();
  return table;
}

fs::path find_sibling(const fs::path& checkpoint_path, std::string_view name) {
  const fs::path dir = checkpoint_path.parent_path();
  for (const fs::path& candidate : {dir / name, dir.parent_path() / name}) {
    std::error_code ec;
    if (fs::is_regular_file(candidate, ec)) return candidate;
  }
  throw ConfigError("no " + std::string(name) + " next to checkpoint " + checkpoint_path.string());
}

Predictions predict_loaded(const LoadedModel& model, std::span<const EncodedExample> data) {
  return predict(model.checkpoint.config, model.checkpoint.params, data, model.vocab, model.table);
}

void add_config_flags(CLI::App& app, std::map<std::string, std::string>& values) {
  for (auto key : config_keys()) {
    const std::string k(key);
    app.add_option("--" + k, values[k], "overrides config key " + k);
  }
}

}  // namespace

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EvaluationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::vector<double> train_command(const RunConfig& raw, std::ostream& out) {
  validate_for_training(raw);
  const RunConfig config = resolve_paths(raw);
  const TokenizerOptions tok{config.lowercase};

  const auto train_ex = read_nonempty(config.train_path, "train");
  const auto val_ex = read_nonempty(config.val_path, "val");
  LabelMap labels = LabelMap::from_examples(train_ex);
  for (const auto& e : val_ex) labels.add(e.label);
  const auto train_data = encode_examples(train_ex, labels, tok);
  const auto val_data = encode_examples(val_ex, labels, tok);
  std::vector<EncodedExample> test_data;
  if (!config.test_path.empty()) {
    test_data = encode_examples(read_nonempty(config.test_path, "test"), labels, tok);
  }

  const LexiconFeatureTable table = compile_lexicons(config.lexicons, config.lexicon_minmax, nullptr);
  ModelConfig model_config = config.model;
  model_config.lex_dim = table.total_dims();
  model_config.num_classes = labels.size();
  model_config.validate();

  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(train_data.size());
  for (const auto& e : train_data) corpus.push_back(e.tokens);
  const Vocabulary vocab = Vocabulary::build(corpus, config.min_count);

  const fs::path dir = config.output_dir;
  OutputGuard guard;
  guard.make_dir(dir);
  guard.write(dir / "config.resolved", format_config(config));
  guard.write(dir / "labels.tsv", labels.serialize());
  guard.write(dir / "vocab.txt", vocab.serialize());
  guard.write(dir / "lexicon.table", export_feature_table(table));

  std::vector<std::uint64_t> seeds;
  std::vector<double> metrics;
  for (std::size_t k = 0; k < config.seeds; ++k) {
    const std::uint64_t seed = config.train.seed + k;
    const fs::path run_dir = config.seeds == 1 ? dir : dir / ("seed_" + std::to_string(seed));
    if (config.seeds > 1) guard.make_dir(run_dir);

    Rng rng(seed);
    const EmbeddingMatrix emb =
        config.embeddings.empty()
            ? random_embeddings(vocab, model_config.embed_dim, rng)
            : load_embeddings(config.embeddings, vocab, model_config.embed_dim, rng);
    if (!config.embeddings.empty()) out << "embedding coverage " << format_double(emb.coverage) << '\n';
    ModelParams params = init_params(model_config, vocab.size(), rng, &emb.matrix);

    TrainConfig train_config = config.train;
    train_config.seed = seed;
    out << "seed " << seed << '\n';
    const TrainResult result =
        train(model_config, std::move(params), {train_data, val_data, &vocab, &table}, train_config,
              [&out](const EpochRecord& r) {
                out << "epoch " << r.epoch << "\tloss " << format_double(r.train_loss) << "\tval "
                    << format_double(r.val_metric) << '\n';
              });

    Checkpoint checkpoint{model_config, labels, vocab.hash(), vocab.size(), config.lowercase,
                          result.best_params};
    guard.write(run_dir / "checkpoint", serialize_checkpoint(checkpoint));
    guard.write(run_dir / "history.tsv", format_history(result));

    double metric = result.best_metric;
    if (!test_data.empty()) {
      const auto preds = predict(model_config, result.best_params, test_data, vocab, table);
      const ConfusionMatrix cm = confusion(preds, model_config.num_classes);
      guard.write(run_dir / "test_metrics.tsv", metrics_text(cm));
      metric = metric_value(cm, config.train.eval_metric);
    }
    seeds.push_back(seed);
    metrics.push_back(metric);
  }
  if (config.seeds > 1) {
    const std::string name =
        std::string(test_data.empty() ? "val_" : "test_") + std::string(to_string(config.train.eval_metric));
    const std::string summary = format_seed_summary(summarize_seeds(seeds, metrics), name);
    guard.write(dir / "summary.tsv", summary);
    out << summary;
  }
  guard.commit();
  return metrics;
}

LoadedModel load_model(const fs::path& checkpoint_path) {
  std::error_code ec;
  if (!fs::is_regular_file(checkpoint_path, ec)) {
    throw ConfigError("checkpoint not found: " + checkpoint_path.string());
  }
  LoadedModel model;
  model.checkpoint = load_checkpoint(checkpoint_path);
  const fs::path vocab_path = find_sibling(checkpoint_path, "vocab.txt");
  model.vocab = Vocabulary::deserialize(read_file(vocab_path), vocab_path.string());
  if (model.vocab.hash() != model.checkpoint.vocab_hash) {
    throw ConfigError("vocabulary " + vocab_path.string() + " does not match the checkpoint");
  }
  model.table = load_feature_table(find_sibling(checkpoint_path, "lexicon.table"));
  if (model.checkpoint.config.variant != Variant::kBaseline &&
      model.table.total_dims() != model.checkpoint.config.lex_dim) {
    throw ConfigError("lexicon table width " + std::to_string(model.table.total_dims()) +
                      " does not match the checkpoint (" +
                      std::to_string(model.checkpoint.config.lex_dim) + ")");
  }
  return model;
}

std::vector<EncodedExample> load_eval_data(const LoadedModel& model, const fs::path& path) {
  return encode_examples(read_nonempty(path, "data"), model.checkpoint.labels,
                         TokenizerOptions{model.checkpoint.lowercase});
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lexicon-conditioned self-attention text classifier"};
  app.name("lexattn");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a model (or several seeds)");
  std::string config_path;
  std::map<std::string, std::string> overrides;
  train_cmd->add_option("--config", config_path, "flat key = value file, loaded before flags");
  add_config_flags(*train_cmd, overrides);

  // eval / attend
  std::string checkpoint_path, data_path, out_path, format = "json";
  std::size_t sample = 0;
  std::uint64_t sample_seed = 1;
  auto* eval_cmd = app.add_subcommand("eval", "accuracy and macro-F1 of a checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint_path)->required();
  eval_cmd->add_option("--data", data_path)->required();
  eval_cmd->add_option("--out", out_path, "metrics file")->required();

  auto* attend_cmd = app.add_subcommand("attend", "export attention weights");
  attend_cmd->add_option("--checkpoint", checkpoint_path)->required();
  attend_cmd->add_option("--data", data_path)->required();
  attend_cmd->add_option("--out", out_path)->required();
  attend_cmd->add_option("--format", format, "json or svg")->capture_default_str();
  attend_cmd->add_option("--sample", sample, "random subset size (0 = all)");
  attend_cmd->add_option("--seed", sample_seed, "seed of the subset");

  // synth
  SyntheticSpec spec;
  std::string synth_dir;
  auto* synth_cmd = app.add_subcommand("synth", "generate the synthetic lexicon task");
  synth_cmd->add_option("--out", synth_dir, "output directory")->required();
  synth_cmd->add_option("--signal_train_vocab", spec.signal_train_vocab)->capture_default_str();
  synth_cmd->add_option("--signal_test_vocab", spec.signal_test_vocab)->capture_default_str();
  synth_cmd->add_option("--noise_vocab", spec.noise_vocab)->capture_default_str();
  synth_cmd->add_option("--min_len", spec.min_len)->capture_default_str();
  synth_cmd->add_option("--max_len", spec.max_len)->capture_default_str();
  synth_cmd->add_option("--signal_words_per_seq", spec.signal_words_per_seq)->capture_default_str();
  synth_cmd->add_option("--lex_dim", spec.lex_dim)->capture_default_str();
  synth_cmd->add_option("--train_size", spec.train_size)->capture_default_str();
  synth_cmd->add_option("--val_size", spec.val_size)->capture_default_str();
  synth_cmd->add_option("--test_size", spec.test_size)->capture_default_str();
  synth_cmd->add_option("--seed", spec.seed)->capture_default_str();

  // lexicon-compile
  std::vector<std::string> lexicon_specs;
  bool minmax = false;
  auto* lex_cmd = app.add_subcommand("lexicon-compile", "merge lexicons into one feature table");
  lex_cmd->add_option("--lexicon", lexicon_specs, "name:dims:kind:path, repeatable")->required();
  lex_cmd->add_option("--out", out_path)->required();
  lex_cmd->add_flag("--minmax", minmax, "scale every block column to [0, 1]");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  if (!argv.empty()) argv.pop_back();  // program name
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) {
      RunConfig config;
      if (!config_path.empty()) {
        std::error_code ec;
        if (!fs::is_regular_file(config_path, ec)) throw ConfigError("config file not found: " + config_path);
        apply_config_text(config, read_file(config_path), config_path);
      }
      for (auto key : config_keys()) {
        if (train_cmd->count("--" + std::string(key)) > 0) {
          apply_setting(config, key, overrides[std::string(key)]);
        }
      }
      train_command(config, out);
    } else if (eval_cmd->parsed()) {
      const LoadedModel model = load_model(checkpoint_path);
      const auto data = load_eval_data(model, data_path);
      const auto preds = predict_loaded(model, data);
      const std::string text =
          metrics_text(confusion(preds, model.checkpoint.config.num_classes));
      write_file_atomic(out_path, text);
      out << text;
    } else if (attend_cmd->parsed()) {
      const ReportFormat fmt = parse_report_format(format);
      const LoadedModel model = load_model(checkpoint_path);
      const auto data = load_eval_data(model, data_path);
      std::vector<std::size_t> chosen(data.size());
      std::iota(chosen.begin(), chosen.end(), std::size_t{0});
      if (sample > 0 && sample < chosen.size()) {
        Rng rng(sample_seed);
        rng.shuffle(chosen);
        chosen.resize(sample);
        std::sort(chosen.begin(), chosen.end());
      }
      std::vector<EncodedExample> subset;
      for (std::size_t i : chosen) subset.push_back(data[i]);
      const auto preds = predict_loaded(model, subset);
      std::vector<AttentionReport> reports;
      const LabelMap& labels = model.checkpoint.labels;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        reports.push_back({subset[i].tokens, preds.attention[i], labels.label(preds.predicted[i]),
                           labels.label(preds.gold[i]),
                           std::string(to_string(model.checkpoint.config.variant))});
      }
      export_attention(reports, fmt, out_path);
      out << "wrote " << reports.size() << " examples to " << out_path << '\n';
    } else if (synth_cmd->parsed()) {
      write_corpus(generate(spec), synth_dir);
      out << "wrote train.tsv val.tsv test.tsv lexicon.tsv to " << synth_dir << '\n';
    } else if (lex_cmd->parsed()) {
      const LexiconFeatureTable table = compile_lexicons(lexicon_specs, minmax, &out);
      save_feature_table(table, out_path);
      out << "total_dims " << table.total_dims() << "\twords " << table.size() << '\n';
    }
  } catch (...) {
    return report_exception(err);
  }
  return kExitOk;
}

}  // namespace lexattn::cli
