#pragma once

// End-to-end subcommands. Each takes a resolved configuration and writes its
// artifacts into the output directory together with a manifest.json that
// records the schema version, config hash and seed.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "backends.hpp"
#include "config.hpp"
#include "corpus.hpp"
#include "errors.hpp"
#include "evaluate.hpp"
#include "lexicon.hpp"
#include "pairformat.hpp"
#include "parallel.hpp"
#include "reframe.hpp"
#include "rewrite.hpp"
#include "text.hpp"

namespace argreframe {

inline constexpr int kArtifactSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitBackend = 4 };

struct CommandContext {
  PipelineConfig config;
  std::uint64_t seed = 13;
  std::size_t workers = 1;
  std::string out_dir = ".";
  std::ostream* log = &std::cerr;
};

namespace detail {

inline nlohmann::json artifact_header(const CommandContext& ctx) {
  return {{"schema_version", kArtifactSchemaVersion}, {"config_hash", ctx.config.hash()}, {"seed", ctx.seed}};
}

inline std::string out_path(const CommandContext& ctx, const std::string& name) {
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

inline void prepare_out_dir(const CommandContext& ctx) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + ctx.out_dir);
}

inline void write_json(const std::string& path, const nlohmann::json& j) { write_file(path, j.dump(2) + "\n"); }

inline void write_manifest(const CommandContext& ctx, const std::string& command,
                           const std::vector<std::string>& artifacts) {
  auto j = artifact_header(ctx);
  j["command"] = command;
  j["artifacts"] = artifacts;
  write_json(out_path(ctx, "manifest.json"), j);
}

inline std::size_t positive_size(const PipelineConfig& cfg, const std::string& key, long long fallback) {
  auto v = cfg.get_int(key, fallback);
  if (v < 1) throw ConfigError("'" + key + "' must be at least 1");
  return static_cast<std::size_t>(v);
}

inline EmotionLabel config_emotion(const PipelineConfig& cfg, const std::string& key, EmotionLabel fallback) {
  if (!cfg.has(key)) return fallback;
  auto e = parse_emotion(cfg.get(key));
  if (!e) throw ConfigError("unknown emotion '" + cfg.get(key) + "' for '" + key + "'");
  return *e;
}

inline SweepConfig sweep_from(const PipelineConfig& cfg, std::uint64_t seed) {
  SweepConfig s;
  auto ks = cfg.get_int_list("k_values", {});
  if (!ks.empty()) {
    s.k_values.clear();
    for (auto k : ks) s.k_values.push_back(static_cast<int>(k));
  }
  s.samples_per_k = static_cast<int>(cfg.get_int("samples_per_k", 1));
  s.max_len = static_cast<std::size_t>(cfg.get_int("max_len", 128));
  s.seed = seed;
  s.validate();
  return s;
}

}  // namespace detail

/// corpus -> classify -> premises -> connotation-constrained rewrite ->
/// serialize -> seeded train/validation split.
inline nlohmann::json run_build_data(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  auto records = ingest(cfg.existing_path("corpus"));
  auto lexicon = ConnotationLexicon::load(cfg.existing_path("connotation_lexicon"));
  auto infiller = make_infiller(cfg.get("infiller"));
  auto classifier = make_classifier(cfg.get_or("classifier", "mock:"));
  RewriteConfig rcfg;
  rcfg.top_n = detail::positive_size(cfg, "top_n", 20);
  if (cfg.has("max_spans")) rcfg.max_spans = detail::positive_size(cfg, "max_spans", 1);
  const double ratio = cfg.get_double("split_ratio", 0.9);
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("split_ratio must be in (0, 1]");
  detail::prepare_out_dir(ctx);

  auto classified = classify_arguments(std::move(records), *classifier, ctx.workers);
  auto premises = filter_premises(classified.records);

  std::vector<RewriteResult> results(premises.size());
  std::vector<RewriteStats> item_stats(premises.size());
  const std::size_t workers = infiller->reentrant() ? ctx.workers : 1;
  const auto mode = RewriteMode::different();
  parallel_for(premises.size(), workers, [&](std::size_t i) {
    results[i] = rewrite_sentence(text::space_tokens(premises[i].text), mode, *infiller, lexicon, rcfg,
                                  &item_stats[i]);
  });
  RewriteStats stats;
  for (const auto& s : item_stats) stats += s;

  std::vector<TrainingPair> pairs;
  std::size_t unchanged = 0;
  for (const auto& r : results) {
    if (r.replacements.empty()) {
      ++unchanged;
      continue;
    }
    pairs.push_back(serialize_pair(r));
  }
  if (pairs.empty()) throw DataError("no training pairs produced");

  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(pairs.size())));
  auto train_idx = sample_indices(pairs.size(), n_train, derive_seed({ctx.seed, fnv1a64("split")}));
  std::vector<char> in_train(pairs.size(), 0);
  for (auto i : train_idx) in_train[i] = 1;
  std::vector<TrainingPair> train, val;
  for (std::size_t i = 0; i < pairs.size(); ++i) (in_train[i] ? train : val).push_back(pairs[i]);

  write_tsv(train, detail::out_path(ctx, "train.tsv"));
  write_tsv(val, detail::out_path(ctx, "val.tsv"));
  auto j = detail::artifact_header(ctx);
  j["corpus_records"] = classified.records.size();
  j["classifier_warnings"] = classified.warnings;
  j["premises"] = premises.size();
  j["unchanged_premises"] = unchanged;
  j["pairs"] = pairs.size();
  j["train_pairs"] = train.size();
  j["val_pairs"] = val.size();
  j["split_ratio"] = ratio;
  j["rewrite"] = stats.to_json();
  j["lexicon"] = {{"rows", lexicon.stats().rows},
                  {"entries", lexicon.size()},
                  {"duplicate_rows", lexicon.stats().duplicate_rows},
                  {"multi_token_rows", lexicon.stats().multi_token_rows}};
  detail::write_json(detail::out_path(ctx, "stats.json"), j);
  detail::write_manifest(ctx, "build-data", {"train.tsv", "val.tsv", "stats.json"});
  *ctx.log << "build-data: " << pairs.size() << " pairs (" << train.size() << " train, " << val.size()
           << " val)\n";
  return j;
}

/// Samples a partisan or fear test set from a corpus.
inline std::size_t run_build_testset(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  auto task_name = cfg.get_or("task", "partisan");
  auto task = parse_test_task(task_name);
  if (!task) throw ConfigError("task must be partisan or fear");
  auto records = ingest(cfg.existing_path("corpus"));
  std::optional<CollocationList> coll;
  std::optional<EmotionLexicon> emo;
  TestSetResources res;
  if (*task == TestTask::partisan) {
    coll = CollocationList::load(cfg.existing_path("collocations"));
    res.collocations = &*coll;
  } else {
    emo = EmotionLexicon::load(cfg.existing_path("emotion_lexicon"));
    res.emotions = &*emo;
  }
  if (cfg.get_bool("premises_only", *task == TestTask::fear)) {
    auto classifier = make_classifier(cfg.get_or("classifier", "mock:"));
    records = filter_premises(classify_arguments(std::move(records), *classifier, ctx.workers).records);
  }
  const auto n = detail::positive_size(cfg, "sample_size", *task == TestTask::partisan ? 100 : 50);
  detail::prepare_out_dir(ctx);
  auto ts = build_test_set(records, *task, res, n, ctx.seed);
  write_file(detail::out_path(ctx, "test_set.jsonl"), test_set_to_jsonl(ts));
  detail::write_manifest(ctx, "build-testset", {"test_set.jsonl"});
  *ctx.log << "build-testset: " << ts.records.size() << " " << task_name << " records\n";
  return ts.records.size();
}

/// Fine-tunes the configured generator and records the best checkpoint.
inline nlohmann::json run_train(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  auto train = read_tsv(cfg.existing_path("train_tsv"));
  std::vector<TrainingPair> val;
  if (cfg.has("val_tsv")) val = read_tsv(cfg.existing_path("val_tsv"));
  const auto gen_spec = cfg.get("generator");
  auto gen = make_generator(gen_spec);
  TrainConfig tc;
  tc.epochs = static_cast<int>(cfg.get_int("epochs", 20));
  tc.max_tokens_per_batch = static_cast<int>(cfg.get_int("max_tokens_per_batch", 1024));
  tc.seed = ctx.seed;
  if (tc.epochs < 1) throw ConfigError("epochs must be at least 1");
  detail::prepare_out_dir(ctx);
  auto trained = fine_tune(train, val, *gen, tc);

  std::string metrics;
  for (const auto& row : trained.log) {
    metrics += nlohmann::json{{"epoch", row.epoch}, {"val_perplexity", row.val_perplexity}, {"checkpoint", row.checkpoint}}.dump() + "\n";
  }
  write_file(detail::out_path(ctx, "metrics.jsonl"), metrics);
  auto j = detail::artifact_header(ctx);
  j["generator"] = gen_spec;
  j["checkpoint"] = {{"id", trained.best.id}, {"epoch", trained.best.epoch}, {"val_perplexity", trained.best.val_perplexity}};
  j["train_pairs"] = trained.train_pairs;
  j["val_pairs"] = trained.val_pairs;
  j["epochs"] = tc.epochs;
  j["max_tokens_per_batch"] = tc.max_tokens_per_batch;
  detail::write_json(detail::out_path(ctx, "checkpoint.json"), j);
  detail::write_manifest(ctx, "train", {"checkpoint.json", "metrics.jsonl"});
  *ctx.log << "train: best " << trained.best.id << " (val perplexity " << trained.best.val_perplexity << ")\n";
  return j;
}

namespace detail {

struct LoadedCheckpoint {
  std::unique_ptr<Seq2SeqGenerator> generator;
  TrainedGenerator trained;
};

inline LoadedCheckpoint load_checkpoint(const PipelineConfig& cfg) {
  const auto path = cfg.existing_path("checkpoint");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint " + path + ": " + e.what());
  }
  LoadedCheckpoint lc;
  try {
    lc.generator = make_generator(cfg.get_or("generator", j.at("generator").get<std::string>()));
    const auto& cp = j.at("checkpoint");
    lc.trained.best = Checkpoint{cp.at("id").get<std::string>(), cp.at("epoch").get<int>(),
                                 cp.at("val_perplexity").get<double>()};
    lc.trained.train_pairs = j.value("train_pairs", std::size_t{0});
    lc.trained.val_pairs = j.value("val_pairs", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint " + path + ": " + e.what());
  }
  lc.trained.generator = lc.generator.get();
  return lc;
}

inline std::vector<std::string> systems_from(const PipelineConfig& cfg) {
  auto s = cfg.get_or("system", "entrust");
  if (s == "all") return {"bart_no_d_en", "bart_no_en", "entrust"};
  ReframeConfig::for_system(s);
  return {s};
}

}  // namespace detail

/// Reframes every test-set record under one or all system configurations,
/// all from the same checkpoint. Returns the written file names.
inline std::vector<std::string> run_reframe(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  auto systems = detail::systems_from(cfg);
  auto sweep = detail::sweep_from(cfg, ctx.seed);
  const auto code = detail::config_emotion(cfg, "control_code", EmotionLabel::trust);
  if (code == EmotionLabel::neutral) throw ConfigError("control_code must not be neutral");
  auto dir = parse_nli_direction(cfg.get_or("nli_direction", "fwd"));
  if (!dir) throw ConfigError("nli_direction must be fwd, bwd or min");
  auto items = load_test_set(cfg.existing_path("test_set"));
  auto loaded = detail::load_checkpoint(cfg);
  auto scorer = make_scorer(cfg.get_or("scorer", "mock:"));
  detail::prepare_out_dir(ctx);

  const std::size_t workers =
      (loaded.generator->reentrant() && scorer->reentrant()) ? ctx.workers : 1;
  std::vector<std::string> files;
  for (const auto& system : systems) {
    auto rc = ReframeConfig::for_system(system);
    rc.control_code = code;
    rc.nli_direction = *dir;
    std::vector<std::string> lines(items.size());
    parallel_for(items.size(), workers, [&](std::size_t i) {
      auto out = reframe(items[i].record, items[i].spans, rc, loaded.trained, *scorer, sweep);
      lines[i] = to_json(out).dump();
    });
    std::string content;
    for (const auto& l : lines) content += l + "\n";
    const auto name = "reframe." + system + ".jsonl";
    write_file(detail::out_path(ctx, name), content);
    files.push_back(name);
  }
  detail::write_manifest(ctx, "reframe", files);
  *ctx.log << "reframe: " << items.size() << " records x " << systems.size() << " system(s)\n";
  return files;
}

/// Lexical-replacement baseline over a test set.
inline RewriteStats run_lexrep(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  auto items = load_test_set(cfg.existing_path("test_set"));
  auto lexicon = ConnotationLexicon::load(cfg.existing_path("connotation_lexicon"));
  auto infiller = make_infiller(cfg.get("infiller"));
  const auto top_n = detail::positive_size(cfg, "top_n", 20);
  detail::prepare_out_dir(ctx);

  std::vector<RewriteResult> results(items.size());
  std::vector<RewriteStats> item_stats(items.size());
  parallel_for(items.size(), infiller->reentrant() ? ctx.workers : 1, [&](std::size_t i) {
    results[i] = lexrep_reframe(items[i].record.text, items[i].spans, *infiller, lexicon, top_n, &item_stats[i]);
  });
  RewriteStats stats;
  std::string content;
  for (std::size_t i = 0; i < items.size(); ++i) {
    stats += item_stats[i];
    auto reps = nlohmann::json::array();
    for (const auto& r : results[i].replacements) {
      reps.push_back({{"start", r.span.start_char},
                      {"end", r.span.end_char},
                      {"original", r.original},
                      {"replacement", r.replacement},
                      {"replacement_emotions", r.replacement_emotions.str()}});
    }
    content += nlohmann::json{{"id", items[i].record.id},
                              {"input", items[i].record.text},
                              {"output", results[i].rewritten},
                              {"system", "lexrep"},
                              {"replacements", std::move(reps)}}
                   .dump() +
               "\n";
  }
  write_file(detail::out_path(ctx, "lexrep.jsonl"), content);
  auto j = detail::artifact_header(ctx);
  j["rewrite"] = stats.to_json();
  detail::write_json(detail::out_path(ctx, "lexrep_stats.json"), j);
  detail::write_manifest(ctx, "lexrep", {"lexrep.jsonl", "lexrep_stats.json"});
  *ctx.log << "lexrep: " << items.size() << " records, " << stats.accepted << " spans replaced\n";
  return stats;
}

/// Reads a system-output JSONL ({id, output, system}) into id -> output.
inline std::pair<std::string, std::map<std::string, std::string>> load_system_outputs(const std::string& path) {
  std::string system;
  std::map<std::string, std::string> outputs;
  auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      auto j = nlohmann::json::parse(lines[i]);
      auto name = j.value("system", std::filesystem::path(path).stem().string());
      if (system.empty()) system = name;
      if (name != system) throw DataError(at_line(path + ": mixed systems in one file", i + 1));
      auto id = j.at("id").get<std::string>();
      if (!outputs.emplace(id, j.at("output").get<std::string>()).second) {
        throw DataError(at_line(path + ": duplicate id '" + id + "'", i + 1));
      }
    } catch (const nlohmann::json::exception&) {
      throw DataError(at_line(path + ": malformed output line", i + 1));
    }
  }
  if (system.empty()) throw DataError(path + ": no outputs");
  return {system, outputs};
}

/// Similarity report over system output files against the test-set inputs.
inline EvaluationReport run_evaluate(const CommandContext& ctx, const std::vector<std::string>& output_files) {
  const auto& cfg = ctx.config;
  if (output_files.empty()) throw ConfigError("evaluate needs at least one system output file");
  auto items = load_test_set(cfg.existing_path("test_set"));
  auto encoder = make_encoder(cfg.get_or("encoder", "mock:"));
  std::vector<EvalItem> inputs;
  for (const auto& it : items) inputs.push_back({it.record.id, it.record.text});
  std::map<std::string, std::map<std::string, std::string>> by_system;
  for (const auto& f : output_files) {
    if (!std::filesystem::exists(f)) throw ConfigError("output file does not exist: " + f);
    auto [system, outputs] = load_system_outputs(f);
    if (!by_system.emplace(system, std::move(outputs)).second) {
      throw ConfigError("system '" + system + "' given twice");
    }
  }
  ReportOptions opt;
  opt.task = cfg.get_or("task", "default");
  opt.test.iterations = detail::positive_size(cfg, "iterations", 10000);
  opt.test.seed = ctx.seed;
  auto mode = cfg.get_or("significance_mode", "auto");
  if (mode == "auto") opt.test.mode = RandomizationMode::automatic;
  else if (mode == "exact") opt.test.mode = RandomizationMode::exact;
  else if (mode == "approx") opt.test.mode = RandomizationMode::approximate;
  else throw ConfigError("significance_mode must be auto, exact or approx");
  opt.workers = ctx.workers;
  detail::prepare_out_dir(ctx);
  auto report = build_report(inputs, by_system, *encoder, opt);

  auto j = to_json(report);
  j["config_hash"] = ctx.config.hash();
  detail::write_json(detail::out_path(ctx, "report.json"), j);
  write_file(detail::out_path(ctx, "report.txt"), render_table({report}));
  detail::write_manifest(ctx, "evaluate", {"report.json", "report.txt"});
  *ctx.log << render_table({report});
  return report;
}

/// Maps an in-flight exception to the documented exit code.
inline int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace argreframe
