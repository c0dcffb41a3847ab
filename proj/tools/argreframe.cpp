#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "argreframe/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "flat key = value config file");
  sub->add_option("--seed", f.seed, "global seed (overrides config)");
  sub->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "output directory (overrides config)");
  sub->add_option("--set", f.sets, "override a config key, key=value (repeatable)");
}

argreframe::CommandContext make_context(const CommonFlags& f) {
  using namespace argreframe;
  CommandContext ctx;
  if (!f.config.empty()) ctx.config = PipelineConfig::load(f.config);
  for (const auto& kv : f.sets) ctx.config.apply_override(kv);
  if (f.seed) ctx.config.set("seed", std::to_string(*f.seed));
  if (f.workers) ctx.config.set("workers", std::to_string(*f.workers));
  if (!f.out.empty()) ctx.config.set("out", f.out);
  ctx.seed = static_cast<std::uint64_t>(ctx.config.get_int("seed", 13));
  const auto workers = ctx.config.get_int("workers", 1);
  if (workers < 1) throw ConfigError("workers must be at least 1");
  ctx.workers = static_cast<std::size_t>(workers);
  ctx.out_dir = ctx.config.get_or("out", ".");
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connotation-controlled argument reframing pipeline"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> outputs;
  auto* build_data = app.add_subcommand("build-data", "rewrite premises into training pairs");
  auto* build_testset = app.add_subcommand("build-testset", "sample a partisan or fear test set");
  auto* train = app.add_subcommand("train", "fine-tune the generator");
  auto* reframe = app.add_subcommand("reframe", "reframe a test set");
  auto* lexrep = app.add_subcommand("lexrep", "lexical-replacement baseline");
  auto* evaluate = app.add_subcommand("evaluate", "similarity report over system outputs");
  for (auto* sub : {build_data, build_testset, train, reframe, lexrep, evaluate}) add_common(sub, flags);
  evaluate->add_option("outputs", outputs, "system output JSONL files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : argreframe::kExitConfig;
  }

  try {
    auto ctx = make_context(flags);
    if (*build_data) argreframe::run_build_data(ctx);
    else if (*build_testset) argreframe::run_build_testset(ctx);
    else if (*train) argreframe::run_train(ctx);
    else if (*reframe) argreframe::run_reframe(ctx);
    else if (*lexrep) argreframe::run_lexrep(ctx);
    else if (*evaluate) argreframe::run_evaluate(ctx, outputs);
    return argreframe::kExitOk;
  } catch (...) {
    return argreframe::exit_code_for_current_exception(std::cerr);
  }
}
