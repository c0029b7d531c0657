#include "paramine/config.hpp"
#include "paramine/stages.hpp"
#include "paramine/util.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace {

using paramine::PipelineConfig;

struct StageArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string triples_path;
  std::string pairs_path;
  std::string input_path;
  std::string output_path;
  std::string source_path;
  std::string reference_path;
  std::string candidate_path;
};

PipelineConfig load_config(const StageArgs& args) {
  if (args.config_path.empty()) return PipelineConfig::from_overrides(args.overrides);
  return PipelineConfig::load(args.config_path, args.overrides);
}

CLI::App* add_stage(CLI::App& app, StageArgs& args, const std::string& name,
                    const std::string& help) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config,-c", args.config_path, "configuration file (key=value lines)");
  return sub;
}

// The overrides positional must come after any stage-specific positionals, or
// it would swallow them.
void finish_stage(CLI::App* sub, StageArgs& args) {
  sub->add_option("overrides", args.overrides, "key=value configuration overrides");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsupervised paraphrase mining pipeline"};
  app.require_subcommand(1);
  StageArgs args;
  std::function<void(const PipelineConfig&)> run;

  auto bind = [&](CLI::App* sub, std::function<void(const PipelineConfig&)> fn) {
    finish_stage(sub, args);
    sub->callback([&run, fn] { run = fn; });
  };

  bind(add_stage(app, args, "make-synthetic",
                 "Generate a template corpus with known paraphrase clusters"),
       [](const PipelineConfig& c) { paramine::stage_make_synthetic(c, std::cout); });
  bind(add_stage(app, args, "ingest", "Split the corpus into context windows"),
       [](const PipelineConfig& c) { paramine::stage_ingest(c, std::cout); });
  bind(add_stage(app, args, "train-context-lm",
                 "Train the contextual model on the directional objectives"),
       [](const PipelineConfig& c) { paramine::stage_train_context_lm(c, std::cout); });
  bind(add_stage(app, args, "generate", "Decode candidate sentences from each window"),
       [](const PipelineConfig& c) { paramine::stage_generate(c, std::cout); });
  bind(add_stage(app, args, "train-genscore",
                 "Train the pair-generation scorer on all candidate pairs"),
       [](const PipelineConfig& c) { paramine::stage_train_genscore(c, std::cout); });

  CLI::App* ranker = add_stage(app, args, "train-ranker",
                               "Fit scoring weights from preference triples");
  ranker->add_option("triples", args.triples_path, "preference triples (JSON lines)")
      ->required();
  bind(ranker, [&args](const PipelineConfig& c) {
    paramine::stage_train_ranker(c, args.triples_path, std::cout);
  });

  bind(add_stage(app, args, "score", "Compute pair features and combined scores"),
       [](const PipelineConfig& c) { paramine::stage_score(c, std::cout); });
  bind(add_stage(app, args, "select", "Pick the top pairs under the selection ratio"),
       [](const PipelineConfig& c) { paramine::stage_select(c, std::cout); });
  bind(add_stage(app, args, "train-paraphraser",
                 "Train the paraphrase model on the selected pairs"),
       [](const PipelineConfig& c) { paramine::stage_train_paraphraser(c, std::cout); });

  CLI::App* finetune =
      add_stage(app, args, "finetune", "Continue paraphraser training on labeled pairs");
  finetune->add_option("pairs", args.pairs_path, "labeled pairs (JSON lines with s1, s2)")
      ->required();
  bind(finetune, [&args](const PipelineConfig& c) {
    paramine::stage_finetune(c, args.pairs_path, std::cout);
  });

  CLI::App* para = add_stage(app, args, "paraphrase", "Decode paraphrases for input sentences");
  para->add_option("input", args.input_path, "input sentences, one tokenized per line")
      ->required();
  para->add_option("output", args.output_path, "output file (JSON lines)")->required();
  bind(para, [&args](const PipelineConfig& c) {
    paramine::stage_paraphrase(c, args.input_path, args.output_path, std::cout);
  });

  CLI::App* eval = add_stage(app, args, "evaluate", "Score candidates against references");
  eval->add_option("source", args.source_path, "source sentences")->required();
  eval->add_option("reference", args.reference_path, "reference sentences")->required();
  eval->add_option("candidate", args.candidate_path, "candidate sentences")->required();
  bind(eval, [&args](const PipelineConfig& c) {
    paramine::stage_evaluate(c, args.source_path, args.reference_path, args.candidate_path,
                             std::cout);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    run(load_config(args));
  } catch (const paramine::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const paramine::MissingArtifactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
