#pragma once

#include "paramine/beam.hpp"
#include "paramine/pairs.hpp"
#include "paramine/ranker.hpp"
#include "paramine/seq2seq.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace paramine {

struct StageModelConfig {
  ModelConfig model;
  TrainConfig train;
};

/// Every pipeline knob, addressable as flat section.key entries from a config
/// file or command-line overrides.
struct PipelineConfig {
  std::string corpus_path;
  std::string workdir = "work";
  int threads = 0;  // 0: machine parallelism

  int l_ctx = 64;
  int min_sent_len = 3;
  int max_sent_len = 60;
  bool lowercase = true;
  bool blank_line_docs = true;
  int vocab_min_count = 1;
  int vocab_max_size = 20000;

  StageModelConfig context_lm;
  StageModelConfig genscore;
  StageModelConfig paraphraser;
  std::string context_lm_objectives = "l2r,r2l,bwdl,bwdr";

  DecodeConfig decode;
  bool include_original = false;

  SelectionConfig select;
  std::string select_mode = "score";  // or "random"
  uint64_t select_seed = 1;

  RankTrainConfig ranker;

  TrainConfig finetune;

  int synth_docs = 600;
  int synth_clusters = 24;
  uint64_t synth_seed = 7;

  PipelineConfig();

  /// Applies one key=value entry; unknown keys or unparsable values raise
  /// ConfigError naming the origin (file:line or the override itself).
  void set(const std::string& key, const std::string& value, const std::string& origin);

  void validate() const;

  static PipelineConfig load(const std::filesystem::path& config_file,
                             const std::vector<std::string>& overrides);
  static PipelineConfig from_overrides(const std::vector<std::string>& overrides);

  std::vector<std::string> known_keys() const;
};

}  // namespace paramine
