#pragma once

#include "paramine/config.hpp"

#include <iosfwd>
#include <string>

namespace paramine {

/// Pipeline stages behind the command line. Each reads its prerequisite
/// artifacts from cfg.workdir, writes its own artifact atomically and prints a
/// one-line summary to out. Errors surface as exceptions (ConfigError,
/// MissingArtifactError, NumericError).
void stage_ingest(const PipelineConfig& cfg, std::ostream& out);
void stage_train_context_lm(const PipelineConfig& cfg, std::ostream& out);
void stage_generate(const PipelineConfig& cfg, std::ostream& out);
void stage_train_genscore(const PipelineConfig& cfg, std::ostream& out);
void stage_train_ranker(const PipelineConfig& cfg, const std::string& triples_path,
                        std::ostream& out);
void stage_score(const PipelineConfig& cfg, std::ostream& out);
void stage_select(const PipelineConfig& cfg, std::ostream& out);
void stage_train_paraphraser(const PipelineConfig& cfg, std::ostream& out);
void stage_finetune(const PipelineConfig& cfg, const std::string& pairs_path, std::ostream& out);
void stage_paraphrase(const PipelineConfig& cfg, const std::string& input_path,
                      const std::string& output_path, std::ostream& out);
void stage_evaluate(const PipelineConfig& cfg, const std::string& source_path,
                    const std::string& reference_path, const std::string& candidate_path,
                    std::ostream& out);
void stage_make_synthetic(const PipelineConfig& cfg, std::ostream& out);

}  // namespace paramine
