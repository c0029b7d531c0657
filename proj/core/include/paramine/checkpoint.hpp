#pragma once

#include "paramine/seq2seq.hpp"

#include <filesystem>

namespace paramine {

/// Binary checkpoint: format tag + version, model config, vocabulary, then
/// named parameter blocks (value and Adam moments, row-major doubles).
/// load(save(m)) is bit-identical.
void save_checkpoint(const std::filesystem::path& path, const Seq2SeqModel& model);
Seq2SeqModel load_checkpoint(const std::filesystem::path& path);

}  // namespace paramine
