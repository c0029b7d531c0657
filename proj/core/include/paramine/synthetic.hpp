#pragma once

#include <cstdint>
#include <filesystem>

namespace paramine {

struct SyntheticConfig {
  int n_docs = 600;
  int n_clusters = 24;
  uint64_t seed = 7;
};

struct SyntheticStats {
  int documents = 0;
  int clusters = 0;
  long sentences = 0;
  long triples = 0;
};

/// Template corpus with ground-truth paraphrase clusters: writes corpus.txt
/// (blank-line separated documents), clusters.jsonl (sentence -> cluster id)
/// and triples.jsonl (preference triples: same-cluster pair beats
/// cross-cluster pair).
SyntheticStats make_synthetic(const std::filesystem::path& out_dir, const SyntheticConfig& cfg);

}  // namespace paramine
