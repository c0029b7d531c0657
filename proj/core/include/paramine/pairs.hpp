#pragma once

#include "paramine/features.hpp"

#include <string>
#include <vector>

namespace paramine {

struct PoolCandidate {
  Tokens tokens;
  double model_score = 0.0;
};

/// One window's decoded candidates. usable means at least two distinct
/// candidates came out of decoding, so the window can contribute pairs.
struct PoolEntry {
  std::string doc_id;
  int sent_index = 0;
  Tokens original;
  std::vector<PoolCandidate> candidates;
  bool usable() const { return candidates.size() >= 2; }
};

/// A candidate pair with its features and combined score. s1 < s2
/// lexicographically; feature fields are zero until scored.
struct ScoredPair {
  std::string doc_id;
  int sent_index = 0;
  Tokens s1;
  Tokens s2;
  ScoreVector features;
  double score = 0.0;
};

/// All unordered pairs of distinct candidates within each usable pool entry.
std::vector<ScoredPair> form_pairs(const std::vector<PoolEntry>& pool);

struct SelectionConfig {
  double rho = 1.0;
  int per_context_cap = 0;  // 0: 1 when rho <= 1, else ceil(rho)
  void validate() const;
};

/// Budget floor(rho * n_contexts); sort by (score desc, doc_id, sent_index,
/// tokens) and take greedily under the per-context cap until the budget or the
/// pool runs out. Throws ConfigError("selection budget empty") on a zero
/// budget.
std::vector<ScoredPair> select_pairs(std::vector<ScoredPair> scored, size_t n_contexts,
                                     const SelectionConfig& cfg);

/// Ablation selector: one uniformly random pair per context, seeded, same
/// budget rule.
std::vector<ScoredPair> select_pairs_random(const std::vector<ScoredPair>& scored,
                                            size_t n_contexts, const SelectionConfig& cfg,
                                            uint64_t seed);

}  // namespace paramine
