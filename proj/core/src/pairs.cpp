#include "paramine/pairs.hpp"

#include "paramine/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace paramine {

std::vector<ScoredPair> form_pairs(const std::vector<PoolEntry>& pool) {
  std::vector<ScoredPair> out;
  for (const auto& entry : pool) {
    if (!entry.usable()) continue;
    for (size_t i = 0; i < entry.candidates.size(); ++i) {
      for (size_t j = i + 1; j < entry.candidates.size(); ++j) {
        ScoredPair p;
        p.doc_id = entry.doc_id;
        p.sent_index = entry.sent_index;
        p.s1 = entry.candidates[i].tokens;
        p.s2 = entry.candidates[j].tokens;
        if (p.s1 == p.s2) continue;
        if (p.s2 < p.s1) std::swap(p.s1, p.s2);
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

void SelectionConfig::validate() const {
  if (rho <= 0.0) throw ConfigError("selection rho must be positive");
  if (per_context_cap < 0) throw ConfigError("per_context_cap must be >= 0");
}

namespace {

int effective_cap(const SelectionConfig& cfg) {
  if (cfg.per_context_cap > 0) return cfg.per_context_cap;
  return cfg.rho <= 1.0 ? 1 : static_cast<int>(std::ceil(cfg.rho - 1e-9));
}

size_t selection_budget(double rho, size_t n_contexts) {
  double raw = rho * static_cast<double>(n_contexts);
  auto budget = static_cast<long long>(std::floor(raw + 1e-9));
  if (budget < 1) throw ConfigError("selection budget empty");
  return static_cast<size_t>(budget);
}

}  // namespace

std::vector<ScoredPair> select_pairs(std::vector<ScoredPair> scored, size_t n_contexts,
                                     const SelectionConfig& cfg) {
  cfg.validate();
  size_t budget = selection_budget(cfg.rho, n_contexts);
  int cap = effective_cap(cfg);

  std::sort(scored.begin(), scored.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
    if (a.sent_index != b.sent_index) return a.sent_index < b.sent_index;
    if (a.s1 != b.s1) return a.s1 < b.s1;
    return a.s2 < b.s2;
  });

  std::map<std::pair<std::string, int>, int> taken_per_context;
  std::vector<ScoredPair> selected;
  for (auto& p : scored) {
    if (selected.size() >= budget) break;
    int& used = taken_per_context[{p.doc_id, p.sent_index}];
    if (used >= cap) continue;
    ++used;
    selected.push_back(std::move(p));
  }
  return selected;
}

std::vector<ScoredPair> select_pairs_random(const std::vector<ScoredPair>& scored,
                                            size_t n_contexts, const SelectionConfig& cfg,
                                            uint64_t seed) {
  cfg.validate();
  size_t budget = selection_budget(cfg.rho, n_contexts);
  int cap = effective_cap(cfg);

  std::map<std::pair<std::string, int>, std::vector<const ScoredPair*>> by_context;
  for (const auto& p : scored) by_context[{p.doc_id, p.sent_index}].push_back(&p);

  Rng rng(seed);
  std::vector<ScoredPair> selected;
  for (auto& [key, pairs] : by_context) {
    if (selected.size() >= budget) break;
    auto order = shuffled_indices(pairs.size(), rng);
    for (int k = 0; k < cap && static_cast<size_t>(k) < order.size(); ++k) {
      if (selected.size() >= budget) break;
      selected.push_back(*pairs[order[static_cast<size_t>(k)]]);
    }
  }
  return selected;
}

}  // namespace paramine
