#include "paramine/ranker.hpp"

#include "paramine/util.hpp"

#include <algorithm>
#include <cmath>

namespace paramine {

double hinge_loss(const RankingWeights& w, const PreferenceTriple& t) {
  double margin = 1.0 - final_score(t.features_plus, w) + final_score(t.features_minus, w);
  return std::max(0.0, margin);
}

double ranking_objective(const RankingWeights& w, const std::vector<PreferenceTriple>& triples,
                         double l2) {
  double loss = 0.0;
  for (const auto& t : triples) loss += hinge_loss(w, t);
  loss /= static_cast<double>(triples.size());
  double norm2 = 0.0;
  for (double x : w.w) norm2 += x * x;
  return loss + l2 * norm2;
}

RankingWeights train_weights(const std::vector<PreferenceTriple>& triples,
                             const RankTrainConfig& cfg) {
  if (triples.empty()) throw ConfigError("ranker needs at least one triple");
  if (cfg.learning_rate <= 0.0) throw ConfigError("ranker learning_rate must be positive");
  if (cfg.epochs < 0) throw ConfigError("ranker epochs must be >= 0");

  RankingWeights w;  // all ones
  RankingWeights best = w;
  double best_objective = ranking_objective(w, triples, cfg.l2);

  Rng rng(cfg.seed);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t i : shuffled_indices(triples.size(), rng)) {
      const PreferenceTriple& t = triples[i];
      if (hinge_loss(w, t) > 0.0) {
        auto plus = t.features_plus.as_array();
        auto minus = t.features_minus.as_array();
        for (size_t k = 0; k < w.w.size(); ++k)
          w.w[k] += cfg.learning_rate * (plus[k] - minus[k]);
      }
      for (size_t k = 0; k < w.w.size(); ++k)
        w.w[k] -= cfg.learning_rate * 2.0 * cfg.l2 * w.w[k];
    }
    double objective = ranking_objective(w, triples, cfg.l2);
    if (objective < best_objective) {
      best_objective = objective;
      best = w;
    }
  }
  return best;
}

double pairwise_accuracy(const RankingWeights& w, const std::vector<PreferenceTriple>& triples) {
  if (triples.empty()) throw ConfigError("pairwise_accuracy needs triples");
  size_t correct = 0;
  for (const auto& t : triples)
    if (final_score(t.features_plus, w) > final_score(t.features_minus, w)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(triples.size());
}

}  // namespace paramine
