#pragma once

#include "paramine/features.hpp"

#include <vector>

namespace paramine {

struct PreferenceTriple {
  Tokens anchor;
  Tokens better;
  Tokens worse;
  ScoreVector features_plus;   // (anchor, better)
  ScoreVector features_minus;  // (anchor, worse)
};

struct RankTrainConfig {
  int epochs = 200;
  uint64_t seed = 1;
  double learning_rate = 0.01;
  double l2 = 1e-4;
};

/// max(0, 1 - S(a,b+) + S(a,b-)) under weights w.
double hinge_loss(const RankingWeights& w, const PreferenceTriple& t);

/// Mean hinge loss plus l2 * ||w||^2.
double ranking_objective(const RankingWeights& w, const std::vector<PreferenceTriple>& triples,
                         double l2);

/// Subgradient descent from all-ones init, shuffled per epoch; returns the
/// weights with the lowest full-dataset objective seen (the init included, so
/// zero epochs returns the init).
RankingWeights train_weights(const std::vector<PreferenceTriple>& triples,
                             const RankTrainConfig& cfg);

/// Fraction of triples with S(a,b+) > S(a,b-); ties count as failures.
double pairwise_accuracy(const RankingWeights& w, const std::vector<PreferenceTriple>& triples);

}  // namespace paramine
