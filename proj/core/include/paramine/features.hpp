#pragma once

#include "paramine/metrics.hpp"
#include "paramine/seq2seq.hpp"
#include "paramine/window.hpp"

#include <array>

namespace paramine {

/// Raw pair features: four context-agreement differences (non-positive), two
/// surface-diversity terms in [0,1], two mutual-generation log-probabilities
/// (non-positive).
struct ScoreVector {
  double ctx_l2r = 0.0;
  double ctx_r2l = 0.0;
  double ctx_bwdl = 0.0;
  double ctx_bwdr = 0.0;
  double jaccard = 0.0;
  double posshift = 0.0;
  double gen12 = 0.0;
  double gen21 = 0.0;

  std::array<double, 8> as_array() const;
  static ScoreVector from_array(const std::array<double, 8>& a);
};

struct RankingWeights {
  std::array<double, 8> w{1, 1, 1, 1, 1, 1, 1, 1};  // aligned with ScoreVector::as_array
};

/// For each directional objective, the gap in length-normalized conditional
/// log-probability when the window's target is replaced by s1 versus s2,
/// returned as negated absolute differences. Objectives whose context side is
/// empty contribute 0.
std::array<double, 4> context_agreement(const Seq2SeqModel& context_lm,
                                        const std::vector<int>& s1, const std::vector<int>& s2,
                                        const ContextWindow& w);

/// (jaccard, posshift): unigram-type overlap and mean relative position change
/// of shared unigrams. Symmetric in its arguments; both values in [0,1].
std::pair<double, double> diversity_features(const Tokens& s1, const Tokens& s2);

/// (gen12, gen21): length-normalized log P(s1|s2) and log P(s2|s1) under the
/// pair-generation model.
std::pair<double, double> generation_features(const Seq2SeqModel& gen_model,
                                              const std::vector<int>& s1,
                                              const std::vector<int>& s2);

double final_score(const ScoreVector& v, const RankingWeights& w);

}  // namespace paramine
