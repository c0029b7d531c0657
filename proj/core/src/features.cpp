#include "paramine/features.hpp"

#include "paramine/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace paramine {

std::array<double, 8> ScoreVector::as_array() const {
  return {ctx_l2r, ctx_r2l, ctx_bwdl, ctx_bwdr, jaccard, posshift, gen12, gen21};
}

ScoreVector ScoreVector::from_array(const std::array<double, 8>& a) {
  ScoreVector v;
  v.ctx_l2r = a[0];
  v.ctx_r2l = a[1];
  v.ctx_bwdl = a[2];
  v.ctx_bwdr = a[3];
  v.jaccard = a[4];
  v.posshift = a[5];
  v.gen12 = a[6];
  v.gen21 = a[7];
  return v;
}

std::array<double, 4> context_agreement(const Seq2SeqModel& context_lm,
                                        const std::vector<int>& s1, const std::vector<int>& s2,
                                        const ContextWindow& w) {
  auto normalized = [&](const SeqExample& ex) { return context_lm.log_prob(ex, true); };
  auto gap = [&](const SeqExample& a, const SeqExample& b) {
    return -std::abs(normalized(a) - normalized(b));
  };
  auto reversed = [](const std::vector<int>& s) {
    return std::vector<int>(s.rbegin(), s.rend());
  };

  std::array<double, 4> d{0.0, 0.0, 0.0, 0.0};
  d[0] = gap(make_two_segment_example(Vocabulary::kObjL2R, w.left, w.right, s1),
             make_two_segment_example(Vocabulary::kObjL2R, w.left, w.right, s2));
  d[1] = gap(make_two_segment_example(Vocabulary::kObjR2L, w.left, w.right, reversed(s1)),
             make_two_segment_example(Vocabulary::kObjR2L, w.left, w.right, reversed(s2)));
  if (!w.left.empty())
    d[2] = gap(make_two_segment_example(Vocabulary::kObjBwdL, s1, w.right, w.left),
               make_two_segment_example(Vocabulary::kObjBwdL, s2, w.right, w.left));
  if (!w.right.empty())
    d[3] = gap(make_two_segment_example(Vocabulary::kObjBwdR, w.left, s1, w.right),
               make_two_segment_example(Vocabulary::kObjBwdR, w.left, s2, w.right));
  return d;
}

namespace {

std::map<std::string, std::vector<int>> positions_by_type(const Tokens& s) {
  std::map<std::string, std::vector<int>> pos;
  for (size_t i = 0; i < s.size(); ++i) pos[s[i]].push_back(static_cast<int>(i));
  return pos;
}

/// Mean over a's occurrences of the distance to the nearest occurrence in b.
double nearest_shift(const std::vector<int>& a, const std::vector<int>& b) {
  double sum = 0.0;
  for (int p : a) {
    int best = std::abs(p - b[0]);
    for (int q : b) best = std::min(best, std::abs(p - q));
    sum += best;
  }
  return sum / static_cast<double>(a.size());
}

}  // namespace

std::pair<double, double> diversity_features(const Tokens& s1, const Tokens& s2) {
  auto p1 = positions_by_type(s1);
  auto p2 = positions_by_type(s2);

  size_t shared = 0;
  for (const auto& [tok, pos] : p1)
    if (p2.count(tok)) ++shared;
  size_t unioned = p1.size() + p2.size() - shared;
  double jaccard = unioned == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(unioned);

  if (shared == 0) return {jaccard, 0.0};
  double longer = static_cast<double>(std::max(s1.size(), s2.size()));
  double total = 0.0;
  for (const auto& [tok, pos] : p1) {
    auto it = p2.find(tok);
    if (it == p2.end()) continue;
    // symmetric nearest-copy matching: average both directions
    double shift = 0.5 * (nearest_shift(pos, it->second) + nearest_shift(it->second, pos));
    total += shift / longer;
  }
  return {jaccard, total / static_cast<double>(shared)};
}

std::pair<double, double> generation_features(const Seq2SeqModel& gen_model,
                                              const std::vector<int>& s1,
                                              const std::vector<int>& s2) {
  double gen12 =
      gen_model.log_prob(make_pair_example(Vocabulary::kObjPara, s2, s1), true);
  double gen21 =
      gen_model.log_prob(make_pair_example(Vocabulary::kObjPara, s1, s2), true);
  return {gen12, gen21};
}

double final_score(const ScoreVector& v, const RankingWeights& w) {
  auto f = v.as_array();
  double total = 0.0;
  for (size_t i = 0; i < f.size(); ++i) total += w.w[i] * f[i];
  return total;
}

}  // namespace paramine
