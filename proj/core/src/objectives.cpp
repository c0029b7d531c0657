#include "paramine/objectives.hpp"

#include <algorithm>

namespace paramine {

SeqExample make_two_segment_example(int objective_token, const std::vector<int>& first,
                                    const std::vector<int>& second, std::vector<int> target) {
  SeqExample ex;
  ex.source.reserve(first.size() + second.size() + 2);
  ex.source.push_back(objective_token);
  ex.source_segments.push_back(kSegObjective);
  for (int id : first) {
    ex.source.push_back(id);
    ex.source_segments.push_back(kSegFirst);
  }
  ex.source.push_back(Vocabulary::kSep);
  ex.source_segments.push_back(kSegSep);
  for (int id : second) {
    ex.source.push_back(id);
    ex.source_segments.push_back(kSegSecond);
  }
  ex.target = std::move(target);
  return ex;
}

SeqExample make_pair_example(int objective_token, const std::vector<int>& source_sentence,
                             std::vector<int> target) {
  SeqExample ex;
  ex.source.reserve(source_sentence.size() + 1);
  ex.source.push_back(objective_token);
  ex.source_segments.push_back(kSegObjective);
  for (int id : source_sentence) {
    ex.source.push_back(id);
    ex.source_segments.push_back(kSegFirst);
  }
  ex.target = std::move(target);
  return ex;
}

std::vector<SeqExample> build_context_examples(const ContextWindow& w) {
  std::vector<SeqExample> out;
  const auto& target = w.target.ids;

  out.push_back(make_two_segment_example(Vocabulary::kObjL2R, w.left, w.right, target));

  std::vector<int> reversed(target.rbegin(), target.rend());
  out.push_back(
      make_two_segment_example(Vocabulary::kObjR2L, w.left, w.right, std::move(reversed)));

  if (!w.left.empty())
    out.push_back(make_two_segment_example(Vocabulary::kObjBwdL, target, w.right, w.left));
  if (!w.right.empty())
    out.push_back(make_two_segment_example(Vocabulary::kObjBwdR, w.left, target, w.right));
  return out;
}

SeqExample window_decode_source(const ContextWindow& w) {
  return make_two_segment_example(Vocabulary::kObjL2R, w.left, w.right, {});
}

}  // namespace paramine
