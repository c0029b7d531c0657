#pragma once

#include "paramine/seq2seq.hpp"
#include "paramine/window.hpp"

#include <vector>

namespace paramine {

/// Source layout obj . first . SEP . second with matching segment ids.
SeqExample make_two_segment_example(int objective_token, const std::vector<int>& first,
                                    const std::vector<int>& second,
                                    std::vector<int> target);

/// Source layout obj . tokens for sentence-conditioned generation.
SeqExample make_pair_example(int objective_token, const std::vector<int>& source_sentence,
                             std::vector<int> target);

/// The four directional training examples for one window: generate the target
/// left-to-right and right-to-left from both contexts, and generate each
/// context side from the target plus the other side. Examples whose target
/// would be empty are dropped.
std::vector<SeqExample> build_context_examples(const ContextWindow& w);

/// Decoding source for candidate generation (left-to-right objective).
SeqExample window_decode_source(const ContextWindow& w);

}  // namespace paramine
