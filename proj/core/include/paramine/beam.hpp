#pragma once

#include "paramine/graph.hpp"
#include "paramine/seq2seq.hpp"

#include <string>
#include <vector>

namespace paramine {

struct DecodeConfig {
  int beam_size = 12;
  int num_return = 8;
  double diversity_penalty = 1.0;
  int max_len = 40;
  double length_norm_alpha = 1.0;

  void validate() const;  // beam_size >= num_return >= 1, max_len >= 2
};

struct Candidate {
  std::vector<int> tokens;  // no BOS/EOS
  double model_score = 0.0; // log P(tokens + EOS) / (|tokens|+1)^alpha
  std::string doc_id;
  int sent_index = 0;
};

/// Stepwise scoring interface for beam search. States are opaque handles owned
/// by the scorer; start() yields the state after consuming BOS, extend() feeds
/// one more token.
class StepScorer {
 public:
  virtual ~StepScorer() = default;
  virtual int vocab_size() const = 0;
  virtual int eos_id() const = 0;
  virtual int start() = 0;
  virtual const Vector& log_probs(int state) = 0;
  virtual int extend(int state, int token) = 0;
};

/// Beam search with an intra-sibling rank penalty: continuations of one beam,
/// ranked by log-probability, have penalty*rank subtracted before the global
/// top-B cut. Running scores stay unpenalized. Hypotheses still open at
/// max_len are closed with the EOS probability appended, so every result
/// scores logP(tokens+EOS)/(|tokens|+1)^alpha. Duplicates removed, results
/// sorted by score descending (ties by token sequence).
std::vector<Candidate> diverse_beam_search(StepScorer& scorer, const DecodeConfig& cfg,
                                           const std::vector<char>& banned);

/// StepScorer over a model checkpoint for one encoded source.
class ModelStepScorer : public StepScorer {
 public:
  ModelStepScorer(const Seq2SeqModel& model, std::vector<int> source,
                  std::vector<int> source_segments);
  int vocab_size() const override;
  int eos_id() const override;
  int start() override;
  const Vector& log_probs(int state) override;
  int extend(int state, int token) override;

 private:
  const Seq2SeqModel& model_;
  EncodedSource enc_;
  std::vector<DecState> states_;
  std::vector<Vector> dists_;
};

/// Token mask for decoding: specials banned except UNK.
std::vector<char> default_banned(const Vocabulary& v);

/// Beam-search one source with the model, stripping BOS/EOS from outputs.
std::vector<Candidate> decode_candidates(const Seq2SeqModel& model,
                                         const std::vector<int>& source,
                                         const std::vector<int>& source_segments,
                                         const DecodeConfig& cfg);

}  // namespace paramine
