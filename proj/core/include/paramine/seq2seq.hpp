#pragma once

#include "paramine/graph.hpp"
#include "paramine/util.hpp"
#include "paramine/vocab.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace paramine {

struct ModelConfig {
  int d_model = 64;
  int n_heads = 2;
  int d_ff = 128;
  int n_enc_layers = 2;
  int n_dec_layers = 2;
  int max_positions = 256;
  int max_sentence_positions = 6;
  double dropout = 0.0;

  void validate() const;  // throws ConfigError on bad dims
  bool operator==(const ModelConfig&) const = default;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int warmup_steps = 0;
  int epochs = 1;
  int batch_size = 16;
  uint64_t seed = 1;

  void validate() const;
};

/// One conditional training example. source carries an objective token (and,
/// for context objectives, a SEP between the two context sides);
/// source_segments gives each source position its segment id. target holds
/// plain token ids; BOS/EOS framing is added by the model.
struct SeqExample {
  std::vector<int> source;
  std::vector<int> source_segments;
  std::vector<int> target;
};

// Segment ids used in source_segments and for decoder positions.
enum Segment : int {
  kSegObjective = 0,
  kSegFirst = 1,
  kSegSep = 2,
  kSegSecond = 3,
  kSegDecoder = 4,
};

/// Sinusoidal position table, n_positions x d_model.
Matrix sinusoidal_positions(int n_positions, int d_model);

/// Sum of word, token-position and sentence-position embedding rows for each
/// input position. Throws std::out_of_range past the table sizes.
Matrix embed_inputs(const Matrix& word_emb, const Matrix& pos_table, const Matrix& sent_emb,
                    const std::vector<int>& ids, const std::vector<int>& token_positions,
                    const std::vector<int>& sentence_positions);

/// Encoder output plus per-decoder-layer cross-attention keys/values,
/// precomputed once per source.
struct EncodedSource {
  Matrix enc_out;
  std::vector<Matrix> cross_k;
  std::vector<Matrix> cross_v;
};

/// Grows one row per generated position; self-attention keys/values per layer.
struct DecState {
  std::vector<Matrix> self_k;
  std::vector<Matrix> self_v;
  int len = 0;
};

/// Transformer encoder-decoder (pre-norm) with sinusoidal token positions and
/// a learned sentence-position embedding. All math in double precision.
class Seq2SeqModel {
 public:
  Seq2SeqModel(ModelConfig cfg, Vocabulary vocab, uint64_t init_seed);
  Seq2SeqModel(ModelConfig cfg, Vocabulary vocab);  // zero-initialized shell for loading

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }
  int vocab_size() const { return static_cast<int>(vocab_.size()); }

  std::vector<Parameter*> parameters();
  Parameter& parameter(const std::string& name);
  const Parameter& parameter(const std::string& name) const;
  std::vector<std::string> parameter_names() const;

  long step_count = 0;  // optimizer steps taken so far

  /// Builds the training graph for one example and returns the node holding
  /// the summed cross-entropy over target tokens plus EOS.
  Graph::Id build_loss(Graph& g, const SeqExample& ex);

  /// Teacher-forced conditional log-probability of target (EOS step included);
  /// divided by |target|+1 when length_normalize is set.
  double log_prob(const SeqExample& ex, bool length_normalize) const;

  /// Probability distribution over the next token after the prefix. prefix
  /// must begin with BOS.
  Vector next_token_dist(const std::vector<int>& source,
                         const std::vector<int>& source_segments,
                         const std::vector<int>& prefix) const;

  // Stepwise decoding
  EncodedSource encode(const std::vector<int>& source,
                       const std::vector<int>& source_segments) const;
  DecState new_state() const;
  /// Feed one token (BOS first), advancing the state; returns log-probability
  /// vector over the next token.
  Vector step(const EncodedSource& enc, DecState& state, int token) const;

  std::vector<int> greedy_decode(const std::vector<int>& source,
                                 const std::vector<int>& source_segments,
                                 int max_len) const;

 private:
  void build_parameters();
  void init_parameters(uint64_t seed);

  ModelConfig cfg_;
  Vocabulary vocab_;
  std::map<std::string, std::unique_ptr<Parameter>> params_;
  Matrix pos_table_;
};

struct TrainStats {
  double final_loss = 0.0;
  long steps = 0;
};

/// Adam with linear warmup on mean per-token cross-entropy. Deterministic
/// given the seed; throws NumericError when the loss goes non-finite.
TrainStats train_model(Seq2SeqModel& model, const std::vector<SeqExample>& examples,
                       const TrainConfig& tc);

/// Numerical gradient check on sampled coordinates; returns the worst
/// relative error over them.
double gradient_check(Seq2SeqModel& model, const std::vector<SeqExample>& examples,
                      int n_coords, uint64_t seed);

}  // namespace paramine
