#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "paramine/objectives.hpp"
#include "paramine/seq2seq.hpp"
#include "paramine/util.hpp"
#include "paramine/vocab.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace paramine;

namespace {

Vocabulary letters_vocab(int n_letters) {
  std::vector<std::string> toks(Vocabulary::special_tokens().begin(),
                                Vocabulary::special_tokens().end());
  for (int i = 0; i < n_letters; ++i) toks.push_back(std::string(1, char('a' + i)));
  return Vocabulary(toks);
}

ModelConfig micro_config() {
  ModelConfig mc;
  mc.d_model = 8;
  mc.n_heads = 2;
  mc.d_ff = 16;
  mc.n_enc_layers = 1;
  mc.n_dec_layers = 1;
  mc.max_positions = 24;
  return mc;
}

SeqExample letter_example(const Vocabulary& v, const std::string& src,
                          const std::string& tgt) {
  std::vector<int> s, t;
  for (char c : src) s.push_back(v.id(std::string(1, c)));
  for (char c : tgt) t.push_back(v.id(std::string(1, c)));
  return make_pair_example(Vocabulary::kObjPara, s, t);
}

// Forward pass written straight from the architecture description with plain
// Eigen loops, sharing no code with the model, as an independent oracle.
struct ReferenceForward {
  const Seq2SeqModel& m;
  const ModelConfig& cfg;
  Matrix pos;

  explicit ReferenceForward(const Seq2SeqModel& model)
      : m(model), cfg(model.config()),
        pos(sinusoidal_positions(cfg.max_positions, cfg.d_model)) {}

  const Matrix& P(const std::string& name) const { return m.parameter(name).value; }

  Matrix ln(const Matrix& x, const std::string& p) const {
    const Matrix& g = P(p + ".g");
    const Matrix& b = P(p + ".b");
    Matrix out(x.rows(), x.cols());
    for (int r = 0; r < x.rows(); ++r) {
      double mean = x.row(r).mean();
      double var = 0.0;
      for (int c = 0; c < x.cols(); ++c) var += std::pow(x(r, c) - mean, 2);
      var /= x.cols();
      for (int c = 0; c < x.cols(); ++c)
        out(r, c) = (x(r, c) - mean) / std::sqrt(var + 1e-5) * g(0, c) + b(0, c);
    }
    return out;
  }

  Matrix att(const std::string& p, const Matrix& qin, const Matrix& kin, bool causal) const {
    Matrix q = qin * P(p + "wq") + Matrix::Ones(qin.rows(), 1) * P(p + "bq");
    Matrix k = kin * P(p + "wk") + Matrix::Ones(kin.rows(), 1) * P(p + "bk");
    Matrix v = kin * P(p + "wv") + Matrix::Ones(kin.rows(), 1) * P(p + "bv");
    int dh = cfg.d_model / cfg.n_heads;
    Matrix merged(q.rows(), cfg.d_model);
    for (int h = 0; h < cfg.n_heads; ++h) {
      Matrix scores = q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose() /
                      std::sqrt(double(dh));
      for (int r = 0; r < scores.rows(); ++r) {
        double best = -1e300;
        for (int c = 0; c < scores.cols(); ++c) {
          if (causal && c > r) continue;
          best = std::max(best, scores(r, c));
        }
        double z = 0.0;
        for (int c = 0; c < scores.cols(); ++c) {
          double e = (causal && c > r) ? 0.0 : std::exp(scores(r, c) - best);
          scores(r, c) = e;
          z += e;
        }
        scores.row(r) /= z;
      }
      merged.middleCols(h * dh, dh) = scores * v.middleCols(h * dh, dh);
    }
    return merged * P(p + "wo") + Matrix::Ones(merged.rows(), 1) * P(p + "bo");
  }

  Matrix ffn(const std::string& p, const Matrix& x) const {
    Matrix h = x * P(p + "w1") + Matrix::Ones(x.rows(), 1) * P(p + "b1");
    h = h.cwiseMax(0.0);
    return h * P(p + "w2") + Matrix::Ones(h.rows(), 1) * P(p + "b2");
  }

  Matrix embed(const std::vector<int>& ids, const std::vector<int>& segs) const {
    Matrix x(ids.size(), cfg.d_model);
    for (size_t i = 0; i < ids.size(); ++i)
      x.row(i) = P("emb.word").row(ids[i]) + pos.row(i) + P("emb.sent").row(segs[i]);
    return x;
  }

  double log_prob_raw(const SeqExample& ex) const {
    Matrix x = embed(ex.source, ex.source_segments);
    for (int l = 0; l < cfg.n_enc_layers; ++l) {
      std::string p = "enc." + std::to_string(l) + ".";
      x = x + att(p + "att.", ln(x, p + "ln1"), ln(x, p + "ln1"), false);
      x = x + ffn(p + "ffn.", ln(x, p + "ln2"));
    }
    Matrix enc_out = ln(x, "enc.ln");

    std::vector<int> dec_ids = {Vocabulary::kBos};
    dec_ids.insert(dec_ids.end(), ex.target.begin(), ex.target.end());
    std::vector<int> gold = ex.target;
    gold.push_back(Vocabulary::kEos);
    Matrix d = embed(dec_ids, std::vector<int>(dec_ids.size(), kSegDecoder));
    for (int l = 0; l < cfg.n_dec_layers; ++l) {
      std::string p = "dec." + std::to_string(l) + ".";
      d = d + att(p + "self.", ln(d, p + "ln1"), ln(d, p + "ln1"), true);
      d = d + att(p + "cross.", ln(d, p + "ln2"), enc_out, false);
      d = d + ffn(p + "ffn.", ln(d, p + "ln3"));
    }
    Matrix logits = ln(d, "dec.ln") * P("out.w") + Matrix::Ones(d.rows(), 1) * P("out.b");

    double total = 0.0;
    for (int r = 0; r < logits.rows(); ++r) {
      double best = logits.row(r).maxCoeff();
      double z = 0.0;
      for (int c = 0; c < logits.cols(); ++c) z += std::exp(logits(r, c) - best);
      total += logits(r, gold[r]) - best - std::log(z);
    }
    return total;
  }
};

}  // namespace

TEST_CASE("model config validation") {
  ModelConfig mc = micro_config();
  mc.n_heads = 3;  // 8 % 3 != 0
  CHECK_THROWS_AS(mc.validate(), ConfigError);
  mc = micro_config();
  mc.d_ff = 0;
  CHECK_THROWS_AS(mc.validate(), ConfigError);
  mc = micro_config();
  mc.max_sentence_positions = 3;  // decoder segment id would not fit
  CHECK_THROWS_AS(mc.validate(), ConfigError);
  CHECK_NOTHROW(micro_config().validate());
}

TEST_CASE("sinusoidal position table") {
  Matrix t = sinusoidal_positions(4, 6);
  CHECK(t.rows() == 4);
  CHECK(t.cols() == 6);
  for (int c = 0; c < 6; c += 2) {
    CHECK(t(0, c) == doctest::Approx(0.0));
    CHECK(t(0, c + 1) == doctest::Approx(1.0));
  }
  CHECK(t(1, 0) == doctest::Approx(std::sin(1.0)));
  CHECK(t(1, 1) == doctest::Approx(std::cos(1.0)));
}

TEST_CASE("embed_inputs sums the three embedding rows") {
  Matrix word(3, 2), sent(2, 2), pos = sinusoidal_positions(4, 2);
  word << 1, 2, 3, 4, 5, 6;
  sent << 10, 20, 30, 40;
  Matrix out = embed_inputs(word, pos, sent, {2, 2}, {0, 1}, {0, 1});
  CHECK(out(0, 0) == doctest::Approx(5 + pos(0, 0) + 10));
  CHECK(out(0, 1) == doctest::Approx(6 + pos(0, 1) + 20));
  CHECK(out(1, 0) == doctest::Approx(5 + pos(1, 0) + 30));
  // identical tokens at different positions differ
  CHECK(out.row(0) != out.row(1));
  CHECK_THROWS_AS(embed_inputs(word, pos, sent, {9}, {0}, {0}), std::out_of_range);
  CHECK_THROWS_AS(embed_inputs(word, pos, sent, {0}, {7}, {0}), std::out_of_range);
}

TEST_CASE("log_prob normalization and sign") {
  Vocabulary v = letters_vocab(6);
  Seq2SeqModel m(micro_config(), v, 42);
  SeqExample ex = letter_example(v, "abc", "cba");
  double raw = m.log_prob(ex, false);
  double norm = m.log_prob(ex, true);
  CHECK(raw < 0.0);
  CHECK(norm == doctest::Approx(raw / (3 + 1)).epsilon(1e-12));
}

TEST_CASE("untrained model stays in a sane band around chance") {
  Vocabulary v = letters_vocab(6);
  Seq2SeqModel m(micro_config(), v, 1);
  SeqExample ex = letter_example(v, "ab", "ba");
  double norm = m.log_prob(ex, true);
  double chance = -std::log(double(v.size()));
  CHECK(norm < 0.5 * chance);
  CHECK(norm > 3.0 * chance);
}

TEST_CASE("next_token_dist is a distribution and matches log_prob") {
  Vocabulary v = letters_vocab(6);
  Seq2SeqModel m(micro_config(), v, 7);
  SeqExample ex = letter_example(v, "abca", "bc");

  std::vector<int> prefix = {Vocabulary::kBos};
  std::vector<int> gold = ex.target;
  gold.push_back(Vocabulary::kEos);
  double total = 0.0;
  for (int next : gold) {
    Vector dist = m.next_token_dist(ex.source, ex.source_segments, prefix);
    CHECK(dist.minCoeff() >= 0.0);
    CHECK(dist.sum() == doctest::Approx(1.0).epsilon(1e-6));
    total += std::log(dist(next));
    prefix.push_back(next);
  }
  CHECK(total == doctest::Approx(m.log_prob(ex, false)).epsilon(1e-9));

  CHECK_THROWS_AS(m.next_token_dist(ex.source, ex.source_segments, {ex.target[0]}),
                  FormatError);
}

TEST_CASE("stepwise decoding matches the full pass") {
  for (uint64_t seed : {3u, 4u, 5u}) {
    Vocabulary v = letters_vocab(8);
    Seq2SeqModel m(micro_config(), v, seed);
    SeqExample ex = letter_example(v, "abcd", "dcb");

    EncodedSource enc = m.encode(ex.source, ex.source_segments);
    DecState st = m.new_state();
    std::vector<int> prefix;
    std::vector<int> feed = {Vocabulary::kBos, v.id("d"), v.id("c"), v.id("a")};
    for (int tok : feed) {
      Vector step_lp = m.step(enc, st, tok);
      prefix.push_back(tok);
      Vector full = m.next_token_dist(ex.source, ex.source_segments, prefix);
      REQUIRE(step_lp.size() == full.size());
      for (int i = 0; i < full.size(); ++i)
        CHECK(std::exp(step_lp(i)) == doctest::Approx(full(i)).epsilon(1e-9));
    }
  }
}

TEST_CASE("forward pass matches an independent reimplementation") {
  Vocabulary v = letters_vocab(10);
  for (uint64_t seed : {11u, 12u}) {
    ModelConfig mc = micro_config();
    mc.n_enc_layers = 2;
    mc.n_dec_layers = 2;
    Seq2SeqModel m(mc, v, seed);
    ReferenceForward ref(m);
    for (const char* tgt : {"ba", "cadb", "a"}) {
      SeqExample ex = letter_example(v, "abcd", tgt);
      CHECK(m.log_prob(ex, false) == doctest::Approx(ref.log_prob_raw(ex)).epsilon(1e-9));
    }
  }
}

TEST_CASE("two-segment sources run through the model") {
  Vocabulary v = letters_vocab(6);
  Seq2SeqModel m(micro_config(), v, 9);
  SeqExample ex = make_two_segment_example(Vocabulary::kObjL2R, v.to_ids({"a", "b"}),
                                           v.to_ids({"c"}), v.to_ids({"b", "c"}));
  ReferenceForward ref(m);
  CHECK(m.log_prob(ex, false) == doctest::Approx(ref.log_prob_raw(ex)).epsilon(1e-9));
}

TEST_CASE("training is deterministic and zero epochs is a no-op") {
  Vocabulary v = letters_vocab(6);
  std::vector<SeqExample> data = {letter_example(v, "ab", "ba"),
                                  letter_example(v, "cd", "dc")};
  TrainConfig tc;
  tc.learning_rate = 1e-3;
  tc.epochs = 3;
  tc.batch_size = 2;
  tc.seed = 5;

  Seq2SeqModel m1(micro_config(), v, 42);
  Seq2SeqModel m2(micro_config(), v, 42);
  Seq2SeqModel frozen(micro_config(), v, 42);

  train_model(m1, data, tc);
  train_model(m2, data, tc);
  for (const auto& name : m1.parameter_names()) {
    CHECK(m1.parameter(name).value == m2.parameter(name).value);
    CHECK(m1.parameter(name).m == m2.parameter(name).m);
  }

  TrainConfig none = tc;
  none.epochs = 0;
  TrainStats stats = train_model(m2, data, none);
  CHECK(stats.steps == 0);
  for (const auto& name : m2.parameter_names())
    CHECK(m2.parameter(name).value == m1.parameter(name).value);

  // training moved the parameters away from initialization
  bool moved = false;
  for (const auto& name : m1.parameter_names())
    if (m1.parameter(name).value != frozen.parameter(name).value) moved = true;
  CHECK(moved);
}

TEST_CASE("training memorizes a single pair") {
  Vocabulary v = letters_vocab(6);
  std::vector<SeqExample> data = {letter_example(v, "abc", "cab")};
  Seq2SeqModel m(micro_config(), v, 3);
  TrainConfig tc;
  tc.learning_rate = 5e-3;
  tc.epochs = 200;
  tc.batch_size = 1;
  tc.seed = 1;
  TrainStats stats = train_model(m, data, tc);
  CHECK(stats.final_loss < 0.1);
  CHECK(m.log_prob(data[0], true) > -0.1);

  auto decoded = m.greedy_decode(data[0].source, data[0].source_segments, 10);
  CHECK(decoded == data[0].target);
}

TEST_CASE("warmup scales early steps down") {
  Vocabulary v = letters_vocab(6);
  std::vector<SeqExample> data = {letter_example(v, "ab", "ba")};
  TrainConfig slow;
  slow.learning_rate = 1e-2;
  slow.epochs = 1;
  slow.batch_size = 1;
  slow.warmup_steps = 1000;
  TrainConfig fast = slow;
  fast.warmup_steps = 0;

  Seq2SeqModel ms(micro_config(), v, 8);
  Seq2SeqModel mf(micro_config(), v, 8);
  train_model(ms, data, slow);
  train_model(mf, data, fast);
  double drift_slow = 0.0, drift_fast = 0.0;
  Seq2SeqModel init(micro_config(), v, 8);
  for (const auto& name : init.parameter_names()) {
    drift_slow += (ms.parameter(name).value - init.parameter(name).value).norm();
    drift_fast += (mf.parameter(name).value - init.parameter(name).value).norm();
  }
  CHECK(drift_slow < drift_fast);
}

TEST_CASE("gradient check on a micro model") {
  Vocabulary v = letters_vocab(8);
  Seq2SeqModel m(micro_config(), v, 17);
  std::vector<SeqExample> data = {letter_example(v, "abc", "ca"),
                                  letter_example(v, "bd", "db")};
  CHECK(gradient_check(m, data, 40, 123) < 1e-4);
}

TEST_CASE("bad examples are rejected") {
  Vocabulary v = letters_vocab(4);
  Seq2SeqModel m(micro_config(), v, 1);

  SeqExample bad_id = letter_example(v, "ab", "ba");
  bad_id.target[0] = v.size() + 5;
  Graph g1;
  CHECK_THROWS(m.build_loss(g1, bad_id));

  SeqExample empty_target = letter_example(v, "ab", "ba");
  empty_target.target.clear();
  CHECK_THROWS_AS(m.log_prob(empty_target, true), FormatError);
}
