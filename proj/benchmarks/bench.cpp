#include "paramine/beam.hpp"
#include "paramine/features.hpp"
#include "paramine/metrics.hpp"
#include "paramine/objectives.hpp"
#include "paramine/seq2seq.hpp"
#include "paramine/text.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

using namespace paramine;

namespace {

Vocabulary bench_vocab(int n_words) {
  std::vector<std::string> toks(Vocabulary::special_tokens().begin(),
                                Vocabulary::special_tokens().end());
  for (int i = 0; i < n_words; ++i) toks.push_back("w" + std::to_string(i));
  return Vocabulary(toks);
}

Seq2SeqModel bench_model(const Vocabulary& v) {
  ModelConfig mc;
  mc.d_model = 64;
  mc.n_heads = 4;
  mc.d_ff = 128;
  mc.n_enc_layers = 2;
  mc.n_dec_layers = 2;
  mc.max_positions = 64;
  return Seq2SeqModel(mc, v, 1);
}

SeqExample bench_example(const Vocabulary& v, int src_len, int tgt_len) {
  std::vector<int> src, tgt;
  for (int i = 0; i < src_len; ++i) src.push_back(v.id("w" + std::to_string(i % 50)));
  for (int i = 0; i < tgt_len; ++i) tgt.push_back(v.id("w" + std::to_string((i * 3) % 50)));
  return make_pair_example(Vocabulary::kObjPara, src, tgt);
}

void bm_tokenize(benchmark::State& state) {
  std::string line = "The Quick, Brown fox; jumped over 12 lazy dogs near the riverbank.";
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(line, true));
}
BENCHMARK(bm_tokenize);

void bm_bleu(benchmark::State& state) {
  std::mt19937_64 rng(5);
  TokenCorpus cand, ref;
  for (int i = 0; i < 200; ++i) {
    Tokens c, r;
    for (int j = 0; j < 15; ++j) {
      c.push_back("w" + std::to_string(rng() % 40));
      r.push_back("w" + std::to_string(rng() % 40));
    }
    cand.push_back(c);
    ref.push_back(r);
  }
  for (auto _ : state) benchmark::DoNotOptimize(bleu(cand, ref));
}
BENCHMARK(bm_bleu);

void bm_diversity(benchmark::State& state) {
  Tokens s1, s2;
  std::mt19937_64 rng(6);
  for (int i = 0; i < 15; ++i) {
    s1.push_back("w" + std::to_string(rng() % 12));
    s2.push_back("w" + std::to_string(rng() % 12));
  }
  for (auto _ : state) benchmark::DoNotOptimize(diversity_features(s1, s2));
}
BENCHMARK(bm_diversity);

void bm_log_prob(benchmark::State& state) {
  Vocabulary v = bench_vocab(100);
  Seq2SeqModel m = bench_model(v);
  SeqExample ex = bench_example(v, 12, 12);
  for (auto _ : state) benchmark::DoNotOptimize(m.log_prob(ex, true));
}
BENCHMARK(bm_log_prob);

void bm_train_step(benchmark::State& state) {
  Vocabulary v = bench_vocab(100);
  Seq2SeqModel m = bench_model(v);
  std::vector<SeqExample> data = {bench_example(v, 12, 12)};
  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 1;
  for (auto _ : state) train_model(m, data, tc);
}
BENCHMARK(bm_train_step);

void bm_beam_decode(benchmark::State& state) {
  Vocabulary v = bench_vocab(100);
  Seq2SeqModel m = bench_model(v);
  SeqExample ex = bench_example(v, 12, 1);
  DecodeConfig dc;
  dc.beam_size = 4;
  dc.num_return = 4;
  dc.max_len = 10;
  dc.diversity_penalty = 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(decode_candidates(m, ex.source, ex.source_segments, dc));
}
BENCHMARK(bm_beam_decode);

}  // namespace

BENCHMARK_MAIN();
