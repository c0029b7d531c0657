#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "paramine/config.hpp"
#include "paramine/jsonl.hpp"
#include "paramine/kv.hpp"
#include "paramine/util.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <unistd.h>
#include <vector>

using namespace paramine;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("paramine-io-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

std::string error_text(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

Vocabulary tiny_vocab() {
  std::vector<std::string> toks(Vocabulary::special_tokens().begin(),
                                Vocabulary::special_tokens().end());
  for (const char* w : {"the", "cat", "sat", "mat", "."}) toks.push_back(w);
  return Vocabulary(toks);
}

}  // namespace

TEST_CASE("windows round trip through jsonl") {
  TempDir dir;
  Vocabulary v = tiny_vocab();
  std::vector<ContextWindow> windows;
  ContextWindow w;
  w.doc_id = "7";
  w.sent_index = 2;
  w.left = v.to_ids({"the", "cat"});
  w.target.tokens = {"sat", "."};
  w.target.ids = v.to_ids(w.target.tokens);
  w.right = v.to_ids({"mat"});
  windows.push_back(w);
  ContextWindow edge;
  edge.doc_id = "8";
  edge.sent_index = 0;
  edge.target.tokens = {"cat"};
  edge.target.ids = v.to_ids(edge.target.tokens);
  windows.push_back(edge);

  fs::path p = dir.path / "windows.jsonl";
  write_windows_jsonl(p, windows, v);
  auto back = read_windows_jsonl(p, v);
  REQUIRE(back.size() == 2);
  CHECK(back[0].doc_id == "7");
  CHECK(back[0].sent_index == 2);
  CHECK(back[0].left == windows[0].left);
  CHECK(back[0].target.tokens == windows[0].target.tokens);
  CHECK(back[0].target.ids == windows[0].target.ids);
  CHECK(back[0].right == windows[0].right);
  CHECK(back[1].left.empty());
  CHECK(back[1].right.empty());

  // a second write of the read-back data is byte-identical
  fs::path q = dir.path / "again.jsonl";
  write_windows_jsonl(q, back, v);
  CHECK(slurp(p) == slurp(q));

  auto counts = count_window_tokens(p);
  CHECK(counts["cat"] == 2);
  CHECK(counts["sat"] == 1);
  CHECK(counts["the"] == 1);
}

TEST_CASE("unknown window tokens map to UNK ids") {
  TempDir dir;
  Vocabulary v = tiny_vocab();
  fs::path p = dir.path / "w.jsonl";
  spit(p,
       R"({"doc_id":"0","sent_index":1,"left":["weird"],"target":["cat"],"right":[]})"
       "\n");
  auto back = read_windows_jsonl(p, v);
  REQUIRE(back.size() == 1);
  CHECK(back[0].left == std::vector<int>{Vocabulary::kUnk});
}

TEST_CASE("pool entries round trip") {
  TempDir dir;
  std::vector<PoolEntry> pool(2);
  pool[0].doc_id = "3";
  pool[0].sent_index = 1;
  pool[0].original = {"the", "cat"};
  pool[0].candidates = {{{"the", "cat"}, -0.25}, {{"a", "cat"}, -1.5}};
  pool[1].doc_id = "4";
  pool[1].sent_index = 0;
  pool[1].original = {"x"};
  pool[1].candidates = {{{"x"}, -0.125}};

  fs::path p = dir.path / "pool.jsonl";
  write_pool_jsonl(p, pool);
  auto back = read_pool_jsonl(p);
  REQUIRE(back.size() == 2);
  CHECK(back[0].usable());
  CHECK(!back[1].usable());
  CHECK(back[0].candidates[0].tokens == pool[0].candidates[0].tokens);
  CHECK(back[0].candidates[0].model_score == -0.25);
  CHECK(back[1].original == pool[1].original);

  fs::path q = dir.path / "again.jsonl";
  write_pool_jsonl(q, back);
  CHECK(slurp(p) == slurp(q));
}

TEST_CASE("scored pairs round trip with exact doubles") {
  TempDir dir;
  std::vector<ScoredPair> pairs(1);
  pairs[0].doc_id = "9";
  pairs[0].sent_index = 5;
  pairs[0].s1 = {"a", "b"};
  pairs[0].s2 = {"c"};
  pairs[0].features = ScoreVector::from_array(
      {-0.125, -1.0 / 3.0, 0.0, -2.7, 0.5, 0.1234567890123456, -3.25, -0.75});
  pairs[0].score = -1.0 / 7.0;

  fs::path p = dir.path / "scored.jsonl";
  write_scored_jsonl(p, pairs);
  auto back = read_scored_jsonl(p);
  REQUIRE(back.size() == 1);
  CHECK(back[0].doc_id == "9");
  CHECK(back[0].s1 == pairs[0].s1);
  CHECK(back[0].s2 == pairs[0].s2);
  CHECK(back[0].features.as_array() == pairs[0].features.as_array());
  CHECK(back[0].score == pairs[0].score);

  fs::path q = dir.path / "again.jsonl";
  write_scored_jsonl(q, back);
  CHECK(slurp(p) == slurp(q));
}

TEST_CASE("scored pairs need exactly eight features") {
  TempDir dir;
  fs::path p = dir.path / "bad.jsonl";
  spit(p,
       R"({"doc_id":"0","sent_index":0,"s1":["a"],"s2":["b"],"features":[1,2,3],"score":0.0})"
       "\n");
  CHECK_THROWS_AS(read_scored_jsonl(p), FormatError);
}

TEST_CASE("triples round trip and ties are dropped") {
  TempDir dir;
  std::vector<RawTriple> ts(2);
  ts[0] = {{"a", "x"}, {"b"}, {"c"}};
  ts[1] = {{"q"}, {"same", "one"}, {"same", "one"}};

  fs::path p = dir.path / "triples.jsonl";
  write_triples_jsonl(p, ts);
  auto back = read_triples_jsonl(p);
  REQUIRE(back.size() == 1);  // the tied triple vanishes
  CHECK(back[0].anchor == ts[0].anchor);
  CHECK(back[0].better == ts[0].better);
  CHECK(back[0].worse == ts[0].worse);

  std::string text = slurp(p);
  CHECK(text.find("\"a\"") != std::string::npos);
  CHECK(text.find("b_plus") != std::string::npos);
  CHECK(text.find("b_minus") != std::string::npos);
}

TEST_CASE("jsonl parse errors carry the path and line") {
  TempDir dir;
  fs::path p = dir.path / "broken.jsonl";
  spit(p, "{\"doc_id\":\"0\",\"sent_index\":0,\"left\":[],\"target\":[\"a\"],\"right\":[]}\nnot json\n");
  Vocabulary v = tiny_vocab();
  std::string msg = error_text([&] { read_windows_jsonl(p, v); });
  CHECK(msg.find(p.string()) != std::string::npos);
  CHECK(msg.find(":2") != std::string::npos);

  spit(p, R"({"doc_id":"0"})"
          "\n");
  msg = error_text([&] { read_windows_jsonl(p, v); });
  CHECK(msg.find(":1") != std::string::npos);
}

TEST_CASE("missing jsonl files raise the artifact error") {
  TempDir dir;
  Vocabulary v = tiny_vocab();
  CHECK_THROWS_AS(read_windows_jsonl(dir.path / "no.jsonl", v), MissingArtifactError);
  CHECK_THROWS_AS(read_pool_jsonl(dir.path / "no.jsonl"), MissingArtifactError);
  CHECK_THROWS_AS(read_scored_jsonl(dir.path / "no.jsonl"), MissingArtifactError);
  CHECK_THROWS_AS(read_triples_jsonl(dir.path / "no.jsonl"), MissingArtifactError);
  try {
    read_pool_jsonl(dir.path / "no.jsonl");
  } catch (const MissingArtifactError& e) {
    CHECK(std::string(e.what()).find("no.jsonl") != std::string::npos);
  }
}

TEST_CASE("kv parsing skips comments and blanks") {
  auto entries = parse_kv("# top comment\n\n a = 1 \nb=two words\nc=\n", "test");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0] == std::pair<std::string, std::string>{"a", "1"});
  CHECK(entries[1] == std::pair<std::string, std::string>{"b", "two words"});
  CHECK(entries[2] == std::pair<std::string, std::string>{"c", ""});
}

TEST_CASE("kv parse errors name the origin line") {
  std::string msg = error_text([] { parse_kv("a=1\nnot a pair\n", "cfg"); });
  CHECK(msg.find("cfg:2") != std::string::npos);
  msg = error_text([] { parse_kv("=value\n", "cfg"); });
  CHECK(msg.find("cfg:1") != std::string::npos);
}

TEST_CASE("kv files round trip") {
  TempDir dir;
  fs::path p = dir.path / "r.kv";
  std::vector<std::pair<std::string, std::string>> entries = {
      {"bleu", "0.5"}, {"ibleu", "0.25"}, {"count", "12"}};
  write_kv(p, entries);
  CHECK(read_kv(p) == entries);
  CHECK_THROWS_AS(read_kv(dir.path / "missing.kv"), MissingArtifactError);
}

TEST_CASE("format_double round trips doubles exactly") {
  for (double x : {0.0, 1.0, -1.0 / 3.0, 0.1, 1e-17, 123456.789, -2.5e300}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("ranking weights round trip exactly") {
  TempDir dir;
  RankingWeights w;
  w.w = {0.1, -2.0 / 3.0, 3.0, -4.5, 5.000000000000001, -6.25, 1e-12, -8.0};
  fs::path p = dir.path / "weights.kv";
  write_weights_kv(p, w);
  RankingWeights back = read_weights_kv(p);
  CHECK(back.w == w.w);

  std::string text = slurp(p);
  for (const char* key : {"ctx_l2r", "ctx_r2l", "ctx_bwdl", "ctx_bwdr", "jaccard",
                          "posshift", "gen12", "gen21"})
    CHECK(text.find(key) != std::string::npos);
}

TEST_CASE("weights file validation") {
  TempDir dir;
  fs::path p = dir.path / "weights.kv";
  spit(p, "ctx_l2r=1\nctx_r2l=1\nctx_bwdl=1\nctx_bwdr=1\njaccard=1\nposshift=1\ngen12=1\n");
  std::string msg = error_text([&] { read_weights_kv(p); });
  CHECK(msg.find("gen21") != std::string::npos);

  spit(p,
       "ctx_l2r=x\nctx_r2l=1\nctx_bwdl=1\nctx_bwdr=1\njaccard=1\nposshift=1\ngen12=1\ngen21=1\n");
  msg = error_text([&] { read_weights_kv(p); });
  CHECK(msg.find("bad number") != std::string::npos);

  spit(p,
       "ctx_l2r=inf\nctx_r2l=1\nctx_bwdl=1\nctx_bwdr=1\njaccard=1\nposshift=1\ngen12=1\ngen21=1\n");
  CHECK_THROWS_AS(read_weights_kv(p), FormatError);

  CHECK_THROWS_AS(read_weights_kv(dir.path / "none.kv"), MissingArtifactError);
}

TEST_CASE("pipeline config defaults and overrides") {
  PipelineConfig cfg = PipelineConfig::from_overrides({});
  CHECK(cfg.l_ctx == 64);
  CHECK(cfg.select.rho == 1.0);
  CHECK(cfg.select_mode == "score");
  CHECK(cfg.finetune.epochs == 0);
  CHECK(cfg.genscore.train.beta2 == 0.98);

  cfg = PipelineConfig::from_overrides(
      {"corpus.l_ctx=16", "decode.beam_size=4", "decode.num_return=4", "select.rho=0.5",
       "context_lm.d_model=32", "paths.workdir=elsewhere", "corpus.lowercase=false"});
  CHECK(cfg.l_ctx == 16);
  CHECK(cfg.decode.beam_size == 4);
  CHECK(cfg.select.rho == 0.5);
  CHECK(cfg.context_lm.model.d_model == 32);
  CHECK(cfg.workdir == "elsewhere");
  CHECK(!cfg.lowercase);
}

TEST_CASE("config file plus overrides, overrides win") {
  TempDir dir;
  fs::path p = dir.path / "run.cfg";
  spit(p, "# comment\ncorpus.l_ctx = 8\nselect.rho = 0.25\n\nthreads=2\n");
  PipelineConfig cfg = PipelineConfig::load(p, {"select.rho=0.75"});
  CHECK(cfg.l_ctx == 8);
  CHECK(cfg.select.rho == 0.75);
  CHECK(cfg.threads == 2);
}

TEST_CASE("config errors name their origin") {
  TempDir dir;
  fs::path p = dir.path / "run.cfg";
  spit(p, "corpus.l_ctx=8\nmystery.key=1\n");
  std::string msg = error_text([&] { PipelineConfig::load(p, {}); });
  CHECK(msg.find(":2") != std::string::npos);
  CHECK(msg.find("mystery.key") != std::string::npos);

  msg = error_text([&] { PipelineConfig::from_overrides({"threads=lots"}); });
  CHECK(msg.find("threads=lots") != std::string::npos);
  CHECK(msg.find("expected integer") != std::string::npos);

  msg = error_text([&] { PipelineConfig::from_overrides({"no_equals"}); });
  CHECK(msg.find("no_equals") != std::string::npos);

  CHECK_THROWS_AS(PipelineConfig::from_overrides({"corpus.lowercase=maybe"}), ConfigError);
}

TEST_CASE("config validation rejects bad combinations") {
  CHECK_THROWS_AS(PipelineConfig::from_overrides({"corpus.min_sent_len=0"}), ConfigError);
  CHECK_THROWS_AS(
      PipelineConfig::from_overrides({"corpus.min_sent_len=9", "corpus.max_sent_len=3"}),
      ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_overrides({"select.mode=fancy"}), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_overrides({"context_lm.objectives=sideways"}),
                  ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_overrides({"decode.beam_size=2", "decode.num_return=5"}),
                  ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_overrides({"context_lm.n_heads=3"}), ConfigError);
  CHECK_NOTHROW(PipelineConfig::from_overrides({"context_lm.objectives=l2r, bwdr"}));
}

TEST_CASE("known keys cover the registry") {
  PipelineConfig cfg;
  auto keys = cfg.known_keys();
  CHECK(keys.size() > 50);
  auto has = [&](const std::string& k) {
    return std::find(keys.begin(), keys.end(), k) != keys.end();
  };
  CHECK(has("paths.corpus"));
  CHECK(has("decode.include_original"));
  CHECK(has("select.rho"));
  CHECK(has("finetune.epochs"));
  CHECK(has("synthetic.clusters"));
  CHECK(!has("decode.banned"));
}
