#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "paramine/checkpoint.hpp"
#include "paramine/objectives.hpp"
#include "paramine/util.hpp"

#include <filesystem>
#include <fstream>
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
           ("paramine-ckpt-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Seq2SeqModel small_model(uint64_t seed) {
  ModelConfig mc;
  mc.d_model = 8;
  mc.n_heads = 2;
  mc.d_ff = 16;
  mc.n_enc_layers = 1;
  mc.n_dec_layers = 1;
  mc.max_positions = 24;
  std::vector<std::string> toks(Vocabulary::special_tokens().begin(),
                                Vocabulary::special_tokens().end());
  for (const char* w : {"red", "green", "blue", "dog"}) toks.push_back(w);
  return Seq2SeqModel(mc, Vocabulary(toks), seed);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

std::string thrown_message(const fs::path& p) {
  try {
    load_checkpoint(p);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("checkpoint round trip preserves everything") {
  TempDir dir;
  Seq2SeqModel m = small_model(99);
  m.step_count = 1234;
  fs::path a = dir.path / "a.ckpt";
  save_checkpoint(a, m);

  Seq2SeqModel back = load_checkpoint(a);
  CHECK(back.config() == m.config());
  CHECK(back.vocab().tokens() == m.vocab().tokens());
  CHECK(back.step_count == 1234);
  for (const auto& name : m.parameter_names()) {
    CHECK(back.parameter(name).value == m.parameter(name).value);
    CHECK(back.parameter(name).m == m.parameter(name).m);
    CHECK(back.parameter(name).v == m.parameter(name).v);
  }

  fs::path b = dir.path / "b.ckpt";
  save_checkpoint(b, back);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("round trip after training keeps optimizer state") {
  TempDir dir;
  Seq2SeqModel m = small_model(7);
  std::vector<SeqExample> data = {make_pair_example(
      Vocabulary::kObjPara, {Vocabulary::kNumSpecials}, {Vocabulary::kNumSpecials + 1})};
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 1;
  tc.learning_rate = 1e-3;
  train_model(m, data, tc);

  fs::path p = dir.path / "trained.ckpt";
  save_checkpoint(p, m);
  Seq2SeqModel back = load_checkpoint(p);
  CHECK(back.step_count == m.step_count);
  bool any_moment = false;
  for (const auto& name : m.parameter_names()) {
    CHECK(back.parameter(name).m == m.parameter(name).m);
    if (back.parameter(name).m.cwiseAbs().sum() > 0) any_moment = true;
  }
  CHECK(any_moment);

  double before = m.log_prob(data[0], true);
  double after = back.log_prob(data[0], true);
  CHECK(before == after);
}

TEST_CASE("missing checkpoint file") {
  TempDir dir;
  CHECK_THROWS_AS(load_checkpoint(dir.path / "absent.ckpt"), MissingArtifactError);
}

TEST_CASE("file with wrong leading bytes is rejected") {
  TempDir dir;
  fs::path p = dir.path / "m.ckpt";
  save_checkpoint(p, small_model(1));
  std::string blob = slurp(p);
  blob[0] = 'X';
  spit(p, blob);
  CHECK_THROWS_AS(load_checkpoint(p), FormatError);
  CHECK(thrown_message(p).find("is not a model checkpoint") != std::string::npos);

  spit(dir.path / "text.ckpt", "just some text, long enough to cover the header");
  CHECK_THROWS_AS(load_checkpoint(dir.path / "text.ckpt"), FormatError);
}

TEST_CASE("version mismatch names both versions") {
  TempDir dir;
  fs::path p = dir.path / "m.ckpt";
  save_checkpoint(p, small_model(1));
  std::string blob = slurp(p);
  blob[8] = 9;  // version field follows the 8-byte tag, little-endian
  blob[9] = 0;
  blob[10] = 0;
  blob[11] = 0;
  spit(p, blob);
  std::string msg = thrown_message(p);
  CHECK(msg.find("9") != std::string::npos);
  CHECK(msg.find("1") != std::string::npos);
}

TEST_CASE("truncated checkpoint") {
  TempDir dir;
  fs::path p = dir.path / "m.ckpt";
  save_checkpoint(p, small_model(1));
  std::string blob = slurp(p);
  for (size_t keep : {blob.size() / 2, blob.size() - 3, size_t(20)}) {
    spit(p, blob.substr(0, keep));
    CHECK_THROWS_AS(load_checkpoint(p), FormatError);
  }
  spit(p, blob.substr(0, blob.size() / 2));
  CHECK(thrown_message(p).find("truncated") != std::string::npos);
}

TEST_CASE("trailing bytes are rejected") {
  TempDir dir;
  fs::path p = dir.path / "m.ckpt";
  save_checkpoint(p, small_model(1));
  std::string blob = slurp(p) + "zz";
  spit(p, blob);
  CHECK(thrown_message(p).find("trailing") != std::string::npos);
}

TEST_CASE("saving is atomic enough to leave no partial file on rewrite") {
  TempDir dir;
  fs::path p = dir.path / "m.ckpt";
  Seq2SeqModel m1 = small_model(1);
  Seq2SeqModel m2 = small_model(2);
  save_checkpoint(p, m1);
  save_checkpoint(p, m2);
  Seq2SeqModel back = load_checkpoint(p);
  CHECK(back.parameter("emb.word").value == m2.parameter("emb.word").value);
}
