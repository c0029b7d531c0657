#include "paramine/checkpoint.hpp"

#include "paramine/util.hpp"

#include <cstring>

namespace paramine {

namespace {

constexpr char kMagic[8] = {'P', 'M', 'S', 'E', 'Q', 'C', 'K', 'P'};
constexpr uint32_t kVersion = 1;

struct Writer {
  std::string buf;
  void bytes(const void* p, size_t n) { buf.append(static_cast<const char*>(p), n); }
  void u32(uint32_t x) { bytes(&x, 4); }
  void u64(uint64_t x) { bytes(&x, 8); }
  void i32(int32_t x) { bytes(&x, 4); }
  void f64(double x) { bytes(&x, 8); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void matrix(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
};

struct Reader {
  const std::string& buf;
  size_t at = 0;
  explicit Reader(const std::string& b) : buf(b) {}
  void bytes(void* p, size_t n) {
    if (at + n > buf.size()) throw FormatError("checkpoint truncated");
    std::memcpy(p, buf.data() + at, n);
    at += n;
  }
  uint32_t u32() {
    uint32_t x;
    bytes(&x, 4);
    return x;
  }
  uint64_t u64() {
    uint64_t x;
    bytes(&x, 8);
    return x;
  }
  int32_t i32() {
    int32_t x;
    bytes(&x, 4);
    return x;
  }
  double f64() {
    double x;
    bytes(&x, 8);
    return x;
  }
  std::string str() {
    uint32_t n = u32();
    if (at + n > buf.size() || n > (1u << 24)) throw FormatError("checkpoint truncated");
    std::string s(buf, at, n);
    at += n;
    return s;
  }
  void matrix(Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
  }
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Seq2SeqModel& model) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  const ModelConfig& c = model.config();
  w.i32(c.d_model);
  w.i32(c.n_heads);
  w.i32(c.d_ff);
  w.i32(c.n_enc_layers);
  w.i32(c.n_dec_layers);
  w.i32(c.max_positions);
  w.i32(c.max_sentence_positions);
  w.f64(c.dropout);
  w.u64(static_cast<uint64_t>(model.step_count));
  const auto& tokens = model.vocab().tokens();
  w.u32(static_cast<uint32_t>(tokens.size()));
  for (const auto& t : tokens) w.str(t);
  auto names = model.parameter_names();
  w.u32(static_cast<uint32_t>(names.size()));
  for (const auto& name : names) {
    const Parameter& p = model.parameter(name);
    w.str(name);
    w.u32(static_cast<uint32_t>(p.value.rows()));
    w.u32(static_cast<uint32_t>(p.value.cols()));
    w.matrix(p.value);
    w.matrix(p.m);
    w.matrix(p.v);
  }
  atomic_write_file(path, w.buf);
}

Seq2SeqModel load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingArtifactError(path.string());
  std::string blob = read_text_file(path);
  Reader r(blob);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError(path.string() + " is not a model checkpoint");
  uint32_t version = r.u32();
  if (version != kVersion)
    throw FormatError("checkpoint format version " + std::to_string(version) + ", this build reads version " +
                      std::to_string(kVersion));
  ModelConfig c;
  c.d_model = r.i32();
  c.n_heads = r.i32();
  c.d_ff = r.i32();
  c.n_enc_layers = r.i32();
  c.n_dec_layers = r.i32();
  c.max_positions = r.i32();
  c.max_sentence_positions = r.i32();
  c.dropout = r.f64();
  uint64_t steps = r.u64();
  uint32_t vocab_size = r.u32();
  std::vector<std::string> tokens;
  tokens.reserve(vocab_size);
  for (uint32_t i = 0; i < vocab_size; ++i) tokens.push_back(r.str());
  Seq2SeqModel model(c, Vocabulary(std::move(tokens)));
  model.step_count = static_cast<long>(steps);
  uint32_t n_params = r.u32();
  auto names = model.parameter_names();
  if (n_params != names.size())
    throw FormatError("checkpoint holds " + std::to_string(n_params) + " parameters, model expects " +
                      std::to_string(names.size()));
  for (uint32_t i = 0; i < n_params; ++i) {
    std::string name = r.str();
    Parameter& p = model.parameter(name);  // throws on unknown name
    uint32_t rows = r.u32(), cols = r.u32();
    if (rows != static_cast<uint32_t>(p.value.rows()) ||
        cols != static_cast<uint32_t>(p.value.cols()))
      throw FormatError("checkpoint parameter " + name + " has shape " + std::to_string(rows) +
                        "x" + std::to_string(cols));
    r.matrix(p.value);
    r.matrix(p.m);
    r.matrix(p.v);
  }
  if (r.at != blob.size()) throw FormatError("checkpoint has trailing bytes");
  return model;
}

}  // namespace paramine
