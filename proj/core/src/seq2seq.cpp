#include "paramine/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace paramine {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kAdamEps = 1e-8;
const double kNegInf = -std::numeric_limits<double>::infinity();

double rand01(Rng& rng) { return (rng() >> 11) * (1.0 / 9007199254740992.0); }

double rand_uniform(Rng& rng, double limit) { return (2.0 * rand01(rng) - 1.0) * limit; }

double rand_normal(Rng& rng, double stddev) {
  double u1 = rand01(rng);
  double u2 = rand01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix causal_mask(int n) {
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m(i, j) = kNegInf;
  return m;
}

Matrix softmax_rows_eval(Matrix z, const Matrix* mask) {
  if (mask) z += *mask;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    double mx = z.row(r).maxCoeff();
    Eigen::ArrayXd e = (z.row(r).array() - mx).exp();
    z.row(r) = (e / e.sum()).matrix();
  }
  return z;
}

Matrix layer_norm_eval(const Matrix& x, const Matrix& gain, const Matrix& bias) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double mean = x.row(r).mean();
    Eigen::ArrayXd centered = x.row(r).array() - mean;
    double var = centered.square().mean();
    Eigen::RowVectorXd xhat = (centered / std::sqrt(var + kLnEps)).matrix();
    out.row(r) = xhat.cwiseProduct(gain.row(0)) + bias.row(0);
  }
  return out;
}

Vector log_softmax_row(const Eigen::RowVectorXd& z) {
  double mx = z.maxCoeff();
  double lse = std::log((z.array() - mx).exp().sum()) + mx;
  return (z.array() - lse).matrix().transpose();
}

// The forward pass is written once against a backend: GraphBackend builds the
// training tape, EvalBackend runs the same math on plain matrices.
struct GraphBackend {
  Graph& g;
  Seq2SeqModel& m;
  using Mat = Graph::Id;
  Mat input(Matrix v) { return g.input(std::move(v)); }
  Mat param(const std::string& name) { return g.param(m.parameter(name)); }
  Mat add(Mat a, Mat b) { return g.add(a, b); }
  Mat add_rowvec(Mat a, Mat row) { return g.add_rowvec(a, row); }
  Mat matmul(Mat a, Mat b) { return g.matmul(a, b); }
  Mat scale(Mat a, double s) { return g.scale(a, s); }
  Mat relu(Mat a) { return g.relu(a); }
  Mat transpose(Mat a) { return g.transpose(a); }
  Mat gather_rows(Mat table, const std::vector<int>& rows) { return g.gather_rows(table, rows); }
  Mat slice_cols(Mat a, int begin, int len) { return g.slice_cols(a, begin, len); }
  Mat concat_cols(const std::vector<Mat>& parts) { return g.concat_cols(parts); }
  Mat softmax_rows(Mat a, const Matrix* mask) { return g.softmax_rows(a, mask); }
  Mat layer_norm(Mat x, Mat gain, Mat bias) { return g.layer_norm(x, gain, bias, kLnEps); }
};

struct EvalBackend {
  const Seq2SeqModel& m;
  using Mat = Matrix;
  Mat input(Matrix v) { return v; }
  Mat param(const std::string& name) { return m.parameter(name).value; }
  Mat add(const Mat& a, const Mat& b) { return a + b; }
  Mat add_rowvec(const Mat& a, const Mat& row) {
    return Mat(a.rowwise() + Eigen::RowVectorXd(row.row(0)));
  }
  Mat matmul(const Mat& a, const Mat& b) { return a * b; }
  Mat scale(const Mat& a, double s) { return a * s; }
  Mat relu(const Mat& a) { return a.cwiseMax(0.0); }
  Mat transpose(const Mat& a) { return a.transpose(); }
  Mat gather_rows(const Mat& table, const std::vector<int>& rows) {
    Mat out(static_cast<Eigen::Index>(rows.size()), table.cols());
    for (size_t i = 0; i < rows.size(); ++i)
      out.row(static_cast<Eigen::Index>(i)) = table.row(rows[i]);
    return out;
  }
  Mat slice_cols(const Mat& a, int begin, int len) { return a.middleCols(begin, len); }
  Mat concat_cols(const std::vector<Mat>& parts) {
    Eigen::Index total = 0;
    for (const auto& p : parts) total += p.cols();
    Mat out(parts[0].rows(), total);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
      out.middleCols(at, p.cols()) = p;
      at += p.cols();
    }
    return out;
  }
  Mat softmax_rows(const Mat& a, const Matrix* mask) { return softmax_rows_eval(a, mask); }
  Mat layer_norm(const Mat& x, const Mat& gain, const Mat& bias) {
    return layer_norm_eval(x, gain, bias);
  }
};

template <class B>
typename B::Mat attention(B& b, const ModelConfig& cfg, const std::string& prefix,
                          typename B::Mat queries_in, typename B::Mat keys_in,
                          const Matrix* mask) {
  int dh = cfg.d_model / cfg.n_heads;
  auto q = b.add_rowvec(b.matmul(queries_in, b.param(prefix + "wq")), b.param(prefix + "bq"));
  auto k = b.add_rowvec(b.matmul(keys_in, b.param(prefix + "wk")), b.param(prefix + "bk"));
  auto v = b.add_rowvec(b.matmul(keys_in, b.param(prefix + "wv")), b.param(prefix + "bv"));
  std::vector<typename B::Mat> heads;
  heads.reserve(cfg.n_heads);
  for (int h = 0; h < cfg.n_heads; ++h) {
    auto qh = b.slice_cols(q, h * dh, dh);
    auto kh = b.slice_cols(k, h * dh, dh);
    auto vh = b.slice_cols(v, h * dh, dh);
    auto scores = b.scale(b.matmul(qh, b.transpose(kh)), 1.0 / std::sqrt(double(dh)));
    auto att = b.softmax_rows(scores, mask);
    heads.push_back(b.matmul(att, vh));
  }
  auto merged = b.concat_cols(heads);
  return b.add_rowvec(b.matmul(merged, b.param(prefix + "wo")), b.param(prefix + "bo"));
}

template <class B>
typename B::Mat feed_forward(B& b, const std::string& prefix, typename B::Mat x) {
  auto h = b.relu(b.add_rowvec(b.matmul(x, b.param(prefix + "w1")), b.param(prefix + "b1")));
  return b.add_rowvec(b.matmul(h, b.param(prefix + "w2")), b.param(prefix + "b2"));
}

template <class B>
typename B::Mat embed(B& b, const Matrix& pos_table, const std::vector<int>& ids,
                      const std::vector<int>& segments) {
  auto words = b.gather_rows(b.param("emb.word"), ids);
  auto sents = b.gather_rows(b.param("emb.sent"), segments);
  Matrix pos(static_cast<Eigen::Index>(ids.size()), pos_table.cols());
  for (size_t i = 0; i < ids.size(); ++i) pos.row(static_cast<Eigen::Index>(i)) = pos_table.row(static_cast<Eigen::Index>(i));
  return b.add(b.add(words, sents), b.input(std::move(pos)));
}

template <class B>
typename B::Mat encoder_stack(B& b, const ModelConfig& cfg, typename B::Mat x) {
  for (int l = 0; l < cfg.n_enc_layers; ++l) {
    std::string p = "enc." + std::to_string(l) + ".";
    auto n1 = b.layer_norm(x, b.param(p + "ln1.g"), b.param(p + "ln1.b"));
    x = b.add(x, attention(b, cfg, p + "att.", n1, n1, nullptr));
    auto n2 = b.layer_norm(x, b.param(p + "ln2.g"), b.param(p + "ln2.b"));
    x = b.add(x, feed_forward(b, p + "ffn.", n2));
  }
  return b.layer_norm(x, b.param("enc.ln.g"), b.param("enc.ln.b"));
}

template <class B>
typename B::Mat decoder_logits(B& b, const ModelConfig& cfg, typename B::Mat x,
                               typename B::Mat enc_out, const Matrix& mask) {
  for (int l = 0; l < cfg.n_dec_layers; ++l) {
    std::string p = "dec." + std::to_string(l) + ".";
    auto n1 = b.layer_norm(x, b.param(p + "ln1.g"), b.param(p + "ln1.b"));
    x = b.add(x, attention(b, cfg, p + "self.", n1, n1, &mask));
    auto n2 = b.layer_norm(x, b.param(p + "ln2.g"), b.param(p + "ln2.b"));
    x = b.add(x, attention(b, cfg, p + "cross.", n2, enc_out, nullptr));
    auto n3 = b.layer_norm(x, b.param(p + "ln3.g"), b.param(p + "ln3.b"));
    x = b.add(x, feed_forward(b, p + "ffn.", n3));
  }
  auto top = b.layer_norm(x, b.param("dec.ln.g"), b.param("dec.ln.b"));
  return b.add_rowvec(b.matmul(top, b.param("out.w")), b.param("out.b"));
}

template <class B>
typename B::Mat full_logits(B& b, const ModelConfig& cfg, const Matrix& pos_table,
                            const std::vector<int>& source, const std::vector<int>& segments,
                            const std::vector<int>& decoder_input) {
  auto src = embed(b, pos_table, source, segments);
  auto enc_out = encoder_stack(b, cfg, src);
  std::vector<int> dec_segments(decoder_input.size(), kSegDecoder);
  auto dec = embed(b, pos_table, decoder_input, dec_segments);
  Matrix mask = causal_mask(static_cast<int>(decoder_input.size()));
  return decoder_logits(b, cfg, dec, enc_out, mask);
}

}  // namespace

void ModelConfig::validate() const {
  if (d_model <= 0 || n_heads <= 0 || d_ff <= 0 || n_enc_layers <= 0 || n_dec_layers <= 0 ||
      max_positions <= 0 || max_sentence_positions <= 0)
    throw ConfigError("model dimensions must be positive");
  if (d_model % n_heads != 0) throw ConfigError("d_model must be divisible by n_heads");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
  if (max_sentence_positions <= kSegDecoder)
    throw ConfigError("max_sentence_positions must cover all segment ids");
}

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw ConfigError("adam betas must be in [0,1)");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
}

Matrix sinusoidal_positions(int n_positions, int d_model) {
  Matrix pe = Matrix::Zero(n_positions, d_model);
  for (int p = 0; p < n_positions; ++p) {
    for (int i = 0; i * 2 < d_model; ++i) {
      double angle = p / std::pow(10000.0, (2.0 * i) / d_model);
      pe(p, 2 * i) = std::sin(angle);
      if (2 * i + 1 < d_model) pe(p, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

Matrix embed_inputs(const Matrix& word_emb, const Matrix& pos_table, const Matrix& sent_emb,
                    const std::vector<int>& ids, const std::vector<int>& token_positions,
                    const std::vector<int>& sentence_positions) {
  if (ids.size() != token_positions.size() || ids.size() != sentence_positions.size())
    throw std::out_of_range("embed_inputs: input lengths differ");
  Matrix out(static_cast<Eigen::Index>(ids.size()), word_emb.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    int id = ids[i], tp = token_positions[i], sp = sentence_positions[i];
    if (id < 0 || id >= word_emb.rows()) throw std::out_of_range("embed_inputs: bad token id");
    if (tp < 0 || tp >= pos_table.rows())
      throw std::out_of_range("embed_inputs: token position beyond table");
    if (sp < 0 || sp >= sent_emb.rows())
      throw std::out_of_range("embed_inputs: sentence position beyond table");
    out.row(static_cast<Eigen::Index>(i)) =
        word_emb.row(id) + pos_table.row(tp) + sent_emb.row(sp);
  }
  return out;
}

Seq2SeqModel::Seq2SeqModel(ModelConfig cfg, Vocabulary vocab, uint64_t init_seed)
    : cfg_(cfg), vocab_(std::move(vocab)) {
  cfg_.validate();
  pos_table_ = sinusoidal_positions(cfg_.max_positions, cfg_.d_model);
  build_parameters();
  init_parameters(init_seed);
}

Seq2SeqModel::Seq2SeqModel(ModelConfig cfg, Vocabulary vocab)
    : cfg_(cfg), vocab_(std::move(vocab)) {
  cfg_.validate();
  pos_table_ = sinusoidal_positions(cfg_.max_positions, cfg_.d_model);
  build_parameters();
}

void Seq2SeqModel::build_parameters() {
  int d = cfg_.d_model, dff = cfg_.d_ff, V = vocab_size();
  auto def = [&](const std::string& name, int rows, int cols) {
    params_.emplace(name, std::make_unique<Parameter>(name, rows, cols));
  };
  def("emb.word", V, d);
  def("emb.sent", cfg_.max_sentence_positions, d);
  auto def_attention = [&](const std::string& p) {
    for (const char* w : {"wq", "wk", "wv", "wo"}) def(p + w, d, d);
    for (const char* b : {"bq", "bk", "bv", "bo"}) def(p + b, 1, d);
  };
  auto def_ln = [&](const std::string& p) {
    def(p + "g", 1, d);
    def(p + "b", 1, d);
  };
  auto def_ffn = [&](const std::string& p) {
    def(p + "w1", d, dff);
    def(p + "b1", 1, dff);
    def(p + "w2", dff, d);
    def(p + "b2", 1, d);
  };
  for (int l = 0; l < cfg_.n_enc_layers; ++l) {
    std::string p = "enc." + std::to_string(l) + ".";
    def_attention(p + "att.");
    def_ln(p + "ln1.");
    def_ln(p + "ln2.");
    def_ffn(p + "ffn.");
  }
  def_ln("enc.ln.");
  for (int l = 0; l < cfg_.n_dec_layers; ++l) {
    std::string p = "dec." + std::to_string(l) + ".";
    def_attention(p + "self.");
    def_attention(p + "cross.");
    def_ln(p + "ln1.");
    def_ln(p + "ln2.");
    def_ln(p + "ln3.");
    def_ffn(p + "ffn.");
  }
  def_ln("dec.ln.");
  def("out.w", d, V);
  def("out.b", 1, V);
}

void Seq2SeqModel::init_parameters(uint64_t seed) {
  for (auto& [name, p] : params_) {
    Rng rng(seed ^ fnv1a(name));
    std::string leaf = name.substr(name.rfind('.') + 1);
    if (name.rfind("emb.", 0) == 0) {
      for (Eigen::Index i = 0; i < p->value.rows(); ++i)
        for (Eigen::Index j = 0; j < p->value.cols(); ++j)
          p->value(i, j) = rand_normal(rng, 0.05);
    } else if (leaf == "g") {
      p->value.setConstant(1.0);
    } else if (!leaf.empty() && leaf[0] == 'b') {
      p->value.setZero();
    } else {
      double limit = std::sqrt(6.0 / static_cast<double>(p->value.rows() + p->value.cols()));
      for (Eigen::Index i = 0; i < p->value.rows(); ++i)
        for (Eigen::Index j = 0; j < p->value.cols(); ++j)
          p->value(i, j) = rand_uniform(rng, limit);
    }
  }
}

std::vector<Parameter*> Seq2SeqModel::parameters() {
  std::vector<Parameter*> out;
  out.reserve(params_.size());
  for (auto& [name, p] : params_) out.push_back(p.get());
  return out;
}

Parameter& Seq2SeqModel::parameter(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw FormatError("unknown parameter: " + name);
  return *it->second;
}

const Parameter& Seq2SeqModel::parameter(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw FormatError("unknown parameter: " + name);
  return *it->second;
}

std::vector<std::string> Seq2SeqModel::parameter_names() const {
  std::vector<std::string> names;
  names.reserve(params_.size());
  for (const auto& [name, p] : params_) names.push_back(name);
  return names;
}

namespace {

void check_example(const SeqExample& ex, const ModelConfig& cfg, int vocab_size) {
  if (ex.source.empty()) throw FormatError("example with empty source");
  if (ex.source.size() != ex.source_segments.size())
    throw FormatError("source/segment length mismatch");
  auto check_ids = [vocab_size](const std::vector<int>& ids) {
    for (int id : ids)
      if (id < 0 || id >= vocab_size)
        throw FormatError("token id out of vocabulary: " + std::to_string(id));
  };
  check_ids(ex.source);
  check_ids(ex.target);
  for (int s : ex.source_segments)
    if (s < 0 || s >= cfg.max_sentence_positions)
      throw std::out_of_range("segment id beyond max_sentence_positions");
  if (static_cast<int>(ex.source.size()) > cfg.max_positions ||
      static_cast<int>(ex.target.size()) + 1 > cfg.max_positions)
    throw std::out_of_range("sequence longer than max_positions");
}

std::vector<int> decoder_input_of(const std::vector<int>& target) {
  std::vector<int> in;
  in.reserve(target.size() + 1);
  in.push_back(Vocabulary::kBos);
  in.insert(in.end(), target.begin(), target.end());
  return in;
}

std::vector<int> gold_of(const std::vector<int>& target) {
  std::vector<int> gold = target;
  gold.push_back(Vocabulary::kEos);
  return gold;
}

}  // namespace

Graph::Id Seq2SeqModel::build_loss(Graph& g, const SeqExample& ex) {
  check_example(ex, cfg_, vocab_size());
  GraphBackend b{g, *this};
  auto logits =
      full_logits(b, cfg_, pos_table_, ex.source, ex.source_segments, decoder_input_of(ex.target));
  return g.cross_entropy_sum(logits, gold_of(ex.target));
}

double Seq2SeqModel::log_prob(const SeqExample& ex, bool length_normalize) const {
  if (ex.target.empty()) throw FormatError("log_prob needs a non-empty target");
  check_example(ex, cfg_, vocab_size());
  EvalBackend b{*this};
  Matrix logits =
      full_logits(b, cfg_, pos_table_, ex.source, ex.source_segments, decoder_input_of(ex.target));
  auto gold = gold_of(ex.target);
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Vector lp = log_softmax_row(logits.row(r));
    total += lp(gold[static_cast<size_t>(r)]);
  }
  if (length_normalize) total /= static_cast<double>(gold.size());
  return total;
}

Vector Seq2SeqModel::next_token_dist(const std::vector<int>& source,
                                     const std::vector<int>& source_segments,
                                     const std::vector<int>& prefix) const {
  if (prefix.empty() || prefix[0] != Vocabulary::kBos)
    throw FormatError("prefix must begin with BOS");
  SeqExample probe;
  probe.source = source;
  probe.source_segments = source_segments;
  check_example(probe, cfg_, vocab_size());
  if (static_cast<int>(prefix.size()) > cfg_.max_positions)
    throw std::out_of_range("prefix longer than max_positions");
  EvalBackend b{*this};
  Matrix logits = full_logits(b, cfg_, pos_table_, source, source_segments, prefix);
  Vector lp = log_softmax_row(logits.row(logits.rows() - 1));
  return lp.array().exp().matrix();
}

EncodedSource Seq2SeqModel::encode(const std::vector<int>& source,
                                   const std::vector<int>& source_segments) const {
  SeqExample probe;
  probe.source = source;
  probe.source_segments = source_segments;
  check_example(probe, cfg_, vocab_size());
  EvalBackend b{*this};
  auto src = embed(b, pos_table_, source, source_segments);
  EncodedSource enc;
  enc.enc_out = encoder_stack(b, cfg_, src);
  enc.cross_k.reserve(cfg_.n_dec_layers);
  enc.cross_v.reserve(cfg_.n_dec_layers);
  for (int l = 0; l < cfg_.n_dec_layers; ++l) {
    std::string p = "dec." + std::to_string(l) + ".cross.";
    enc.cross_k.push_back(
        (enc.enc_out * parameter(p + "wk").value).rowwise() +
        Eigen::RowVectorXd(parameter(p + "bk").value.row(0)));
    enc.cross_v.push_back(
        (enc.enc_out * parameter(p + "wv").value).rowwise() +
        Eigen::RowVectorXd(parameter(p + "bv").value.row(0)));
  }
  return enc;
}

DecState Seq2SeqModel::new_state() const {
  DecState st;
  st.self_k.assign(cfg_.n_dec_layers, Matrix(0, cfg_.d_model));
  st.self_v.assign(cfg_.n_dec_layers, Matrix(0, cfg_.d_model));
  return st;
}

Vector Seq2SeqModel::step(const EncodedSource& enc, DecState& state, int token) const {
  if (token < 0 || token >= vocab_size())
    throw FormatError("token id out of vocabulary: " + std::to_string(token));
  if (state.len >= cfg_.max_positions) throw std::out_of_range("decode past max_positions");
  int d = cfg_.d_model, dh = d / cfg_.n_heads;
  Matrix x(1, d);
  x.row(0) = parameter("emb.word").value.row(token) + pos_table_.row(state.len) +
             parameter("emb.sent").value.row(kSegDecoder);

  auto project = [&](const Matrix& in, const std::string& w, const std::string& b) {
    return Matrix((in * parameter(w).value).rowwise() +
                  Eigen::RowVectorXd(parameter(b).value.row(0)));
  };
  auto heads_attend = [&](const Matrix& q, const Matrix& K, const Matrix& V) {
    Matrix out(1, d);
    for (int h = 0; h < cfg_.n_heads; ++h) {
      Matrix qh = q.middleCols(h * dh, dh);
      Matrix kh = K.middleCols(h * dh, dh);
      Matrix vh = V.middleCols(h * dh, dh);
      Matrix scores = qh * kh.transpose() / std::sqrt(double(dh));
      Matrix att = softmax_rows_eval(scores, nullptr);
      out.middleCols(h * dh, dh) = att * vh;
    }
    return out;
  };

  for (int l = 0; l < cfg_.n_dec_layers; ++l) {
    std::string p = "dec." + std::to_string(l) + ".";
    Matrix n1 = layer_norm_eval(x, parameter(p + "ln1.g").value, parameter(p + "ln1.b").value);
    Matrix q = project(n1, p + "self.wq", p + "self.bq");
    Matrix k = project(n1, p + "self.wk", p + "self.bk");
    Matrix v = project(n1, p + "self.wv", p + "self.bv");
    Matrix& cache_k = state.self_k[l];
    Matrix& cache_v = state.self_v[l];
    cache_k.conservativeResize(cache_k.rows() + 1, d);
    cache_k.row(cache_k.rows() - 1) = k.row(0);
    cache_v.conservativeResize(cache_v.rows() + 1, d);
    cache_v.row(cache_v.rows() - 1) = v.row(0);
    Matrix self_out = heads_attend(q, cache_k, cache_v);
    x += project(self_out, p + "self.wo", p + "self.bo");

    Matrix n2 = layer_norm_eval(x, parameter(p + "ln2.g").value, parameter(p + "ln2.b").value);
    Matrix cq = project(n2, p + "cross.wq", p + "cross.bq");
    Matrix cross_out = heads_attend(cq, enc.cross_k[l], enc.cross_v[l]);
    x += project(cross_out, p + "cross.wo", p + "cross.bo");

    Matrix n3 = layer_norm_eval(x, parameter(p + "ln3.g").value, parameter(p + "ln3.b").value);
    Matrix h = (n3 * parameter(p + "ffn.w1").value).rowwise() +
               Eigen::RowVectorXd(parameter(p + "ffn.b1").value.row(0));
    h = h.cwiseMax(0.0);
    x += Matrix((h * parameter(p + "ffn.w2").value).rowwise() +
                Eigen::RowVectorXd(parameter(p + "ffn.b2").value.row(0)));
  }
  Matrix top = layer_norm_eval(x, parameter("dec.ln.g").value, parameter("dec.ln.b").value);
  Eigen::RowVectorXd logits =
      (top.row(0) * parameter("out.w").value) + parameter("out.b").value.row(0);
  ++state.len;
  return log_softmax_row(logits);
}

std::vector<int> Seq2SeqModel::greedy_decode(const std::vector<int>& source,
                                             const std::vector<int>& source_segments,
                                             int max_len) const {
  EncodedSource enc = encode(source, source_segments);
  DecState st = new_state();
  std::vector<int> out;
  Vector lp = step(enc, st, Vocabulary::kBos);
  for (int i = 0; i < max_len; ++i) {
    int best = 0;
    lp.maxCoeff(&best);
    if (best == Vocabulary::kEos) break;
    out.push_back(best);
    lp = step(enc, st, best);
  }
  return out;
}

TrainStats train_model(Seq2SeqModel& model, const std::vector<SeqExample>& examples,
                       const TrainConfig& tc) {
  tc.validate();
  if (examples.empty()) throw ConfigError("no training examples");
  for (const auto& ex : examples) {
    if (ex.target.empty()) throw FormatError("training example with empty target");
  }
  auto params = model.parameters();
  Rng rng(tc.seed);
  TrainStats stats;
  double epoch_ce = 0.0;
  long epoch_tokens = 0;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    auto order = shuffled_indices(examples.size(), rng);
    epoch_ce = 0.0;
    epoch_tokens = 0;
    for (size_t at = 0; at < order.size(); at += static_cast<size_t>(tc.batch_size)) {
      size_t end = std::min(order.size(), at + static_cast<size_t>(tc.batch_size));
      for (auto* p : params) p->zero_grad();
      double batch_ce = 0.0;
      long batch_tokens = 0;
      for (size_t i = at; i < end; ++i) {
        const SeqExample& ex = examples[order[i]];
        Graph g;
        auto loss = model.build_loss(g, ex);
        batch_ce += g.value(loss)(0, 0);
        batch_tokens += static_cast<long>(ex.target.size()) + 1;
        g.backward(loss);
      }
      if (!std::isfinite(batch_ce))
        throw NumericError("non-finite training loss at step " +
                           std::to_string(model.step_count + 1));
      epoch_ce += batch_ce;
      epoch_tokens += batch_tokens;
      double inv = 1.0 / static_cast<double>(batch_tokens);
      ++model.step_count;
      double t = static_cast<double>(model.step_count);
      double lr = tc.learning_rate;
      if (tc.warmup_steps > 0) lr *= std::min(1.0, t / static_cast<double>(tc.warmup_steps));
      double bc1 = 1.0 - std::pow(tc.beta1, t);
      double bc2 = 1.0 - std::pow(tc.beta2, t);
      for (auto* p : params) {
        Matrix g = p->grad * inv;
        p->m = tc.beta1 * p->m + (1.0 - tc.beta1) * g;
        p->v = tc.beta2 * p->v + (1.0 - tc.beta2) * g.cwiseProduct(g);
        Matrix mhat = p->m / bc1;
        Matrix vhat = p->v / bc2;
        p->value -= lr * mhat.cwiseQuotient((vhat.cwiseSqrt().array() + kAdamEps).matrix());
      }
      ++stats.steps;
    }
    stats.final_loss = epoch_ce / static_cast<double>(epoch_tokens);
  }
  return stats;
}

double gradient_check(Seq2SeqModel& model, const std::vector<SeqExample>& examples,
                      int n_coords, uint64_t seed) {
  if (examples.empty()) throw ConfigError("gradient check needs examples");
  auto params = model.parameters();
  long total_tokens = 0;
  for (const auto& ex : examples) total_tokens += static_cast<long>(ex.target.size()) + 1;
  double inv = 1.0 / static_cast<double>(total_tokens);

  auto mean_loss = [&] {
    double sum = 0.0;
    for (const auto& ex : examples) sum += model.log_prob(ex, false);
    return -sum * inv;
  };

  for (auto* p : params) p->zero_grad();
  for (const auto& ex : examples) {
    Graph g;
    auto loss = model.build_loss(g, ex);
    g.backward(loss);
  }

  Rng rng(seed);
  double worst = 0.0;
  for (int c = 0; c < n_coords; ++c) {
    auto* p = params[rand_below(rng, params.size())];
    Eigen::Index i = static_cast<Eigen::Index>(rand_below(rng, static_cast<uint64_t>(p->value.rows())));
    Eigen::Index j = static_cast<Eigen::Index>(rand_below(rng, static_cast<uint64_t>(p->value.cols())));
    double analytic = p->grad(i, j) * inv;
    double original = p->value(i, j);
    double h = 1e-5 * std::max(1.0, std::abs(original));
    p->value(i, j) = original + h;
    double plus = mean_loss();
    p->value(i, j) = original - h;
    double minus = mean_loss();
    p->value(i, j) = original;
    double numeric = (plus - minus) / (2.0 * h);
    double scale = std::max({1e-8, std::abs(analytic), std::abs(numeric)});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  }
  return worst;
}

}  // namespace paramine
