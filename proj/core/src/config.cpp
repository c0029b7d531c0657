#include "paramine/config.hpp"

#include "paramine/util.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace paramine {

namespace {

int parse_int(const std::string& v, const std::string& origin) {
  try {
    size_t used = 0;
    int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(origin + ": expected integer, got \"" + v + "\"");
  }
}

uint64_t parse_u64(const std::string& v, const std::string& origin) {
  try {
    size_t used = 0;
    unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError(origin + ": expected unsigned integer, got \"" + v + "\"");
  }
}

double parse_double(const std::string& v, const std::string& origin) {
  try {
    size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(origin + ": expected number, got \"" + v + "\"");
  }
}

bool parse_bool(const std::string& v, const std::string& origin) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(origin + ": expected true/false, got \"" + v + "\"");
}

using Setter = std::function<void(const std::string& value, const std::string& origin)>;

void build_registry(PipelineConfig& c, std::map<std::string, Setter>& reg) {
  auto add_str = [&](const std::string& k, std::string* p) {
    reg[k] = [p](const std::string& v, const std::string&) { *p = v; };
  };
  auto add_int = [&](const std::string& k, int* p) {
    reg[k] = [p](const std::string& v, const std::string& o) { *p = parse_int(v, o); };
  };
  auto add_u64 = [&](const std::string& k, uint64_t* p) {
    reg[k] = [p](const std::string& v, const std::string& o) { *p = parse_u64(v, o); };
  };
  auto add_double = [&](const std::string& k, double* p) {
    reg[k] = [p](const std::string& v, const std::string& o) { *p = parse_double(v, o); };
  };
  auto add_bool = [&](const std::string& k, bool* p) {
    reg[k] = [p](const std::string& v, const std::string& o) { *p = parse_bool(v, o); };
  };

  add_str("paths.corpus", &c.corpus_path);
  add_str("paths.workdir", &c.workdir);
  add_int("threads", &c.threads);

  add_int("corpus.l_ctx", &c.l_ctx);
  add_int("corpus.min_sent_len", &c.min_sent_len);
  add_int("corpus.max_sent_len", &c.max_sent_len);
  add_bool("corpus.lowercase", &c.lowercase);
  add_bool("corpus.blank_line_docs", &c.blank_line_docs);
  add_int("corpus.vocab_min_count", &c.vocab_min_count);
  add_int("corpus.vocab_max_size", &c.vocab_max_size);

  auto add_stage = [&](const std::string& prefix, StageModelConfig* s) {
    add_int(prefix + ".d_model", &s->model.d_model);
    add_int(prefix + ".n_heads", &s->model.n_heads);
    add_int(prefix + ".d_ff", &s->model.d_ff);
    add_int(prefix + ".enc_layers", &s->model.n_enc_layers);
    add_int(prefix + ".dec_layers", &s->model.n_dec_layers);
    add_int(prefix + ".max_positions", &s->model.max_positions);
    add_int(prefix + ".max_sentence_positions", &s->model.max_sentence_positions);
    add_double(prefix + ".lr", &s->train.learning_rate);
    add_double(prefix + ".beta1", &s->train.beta1);
    add_double(prefix + ".beta2", &s->train.beta2);
    add_int(prefix + ".warmup", &s->train.warmup_steps);
    add_int(prefix + ".epochs", &s->train.epochs);
    add_int(prefix + ".batch_size", &s->train.batch_size);
    add_u64(prefix + ".seed", &s->train.seed);
  };
  add_stage("context_lm", &c.context_lm);
  add_stage("genscore", &c.genscore);
  add_stage("paraphraser", &c.paraphraser);
  add_str("context_lm.objectives", &c.context_lm_objectives);

  add_int("decode.beam_size", &c.decode.beam_size);
  add_int("decode.num_return", &c.decode.num_return);
  add_double("decode.diversity_penalty", &c.decode.diversity_penalty);
  add_int("decode.max_len", &c.decode.max_len);
  add_double("decode.length_norm_alpha", &c.decode.length_norm_alpha);
  add_bool("decode.include_original", &c.include_original);

  add_double("select.rho", &c.select.rho);
  add_int("select.per_context_cap", &c.select.per_context_cap);
  add_str("select.mode", &c.select_mode);
  add_u64("select.seed", &c.select_seed);

  add_int("ranker.epochs", &c.ranker.epochs);
  add_double("ranker.lr", &c.ranker.learning_rate);
  add_double("ranker.l2", &c.ranker.l2);
  add_u64("ranker.seed", &c.ranker.seed);

  add_double("finetune.lr", &c.finetune.learning_rate);
  add_double("finetune.beta1", &c.finetune.beta1);
  add_double("finetune.beta2", &c.finetune.beta2);
  add_int("finetune.warmup", &c.finetune.warmup_steps);
  add_int("finetune.epochs", &c.finetune.epochs);
  add_int("finetune.batch_size", &c.finetune.batch_size);
  add_u64("finetune.seed", &c.finetune.seed);

  add_int("synthetic.docs", &c.synth_docs);
  add_int("synthetic.clusters", &c.synth_clusters);
  add_u64("synthetic.seed", &c.synth_seed);
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return std::string();
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

PipelineConfig::PipelineConfig() {
  context_lm.train.beta2 = 0.999;
  context_lm.train.epochs = 20;
  genscore.train.beta2 = 0.98;
  genscore.train.warmup_steps = 100;
  genscore.train.epochs = 20;
  paraphraser.train = genscore.train;
  finetune = paraphraser.train;
  finetune.epochs = 0;
}

void PipelineConfig::set(const std::string& key, const std::string& value,
                         const std::string& origin) {
  std::map<std::string, Setter> reg;
  build_registry(*this, reg);
  auto it = reg.find(key);
  if (it == reg.end()) throw ConfigError(origin + ": unknown key \"" + key + "\"");
  it->second(value, origin);
}

void PipelineConfig::validate() const {
  if (l_ctx < 0) throw ConfigError("corpus.l_ctx must be >= 0");
  if (min_sent_len < 1 || max_sent_len < min_sent_len)
    throw ConfigError("need 1 <= corpus.min_sent_len <= corpus.max_sent_len");
  if (vocab_min_count < 1) throw ConfigError("corpus.vocab_min_count must be >= 1");
  if (vocab_max_size <= 10) throw ConfigError("corpus.vocab_max_size must exceed 10");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  for (const auto* s : {&context_lm, &genscore, &paraphraser}) {
    s->model.validate();
    s->train.validate();
  }
  decode.validate();
  select.validate();
  if (select_mode != "score" && select_mode != "random")
    throw ConfigError("select.mode must be score or random");
  if (ranker.learning_rate <= 0.0) throw ConfigError("ranker.lr must be positive");
  if (ranker.l2 < 0.0) throw ConfigError("ranker.l2 must be >= 0");
  if (synth_docs < 1 || synth_clusters < 1)
    throw ConfigError("synthetic.docs and synthetic.clusters must be positive");
  std::istringstream in(context_lm_objectives);
  std::string part;
  int n = 0;
  while (std::getline(in, part, ',')) {
    part = strip(part);
    if (part.empty()) continue;
    if (part != "l2r" && part != "r2l" && part != "bwdl" && part != "bwdr")
      throw ConfigError("context_lm.objectives holds unknown objective \"" + part + "\"");
    ++n;
  }
  if (n == 0) throw ConfigError("context_lm.objectives must name at least one objective");
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& config_file,
                                    const std::vector<std::string>& overrides) {
  PipelineConfig cfg;
  if (!config_file.empty()) {
    std::string text = read_text_file(config_file);
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string origin = config_file.string() + ":" + std::to_string(line_no);
      std::string t = strip(line);
      if (t.empty() || t[0] == '#') continue;
      size_t eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError(origin + ": expected key=value");
      std::string key = strip(t.substr(0, eq));
      std::string value = strip(t.substr(eq + 1));
      if (key.empty()) throw ConfigError(origin + ": empty key");
      cfg.set(key, value, origin);
    }
  }
  for (const auto& entry : overrides) {
    std::string origin = "override \"" + entry + "\"";
    size_t eq = entry.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ": expected key=value");
    cfg.set(strip(entry.substr(0, eq)), strip(entry.substr(eq + 1)), origin);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::from_overrides(const std::vector<std::string>& overrides) {
  return load(std::filesystem::path(), overrides);
}

std::vector<std::string> PipelineConfig::known_keys() const {
  PipelineConfig probe = *this;
  std::map<std::string, Setter> reg;
  build_registry(probe, reg);
  std::vector<std::string> keys;
  keys.reserve(reg.size());
  for (const auto& [k, s] : reg) keys.push_back(k);
  return keys;
}

}  // namespace paramine
