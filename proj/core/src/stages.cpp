#include "paramine/stages.hpp"

#include "paramine/beam.hpp"
#include "paramine/checkpoint.hpp"
#include "paramine/features.hpp"
#include "paramine/jsonl.hpp"
#include "paramine/kv.hpp"
#include "paramine/metrics.hpp"
#include "paramine/objectives.hpp"
#include "paramine/pairs.hpp"
#include "paramine/ranker.hpp"
#include "paramine/synthetic.hpp"
#include "paramine/text.hpp"
#include "paramine/util.hpp"
#include "paramine/vocab.hpp"
#include "paramine/window.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace paramine {

namespace {

namespace fs = std::filesystem;

fs::path wd(const PipelineConfig& cfg) { return fs::path(cfg.workdir); }

WindowConfig window_config(const PipelineConfig& cfg) {
  WindowConfig wc;
  wc.l_ctx = cfg.l_ctx;
  wc.min_sent_len = cfg.min_sent_len;
  wc.max_sent_len = cfg.max_sent_len;
  return wc;
}

std::vector<std::vector<TokenizedSentence>> tokenize_corpus(const PipelineConfig& cfg,
                                                            const std::string& text) {
  std::vector<std::string> docs =
      cfg.blank_line_docs ? split_documents(text) : std::vector<std::string>{text};
  std::vector<std::vector<TokenizedSentence>> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    std::vector<TokenizedSentence> sentences;
    for (const auto& raw : segment_sentences(doc)) {
      TokenizedSentence s;
      s.tokens = tokenize(raw, cfg.lowercase);
      if (!s.tokens.empty()) sentences.push_back(std::move(s));
    }
    if (!sentences.empty()) out.push_back(std::move(sentences));
  }
  return out;
}

std::map<std::string, long> count_tokens(const std::vector<const Tokens*>& lists) {
  std::map<std::string, long> counts;
  for (const Tokens* t : lists)
    for (const auto& tok : *t) ++counts[tok];
  return counts;
}

/// Source and decoder lengths the context objectives can produce must fit the
/// position table.
void require_context_capacity(const PipelineConfig& cfg, const ModelConfig& mc) {
  int longest_side = std::max(cfg.l_ctx, cfg.max_sent_len);
  int need = std::max(2 + cfg.l_ctx + longest_side, longest_side + 1);
  if (mc.max_positions < need)
    throw ConfigError("max_positions " + std::to_string(mc.max_positions) +
                      " cannot fit context windows (need " + std::to_string(need) +
                      "); raise it or lower l_ctx / max_sent_len");
}

void require_pair_capacity(const ModelConfig& mc, size_t longest, const std::string& what) {
  int need = static_cast<int>(longest) + 1;
  if (mc.max_positions < need)
    throw ConfigError("max_positions " + std::to_string(mc.max_positions) + " cannot fit " +
                      what + " (need " + std::to_string(need) + ")");
}

std::set<int> objective_ids(const std::string& listed) {
  static const std::map<std::string, int> names = {{"l2r", Vocabulary::kObjL2R},
                                                   {"r2l", Vocabulary::kObjR2L},
                                                   {"bwdl", Vocabulary::kObjBwdL},
                                                   {"bwdr", Vocabulary::kObjBwdR}};
  std::set<int> out;
  std::stringstream ss(listed);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    auto it = names.find(item);
    if (it == names.end()) throw ConfigError("unknown context objective '" + item + "'");
    out.insert(it->second);
  }
  if (out.empty()) throw ConfigError("no context objectives enabled");
  return out;
}

std::vector<SeqExample> pair_training_examples(const std::vector<ScoredPair>& pairs,
                                               const Vocabulary& v) {
  std::vector<SeqExample> out;
  out.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    auto a = v.to_ids(p.s1);
    auto b = v.to_ids(p.s2);
    out.push_back(make_pair_example(Vocabulary::kObjPara, a, b));
    out.push_back(make_pair_example(Vocabulary::kObjPara, b, a));
  }
  return out;
}

size_t longest_pair_side(const std::vector<ScoredPair>& pairs) {
  size_t longest = 0;
  for (const auto& p : pairs) longest = std::max({longest, p.s1.size(), p.s2.size()});
  return longest;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

Tokens split_whitespace(const std::string& line) {
  Tokens out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

/// Fills the six text-only features of a pair; context-agreement features need
/// a window and are left for the caller.
void fill_text_features(ScoreVector& v, const Tokens& s1, const Tokens& s2,
                        const Seq2SeqModel& gen) {
  auto [jac, shift] = diversity_features(s1, s2);
  v.jaccard = jac;
  v.posshift = shift;
  auto [g12, g21] = generation_features(gen, gen.vocab().to_ids(s1), gen.vocab().to_ids(s2));
  v.gen12 = g12;
  v.gen21 = g21;
}

struct LossFormat {
  double x;
};
std::ostream& operator<<(std::ostream& os, LossFormat f) {
  std::ostringstream tmp;
  tmp << std::fixed << std::setprecision(4) << f.x;
  return os << tmp.str();
}

}  // namespace

void stage_ingest(const PipelineConfig& cfg, std::ostream& out) {
  if (cfg.corpus_path.empty()) throw ConfigError("paths.corpus is not set");
  std::string text = read_text_file(cfg.corpus_path);
  auto docs = tokenize_corpus(cfg, text);

  std::map<std::string, long> counts;
  long n_sentences = 0;
  for (const auto& doc : docs)
    for (const auto& s : doc) {
      ++n_sentences;
      for (const auto& tok : s.tokens) ++counts[tok];
    }
  // Full-coverage vocabulary so every window token survives the id round trip.
  Vocabulary ids_only = build_vocab(counts, 1, std::numeric_limits<int>::max());

  WindowConfig wc = window_config(cfg);
  std::vector<ContextWindow> windows;
  for (size_t d = 0; d < docs.size(); ++d) {
    auto& doc = docs[d];
    for (auto& s : doc) s.ids = ids_only.to_ids(s.tokens);
    auto w = extract_windows(std::to_string(d), doc, wc);
    windows.insert(windows.end(), w.begin(), w.end());
  }

  write_windows_jsonl(wd(cfg) / "windows.jsonl", windows, ids_only);
  out << "ingested " << docs.size() << " documents, " << n_sentences << " sentences, "
      << windows.size() << " windows\n";
}

void stage_train_context_lm(const PipelineConfig& cfg, std::ostream& out) {
  fs::path wpath = wd(cfg) / "windows.jsonl";
  auto counts = count_window_tokens(wpath);
  Vocabulary vocab = build_vocab(counts, cfg.vocab_min_count, cfg.vocab_max_size);
  auto windows = read_windows_jsonl(wpath, vocab);
  if (windows.empty()) throw ConfigError("no context windows to train on");
  require_context_capacity(cfg, cfg.context_lm.model);

  auto wanted = objective_ids(cfg.context_lm_objectives);
  std::vector<SeqExample> examples;
  for (const auto& w : windows)
    for (auto& ex : build_context_examples(w))
      if (wanted.count(ex.source.at(0))) examples.push_back(std::move(ex));
  if (examples.empty()) throw ConfigError("no training examples under the enabled objectives");

  Seq2SeqModel model(cfg.context_lm.model, vocab, cfg.context_lm.train.seed);
  TrainStats stats = train_model(model, examples, cfg.context_lm.train);
  save_checkpoint(wd(cfg) / "context_lm.ckpt", model);
  out << "trained context model on " << examples.size() << " examples from " << windows.size()
      << " windows, final loss " << LossFormat{stats.final_loss} << "\n";
}

void stage_generate(const PipelineConfig& cfg, std::ostream& out) {
  Seq2SeqModel model = load_checkpoint(wd(cfg) / "context_lm.ckpt");
  auto windows = read_windows_jsonl(wd(cfg) / "windows.jsonl", model.vocab());
  if (windows.empty()) throw ConfigError("no context windows to decode");
  cfg.decode.validate();

  std::vector<PoolEntry> pool(windows.size());
  parallel_for(windows.size(), resolve_threads(cfg.threads), [&](size_t i) {
    const ContextWindow& w = windows[i];
    PoolEntry e;
    e.doc_id = w.doc_id;
    e.sent_index = w.sent_index;
    e.original = w.target.tokens;
    if (cfg.include_original) {
      SeqExample ex = window_decode_source(w);
      ex.target = w.target.ids;
      double lp = model.log_prob(ex, false);
      double denom = std::pow(static_cast<double>(ex.target.size()) + 1.0,
                              cfg.decode.length_norm_alpha);
      e.candidates.push_back({w.target.tokens, lp / denom});
    }
    SeqExample src = window_decode_source(w);
    for (const auto& c :
         decode_candidates(model, src.source, src.source_segments, cfg.decode)) {
      e.candidates.push_back({model.vocab().to_tokens(c.tokens), c.model_score});
    }
    std::set<Tokens> seen;
    std::vector<PoolCandidate> unique;
    for (auto& c : e.candidates)
      if (seen.insert(c.tokens).second) unique.push_back(std::move(c));
    e.candidates = std::move(unique);
    pool[i] = std::move(e);
  });

  size_t usable = 0;
  for (const auto& e : pool)
    if (e.usable()) ++usable;
  write_pool_jsonl(wd(cfg) / "pool.jsonl", pool);
  out << "generated candidates for " << pool.size() << " windows (" << usable << " usable)\n";
}

void stage_train_genscore(const PipelineConfig& cfg, std::ostream& out) {
  auto pool = read_pool_jsonl(wd(cfg) / "pool.jsonl");
  auto pairs = form_pairs(pool);
  if (pairs.empty()) throw ConfigError("no candidate pairs to train on");

  std::vector<const Tokens*> lists;
  for (const auto& p : pairs) {
    lists.push_back(&p.s1);
    lists.push_back(&p.s2);
  }
  Vocabulary vocab = build_vocab(count_tokens(lists), cfg.vocab_min_count, cfg.vocab_max_size);
  require_pair_capacity(cfg.genscore.model, longest_pair_side(pairs), "candidate pairs");

  auto examples = pair_training_examples(pairs, vocab);
  Seq2SeqModel model(cfg.genscore.model, vocab, cfg.genscore.train.seed);
  TrainStats stats = train_model(model, examples, cfg.genscore.train);
  save_checkpoint(wd(cfg) / "genscore.ckpt", model);
  out << "trained generation scorer on " << pairs.size() << " pairs (" << examples.size()
      << " examples), final loss " << LossFormat{stats.final_loss} << "\n";
}

void stage_train_ranker(const PipelineConfig& cfg, const std::string& triples_path,
                        std::ostream& out) {
  auto raw = read_triples_jsonl(triples_path);
  if (raw.empty()) throw ConfigError("no preference triples in " + triples_path);
  Seq2SeqModel gen = load_checkpoint(wd(cfg) / "genscore.ckpt");

  std::vector<PreferenceTriple> triples(raw.size());
  parallel_for(raw.size(), resolve_threads(cfg.threads), [&](size_t i) {
    PreferenceTriple t;
    t.anchor = raw[i].anchor;
    t.better = raw[i].better;
    t.worse = raw[i].worse;
    fill_text_features(t.features_plus, t.anchor, t.better, gen);
    fill_text_features(t.features_minus, t.anchor, t.worse, gen);
    triples[i] = std::move(t);
  });

  RankingWeights w = train_weights(triples, cfg.ranker);
  write_weights_kv(wd(cfg) / "weights.kv", w);
  double acc = pairwise_accuracy(w, triples);
  out << "trained ranker on " << triples.size() << " triples, pairwise accuracy "
      << LossFormat{acc} << "\n";
}

void stage_score(const PipelineConfig& cfg, std::ostream& out) {
  Seq2SeqModel lm = load_checkpoint(wd(cfg) / "context_lm.ckpt");
  Seq2SeqModel gen = load_checkpoint(wd(cfg) / "genscore.ckpt");
  RankingWeights weights = read_weights_kv(wd(cfg) / "weights.kv");
  auto windows = read_windows_jsonl(wd(cfg) / "windows.jsonl", lm.vocab());
  auto pool = read_pool_jsonl(wd(cfg) / "pool.jsonl");
  auto pairs = form_pairs(pool);

  std::map<std::pair<std::string, int>, size_t> window_of;
  for (size_t i = 0; i < windows.size(); ++i)
    window_of[{windows[i].doc_id, windows[i].sent_index}] = i;

  parallel_for(pairs.size(), resolve_threads(cfg.threads), [&](size_t i) {
    ScoredPair& p = pairs[i];
    auto it = window_of.find({p.doc_id, p.sent_index});
    if (it == window_of.end())
      throw ConfigError("pool entry " + p.doc_id + ":" + std::to_string(p.sent_index) +
                        " has no matching window; re-run ingest and generate together");
    const ContextWindow& w = windows[it->second];
    ScoreVector v;
    auto ctx = context_agreement(lm, lm.vocab().to_ids(p.s1), lm.vocab().to_ids(p.s2), w);
    v.ctx_l2r = ctx[0];
    v.ctx_r2l = ctx[1];
    v.ctx_bwdl = ctx[2];
    v.ctx_bwdr = ctx[3];
    fill_text_features(v, p.s1, p.s2, gen);
    p.features = v;
    p.score = final_score(v, weights);
  });

  write_scored_jsonl(wd(cfg) / "scored.jsonl", pairs);
  out << "scored " << pairs.size() << " pairs from " << pool.size() << " windows\n";
}

void stage_select(const PipelineConfig& cfg, std::ostream& out) {
  auto scored = read_scored_jsonl(wd(cfg) / "scored.jsonl");
  auto pool = read_pool_jsonl(wd(cfg) / "pool.jsonl");
  std::vector<ScoredPair> selected =
      cfg.select_mode == "random"
          ? select_pairs_random(scored, pool.size(), cfg.select, cfg.select_seed)
          : select_pairs(std::move(scored), pool.size(), cfg.select);
  write_scored_jsonl(wd(cfg) / "selected.jsonl", selected);
  out << "selected " << selected.size() << " pairs\n";
}

void stage_train_paraphraser(const PipelineConfig& cfg, std::ostream& out) {
  auto selected = read_scored_jsonl(wd(cfg) / "selected.jsonl");
  if (selected.empty()) throw ConfigError("no selected pairs to train on");

  std::vector<const Tokens*> lists;
  for (const auto& p : selected) {
    lists.push_back(&p.s1);
    lists.push_back(&p.s2);
  }
  Vocabulary vocab = build_vocab(count_tokens(lists), cfg.vocab_min_count, cfg.vocab_max_size);
  require_pair_capacity(cfg.paraphraser.model, longest_pair_side(selected), "selected pairs");

  auto examples = pair_training_examples(selected, vocab);
  Seq2SeqModel model(cfg.paraphraser.model, vocab, cfg.paraphraser.train.seed);
  TrainStats stats = train_model(model, examples, cfg.paraphraser.train);
  save_checkpoint(wd(cfg) / "paraphraser.ckpt", model);
  out << "trained paraphraser on " << selected.size() << " pairs (" << examples.size()
      << " examples), final loss " << LossFormat{stats.final_loss} << "\n";
}

void stage_finetune(const PipelineConfig& cfg, const std::string& pairs_path,
                    std::ostream& out) {
  Seq2SeqModel model = load_checkpoint(wd(cfg) / "paraphraser.ckpt");

  std::string text = read_text_file(pairs_path);
  std::vector<ScoredPair> pairs;
  size_t line_no = 0, skipped = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(pairs_path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.contains("s1") || !obj.contains("s2"))
      throw FormatError(pairs_path + ":" + std::to_string(line_no) +
                        ": expected s1 and s2 token arrays");
    ScoredPair p;
    p.s1 = obj.at("s1").get<Tokens>();
    p.s2 = obj.at("s2").get<Tokens>();
    if (p.s1 == p.s2 || p.s1.empty() || p.s2.empty()) {
      ++skipped;
      continue;
    }
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) throw ConfigError("no usable pairs in " + pairs_path);
  require_pair_capacity(model.config(), longest_pair_side(pairs), "finetuning pairs");

  auto examples = pair_training_examples(pairs, model.vocab());
  TrainStats stats = train_model(model, examples, cfg.finetune);
  save_checkpoint(wd(cfg) / "finetuned.ckpt", model);
  out << "finetuned paraphraser on " << pairs.size() << " pairs (" << skipped
      << " skipped), final loss " << LossFormat{stats.final_loss} << "\n";
}

void stage_paraphrase(const PipelineConfig& cfg, const std::string& input_path,
                      const std::string& output_path, std::ostream& out) {
  fs::path finetuned = wd(cfg) / "finetuned.ckpt";
  fs::path ckpt = fs::exists(finetuned) ? finetuned : wd(cfg) / "paraphraser.ckpt";
  Seq2SeqModel model = load_checkpoint(ckpt);
  cfg.decode.validate();

  auto lines = split_lines(read_text_file(input_path));
  if (lines.empty()) throw ConfigError("no input sentences in " + input_path);
  std::vector<Tokens> inputs;
  for (size_t i = 0; i < lines.size(); ++i) {
    Tokens t = split_whitespace(lines[i]);
    if (t.empty())
      throw ConfigError(input_path + ":" + std::to_string(i + 1) + ": empty input sentence");
    if (static_cast<int>(t.size()) + 1 > model.config().max_positions)
      throw ConfigError(input_path + ":" + std::to_string(i + 1) +
                        ": sentence longer than the model's position table");
    inputs.push_back(std::move(t));
  }

  std::vector<std::string> results(inputs.size());
  parallel_for(inputs.size(), resolve_threads(cfg.threads), [&](size_t i) {
    SeqExample src =
        make_pair_example(Vocabulary::kObjPara, model.vocab().to_ids(inputs[i]), {});
    auto cands = decode_candidates(model, src.source, src.source_segments, cfg.decode);
    nlohmann::ordered_json obj;
    obj["input"] = inputs[i];
    obj["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : cands) {
      nlohmann::ordered_json jc;
      jc["tokens"] = model.vocab().to_tokens(c.tokens);
      jc["model_score"] = c.model_score;
      obj["candidates"].push_back(std::move(jc));
    }
    results[i] = obj.dump();
  });

  std::string payload;
  for (const auto& r : results) payload += r + "\n";
  atomic_write_file(output_path, payload);
  out << "paraphrased " << inputs.size() << " sentences\n";
}

void stage_evaluate(const PipelineConfig& cfg, const std::string& source_path,
                    const std::string& reference_path, const std::string& candidate_path,
                    std::ostream& out) {
  auto load_corpus = [](const std::string& path) {
    TokenCorpus corpus;
    for (const auto& line : split_lines(read_text_file(path)))
      corpus.push_back(split_whitespace(line));
    return corpus;
  };
  TokenCorpus sources = load_corpus(source_path);
  TokenCorpus references = load_corpus(reference_path);
  TokenCorpus candidates = load_corpus(candidate_path);

  MetricReport report = evaluate_corpus(sources, references, candidates);
  std::vector<std::pair<std::string, std::string>> kv = {
      {"bleu", format_double(report.bleu)},
      {"ibleu", format_double(report.ibleu)},
      {"rouge1", format_double(report.rouge1)},
      {"rouge2", format_double(report.rouge2)},
      {"count", std::to_string(report.count)},
  };
  write_kv(wd(cfg) / "report.kv", kv);
  out << "bleu=" << LossFormat{report.bleu} << " ibleu=" << LossFormat{report.ibleu}
      << " rouge1=" << LossFormat{report.rouge1} << " rouge2=" << LossFormat{report.rouge2}
      << " count=" << report.count << "\n";
}

void stage_make_synthetic(const PipelineConfig& cfg, std::ostream& out) {
  SyntheticConfig sc;
  sc.n_docs = cfg.synth_docs;
  sc.n_clusters = cfg.synth_clusters;
  sc.seed = cfg.synth_seed;
  SyntheticStats stats = make_synthetic(wd(cfg) / "synthetic", sc);
  out << "synthesized " << stats.documents << " documents, " << stats.sentences
      << " sentences, " << stats.clusters << " clusters, " << stats.triples
      << " preference triples\n";
}

}  // namespace paramine
