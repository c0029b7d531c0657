#include "paramine/beam.hpp"

#include "paramine/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace paramine {

void DecodeConfig::validate() const {
  if (num_return < 1 || beam_size < num_return)
    throw ConfigError("need beam_size >= num_return >= 1");
  if (diversity_penalty < 0.0) throw ConfigError("diversity_penalty must be >= 0");
  if (max_len < 2) throw ConfigError("max_len must be >= 2");
  if (length_norm_alpha < 0.0 || length_norm_alpha > 1.0)
    throw ConfigError("length_norm_alpha must be in [0,1]");
}

namespace {

struct Hyp {
  std::vector<int> tokens;
  double logp = 0.0;
  int state = -1;
};

struct Finished {
  std::vector<int> tokens;
  double logp = 0.0;  // includes the EOS step
  double score = 0.0;
};

double length_normalized(double logp, size_t n_tokens, double alpha) {
  return logp / std::pow(static_cast<double>(n_tokens + 1), alpha);
}

}  // namespace

std::vector<Candidate> diverse_beam_search(StepScorer& scorer, const DecodeConfig& cfg,
                                           const std::vector<char>& banned) {
  cfg.validate();
  int V = scorer.vocab_size();
  int eos = scorer.eos_id();
  if (static_cast<int>(banned.size()) != V) throw ConfigError("banned mask size mismatch");

  std::vector<Hyp> frontier;
  frontier.push_back(Hyp{{}, 0.0, scorer.start()});
  std::vector<Finished> finished;

  struct Expansion {
    double cut_score;  // sibling-penalized, used only for the beam cut
    double logp;       // true running log-probability
    int parent;
    int token;
  };

  for (int step = 0; step < cfg.max_len && !frontier.empty(); ++step) {
    std::vector<Expansion> pool;
    pool.reserve(frontier.size() * static_cast<size_t>(V));
    for (size_t h = 0; h < frontier.size(); ++h) {
      const Vector& lp = scorer.log_probs(frontier[h].state);
      std::vector<Expansion> siblings;
      siblings.reserve(static_cast<size_t>(V));
      for (int v = 0; v < V; ++v) {
        if (banned[static_cast<size_t>(v)]) continue;
        if (v == eos && step == 0) continue;  // no empty candidates
        siblings.push_back(Expansion{0.0, frontier[h].logp + lp(v), static_cast<int>(h), v});
      }
      std::sort(siblings.begin(), siblings.end(), [](const Expansion& a, const Expansion& b) {
        if (a.logp != b.logp) return a.logp > b.logp;
        return a.token < b.token;
      });
      for (size_t r = 0; r < siblings.size(); ++r) {
        siblings[r].cut_score = siblings[r].logp - cfg.diversity_penalty * static_cast<double>(r);
        pool.push_back(siblings[r]);
      }
    }
    std::sort(pool.begin(), pool.end(), [](const Expansion& a, const Expansion& b) {
      if (a.cut_score != b.cut_score) return a.cut_score > b.cut_score;
      if (a.parent != b.parent) return a.parent < b.parent;
      return a.token < b.token;
    });

    // Route the cut: EOS entries finish, others form the next frontier. The
    // pool is scanned past beam_size so finishing hypotheses do not starve
    // the frontier.
    std::vector<Hyp> next;
    int taken_eos = 0;
    for (const Expansion& e : pool) {
      if (static_cast<int>(next.size()) >= cfg.beam_size && taken_eos >= cfg.beam_size) break;
      if (e.token == eos) {
        if (taken_eos >= cfg.beam_size) continue;
        ++taken_eos;
        Finished f;
        f.tokens = frontier[static_cast<size_t>(e.parent)].tokens;
        f.logp = e.logp;
        f.score = length_normalized(e.logp, f.tokens.size(), cfg.length_norm_alpha);
        finished.push_back(std::move(f));
      } else {
        if (static_cast<int>(next.size()) >= cfg.beam_size) continue;
        Hyp h;
        h.tokens = frontier[static_cast<size_t>(e.parent)].tokens;
        h.tokens.push_back(e.token);
        h.logp = e.logp;
        h.state = scorer.extend(frontier[static_cast<size_t>(e.parent)].state, e.token);
        next.push_back(std::move(h));
      }
    }
    frontier = std::move(next);
  }

  // Close anything still open with its EOS continuation.
  for (const Hyp& h : frontier) {
    const Vector& lp = scorer.log_probs(h.state);
    Finished f;
    f.tokens = h.tokens;
    f.logp = h.logp + lp(eos);
    f.score = length_normalized(f.logp, f.tokens.size(), cfg.length_norm_alpha);
    finished.push_back(std::move(f));
  }

  std::sort(finished.begin(), finished.end(), [](const Finished& a, const Finished& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tokens < b.tokens;
  });

  std::vector<Candidate> out;
  std::set<std::vector<int>> seen;
  for (const Finished& f : finished) {
    if (static_cast<int>(out.size()) >= cfg.num_return) break;
    if (f.tokens.empty()) continue;
    if (!seen.insert(f.tokens).second) continue;
    Candidate c;
    c.tokens = f.tokens;
    c.model_score = f.score;
    out.push_back(std::move(c));
  }
  return out;
}

ModelStepScorer::ModelStepScorer(const Seq2SeqModel& model, std::vector<int> source,
                                 std::vector<int> source_segments)
    : model_(model), enc_(model.encode(source, source_segments)) {}

int ModelStepScorer::vocab_size() const { return model_.vocab_size(); }

int ModelStepScorer::eos_id() const { return Vocabulary::kEos; }

int ModelStepScorer::start() {
  states_.push_back(model_.new_state());
  dists_.push_back(model_.step(enc_, states_.back(), Vocabulary::kBos));
  return static_cast<int>(states_.size()) - 1;
}

const Vector& ModelStepScorer::log_probs(int state) {
  return dists_[static_cast<size_t>(state)];
}

int ModelStepScorer::extend(int state, int token) {
  DecState next = states_[static_cast<size_t>(state)];
  dists_.push_back(model_.step(enc_, next, token));
  states_.push_back(std::move(next));
  return static_cast<int>(states_.size()) - 1;
}

std::vector<char> default_banned(const Vocabulary& v) {
  std::vector<char> banned(static_cast<size_t>(v.size()), 0);
  banned[Vocabulary::kPad] = 1;
  banned[Vocabulary::kBos] = 1;
  banned[Vocabulary::kSep] = 1;
  banned[Vocabulary::kObjL2R] = 1;
  banned[Vocabulary::kObjR2L] = 1;
  banned[Vocabulary::kObjBwdL] = 1;
  banned[Vocabulary::kObjBwdR] = 1;
  banned[Vocabulary::kObjPara] = 1;
  return banned;
}

std::vector<Candidate> decode_candidates(const Seq2SeqModel& model,
                                         const std::vector<int>& source,
                                         const std::vector<int>& source_segments,
                                         const DecodeConfig& cfg) {
  ModelStepScorer scorer(model, source, source_segments);
  return diverse_beam_search(scorer, cfg, default_banned(model.vocab()));
}

}  // namespace paramine
