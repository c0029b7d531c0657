#include "paramine/metrics.hpp"

#include "paramine/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace paramine {

namespace {

constexpr int kMaxOrder = 4;
constexpr double kEps = 0.1;

std::map<std::vector<std::string>, long> ngram_counts(const Tokens& s, int n) {
  std::map<std::vector<std::string>, long> counts;
  if (static_cast<int>(s.size()) < n) return counts;
  for (size_t i = 0; i + n <= s.size(); ++i)
    ++counts[std::vector<std::string>(s.begin() + i, s.begin() + i + n)];
  return counts;
}

long clipped_overlap(const std::map<std::vector<std::string>, long>& cand,
                     const std::map<std::vector<std::string>, long>& ref) {
  long total = 0;
  for (const auto& [gram, c] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) total += std::min(c, it->second);
  }
  return total;
}

}  // namespace

double bleu(const TokenCorpus& candidates, const TokenCorpus& references) {
  if (candidates.empty() || references.empty())
    throw ConfigError("bleu needs non-empty corpora");
  if (candidates.size() != references.size())
    throw ConfigError("bleu corpora must be aligned");

  long matches[kMaxOrder] = {0, 0, 0, 0};
  long totals[kMaxOrder] = {0, 0, 0, 0};
  long cand_len = 0, ref_len = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    cand_len += static_cast<long>(candidates[i].size());
    ref_len += static_cast<long>(references[i].size());
    for (int n = 1; n <= kMaxOrder; ++n) {
      auto cc = ngram_counts(candidates[i], n);
      auto rc = ngram_counts(references[i], n);
      matches[n - 1] += clipped_overlap(cc, rc);
      for (const auto& [gram, c] : cc) totals[n - 1] += c;
    }
  }

  if (matches[0] == 0) return 0.0;

  double log_prec = 0.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    double p;
    if (matches[n] > 0) {
      p = static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    } else {
      p = kEps / static_cast<double>(std::max<long>(totals[n], 1));
    }
    log_prec += std::log(p);
  }
  log_prec /= kMaxOrder;

  double bp = cand_len >= ref_len
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
  return bp * std::exp(log_prec);
}

double ibleu(const TokenCorpus& sources, const TokenCorpus& references,
             const TokenCorpus& candidates, double alpha) {
  if (sources.size() != references.size() || references.size() != candidates.size())
    throw ConfigError("ibleu corpora must be aligned");
  return alpha * bleu(candidates, references) - (1.0 - alpha) * bleu(candidates, sources);
}

double rouge_n(const TokenCorpus& candidates, const TokenCorpus& references, int n) {
  if (n != 1 && n != 2) throw ConfigError("rouge_n supports n = 1 or 2");
  if (candidates.empty() || candidates.size() != references.size())
    throw ConfigError("rouge_n corpora must be aligned and non-empty");

  double sum = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    auto cc = ngram_counts(candidates[i], n);
    auto rc = ngram_counts(references[i], n);
    long overlap = clipped_overlap(cc, rc);
    long cand_total = 0, ref_total = 0;
    for (const auto& [gram, c] : cc) cand_total += c;
    for (const auto& [gram, c] : rc) ref_total += c;
    if (overlap == 0 || cand_total == 0 || ref_total == 0) continue;
    double precision = static_cast<double>(overlap) / static_cast<double>(cand_total);
    double recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
    sum += 2.0 * precision * recall / (precision + recall);
  }
  return sum / static_cast<double>(candidates.size());
}

MetricReport evaluate_corpus(const TokenCorpus& sources, const TokenCorpus& references,
                             const TokenCorpus& candidates, double alpha) {
  MetricReport report;
  report.bleu = bleu(candidates, references);
  report.ibleu = ibleu(sources, references, candidates, alpha);
  report.rouge1 = rouge_n(candidates, references, 1);
  report.rouge2 = rouge_n(candidates, references, 2);
  report.count = candidates.size();
  return report;
}

}  // namespace paramine
