#pragma once

#include <string>
#include <vector>

namespace paramine {

using Tokens = std::vector<std::string>;
using TokenCorpus = std::vector<Tokens>;

/// Corpus BLEU over aligned candidate/reference lists: clipped n-gram
/// precisions for n=1..4, geometric mean, brevity penalty. Zero-match
/// higher-order counts are smoothed with epsilon = 0.1; zero unigram
/// overlap gives exactly 0.
double bleu(const TokenCorpus& candidates, const TokenCorpus& references);

/// alpha * BLEU(c, r) - (1 - alpha) * BLEU(c, s).
double ibleu(const TokenCorpus& sources, const TokenCorpus& references,
             const TokenCorpus& candidates, double alpha = 0.8);

/// Mean per-sentence ROUGE-n F1 over n-gram multiset overlap (n = 1 or 2).
double rouge_n(const TokenCorpus& candidates, const TokenCorpus& references, int n);

struct MetricReport {
  double bleu = 0.0;
  double ibleu = 0.0;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  size_t count = 0;
};

MetricReport evaluate_corpus(const TokenCorpus& sources, const TokenCorpus& references,
                             const TokenCorpus& candidates, double alpha = 0.8);

}  // namespace paramine
