#include "paramine/synthetic.hpp"

#include "paramine/jsonl.hpp"
#include "paramine/util.hpp"

#include <json.hpp>

#include <array>
#include <sstream>
#include <string>
#include <vector>

namespace paramine {

namespace {

const char* kNouns[] = {"fox",    "miller", "baker",  "sailor", "gardener", "tailor",
                        "hunter", "farmer", "weaver", "smith",  "shepherd", "fisher",
                        "piper",  "mason",  "carter", "cook",   "scribe",   "ranger",
                        "porter", "singer", "judge",  "clerk",  "guard",    "trader"};
const char* kVerbs[] = {"chased",  "carried", "painted", "mended",  "watched", "counted",
                        "greeted", "guarded", "praised", "scolded", "traded",  "followed",
                        "helped",  "ignored", "called",  "taught",  "paid",    "warned",
                        "thanked", "blamed",  "found",   "visited", "served",  "trusted"};
const char* kObjects[] = {"hen",    "wagon",  "fence", "lantern", "basket", "ladder",
                          "kettle", "barrel", "cloak", "anvil",   "plough", "net",
                          "flute",  "arch",   "cart",  "stew",    "letter", "trail",
                          "crate",  "ballad", "case",  "ledger",  "gate",   "coin"};

std::string themed_word(const char* const* base, size_t base_n, int index) {
  if (index < static_cast<int>(base_n)) return base[index];
  return std::string(base[index % base_n]) + std::to_string(index / static_cast<int>(base_n));
}

struct Cluster {
  std::vector<std::string> variants;  // space-joined token form
};

Cluster build_cluster(int id) {
  std::string n = themed_word(kNouns, std::size(kNouns), id);
  std::string v = themed_word(kVerbs, std::size(kVerbs), id);
  std::string o = themed_word(kObjects, std::size(kObjects), id);
  Cluster c;
  c.variants.push_back("the " + n + " " + v + " the " + o + " .");
  c.variants.push_back("a " + n + " " + v + " a " + o + " .");
  c.variants.push_back("the " + o + " was " + v + " by the " + n + " .");
  c.variants.push_back(n + " always " + v + " the " + o + " .");
  return c;
}

}  // namespace

SyntheticStats make_synthetic(const std::filesystem::path& out_dir, const SyntheticConfig& cfg) {
  if (cfg.n_docs < 1 || cfg.n_clusters < 3)
    throw ConfigError("synthetic corpus needs at least 1 document and 3 clusters");
  int storylines = cfg.n_clusters / 3;
  int n_clusters = storylines * 3;

  std::vector<Cluster> clusters;
  clusters.reserve(static_cast<size_t>(n_clusters));
  for (int c = 0; c < n_clusters; ++c) clusters.push_back(build_cluster(c));

  Rng rng(cfg.seed);
  std::ostringstream corpus;
  SyntheticStats stats;
  for (int d = 0; d < cfg.n_docs; ++d) {
    int story = d % storylines;
    for (int slot = 0; slot < 3; ++slot) {
      const Cluster& c = clusters[static_cast<size_t>(story * 3 + slot)];
      corpus << c.variants[rand_below(rng, c.variants.size())] << '\n';
      ++stats.sentences;
    }
    corpus << '\n';
  }
  atomic_write_file(out_dir / "corpus.txt", corpus.str());

  std::ostringstream cluster_lines;
  for (int c = 0; c < n_clusters; ++c) {
    for (const auto& sentence : clusters[static_cast<size_t>(c)].variants) {
      nlohmann::ordered_json obj;
      obj["sentence"] = sentence;
      obj["cluster"] = c;
      cluster_lines << obj.dump() << '\n';
    }
  }
  atomic_write_file(out_dir / "clusters.jsonl", cluster_lines.str());

  auto tokens_of = [](const std::string& s) {
    Tokens out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  };
  std::vector<RawTriple> triples;
  for (int c = 0; c < n_clusters; ++c) {
    const auto& variants = clusters[static_cast<size_t>(c)].variants;
    for (int k = 0; k < 10; ++k) {
      size_t a = rand_below(rng, variants.size());
      size_t b = rand_below(rng, variants.size() - 1);
      if (b >= a) ++b;
      int other = static_cast<int>(rand_below(rng, static_cast<uint64_t>(n_clusters - 1)));
      if (other >= c) ++other;
      const auto& wrong = clusters[static_cast<size_t>(other)].variants;
      RawTriple t;
      t.anchor = tokens_of(variants[a]);
      t.better = tokens_of(variants[b]);
      t.worse = tokens_of(wrong[rand_below(rng, wrong.size())]);
      triples.push_back(std::move(t));
    }
  }
  write_triples_jsonl(out_dir / "triples.jsonl", triples);

  stats.documents = cfg.n_docs;
  stats.clusters = n_clusters;
  stats.triples = static_cast<long>(triples.size());
  return stats;
}

}  // namespace paramine
