#include "paramine/jsonl.hpp"

#include "paramine/util.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace paramine {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

/// Streams one parsed object per non-empty line, with file:line on errors.
template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn fn) {
  if (!std::filesystem::exists(path)) throw MissingArtifactError(path.string());
  std::ifstream in(path);
  if (!in) throw MissingArtifactError(path.string());
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      fn(obj);
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

Tokens get_tokens(const json& obj, const char* key) {
  return obj.at(key).get<Tokens>();
}

}  // namespace

void write_windows_jsonl(const std::filesystem::path& path,
                         const std::vector<ContextWindow>& windows, const Vocabulary& v) {
  std::ostringstream out;
  for (const auto& w : windows) {
    ordered_json obj;
    obj["doc_id"] = w.doc_id;
    obj["sent_index"] = w.sent_index;
    obj["left"] = v.to_tokens(w.left);
    obj["target"] = w.target.tokens;
    obj["right"] = v.to_tokens(w.right);
    out << obj.dump() << '\n';
  }
  atomic_write_file(path, out.str());
}

std::vector<ContextWindow> read_windows_jsonl(const std::filesystem::path& path,
                                              const Vocabulary& v) {
  std::vector<ContextWindow> windows;
  for_each_line(path, [&](const json& obj) {
    ContextWindow w;
    w.doc_id = obj.at("doc_id").get<std::string>();
    w.sent_index = obj.at("sent_index").get<int>();
    w.left = v.to_ids(get_tokens(obj, "left"));
    w.target.tokens = get_tokens(obj, "target");
    w.target.ids = v.to_ids(w.target.tokens);
    w.right = v.to_ids(get_tokens(obj, "right"));
    windows.push_back(std::move(w));
  });
  return windows;
}

std::map<std::string, long> count_window_tokens(const std::filesystem::path& path) {
  std::map<std::string, long> counts;
  for_each_line(path, [&](const json& obj) {
    for (const char* key : {"left", "target", "right"})
      for (const auto& tok : get_tokens(obj, key)) ++counts[tok];
  });
  return counts;
}

void write_pool_jsonl(const std::filesystem::path& path, const std::vector<PoolEntry>& pool) {
  std::ostringstream out;
  for (const auto& entry : pool) {
    ordered_json obj;
    obj["doc_id"] = entry.doc_id;
    obj["sent_index"] = entry.sent_index;
    obj["original"] = entry.original;
    ordered_json cands = ordered_json::array();
    for (const auto& c : entry.candidates) {
      ordered_json jc;
      jc["tokens"] = c.tokens;
      jc["model_score"] = c.model_score;
      cands.push_back(std::move(jc));
    }
    obj["candidates"] = std::move(cands);
    out << obj.dump() << '\n';
  }
  atomic_write_file(path, out.str());
}

std::vector<PoolEntry> read_pool_jsonl(const std::filesystem::path& path) {
  std::vector<PoolEntry> pool;
  for_each_line(path, [&](const json& obj) {
    PoolEntry entry;
    entry.doc_id = obj.at("doc_id").get<std::string>();
    entry.sent_index = obj.at("sent_index").get<int>();
    entry.original = get_tokens(obj, "original");
    for (const auto& jc : obj.at("candidates")) {
      PoolCandidate c;
      c.tokens = jc.at("tokens").get<Tokens>();
      c.model_score = jc.at("model_score").get<double>();
      entry.candidates.push_back(std::move(c));
    }
    pool.push_back(std::move(entry));
  });
  return pool;
}

void write_scored_jsonl(const std::filesystem::path& path, const std::vector<ScoredPair>& pairs) {
  std::ostringstream out;
  for (const auto& p : pairs) {
    ordered_json obj;
    obj["doc_id"] = p.doc_id;
    obj["sent_index"] = p.sent_index;
    obj["s1"] = p.s1;
    obj["s2"] = p.s2;
    auto f = p.features.as_array();
    obj["features"] = std::vector<double>(f.begin(), f.end());
    obj["score"] = p.score;
    out << obj.dump() << '\n';
  }
  atomic_write_file(path, out.str());
}

std::vector<ScoredPair> read_scored_jsonl(const std::filesystem::path& path) {
  std::vector<ScoredPair> pairs;
  for_each_line(path, [&](const json& obj) {
    ScoredPair p;
    p.doc_id = obj.at("doc_id").get<std::string>();
    p.sent_index = obj.at("sent_index").get<int>();
    p.s1 = get_tokens(obj, "s1");
    p.s2 = get_tokens(obj, "s2");
    auto f = obj.at("features").get<std::vector<double>>();
    if (f.size() != 8) throw FormatError("feature vector must hold 8 values");
    std::array<double, 8> arr;
    std::copy(f.begin(), f.end(), arr.begin());
    p.features = ScoreVector::from_array(arr);
    p.score = obj.at("score").get<double>();
    pairs.push_back(std::move(p));
  });
  return pairs;
}

std::vector<RawTriple> read_triples_jsonl(const std::filesystem::path& path) {
  std::vector<RawTriple> triples;
  for_each_line(path, [&](const json& obj) {
    RawTriple t;
    t.anchor = get_tokens(obj, "a");
    t.better = get_tokens(obj, "b_plus");
    t.worse = get_tokens(obj, "b_minus");
    if (t.better == t.worse) return;  // ties carry no preference
    triples.push_back(std::move(t));
  });
  return triples;
}

void write_triples_jsonl(const std::filesystem::path& path,
                         const std::vector<RawTriple>& triples) {
  std::ostringstream out;
  for (const auto& t : triples) {
    ordered_json obj;
    obj["a"] = t.anchor;
    obj["b_plus"] = t.better;
    obj["b_minus"] = t.worse;
    out << obj.dump() << '\n';
  }
  atomic_write_file(path, out.str());
}

}  // namespace paramine
