#include "paramine/kv.hpp"

#include "paramine/util.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace paramine {

std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& text,
                                                          const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  auto strip = [](const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = strip(t.substr(0, eq));
    std::string value = strip(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

std::vector<std::pair<std::string, std::string>> read_kv(const std::filesystem::path& path) {
  return parse_kv(read_text_file(path), path.string());
}

void write_kv(const std::filesystem::path& path,
              const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  for (const auto& [k, v] : entries) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

const char* kWeightKeys[8] = {"ctx_l2r", "ctx_r2l", "ctx_bwdl", "ctx_bwdr",
                              "jaccard", "posshift", "gen12",    "gen21"};

}  // namespace

RankingWeights read_weights_kv(const std::filesystem::path& path) {
  std::map<std::string, std::string> entries;
  for (const auto& [k, v] : read_kv(path)) entries[k] = v;
  RankingWeights w;
  for (size_t i = 0; i < 8; ++i) {
    auto it = entries.find(kWeightKeys[i]);
    if (it == entries.end())
      throw FormatError(path.string() + ": missing weight " + kWeightKeys[i]);
    try {
      size_t used = 0;
      w.w[i] = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": bad number for " + kWeightKeys[i]);
    }
    if (!std::isfinite(w.w[i]))
      throw FormatError(path.string() + ": non-finite weight " + kWeightKeys[i]);
  }
  return w;
}

void write_weights_kv(const std::filesystem::path& path, const RankingWeights& w) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (size_t i = 0; i < 8; ++i) entries.emplace_back(kWeightKeys[i], format_double(w.w[i]));
  write_kv(path, entries);
}

}  // namespace paramine
