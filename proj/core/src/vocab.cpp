#include "paramine/vocab.hpp"

#include "paramine/util.hpp"

#include <algorithm>

namespace paramine {

const std::array<std::string, Vocabulary::kNumSpecials>& Vocabulary::special_tokens() {
  static const std::array<std::string, kNumSpecials> specials = {
      "<pad>", "<bos>", "<eos>", "<sep>", "<unk>",
      "<obj:l2r>", "<obj:r2l>", "<obj:bwdl>", "<obj:bwdr>", "<obj:para>"};
  return specials;
}

Vocabulary::Vocabulary() {
  id_to_token_.assign(special_tokens().begin(), special_tokens().end());
  for (int i = 0; i < kNumSpecials; ++i) token_to_id_[id_to_token_[i]] = i;
}

Vocabulary::Vocabulary(std::vector<std::string> id_to_token) : id_to_token_(std::move(id_to_token)) {
  if (id_to_token_.size() < static_cast<size_t>(kNumSpecials))
    throw FormatError("vocabulary smaller than the special block");
  for (int i = 0; i < kNumSpecials; ++i) {
    if (id_to_token_[i] != special_tokens()[i])
      throw FormatError("vocabulary special mismatch at id " + std::to_string(i) + ": " +
                        id_to_token_[i]);
  }
  for (size_t i = 0; i < id_to_token_.size(); ++i) {
    auto [it, inserted] = token_to_id_.emplace(id_to_token_[i], static_cast<int>(i));
    if (!inserted) throw FormatError("duplicate vocabulary token: " + id_to_token_[i]);
  }
}

int Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw FormatError("token id out of range: " + std::to_string(id));
  return id_to_token_[static_cast<size_t>(id)];
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) != 0;
}

std::vector<int> Vocabulary::to_ids(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::to_tokens(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

Vocabulary build_vocab(const std::map<std::string, long>& counts, int min_count, int max_size) {
  if (min_count < 1) throw ConfigError("vocab min_count must be >= 1");
  if (max_size <= Vocabulary::kNumSpecials)
    throw ConfigError("vocab max_size must exceed the special block");

  const auto& specials = Vocabulary::special_tokens();
  std::vector<std::pair<std::string, long>> kept;
  for (const auto& [token, count] : counts) {
    if (count < min_count) continue;
    if (std::find(specials.begin(), specials.end(), token) != specials.end()) continue;
    kept.emplace_back(token, count);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> id_to_token(Vocabulary::special_tokens().begin(),
                                       Vocabulary::special_tokens().end());
  for (const auto& [token, count] : kept) {
    if (id_to_token.size() >= static_cast<size_t>(max_size)) break;
    id_to_token.push_back(token);
  }
  return Vocabulary(std::move(id_to_token));
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences, int min_count,
                       int max_size) {
  std::map<std::string, long> counts;
  for (const auto& sent : sentences)
    for (const auto& tok : sent) ++counts[tok];
  return build_vocab(counts, min_count, max_size);
}

}  // namespace paramine
