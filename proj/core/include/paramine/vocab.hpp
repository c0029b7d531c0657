#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace paramine {

/// Token inventory with a fixed block of special ids at the front. Ids and
/// tokens are a bijection; unknown lookups resolve to kUnk.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kSep = 3;
  static constexpr int kUnk = 4;
  static constexpr int kObjL2R = 5;
  static constexpr int kObjR2L = 6;
  static constexpr int kObjBwdL = 7;
  static constexpr int kObjBwdR = 8;
  static constexpr int kObjPara = 9;
  static constexpr int kNumSpecials = 10;

  static const std::array<std::string, kNumSpecials>& special_tokens();

  Vocabulary();
  explicit Vocabulary(std::vector<std::string> id_to_token);

  int id(std::string_view token) const;  // kUnk when absent
  const std::string& token(int id) const;
  bool contains(std::string_view token) const;
  int size() const { return static_cast<int>(id_to_token_.size()); }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  std::vector<int> to_ids(const std::vector<std::string>& tokens) const;
  std::vector<std::string> to_tokens(const std::vector<int>& ids) const;

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

/// Specials first, then tokens with count >= min_count ordered by
/// (count desc, token asc), truncated so the vocabulary holds at most
/// max_size entries. min_count >= 1, max_size > 10.
Vocabulary build_vocab(const std::map<std::string, long>& counts, int min_count, int max_size);
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences, int min_count,
                       int max_size);

}  // namespace paramine
