#include "paramine/text.hpp"

#include <cctype>

namespace paramine {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    if (is_terminator(text[i]) && (i + 1 == text.size() || is_space(text[i + 1]))) {
      auto piece = trim(text.substr(start, i + 1 - start));
      if (!piece.empty()) out.emplace_back(piece);
      start = i + 1;
    }
  }
  auto tail = trim(text.substr(start));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

std::vector<std::string> tokenize(std::string_view sentence, bool lowercase) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && is_space(sentence[i])) ++i;
    size_t j = i;
    while (j < sentence.size() && !is_space(sentence[j])) ++j;
    if (j == i) break;
    std::string_view word = sentence.substr(i, j - i);
    i = j;

    size_t lead = 0;
    while (lead < word.size() && is_punct(word[lead])) ++lead;
    if (lead == word.size()) {
      // pure punctuation: one token per character
      for (char c : word) out.emplace_back(1, c);
      continue;
    }
    size_t trail = 0;
    while (trail < word.size() - lead && is_punct(word[word.size() - 1 - trail])) ++trail;

    for (size_t k = 0; k < lead; ++k) out.emplace_back(1, word[k]);
    std::string body(word.substr(lead, word.size() - lead - trail));
    if (lowercase) {
      for (char& c : body) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    out.push_back(std::move(body));
    for (size_t k = word.size() - trail; k < word.size(); ++k) out.emplace_back(1, word[k]);
  }
  return out;
}

std::vector<std::string> split_documents(std::string_view text) {
  std::vector<std::string> docs;
  std::string current;
  size_t pos = 0;
  auto flush = [&] {
    auto piece = trim(current);
    if (!piece.empty()) docs.emplace_back(piece);
    current.clear();
  };
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line =
        nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    if (trim(line).empty()) {
      flush();
    } else {
      current.append(line);
      current += '\n';
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  flush();
  return docs;
}

}  // namespace paramine
