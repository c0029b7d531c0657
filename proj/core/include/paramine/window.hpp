#pragma once

#include <string>
#include <vector>

namespace paramine {

struct TokenizedSentence {
  std::vector<std::string> tokens;
  std::vector<int> ids;  // same length as tokens once a vocabulary is applied
};

/// A target sentence with its truncated left/right context. Contexts keep the
/// side nearest the target: the suffix of the left context, the prefix of the
/// right context.
struct ContextWindow {
  std::string doc_id;
  int sent_index = 0;
  std::vector<int> left;
  TokenizedSentence target;
  std::vector<int> right;
};

struct WindowConfig {
  int l_ctx = 64;
  int min_sent_len = 3;
  int max_sent_len = 60;
};

/// One window per in-bounds sentence; boundary sentences get empty context on
/// the missing side. Deterministic and order-preserving.
std::vector<ContextWindow> extract_windows(const std::string& doc_id,
                                           const std::vector<TokenizedSentence>& doc,
                                           const WindowConfig& cfg);

}  // namespace paramine
