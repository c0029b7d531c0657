#include "paramine/window.hpp"

#include "paramine/util.hpp"

namespace paramine {

std::vector<ContextWindow> extract_windows(const std::string& doc_id,
                                           const std::vector<TokenizedSentence>& doc,
                                           const WindowConfig& cfg) {
  if (cfg.l_ctx < 0) throw ConfigError("l_ctx must be >= 0");
  std::vector<ContextWindow> out;
  for (size_t i = 0; i < doc.size(); ++i) {
    int len = static_cast<int>(doc[i].ids.size());
    if (len < cfg.min_sent_len || len > cfg.max_sent_len) continue;

    ContextWindow w;
    w.doc_id = doc_id;
    w.sent_index = static_cast<int>(i);
    w.target = doc[i];

    // left context: nearest sentences first, keep the suffix of at most l_ctx tokens
    std::vector<int> left;
    for (size_t j = i; j > 0 && static_cast<int>(left.size()) < cfg.l_ctx; --j) {
      const auto& ids = doc[j - 1].ids;
      for (size_t k = ids.size(); k > 0 && static_cast<int>(left.size()) < cfg.l_ctx; --k)
        left.push_back(ids[k - 1]);
    }
    w.left.assign(left.rbegin(), left.rend());

    for (size_t j = i + 1; j < doc.size() && static_cast<int>(w.right.size()) < cfg.l_ctx; ++j) {
      const auto& ids = doc[j].ids;
      for (size_t k = 0; k < ids.size() && static_cast<int>(w.right.size()) < cfg.l_ctx; ++k)
        w.right.push_back(ids[k]);
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace paramine
