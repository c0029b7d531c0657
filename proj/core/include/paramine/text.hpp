#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace paramine {

/// Splits raw text into sentences on ., ! or ? followed by whitespace (or end
/// of input). The terminator stays with its sentence; empty pieces are
/// dropped.
std::vector<std::string> segment_sentences(std::string_view text);

/// Whitespace split, then leading/trailing ASCII punctuation is detached as
/// single-character tokens. Interior punctuation (don't, 3.5) is kept.
std::vector<std::string> tokenize(std::string_view sentence, bool lowercase);

/// Splits a multi-document file on blank lines.
std::vector<std::string> split_documents(std::string_view text);

}  // namespace paramine
