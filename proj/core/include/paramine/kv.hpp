#pragma once

#include "paramine/features.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace paramine {

/// Flat key=value text format: one pair per line, # comments and blank lines
/// skipped. Parse errors carry the 1-based line number.
std::vector<std::pair<std::string, std::string>> read_kv(const std::filesystem::path& path);
std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& text,
                                                          const std::string& origin);
void write_kv(const std::filesystem::path& path,
              const std::vector<std::pair<std::string, std::string>>& entries);

/// Shortest-round-trip decimal rendering of a double.
std::string format_double(double x);

RankingWeights read_weights_kv(const std::filesystem::path& path);
void write_weights_kv(const std::filesystem::path& path, const RankingWeights& w);

}  // namespace paramine
