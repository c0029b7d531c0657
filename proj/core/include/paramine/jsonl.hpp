#pragma once

#include "paramine/pairs.hpp"
#include "paramine/vocab.hpp"
#include "paramine/window.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace paramine {

/// Windows are stored as token strings; ids are filled back in through the
/// vocabulary on read (UNK for out-of-vocabulary tokens).
void write_windows_jsonl(const std::filesystem::path& path,
                         const std::vector<ContextWindow>& windows, const Vocabulary& v);
std::vector<ContextWindow> read_windows_jsonl(const std::filesystem::path& path,
                                              const Vocabulary& v);

/// Token counts over every field of a windows file, for vocabulary building.
std::map<std::string, long> count_window_tokens(const std::filesystem::path& path);

void write_pool_jsonl(const std::filesystem::path& path, const std::vector<PoolEntry>& pool);
std::vector<PoolEntry> read_pool_jsonl(const std::filesystem::path& path);

void write_scored_jsonl(const std::filesystem::path& path,
                        const std::vector<ScoredPair>& pairs);
std::vector<ScoredPair> read_scored_jsonl(const std::filesystem::path& path);

struct RawTriple {
  Tokens anchor;
  Tokens better;
  Tokens worse;
};

/// Preference triples {a, b_plus, b_minus}; tied triples (b_plus == b_minus)
/// are dropped on read.
std::vector<RawTriple> read_triples_jsonl(const std::filesystem::path& path);
void write_triples_jsonl(const std::filesystem::path& path,
                         const std::vector<RawTriple>& triples);

}  // namespace paramine
