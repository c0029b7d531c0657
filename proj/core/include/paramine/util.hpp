#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace paramine {

// Error taxonomy; the CLI maps these onto exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingArtifactError : std::runtime_error {
  explicit MissingArtifactError(const std::string& path)
      : std::runtime_error("missing prerequisite artifact: " + path), path(path) {}
  std::string path;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

uint64_t fnv1a(std::string_view s);

/// Uniform integer in [0, n) without distribution objects, so the stream is
/// identical across standard library implementations.
uint64_t rand_below(Rng& rng, uint64_t n);

std::vector<size_t> shuffled_indices(size_t n, Rng& rng);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Callers keep determinism by writing results into
/// index-addressed slots.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

int resolve_threads(int threads);

std::string read_text_file(const std::filesystem::path& path);

/// Writes contents to a temp file in the target directory, then renames over
/// path so readers never observe a truncated artifact.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace paramine
