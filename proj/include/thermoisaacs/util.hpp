#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace thermoisaacs {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// FNV-1a over raw bytes; used for problem-file digests in run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::string& bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::string iso8601_utc_now();

// Splits one CSV record on commas. No quoting support; the formats written by
// this project never need it.
std::vector<std::string> split_csv_line(const std::string& line);

// Deterministic xorshift-based generator. std::mt19937_64 would also do, but
// the distributions on top of it are not pinned across standard libraries and
// several outputs here must be byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next() {
    std::uint64_t x = state_;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    state_ = x;
    return x;
  }

  // Uniform in [0, 1).
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) { return std::size_t(next() % n); }

 private:
  std::uint64_t state_;
};

// Runs fn(chunk_index, begin, end) over a static partition of [0, n).
// Partitioning depends only on (n, threads), so any reduction folded in chunk
// order is deterministic regardless of scheduling.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(int, std::size_t, std::size_t)>& fn);

// Thread count resolution: explicit request > THERMOISAACS_THREADS > machine
// parallelism. The resolved count never changes computed values, only how
// sweep rows are partitioned.
int resolve_threads(int requested);

}  // namespace thermoisaacs
