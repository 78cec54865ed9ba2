#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace effdim {

/// Result contract for every Monte Carlo quantity.
struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n_samples)
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> inner_samples;  // nested estimators only

  /// Exact values reported through the McEstimate contract (degenerate laws).
  static McEstimate exact(double value, std::int64_t n, std::uint64_t seed);
};

/// Streaming mean/variance (Welford) with the pairwise merge of Chan et al.
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 when fewer than two observations.
  double variance() const;
  double std_error() const;

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

namespace mc {

using Engine = std::mt19937_64;

/// Samples per chunk. Chunk k of a run always draws from stream k, so the
/// partition of work over threads cannot change any result.
inline constexpr std::int64_t kChunkSize = 8192;

/// Stream index reserved for auxiliary pools (e.g. inner mixture draws).
inline constexpr std::uint64_t kAuxStream = std::uint64_t{1} << 63;

/// Sub-seed for stream `stream` of master seed `master`: the SplitMix64
/// finalizer applied to master + (stream + 1) * 0x9E3779B97F4A7C15.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Uniform double in the open interval (0, 1) from the top 53 bits.
double uniform_open(Engine& rng);

/// Runs `body(engine, moments, begin, count)` over fixed-size chunks of
/// `n_samples`, spread over `threads` workers, and merges the per-chunk
/// moments in chunk order.
using ChunkBody = std::function<void(Engine&, RunningMoments&, std::int64_t, std::int64_t)>;
RunningMoments run_chunked(std::int64_t n_samples, std::uint64_t seed, int threads,
                           const ChunkBody& body);

/// Same as run_chunked for bodies that accumulate several moment streams at
/// once; `width` streams per chunk, merged stream by stream.
using MultiChunkBody =
    std::function<void(Engine&, std::vector<RunningMoments>&, std::int64_t, std::int64_t)>;
std::vector<RunningMoments> run_chunked_multi(std::int64_t n_samples, std::uint64_t seed,
                                              int threads, std::size_t width,
                                              const MultiChunkBody& body);

McEstimate to_estimate(const RunningMoments& m, std::uint64_t seed);

}  // namespace mc
}  // namespace effdim
