#include "effdim/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "effdim/error.hpp"

namespace effdim {

McEstimate McEstimate::exact(double value, std::int64_t n, std::uint64_t seed) {
  McEstimate e;
  e.estimate = value;
  e.std_error = 0.0;
  e.n_samples = n;
  e.seed = seed;
  return e;
}

void RunningMoments::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
}

double RunningMoments::variance() const {
  return count_ < 2 ? 0.0 : std::max(m2_, 0.0) / static_cast<double>(count_ - 1);
}

double RunningMoments::std_error() const {
  return count_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

namespace mc {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform_open(Engine& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<RunningMoments> run_chunked_multi(std::int64_t n_samples, std::uint64_t seed,
                                              int threads, std::size_t width,
                                              const MultiChunkBody& body) {
  if (n_samples < 0) throw Error(ErrorCode::kInsufficientSamples, "negative sample count");
  const std::int64_t n_chunks = (n_samples + kChunkSize - 1) / kChunkSize;
  std::vector<std::vector<RunningMoments>> per_chunk(static_cast<std::size_t>(n_chunks),
                                                     std::vector<RunningMoments>(width));

  auto run_one = [&](std::int64_t k) {
    Engine rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    const std::int64_t begin = k * kChunkSize;
    const std::int64_t count = std::min(kChunkSize, n_samples - begin);
    body(rng, per_chunk[static_cast<std::size_t>(k)], begin, count);
  };

  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(n_chunks, 1)));
  if (workers <= 1) {
    for (std::int64_t k = 0; k < n_chunks; ++k) run_one(k);
  } else {
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::int64_t k = next++; k < n_chunks; k = next++) {
          try {
            run_one(k);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<RunningMoments> total(width);
  for (const auto& chunk : per_chunk) {
    for (std::size_t i = 0; i < width; ++i) total[i].merge(chunk[i]);
  }
  return total;
}

RunningMoments run_chunked(std::int64_t n_samples, std::uint64_t seed, int threads,
                           const ChunkBody& body) {
  return run_chunked_multi(n_samples, seed, threads, 1,
                           [&](Engine& rng, std::vector<RunningMoments>& acc, std::int64_t begin,
                               std::int64_t count) { body(rng, acc[0], begin, count); })[0];
}

McEstimate to_estimate(const RunningMoments& m, std::uint64_t seed) {
  McEstimate e;
  e.estimate = m.mean();
  e.std_error = m.std_error();
  e.n_samples = m.count();
  e.seed = seed;
  return e;
}

}  // namespace mc
}  // namespace effdim
