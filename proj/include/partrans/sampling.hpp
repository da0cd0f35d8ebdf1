#pragma once

#include <cstdint>
#include <random>

#include "partrans/kgdata.hpp"

namespace partrans {

// Private random stream of one training worker.
class WorkerRng {
 public:
  WorkerRng(std::uint64_t base_seed, std::uint64_t worker_index);

  std::uint64_t base_seed() const noexcept { return base_seed_; }
  std::uint64_t worker_index() const noexcept { return worker_index_; }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }
  bool coin() { return (engine_() >> 63) != 0; }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t base_seed_;
  std::uint64_t worker_index_;
  std::mt19937_64 engine_;
};

// Distinct worker indices get distinct streams for the same base seed.
WorkerRng seed_rand(std::uint64_t worker_index, std::uint64_t base_seed);

enum class Side { Head, Tail };

struct Sample {
  Triple positive;
  Triple negative;
  Side corrupted_side = Side::Head;
  // Training line the positive was drawn from.
  std::size_t index = 0;
};

// Uniform over training lines (duplicates weigh more).
std::size_t sample_index(const KnowledgeGraph& graph, WorkerRng& rng);
Triple sample_positive(const KnowledgeGraph& graph, WorkerRng& rng);

// Replaces head or tail (fair coin) with a different uniformly drawn entity. With
// avoid_known, redraws until the negative is not a known triple, giving up with Error
// after 100 * n_e attempts.
Sample corrupt(const Triple& pos, const KnowledgeGraph& graph, WorkerRng& rng,
               bool avoid_known = false);

// sample_index followed by corrupt.
Sample draw_sample(const KnowledgeGraph& graph, WorkerRng& rng, bool avoid_known = false);

}  // namespace partrans
