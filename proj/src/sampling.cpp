#include "partrans/sampling.hpp"

#include "partrans/error.hpp"

namespace partrans {

namespace {

std::mt19937_64 make_engine(std::uint64_t base, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace

WorkerRng::WorkerRng(std::uint64_t base_seed, std::uint64_t worker_index)
    : base_seed_(base_seed), worker_index_(worker_index),
      engine_(make_engine(base_seed, worker_index)) {}

WorkerRng seed_rand(std::uint64_t worker_index, std::uint64_t base_seed) {
  return WorkerRng(base_seed, worker_index);
}

std::size_t sample_index(const KnowledgeGraph& graph, WorkerRng& rng) {
  return static_cast<std::size_t>(rng.below(graph.num_train()));
}

Triple sample_positive(const KnowledgeGraph& graph, WorkerRng& rng) {
  return graph.train()[sample_index(graph, rng)];
}

Sample corrupt(const Triple& pos, const KnowledgeGraph& graph, WorkerRng& rng, bool avoid_known) {
  const auto ne = graph.num_entities();
  if (ne < 2) throw Error("corruption needs at least two entities");

  const std::size_t max_tries = avoid_known ? 100 * ne : 1;
  for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
    Sample s;
    s.positive = pos;
    s.negative = pos;
    s.corrupted_side = rng.coin() ? Side::Head : Side::Tail;
    EntityId& slot = s.corrupted_side == Side::Head ? s.negative.head : s.negative.tail;
    // Uniform over the n_e - 1 entities other than the original.
    auto e = static_cast<EntityId>(rng.below(ne - 1));
    if (e >= slot) ++e;
    slot = e;
    if (!avoid_known || !graph.contains(s.negative)) return s;
  }
  throw Error("no unknown negative found after " + std::to_string(max_tries) + " attempts");
}

Sample draw_sample(const KnowledgeGraph& graph, WorkerRng& rng, bool avoid_known) {
  auto idx = sample_index(graph, rng);
  Sample s = corrupt(graph.train()[idx], graph, rng, avoid_known);
  s.index = idx;
  return s;
}

}  // namespace partrans
