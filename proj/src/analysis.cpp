#include "partrans/analysis.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "partrans/sampling.hpp"

namespace partrans {

MaxMean relation_stats(const KnowledgeGraph& graph) {
  std::vector<std::size_t> count(graph.num_relations(), 0);
  for (const auto& t : graph.train()) ++count[t.relation];
  MaxMean out;
  long double weighted = 0.0L;
  for (auto c : count) {
    out.max = std::max(out.max, c);
    weighted += static_cast<long double>(c) * c;
  }
  // Every triple contributes its relation's frequency.
  if (graph.num_train() > 0) out.mean = static_cast<double>(weighted / graph.num_train());
  return out;
}

MaxMean entity_stats(const KnowledgeGraph& graph) {
  const auto& train = graph.train();
  std::vector<std::size_t> degree(graph.num_entities(), 0);
  std::unordered_map<std::uint64_t, std::size_t> pair_count;
  auto pair_key = [](EntityId a, EntityId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };
  for (const auto& t : train) {
    ++degree[t.head];
    if (t.tail != t.head) {
      ++degree[t.tail];
      ++pair_count[pair_key(t.head, t.tail)];
    }
  }

  MaxMean out;
  long double sum = 0.0L;
  for (const auto& t : train) {
    // |rho(s)| by inclusion-exclusion: lines touching h, plus lines touching t, minus lines
    // touching both.
    std::size_t rho = degree[t.head];
    if (t.tail != t.head) rho += degree[t.tail] - pair_count[pair_key(t.head, t.tail)];
    out.max = std::max(out.max, rho);
    sum += rho;
  }
  if (!train.empty()) out.mean = static_cast<double>(sum / train.size());
  return out;
}

double sparsity(const HypergraphStats& s) {
  if (s.n == 0) return 0.0;
  return static_cast<double>(std::min(s.sigma_hat, s.rho_hat)) / static_cast<double>(s.n);
}

HypergraphStats hypergraph_stats(const KnowledgeGraph& graph) {
  HypergraphStats s;
  s.n = graph.num_train();
  auto rel = relation_stats(graph);
  auto ent = entity_stats(graph);
  s.sigma_hat = rel.max;
  s.sigma_bar = rel.mean;
  s.rho_hat = ent.max;
  s.rho_bar = ent.mean;
  s.sparsity = sparsity(s);
  return s;
}

namespace {

// prod_{i=1}^{p-1} (1 - i*c/n), zero once any factor is nonpositive.
double falling_product(std::size_t n, std::size_t p, std::size_t c) {
  if (p <= 1) return 1.0;
  if (n == 0) return 0.0;
  const long double nn = n;
  const long double cc = c;
  if (static_cast<long double>(p - 1) * cc >= nn) return 0.0;

  if (p > 1000) {
    long double log_sum = 0.0L;
    for (std::size_t i = 1; i < p; ++i) log_sum += std::log1p(-static_cast<long double>(i) * cc / nn);
    return static_cast<double>(std::exp(log_sum));
  }
  long double prod = 1.0L;
  for (std::size_t i = 1; i < p; ++i) prod *= 1.0L - static_cast<long double>(i) * cc / nn;
  return static_cast<double>(prod);
}

}  // namespace

double prob_distinct_samples(std::size_t n, std::size_t p) { return falling_product(n, p, 1); }

double prob_no_relation_collision(std::size_t n, std::size_t p, std::size_t sigma_hat) {
  return falling_product(n, p, sigma_hat);
}

double prob_no_entity_collision(std::size_t n, std::size_t p, std::size_t rho_hat) {
  return falling_product(n, p, rho_hat);
}

CollisionProbabilities collision_probabilities(const HypergraphStats& stats, std::size_t p) {
  CollisionProbabilities c;
  c.p = p;
  c.p_distinct = prob_distinct_samples(stats.n, p);
  c.p_no_rel = prob_no_relation_collision(stats.n, p, stats.sigma_hat);
  c.p_no_ent = prob_no_entity_collision(stats.n, p, stats.rho_hat);
  return c;
}

CollisionSimResult simulate_collisions(const KnowledgeGraph& graph, std::size_t p,
                                       std::uint64_t trials, std::uint64_t seed) {
  constexpr std::uint64_t kBatch = 4096;
  CollisionSimResult res;
  res.p = p;
  res.trials = trials;
  if (trials == 0 || p == 0) return res;

  const auto batches = static_cast<std::int64_t>((trials + kBatch - 1) / kBatch);
  std::uint64_t distinct = 0, no_rel = 0, no_ent = 0;

#pragma omp parallel for schedule(static) reduction(+ : distinct, no_rel, no_ent)
  for (std::int64_t b = 0; b < batches; ++b) {
    WorkerRng rng(seed, static_cast<std::uint64_t>(b));
    const std::uint64_t begin = static_cast<std::uint64_t>(b) * kBatch;
    const std::uint64_t end = std::min(trials, begin + kBatch);
    std::vector<Sample> draw(p);
    std::vector<std::array<EntityId, 3>> ents(p);
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      for (std::size_t i = 0; i < p; ++i) {
        draw[i] = draw_sample(graph, rng);
        const auto& s = draw[i];
        EntityId corrupted = s.corrupted_side == Side::Head ? s.negative.head : s.negative.tail;
        ents[i] = {s.positive.head, s.positive.tail, corrupted};
      }
      bool all_distinct = true, rel_ok = true, ent_ok = true;
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
          if (draw[i].index == draw[j].index) all_distinct = false;
          if (draw[i].positive.relation == draw[j].positive.relation) rel_ok = false;
          for (auto a : ents[i])
            for (auto c : ents[j])
              if (a == c) ent_ok = false;
        }
      }
      distinct += all_distinct;
      no_rel += rel_ok;
      no_ent += ent_ok;
    }
  }

  const double t = static_cast<double>(trials);
  auto se = [t](double q) { return std::sqrt(q * (1.0 - q) / t); };
  res.p_distinct = static_cast<double>(distinct) / t;
  res.p_no_rel = static_cast<double>(no_rel) / t;
  res.p_no_ent = static_cast<double>(no_ent) / t;
  res.stderr_distinct = se(res.p_distinct);
  res.stderr_no_rel = se(res.p_no_rel);
  res.stderr_no_ent = se(res.p_no_ent);
  return res;
}

}  // namespace partrans
