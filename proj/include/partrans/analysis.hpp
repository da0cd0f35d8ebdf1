#pragma once

#include <cstdint>

#include "partrans/kgdata.hpp"

namespace partrans {

// Overlap statistics of the training hyperedges. For a training triple s, sigma(s) is the
// set of training triples with the same relation and rho(s) the set sharing its head or
// tail; both include s. Duplicate training lines count separately.
struct HypergraphStats {
  std::size_t n = 0;
  std::size_t sigma_hat = 0;  // max |sigma(s)|
  double sigma_bar = 0.0;     // mean |sigma(s)| over training triples
  std::size_t rho_hat = 0;    // max |rho(s)|
  double rho_bar = 0.0;       // mean |rho(s)|
  double sparsity = 0.0;      // min(sigma_hat, rho_hat) / n
};

struct MaxMean {
  std::size_t max = 0;
  double mean = 0.0;
};

MaxMean relation_stats(const KnowledgeGraph& graph);
MaxMean entity_stats(const KnowledgeGraph& graph);
double sparsity(const HypergraphStats& stats);
HypergraphStats hypergraph_stats(const KnowledgeGraph& graph);

// Lower bounds on the chance that p lock-free workers avoid each kind of collision:
//   distinct samples:   prod_{i=1}^{p-1} (1 - i/n)
//   no shared relation: prod_{i=1}^{p-1} (1 - i*sigma_hat/n), 0 unless p < n/sigma_hat + 1
//   no shared entity:   same with rho_hat
double prob_distinct_samples(std::size_t n, std::size_t p);
double prob_no_relation_collision(std::size_t n, std::size_t p, std::size_t sigma_hat);
double prob_no_entity_collision(std::size_t n, std::size_t p, std::size_t rho_hat);

struct CollisionProbabilities {
  std::size_t p = 1;
  double p_distinct = 1.0;
  double p_no_rel = 1.0;
  double p_no_ent = 1.0;
};

CollisionProbabilities collision_probabilities(const HypergraphStats& stats, std::size_t p);

struct CollisionSimResult {
  std::size_t p = 1;
  std::uint64_t trials = 0;
  double p_distinct = 0.0, p_no_rel = 0.0, p_no_ent = 0.0;
  double stderr_distinct = 0.0, stderr_no_rel = 0.0, stderr_no_ent = 0.0;
};

// Monte-Carlo: each trial draws p samples with the training sampler and checks whether
// their line indices are distinct, their relations are distinct, and their entity sets
// {h, t, corrupted} are pairwise disjoint. Trials are split into fixed batches with one
// stream each, so results do not depend on the OpenMP thread count.
CollisionSimResult simulate_collisions(const KnowledgeGraph& graph, std::size_t p,
                                       std::uint64_t trials, std::uint64_t seed);

}  // namespace partrans
