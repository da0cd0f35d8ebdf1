#pragma once

#include <cstddef>

#include "partrans/kgdata.hpp"
#include "partrans/models.hpp"
#include "partrans/sampling.hpp"
#include "partrans/store.hpp"

namespace partrans {

enum class RankMode { Raw, Filter };

struct RankResult {
  Triple triple;
  Side side = Side::Tail;
  std::size_t raw_rank = 1;
  std::size_t filtered_rank = 1;
};

struct EvalMetrics {
  double mean_rank_raw = 0.0;
  double mean_rank_filtered = 0.0;
  double hits10_raw = 0.0;  // percent
  double hits10_filtered = 0.0;
  std::size_t count = 0;  // predictions, two per test triple

  friend bool operator==(const EvalMetrics&, const EvalMetrics&) = default;
};

// Rank of the true entity when every entity is substituted into `side`:
// 1 + the number of candidates scoring strictly better. Filter mode skips candidates
// that form a known triple.
std::size_t rank_one(const EmbeddingStore& store, const KnowledgeGraph& graph, ModelKind model,
                     const Triple& triple, Side side, RankMode mode);

// Raw and filtered ranks in one pass over the candidates.
RankResult rank_triple(const EmbeddingStore& store, const KnowledgeGraph& graph, ModelKind model,
                       const Triple& triple, Side side);

// Head and tail prediction for every test triple, parallel over test triples.
// threads == 0 uses the OpenMP default. Rank sums are integers, so the result is
// identical for any thread count.
EvalMetrics evaluate(const EmbeddingStore& store, const KnowledgeGraph& graph, ModelKind model,
                     std::size_t threads = 0);

// Plain loop reference for evaluate().
EvalMetrics evaluate_serial(const EmbeddingStore& store, const KnowledgeGraph& graph,
                            ModelKind model);

}  // namespace partrans
