#include "partrans/evaluator.hpp"

#include <omp.h>

#include "partrans/error.hpp"

namespace partrans {

namespace {

void check_store(const EmbeddingStore& store, const KnowledgeGraph& graph, ModelKind model) {
  if (store.entities.rows() != graph.num_entities() ||
      store.relations.rows() != graph.num_relations())
    throw Error("embedding store shape does not match the graph");
  if (store.relations.cols() != store.dim())
    throw Error("entity and relation dimensions differ");
  if (model.type == ModelType::TransH &&
      (store.hyperplanes.rows() != graph.num_relations() || store.hyperplanes.cols() != store.dim()))
    throw Error("TransH evaluation needs one hyperplane normal per relation");
}

double candidate_energy(const EmbeddingStore& store, ModelKind model, const Triple& t) {
  auto h = store.entities.row(t.head);
  auto r = store.relations.row(t.relation);
  auto tl = store.entities.row(t.tail);
  if (model.type == ModelType::TransH)
    return kernel::energy_transh(h, r, tl, store.hyperplanes.row(t.relation), model.sim);
  return kernel::energy_transe(h, r, tl, model.sim);
}

RankResult rank_unchecked(const EmbeddingStore& store, const KnowledgeGraph& graph,
                          ModelKind model, const Triple& triple, Side side) {
  RankResult res;
  res.triple = triple;
  res.side = side;
  const double truth = candidate_energy(store, model, triple);
  const auto ne = static_cast<EntityId>(graph.num_entities());
  Triple cand = triple;
  EntityId& slot = side == Side::Head ? cand.head : cand.tail;
  const EntityId correct = slot;
  for (EntityId e = 0; e < ne; ++e) {
    if (e == correct) continue;
    slot = e;
    if (candidate_energy(store, model, cand) < truth) {
      ++res.raw_rank;
      if (!graph.contains(cand)) ++res.filtered_rank;
    }
  }
  return res;
}

struct RankSums {
  std::uint64_t raw = 0, filtered = 0, hits_raw = 0, hits_filtered = 0, count = 0;

  void add(const RankResult& r) {
    raw += r.raw_rank;
    filtered += r.filtered_rank;
    hits_raw += r.raw_rank <= 10;
    hits_filtered += r.filtered_rank <= 10;
    ++count;
  }
};

EvalMetrics finish(const RankSums& s) {
  EvalMetrics m;
  m.count = s.count;
  const double c = static_cast<double>(s.count);
  m.mean_rank_raw = static_cast<double>(s.raw) / c;
  m.mean_rank_filtered = static_cast<double>(s.filtered) / c;
  m.hits10_raw = 100.0 * static_cast<double>(s.hits_raw) / c;
  m.hits10_filtered = 100.0 * static_cast<double>(s.hits_filtered) / c;
  return m;
}

}  // namespace

std::size_t rank_one(const EmbeddingStore& store, const KnowledgeGraph& graph, ModelKind model,
                     const Triple& triple, Side side, RankMode mode) {
  auto r = rank_triple(store, graph, model, triple, side);
  return mode == RankMode::Raw ? r.raw_rank : r.filtered_rank;
}

RankResult rank_triple(const EmbeddingStore& store, const KnowledgeGraph& graph, ModelKind model,
                       const Triple& triple, Side side) {
  check_store(store, graph, model);
  if (triple.head >= graph.num_entities() || triple.tail >= graph.num_entities() ||
      triple.relation >= graph.num_relations())
    throw Error("triple id out of range");
  return rank_unchecked(store, graph, model, triple, side);
}

EvalMetrics evaluate(const EmbeddingStore& store, const KnowledgeGraph& graph, ModelKind model,
                     std::size_t threads) {
  check_store(store, graph, model);
  const auto& test = graph.test();
  if (test.empty()) throw Error("test split is empty");

  const int nthreads = threads == 0 ? omp_get_max_threads() : static_cast<int>(threads);
  const auto n = static_cast<std::int64_t>(test.size());
  std::uint64_t raw = 0, filtered = 0, hits_raw = 0, hits_filtered = 0, count = 0;

#pragma omp parallel for num_threads(nthreads) schedule(dynamic, 16) \
    reduction(+ : raw, filtered, hits_raw, hits_filtered, count)
  for (std::int64_t i = 0; i < n; ++i) {
    RankSums local;
    local.add(rank_unchecked(store, graph, model, test[i], Side::Head));
    local.add(rank_unchecked(store, graph, model, test[i], Side::Tail));
    raw += local.raw;
    filtered += local.filtered;
    hits_raw += local.hits_raw;
    hits_filtered += local.hits_filtered;
    count += local.count;
  }

  RankSums total{raw, filtered, hits_raw, hits_filtered, count};
  return finish(total);
}

EvalMetrics evaluate_serial(const EmbeddingStore& store, const KnowledgeGraph& graph,
                            ModelKind model) {
  check_store(store, graph, model);
  if (graph.test().empty()) throw Error("test split is empty");
  RankSums sums;
  for (const auto& t : graph.test()) {
    sums.add(rank_unchecked(store, graph, model, t, Side::Head));
    sums.add(rank_unchecked(store, graph, model, t, Side::Tail));
  }
  return finish(sums);
}

}  // namespace partrans
