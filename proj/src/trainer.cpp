#include "partrans/trainer.hpp"

#include <omp.h>
#include <sched.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "partrans/error.hpp"

namespace partrans {

Optimizer parse_optimizer(const std::string& name) {
  if (name == "sgd" || name == "SGD") return Optimizer::SGD;
  if (name == "adagrad" || name == "AdaGrad") return Optimizer::AdaGrad;
  throw Error("unknown optimizer '" + name + "' (expected sgd or adagrad)");
}

NormPolicy parse_norm_policy(const std::string& name) {
  if (name == "sample") return NormPolicy::SampleEntities;
  if (name == "epoch") return NormPolicy::AllPerEpoch;
  throw Error("unknown normalization policy '" + name + "' (expected sample or epoch)");
}

std::string to_string(Optimizer o) { return o == Optimizer::SGD ? "sgd" : "adagrad"; }
std::string to_string(NormPolicy n) {
  return n == NormPolicy::SampleEntities ? "sample" : "epoch";
}

void TrainConfig::validate() const {
  if (dim < 1) throw Error("dimension must be >= 1");
  if (threads < 1) throw Error("thread count must be >= 1");
  if (epochs < 1) throw Error("epoch count must be >= 1");
  if (!(margin > 0.0)) throw Error("margin must be positive");
  if (!(rate > 0.0)) throw Error("learning rate must be positive");
}

std::uint64_t TrainReport::total_iterations() const noexcept {
  return std::accumulate(iterations_per_worker.begin(), iterations_per_worker.end(),
                         std::uint64_t{0});
}

AdaGradState init_adagrad(const EmbeddingStore& store) {
  AdaGradState s;
  s.entities = Matrix(store.entities.rows(), store.entities.cols());
  s.relations = Matrix(store.relations.rows(), store.relations.cols());
  if (store.has_hyperplanes())
    s.hyperplanes = Matrix(store.hyperplanes.rows(), store.hyperplanes.cols());
  return s;
}

EmbeddingStore init_store(const TrainConfig& config, const KnowledgeGraph& graph) {
  config.validate();
  const auto d = config.dim;
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32), 0x1a17u};
  std::mt19937_64 gen(seq);
  const double bound = 6.0 / std::sqrt(static_cast<double>(d));
  std::uniform_real_distribution<double> unif(-bound, bound);

  EmbeddingStore store;
  store.entities = Matrix(graph.num_entities(), d);
  store.relations = Matrix(graph.num_relations(), d);
  for (double& x : store.entities.data()) x = unif(gen);
  for (double& x : store.relations.data()) x = unif(gen);
  for (std::size_t i = 0; i < store.relations.rows(); ++i)
    normalize_in_place(store.relations.row(i));

  if (config.model.type == ModelType::TransH) {
    store.hyperplanes = Matrix(graph.num_relations(), d);
    for (double& x : store.hyperplanes.data()) x = unif(gen);
    for (std::size_t i = 0; i < store.hyperplanes.rows(); ++i)
      normalize_in_place(store.hyperplanes.row(i));
  }
  return store;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Per-worker buffers, reused across iterations.
struct Scratch {
  std::vector<double> h, r, t, hn, tn, w;
  GradientBundle bundle;
  // Merged entity deltas: rows of h, t, h', t' with coinciding rows summed.
  std::array<std::size_t, 4> ent_rows{};
  std::array<std::vector<double>, 4> ent_delta;
  std::size_t ent_count = 0;
  std::vector<double> rel_delta;

  explicit Scratch(std::size_t d) {
    for (auto* v : {&h, &r, &t, &hn, &tn, &w, &rel_delta}) v->resize(d);
    for (auto& v : ent_delta) v.resize(d);
  }
};

template <class A>
void load_row(const Matrix& m, std::size_t i, std::vector<double>& out) {
  auto row = m.row(i);
  for (std::size_t k = 0; k < row.size(); ++k) out[k] = A::load(row[k]);
}

template <class A>
void normalize_row(Matrix& m, std::size_t i) {
  auto row = m.row(i);
  double n = 0.0;
  for (double& x : row) {
    double v = A::load(x);
    n += v * v;
  }
  n = std::sqrt(n);
  if (!(n > 0.0)) return;
  for (double& x : row) A::store(x, A::load(x) / n);
}

void merge_entity(Scratch& sc, std::size_t row, const std::vector<double>& delta) {
  for (std::size_t j = 0; j < sc.ent_count; ++j) {
    if (sc.ent_rows[j] == row) {
      auto& acc = sc.ent_delta[j];
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += delta[k];
      return;
    }
  }
  sc.ent_rows[sc.ent_count] = row;
  std::copy(delta.begin(), delta.end(), sc.ent_delta[sc.ent_count].begin());
  ++sc.ent_count;
}

[[noreturn]] void non_finite(const Sample& s) {
  throw NumericError("non-finite update for triple (" + std::to_string(s.positive.head) + ", " +
                     std::to_string(s.positive.relation) + ", " +
                     std::to_string(s.positive.tail) +
                     "); lower the learning rate or check the margin");
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// x += delta, or the AdaGrad step when acc is given. delta holds -rate * gradient with
// rate 1 in the AdaGrad case.
template <class A>
void apply_row(std::span<double> row, const std::vector<double>& delta, std::span<double> acc,
               double rate, const Sample& sample) {
  if (acc.empty()) {
    for (std::size_t k = 0; k < row.size(); ++k) A::store(row[k], A::load(row[k]) + delta[k]);
    return;
  }
  for (std::size_t k = 0; k < row.size(); ++k) {
    const double g = -delta[k];
    if (g == 0.0) continue;
    const double g2 = g * g;
    const double total = A::fetch_add(acc[k], g2) + g2;
    const double step = rate * g / std::sqrt(total + AdaGradState::kEpsilon);
    if (!std::isfinite(step)) non_finite(sample);
    A::store(row[k], A::load(row[k]) - step);
  }
}

template <class A>
double iterate(EmbeddingStore& store, AdaGradState* ada, const Sample& s,
               const TrainConfig& cfg, Scratch& sc) {
  const auto& pos = s.positive;
  const auto& neg = s.negative;
  const bool transh = cfg.model.type == ModelType::TransH;

  if (cfg.norm_policy == NormPolicy::SampleEntities) {
    normalize_row<A>(store.entities, pos.head);
    normalize_row<A>(store.entities, pos.tail);
    normalize_row<A>(store.entities,
                     s.corrupted_side == Side::Head ? neg.head : neg.tail);
  }

  load_row<A>(store.entities, pos.head, sc.h);
  load_row<A>(store.relations, pos.relation, sc.r);
  load_row<A>(store.entities, pos.tail, sc.t);
  load_row<A>(store.entities, neg.head, sc.hn);
  load_row<A>(store.entities, neg.tail, sc.tn);
  if (transh) load_row<A>(store.hyperplanes, pos.relation, sc.w);

  // AdaGrad wants the raw gradient, so take the bundle at rate 1.
  const double bundle_rate = ada ? 1.0 : cfg.rate;
  SampleVectors v{sc.h, sc.r, sc.t, sc.hn, sc.r, sc.tn, {}};
  if (transh) {
    v.w = sc.w;
    kernel::grad_transh(v, cfg.model.sim, cfg.margin, bundle_rate, sc.bundle);
  } else {
    kernel::grad_transe(v, cfg.model.sim, cfg.margin, bundle_rate, sc.bundle);
  }
  const auto& b = sc.bundle;
  if (!b.active) return 0.0;

  for (const auto* d : {&b.d_h, &b.d_t, &b.d_r, &b.d_hneg, &b.d_tneg, &b.d_rneg, &b.d_wr})
    if (!all_finite(*d)) non_finite(s);

  sc.ent_count = 0;
  merge_entity(sc, pos.head, b.d_h);
  merge_entity(sc, pos.tail, b.d_t);
  merge_entity(sc, neg.head, b.d_hneg);
  merge_entity(sc, neg.tail, b.d_tneg);
  for (std::size_t k = 0; k < sc.rel_delta.size(); ++k) sc.rel_delta[k] = b.d_r[k] + b.d_rneg[k];

  for (std::size_t j = 0; j < sc.ent_count; ++j) {
    auto row = sc.ent_rows[j];
    apply_row<A>(store.entities.row(row), sc.ent_delta[j],
                 ada ? ada->entities.row(row) : std::span<double>{}, cfg.rate, s);
  }
  apply_row<A>(store.relations.row(pos.relation), sc.rel_delta,
               ada ? ada->relations.row(pos.relation) : std::span<double>{}, cfg.rate, s);
  if (transh) {
    apply_row<A>(store.hyperplanes.row(pos.relation), b.d_wr,
                 ada ? ada->hyperplanes.row(pos.relation) : std::span<double>{}, cfg.rate, s);
    normalize_row<A>(store.hyperplanes, pos.relation);
  }
  return b.hinge;
}

void check_compatible(const EmbeddingStore& store, const Sample& s, const TrainConfig& cfg) {
  cfg.validate();
  if (store.dim() != cfg.dim) throw Error("store dimension does not match config");
  for (auto e : {s.positive.head, s.positive.tail, s.negative.head, s.negative.tail})
    if (e >= store.entities.rows()) throw Error("entity id out of range for store");
  if (s.positive.relation >= store.relations.rows())
    throw Error("relation id out of range for store");
  if (cfg.model.type == ModelType::TransH && !store.has_hyperplanes())
    throw Error("TransH needs hyperplane normals in the store");
}

// Pins the calling thread to one logical CPU and restores the old mask on destruction.
class ScopedPin {
 public:
  ScopedPin(bool enabled, std::size_t worker) {
    if (!enabled) return;
    if (sched_getaffinity(0, sizeof(saved_), &saved_) != 0) return;
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    cpu_set_t set;
    CPU_ZERO(&set);
    CPU_SET(static_cast<int>(worker % hw), &set);
    ok_ = sched_setaffinity(0, sizeof(set), &set) == 0;
    restore_ = true;
  }
  ~ScopedPin() {
    if (restore_) sched_setaffinity(0, sizeof(saved_), &saved_);
  }
  ScopedPin(const ScopedPin&) = delete;
  ScopedPin& operator=(const ScopedPin&) = delete;
  bool ok() const noexcept { return ok_; }

 private:
  cpu_set_t saved_{};
  bool restore_ = false;
  bool ok_ = false;
};

}  // namespace

double sgd_iteration(EmbeddingStore& store, const Sample& sample, const TrainConfig& config) {
  check_compatible(store, sample, config);
  Scratch sc(config.dim);
  return iterate<PlainAccess>(store, nullptr, sample, config, sc);
}

double adagrad_iteration(EmbeddingStore& store, AdaGradState& state, const Sample& sample,
                         const TrainConfig& config) {
  check_compatible(store, sample, config);
  if (state.entities.rows() != store.entities.rows() ||
      state.relations.rows() != store.relations.rows())
    throw Error("AdaGrad state does not match store");
  Scratch sc(config.dim);
  return iterate<PlainAccess>(store, &state, sample, config, sc);
}

TrainResult train_serial(const KnowledgeGraph& graph, const TrainConfig& config) {
  config.validate();
  if (graph.num_train() == 0) throw Error("empty training split");

  TrainResult res;
  res.report.config = config;
  res.store = init_store(config, graph);
  AdaGradState ada;
  AdaGradState* ada_ptr = nullptr;
  if (config.optimizer == Optimizer::AdaGrad) {
    ada = init_adagrad(res.store);
    ada_ptr = &ada;
  }

  WorkerRng rng = seed_rand(0, config.seed);
  Scratch sc(config.dim);
  const std::size_t n = graph.num_train();
  std::uint64_t iters = 0;

  const auto t0 = Clock::now();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto te = Clock::now();
    if (config.norm_policy == NormPolicy::AllPerEpoch)
      for (std::size_t i = 0; i < res.store.entities.rows(); ++i)
        normalize_row<PlainAccess>(res.store.entities, i);
    double loss = 0.0;
    for (std::size_t it = 0; it < n; ++it) {
      Sample s = draw_sample(graph, rng, config.avoid_known_negatives);
      loss += iterate<PlainAccess>(res.store, ada_ptr, s, config, sc);
    }
    iters += n;
    res.report.epoch_seconds.push_back(seconds_since(te));
    res.report.loss_curve.push_back(loss / static_cast<double>(n));
  }
  res.report.total_seconds = seconds_since(t0);
  res.report.iterations_per_worker = {iters};
  res.report.worker_seconds = {res.report.total_seconds};
  return res;
}

TrainResult train(const KnowledgeGraph& graph, const TrainConfig& config,
                  const WorkerHooks& hooks) {
  config.validate();
  if (graph.num_train() == 0) throw Error("empty training split");

  TrainResult res;
  auto& report = res.report;
  report.config = config;
  res.store = init_store(config, graph);
  AdaGradState ada;
  AdaGradState* ada_ptr = nullptr;
  if (config.optimizer == Optimizer::AdaGrad) {
    ada = init_adagrad(res.store);
    ada_ptr = &ada;
  }

  const std::size_t p = config.threads;
  const std::size_t n = graph.num_train();
  const std::size_t epochs = config.epochs_per_worker();
  EmbeddingStore& store = res.store;

  report.iterations_per_worker.assign(p, 0);
  report.worker_seconds.assign(p, 0.0);
  std::vector<char> pinned(p, 0);

  std::atomic<bool> abort{false};
  std::atomic<bool> error_claimed{false};
  std::exception_ptr error;
  std::size_t error_worker = 0;
  std::size_t team_size = 0;

  const int saved_dynamic = omp_get_dynamic();
  omp_set_dynamic(0);
  const auto t0 = Clock::now();

#pragma omp parallel num_threads(static_cast<int>(p))
  {
    const auto w = static_cast<std::size_t>(omp_get_thread_num());
    if (w == 0) team_size = static_cast<std::size_t>(omp_get_num_threads());
    ScopedPin pin(config.pin_threads, w);
    pinned[w] = pin.ok();
    std::uint64_t iters = 0;
    try {
      WorkerRng rng = seed_rand(w, config.seed);
      Scratch sc(config.dim);
      for (std::size_t epoch = 0; epoch < epochs && !abort.load(std::memory_order_relaxed);
           ++epoch) {
        const auto te = Clock::now();
        if (config.norm_policy == NormPolicy::AllPerEpoch)
          for (std::size_t i = 0; i < store.entities.rows(); ++i)
            normalize_row<SharedAccess>(store.entities, i);
        double loss = 0.0;
        for (std::size_t it = 0; it < n; ++it) {
          if (abort.load(std::memory_order_relaxed)) break;
          if (hooks.before_iteration) hooks.before_iteration(w);
          Sample s = draw_sample(graph, rng, config.avoid_known_negatives);
          loss += iterate<SharedAccess>(store, ada_ptr, s, config, sc);
          ++iters;
        }
        if (w == 0) {
          report.epoch_seconds.push_back(seconds_since(te));
          report.loss_curve.push_back(loss / static_cast<double>(n));
        }
      }
    } catch (...) {
      bool expected = false;
      if (error_claimed.compare_exchange_strong(expected, true)) {
        error = std::current_exception();
        error_worker = w;
      }
      abort.store(true, std::memory_order_relaxed);
    }
    report.iterations_per_worker[w] = iters;
    report.worker_seconds[w] = seconds_since(t0);
  }

  report.total_seconds = seconds_since(t0);
  omp_set_dynamic(saved_dynamic);

  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const NumericError& e) {
      throw NumericError("worker " + std::to_string(error_worker) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error("worker " + std::to_string(error_worker) + " failed: " + e.what());
    }
  }
  if (team_size != p)
    throw Error("OpenMP provided " + std::to_string(team_size) + " threads, requested " +
                std::to_string(p));

  if (config.pin_threads) {
    report.pinned = std::all_of(pinned.begin(), pinned.end(), [](char c) { return c != 0; });
    if (!report.pinned) report.note = "thread pinning unavailable; workers ran unpinned";
  }
  return res;
}

}  // namespace partrans
