#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "partrans/kgdata.hpp"
#include "partrans/models.hpp"
#include "partrans/sampling.hpp"
#include "partrans/store.hpp"

namespace partrans {

enum class Optimizer { SGD, AdaGrad };

// When entity vectors are renormalized to unit length.
//   SampleEntities: the entities of the current sample, before its gradient is taken.
//   AllPerEpoch:    every entity, at the start of each of a worker's epochs.
enum class NormPolicy { SampleEntities, AllPerEpoch };

Optimizer parse_optimizer(const std::string& name);
NormPolicy parse_norm_policy(const std::string& name);
std::string to_string(Optimizer o);
std::string to_string(NormPolicy n);

struct TrainConfig {
  ModelKind model;
  std::size_t dim = 20;
  double margin = 1.0;
  double rate = 0.01;  // eta for SGD, eta* for AdaGrad
  std::size_t epochs = 1000;
  std::size_t threads = 1;
  Optimizer optimizer = Optimizer::SGD;
  std::uint64_t seed = 1;
  NormPolicy norm_policy = NormPolicy::SampleEntities;
  bool avoid_known_negatives = false;
  bool pin_threads = false;

  // Throws Error when any field is out of range.
  void validate() const;
  // Epochs run by each worker: ceil(epochs / threads).
  std::size_t epochs_per_worker() const noexcept { return (epochs + threads - 1) / threads; }
};

// Per-element sums of squared gradients, same shapes as the store.
struct AdaGradState {
  static constexpr double kEpsilon = 1e-8;
  Matrix entities;
  Matrix relations;
  Matrix hyperplanes;
};

AdaGradState init_adagrad(const EmbeddingStore& store);

struct TrainReport {
  double total_seconds = 0.0;
  std::vector<double> epoch_seconds;  // worker 0's epochs
  std::vector<double> loss_curve;     // mean hinge over worker 0's samples, per epoch
  TrainConfig config;
  std::vector<std::uint64_t> iterations_per_worker;
  std::vector<double> worker_seconds;  // wall time until each worker finished its quota
  bool pinned = false;
  std::string note;

  std::uint64_t total_iterations() const noexcept;
};

struct TrainResult {
  EmbeddingStore store;
  TrainReport report;
};

// Optional instrumentation; before_iteration runs on the worker's own thread.
struct WorkerHooks {
  std::function<void(std::size_t worker)> before_iteration;
};

// Uniform(-6/sqrt(d), 6/sqrt(d)) initialization; relation vectors and hyperplane normals
// are normalized once. Deterministic in config.seed.
EmbeddingStore init_store(const TrainConfig& config, const KnowledgeGraph& graph);

// One SGD step on a sample; returns the hinge value before the update. The store is not
// touched when the hinge is inactive. Throws NumericError on non-finite deltas.
double sgd_iteration(EmbeddingStore& store, const Sample& sample, const TrainConfig& config);

// One AdaGrad step: per element g, acc += g^2, x -= rate * g / sqrt(acc + eps).
double adagrad_iteration(EmbeddingStore& store, AdaGradState& state, const Sample& sample,
                         const TrainConfig& config);

// Lock-free parallel training: config.threads workers share one store and each runs
// epochs_per_worker() epochs of num_train() iterations with its own random stream.
TrainResult train(const KnowledgeGraph& graph, const TrainConfig& config,
                  const WorkerHooks& hooks = {});

// Single-threaded reference with plain memory access. Runs config.epochs epochs on
// worker 0's stream, so it matches train() with threads == 1 bit for bit.
TrainResult train_serial(const KnowledgeGraph& graph, const TrainConfig& config);

}  // namespace partrans
