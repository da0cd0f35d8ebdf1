#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "partrans/evaluator.hpp"
#include "partrans/trainer.hpp"

namespace partrans {

struct BenchRow {
  std::size_t p = 1;
  double total_seconds = 0.0;  // mean over repeats
  double epoch_seconds = 0.0;  // mean per-epoch time of worker 0
  double speedup = 1.0;        // t(p = 1) / t(p)
  std::optional<EvalMetrics> metrics;
  std::vector<double> loss_curve;  // from the last repeat

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  bool complete = true;
  std::string error;  // set when a training run failed and the sweep stopped early
  std::string note;

  friend bool operator==(const BenchResult&, const BenchResult&) = default;
};

struct SweepOptions {
  std::size_t repeats = 1;
  bool evaluate = true;  // needs a nonempty test split
  std::size_t eval_threads = 0;
  std::function<void(const BenchRow&)> on_row;
};

// Trains once per thread count (times repeats) with the same hyperparameters and seed
// config.seed + p, timing each run. thread_counts must contain 1.
BenchResult run_sweep(const KnowledgeGraph& graph, const TrainConfig& config,
                      const std::vector<std::size_t>& thread_counts,
                      const SweepOptions& options = {});

enum class ReportFormat { JSON, CSV };

// CSV header: p,total_seconds,epoch_seconds,speedup,hits10_filter,mr_filter
void write_csv(std::ostream& out, const BenchResult& result);
void emit_report(const BenchResult& result, const std::filesystem::path& path,
                 ReportFormat format);
// Chooses JSON for a .json extension, CSV otherwise.
void emit_report(const BenchResult& result, const std::filesystem::path& path);

// Least-squares slope of log(total_seconds) against log(p).
double loglog_slope(const std::vector<BenchRow>& rows);

}  // namespace partrans
