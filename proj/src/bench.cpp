#include "partrans/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "partrans/error.hpp"
#include "partrans/json_io.hpp"

namespace partrans {

BenchResult run_sweep(const KnowledgeGraph& graph, const TrainConfig& config,
                      const std::vector<std::size_t>& thread_counts,
                      const SweepOptions& options) {
  if (std::find(thread_counts.begin(), thread_counts.end(), 1u) == thread_counts.end())
    throw Error("thread counts must include 1 for the serial baseline");
  if (options.repeats < 1) throw Error("repeats must be >= 1");

  BenchResult result;
  for (auto p : thread_counts) {
    TrainConfig cfg = config;
    cfg.threads = p;
    cfg.seed = config.seed + p;
    BenchRow row;
    row.p = p;
    try {
      double total = 0.0, epoch = 0.0;
      TrainResult last;
      for (std::size_t rep = 0; rep < options.repeats; ++rep) {
        last = train(graph, cfg);
        total += last.report.total_seconds;
        const auto& es = last.report.epoch_seconds;
        epoch += std::accumulate(es.begin(), es.end(), 0.0) / static_cast<double>(es.size());
        if (!last.report.note.empty()) result.note = last.report.note;
      }
      row.total_seconds = total / static_cast<double>(options.repeats);
      row.epoch_seconds = epoch / static_cast<double>(options.repeats);
      row.loss_curve = last.report.loss_curve;
      if (options.evaluate && !graph.test().empty())
        row.metrics = evaluate(last.store, graph, cfg.model, options.eval_threads);
    } catch (const std::exception& e) {
      result.complete = false;
      result.error = "p=" + std::to_string(p) + ": " + e.what();
      break;
    }
    result.rows.push_back(row);
    if (options.on_row) options.on_row(row);
  }

  auto base = std::find_if(result.rows.begin(), result.rows.end(),
                           [](const BenchRow& r) { return r.p == 1; });
  for (auto& r : result.rows) {
    if (base == result.rows.end())
      r.speedup = std::nan("");
    else
      r.speedup = r.p == 1 ? 1.0 : base->total_seconds / r.total_seconds;
  }
  return result;
}

void write_csv(std::ostream& out, const BenchResult& result) {
  out << "p,total_seconds,epoch_seconds,speedup,hits10_filter,mr_filter\n";
  out.precision(17);
  for (const auto& r : result.rows) {
    out << r.p << ',' << r.total_seconds << ',' << r.epoch_seconds << ',' << r.speedup << ',';
    if (r.metrics)
      out << r.metrics->hits10_filtered << ',' << r.metrics->mean_rank_filtered;
    else
      out << ',';
    out << '\n';
  }
}

void emit_report(const BenchResult& result, const std::filesystem::path& path,
                 ReportFormat format) {
  if (result.rows.empty()) throw Error("nothing to report: sweep produced no rows");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  if (format == ReportFormat::CSV)
    write_csv(out, result);
  else
    out << nlohmann::json(result).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void emit_report(const BenchResult& result, const std::filesystem::path& path) {
  emit_report(result, path, path.extension() == ".json" ? ReportFormat::JSON : ReportFormat::CSV);
}

double loglog_slope(const std::vector<BenchRow>& rows) {
  if (rows.size() < 2) throw Error("slope needs at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    double x = std::log(static_cast<double>(r.p));
    double y = std::log(r.total_seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw Error("slope undefined: all rows share one thread count");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace partrans
