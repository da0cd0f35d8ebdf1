// Command-line front end: train, eval, analyze, simulate, bench.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "partrans/analysis.hpp"
#include "partrans/bench.hpp"
#include "partrans/embedding_io.hpp"
#include "partrans/error.hpp"
#include "partrans/evaluator.hpp"
#include "partrans/json_io.hpp"
#include "partrans/kgdata.hpp"
#include "partrans/trainer.hpp"

using namespace partrans;
using nlohmann::json;

namespace {

struct DataArgs {
  std::string train, valid, test;
  std::string column_order = "htr";

  void add_to(CLI::App* app, bool need_test) {
    app->add_option("--train", train, "Training triples (TSV)")->required()->check(CLI::ExistingFile);
    app->add_option("--valid", valid, "Validation triples (TSV)")->check(CLI::ExistingFile);
    auto* t = app->add_option("--test", test, "Test triples (TSV)")->check(CLI::ExistingFile);
    if (need_test) t->required();
    app->add_option("--column-order", column_order, "Column layout of the files")
        ->check(CLI::IsMember({"hrt", "htr"}));
  }

  KnowledgeGraph load() const {
    auto order = parse_column_order(column_order);
    auto tr = load_triples(train, order);
    std::vector<RawTriple> va, te;
    if (!valid.empty()) va = load_triples(valid, order);
    if (!test.empty()) te = load_triples(test, order);
    return build_graph(tr, va, te);
  }
};

struct ModelArgs {
  std::string model = "transe", optimizer = "sgd", sim = "l1", norm_policy = "sample";
  TrainConfig cfg;

  void add_to(CLI::App* app) {
    app->add_option("--model", model)->check(CLI::IsMember({"transe", "transh"}));
    app->add_option("--optimizer", optimizer)->check(CLI::IsMember({"sgd", "adagrad"}));
    app->add_option("--dim", cfg.dim, "Embedding dimension")->check(CLI::PositiveNumber);
    app->add_option("--margin", cfg.margin, "Hinge margin M")->check(CLI::PositiveNumber);
    app->add_option("--rate", cfg.rate, "Learning rate (eta*, for AdaGrad)")
        ->check(CLI::PositiveNumber);
    app->add_option("--epochs", cfg.epochs, "Total epochs across workers")
        ->check(CLI::PositiveNumber);
    app->add_option("--sim", sim)->check(CLI::IsMember({"l1", "l2"}));
    app->add_option("--seed", cfg.seed);
    app->add_option("--norm-policy", norm_policy)->check(CLI::IsMember({"sample", "epoch"}));
    app->add_flag("--avoid-known-negatives", cfg.avoid_known_negatives,
                  "Redraw corrupted triples that are known facts");
    app->add_flag("--pin", cfg.pin_threads, "Pin each worker to one logical CPU");
  }

  TrainConfig config() const {
    TrainConfig c = cfg;
    c.model.type = parse_model_type(model);
    c.model.sim = parse_similarity(sim);
    c.optimizer = parse_optimizer(optimizer);
    c.norm_policy = parse_norm_policy(norm_policy);
    return c;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::vector<std::size_t> parse_thread_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoul(item));
    if (out.back() == 0) throw Error("thread counts must be positive");
  }
  if (out.empty()) throw Error("empty thread list");
  return out;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) {
    auto v = std::stoul(s);
    return {v, v};
  }
  auto lo = std::stoul(s.substr(0, dots));
  auto hi = std::stoul(s.substr(dots + 2));
  if (lo == 0 || hi < lo) throw Error("bad thread range '" + s + "'");
  return {lo, hi};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lock-free parallel translation embeddings for knowledge graphs"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train TransE/TransH embeddings");
  DataArgs train_data;
  ModelArgs train_model;
  std::string out_dir, report_path;
  bool eval_after = false;
  train_data.add_to(train_cmd, false);
  train_model.add_to(train_cmd);
  train_cmd->add_option("--threads", train_model.cfg.threads, "Worker count p")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--out", out_dir, "Directory for embedding files");
  train_cmd->add_option("--report", report_path, "Training report JSON (default stdout)");
  train_cmd->add_flag("--eval", eval_after, "Evaluate on --test after training");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Link-prediction evaluation of saved embeddings");
  DataArgs eval_data;
  std::string emb_dir, eval_model = "transe", eval_sim = "l1";
  std::size_t eval_threads = 0;
  eval_data.add_to(eval_cmd, true);
  eval_cmd->add_option("--embeddings", emb_dir, "Directory written by train --out")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--model", eval_model)->check(CLI::IsMember({"transe", "transh"}));
  eval_cmd->add_option("--sim", eval_sim)->check(CLI::IsMember({"l1", "l2"}));
  eval_cmd->add_option("--threads", eval_threads, "Evaluation threads (0 = OpenMP default)");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Hypergraph statistics of a training set");
  std::string analyze_train, analyze_order = "htr";
  analyze_cmd->add_option("--train", analyze_train)->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--column-order", analyze_order)->check(CLI::IsMember({"hrt", "htr"}));

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Collision probabilities: analytic vs Monte-Carlo");
  std::string sim_range = "1..64", sim_train, sim_order = "htr", sim_out;
  std::vector<std::size_t> sim_synth;
  std::uint64_t sim_trials = 100000, sim_seed = 1;
  sim_cmd->add_option("--threads-range", sim_range, "Worker counts, e.g. 1..64");
  sim_cmd->add_option("--trials", sim_trials)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--train", sim_train)->check(CLI::ExistingFile);
  sim_cmd->add_option("--column-order", sim_order)->check(CLI::IsMember({"hrt", "htr"}));
  sim_cmd->add_option("--synthetic", sim_synth, "Uniform synthetic graph: n_e n_r n")
      ->expected(3);
  sim_cmd->add_option("--seed", sim_seed);
  sim_cmd->add_option("--out", sim_out, "CSV output (default stdout)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Wall-clock sweep over worker counts");
  DataArgs bench_data;
  ModelArgs bench_model;
  std::string bench_threads = "1,2,4,8,16,20", bench_out = "report.csv";
  SweepOptions sweep;
  bool no_eval = false;
  bench_data.add_to(bench_cmd, false);
  bench_model.add_to(bench_cmd);
  bench_cmd->add_option("--threads", bench_threads, "Comma-separated worker counts");
  bench_cmd->add_option("--repeats", sweep.repeats)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench_out, "Report path (.csv or .json)");
  bench_cmd->add_flag("--no-eval", no_eval, "Skip link-prediction evaluation per row");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      auto graph = train_data.load();
      auto cfg = train_model.config();
      auto result = train(graph, cfg);
      if (!out_dir.empty()) save_embeddings(result.store, graph.vocab(), out_dir);
      json j = result.report;
      if (eval_after) {
        if (graph.test().empty()) throw Error("--eval needs --test");
        j["metrics"] = evaluate(result.store, graph, cfg.model);
      }
      write_text(report_path, j.dump(2) + "\n");
    } else if (*eval_cmd) {
      auto graph = eval_data.load();
      ModelKind model{parse_model_type(eval_model), parse_similarity(eval_sim)};
      auto store = load_embeddings_for(emb_dir, graph.vocab());
      json j = evaluate(store, graph, model, eval_threads);
      std::cout << j.dump(2) << '\n';
    } else if (*analyze_cmd) {
      auto graph = build_graph(load_triples(analyze_train, parse_column_order(analyze_order)), {},
                               {});
      json j = hypergraph_stats(graph);
      std::cout << j.dump(2) << '\n';
    } else if (*sim_cmd) {
      KnowledgeGraph graph;
      if (!sim_train.empty())
        graph = build_graph(load_triples(sim_train, parse_column_order(sim_order)), {}, {});
      else if (sim_synth.size() == 3)
        graph = synth_graph(sim_synth[0], sim_synth[1], sim_synth[2], sim_seed);
      else
        throw Error("simulate needs --train or --synthetic");
      auto stats = hypergraph_stats(graph);
      auto [lo, hi] = parse_range(sim_range);
      std::ostringstream csv;
      csv.precision(10);
      csv << "p,analytic_distinct,analytic_norel,analytic_noent,empirical_distinct,"
             "empirical_norel,empirical_noent,stderr_distinct,stderr_norel,stderr_noent\n";
      for (std::size_t p = lo; p <= hi; ++p) {
        auto a = collision_probabilities(stats, p);
        auto e = simulate_collisions(graph, p, sim_trials, sim_seed + p);
        csv << p << ',' << a.p_distinct << ',' << a.p_no_rel << ',' << a.p_no_ent << ','
            << e.p_distinct << ',' << e.p_no_rel << ',' << e.p_no_ent << ',' << e.stderr_distinct
            << ',' << e.stderr_no_rel << ',' << e.stderr_no_ent << '\n';
      }
      write_text(sim_out, csv.str());
    } else if (*bench_cmd) {
      auto graph = bench_data.load();
      auto cfg = bench_model.config();
      sweep.evaluate = !no_eval;
      sweep.on_row = [](const BenchRow& r) {
        std::cerr << "p=" << r.p << " total=" << r.total_seconds << "s epoch=" << r.epoch_seconds
                  << "s\n";
      };
      auto result = run_sweep(graph, cfg, parse_thread_list(bench_threads), sweep);
      emit_report(result, bench_out);
      if (!result.complete) {
        std::cerr << "sweep incomplete: " << result.error << '\n';
        return 2;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
