#include "partrans/json_io.hpp"

namespace partrans {

using nlohmann::json;

void to_json(json& j, const TrainConfig& c) {
  j = json{{"model", to_string(c.model.type)},
           {"sim", to_string(c.model.sim)},
           {"dim", c.dim},
           {"margin", c.margin},
           {"rate", c.rate},
           {"epochs", c.epochs},
           {"threads", c.threads},
           {"optimizer", to_string(c.optimizer)},
           {"seed", c.seed},
           {"norm_policy", to_string(c.norm_policy)},
           {"avoid_known_negatives", c.avoid_known_negatives},
           {"pin_threads", c.pin_threads}};
}

void from_json(const json& j, TrainConfig& c) {
  c.model.type = parse_model_type(j.at("model").get<std::string>());
  c.model.sim = parse_similarity(j.at("sim").get<std::string>());
  j.at("dim").get_to(c.dim);
  j.at("margin").get_to(c.margin);
  j.at("rate").get_to(c.rate);
  j.at("epochs").get_to(c.epochs);
  j.at("threads").get_to(c.threads);
  c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  j.at("seed").get_to(c.seed);
  c.norm_policy = parse_norm_policy(j.at("norm_policy").get<std::string>());
  c.avoid_known_negatives = j.value("avoid_known_negatives", false);
  c.pin_threads = j.value("pin_threads", false);
}

void to_json(json& j, const TrainReport& r) {
  j = json{{"total_seconds", r.total_seconds},
           {"epoch_seconds", r.epoch_seconds},
           {"loss_curve", r.loss_curve},
           {"config", r.config},
           {"iterations_per_worker", r.iterations_per_worker},
           {"worker_seconds", r.worker_seconds}};
  if (r.config.pin_threads) j["pinned"] = r.pinned;
  if (!r.note.empty()) j["note"] = r.note;
}

void to_json(json& j, const EvalMetrics& m) {
  j = json{{"mean_rank_raw", m.mean_rank_raw},
           {"mean_rank_filtered", m.mean_rank_filtered},
           {"hits10_raw", m.hits10_raw},
           {"hits10_filtered", m.hits10_filtered},
           {"count", m.count}};
}

void from_json(const json& j, EvalMetrics& m) {
  j.at("mean_rank_raw").get_to(m.mean_rank_raw);
  j.at("mean_rank_filtered").get_to(m.mean_rank_filtered);
  j.at("hits10_raw").get_to(m.hits10_raw);
  j.at("hits10_filtered").get_to(m.hits10_filtered);
  j.at("count").get_to(m.count);
}

void to_json(json& j, const HypergraphStats& s) {
  j = json{{"n", s.n},
           {"sigma_hat", s.sigma_hat},
           {"sigma_bar", s.sigma_bar},
           {"rho_hat", s.rho_hat},
           {"rho_bar", s.rho_bar},
           {"sparsity", s.sparsity}};
}

void to_json(json& j, const BenchRow& r) {
  j = json{{"p", r.p},
           {"total_seconds", r.total_seconds},
           {"epoch_seconds", r.epoch_seconds},
           {"speedup", r.speedup},
           {"loss_curve", r.loss_curve}};
  if (r.metrics) j["metrics"] = *r.metrics;
}

void from_json(const json& j, BenchRow& r) {
  j.at("p").get_to(r.p);
  j.at("total_seconds").get_to(r.total_seconds);
  j.at("epoch_seconds").get_to(r.epoch_seconds);
  j.at("speedup").get_to(r.speedup);
  j.at("loss_curve").get_to(r.loss_curve);
  if (j.contains("metrics"))
    r.metrics = j.at("metrics").get<EvalMetrics>();
  else
    r.metrics.reset();
}

void to_json(json& j, const BenchResult& r) {
  j = json{{"rows", r.rows}, {"complete", r.complete}};
  if (!r.error.empty()) j["error"] = r.error;
  if (!r.note.empty()) j["note"] = r.note;
}

void from_json(const json& j, BenchResult& r) {
  j.at("rows").get_to(r.rows);
  j.at("complete").get_to(r.complete);
  r.error = j.value("error", std::string());
  r.note = j.value("note", std::string());
}

}  // namespace partrans
