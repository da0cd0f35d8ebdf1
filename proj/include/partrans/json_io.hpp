#pragma once

#include <json.hpp>

#include "partrans/analysis.hpp"
#include "partrans/bench.hpp"
#include "partrans/evaluator.hpp"
#include "partrans/trainer.hpp"

namespace partrans {

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

// {total_seconds, epoch_seconds[], loss_curve[], config, ...}
void to_json(nlohmann::json& j, const TrainReport& r);

void to_json(nlohmann::json& j, const EvalMetrics& m);
void from_json(const nlohmann::json& j, EvalMetrics& m);

// {n, sigma_hat, sigma_bar, rho_hat, rho_bar, sparsity}
void to_json(nlohmann::json& j, const HypergraphStats& s);

void to_json(nlohmann::json& j, const BenchRow& r);
void from_json(const nlohmann::json& j, BenchRow& r);
void to_json(nlohmann::json& j, const BenchResult& r);
void from_json(const nlohmann::json& j, BenchResult& r);

}  // namespace partrans
