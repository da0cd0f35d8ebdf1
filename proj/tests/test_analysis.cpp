#include <doctest.h>

#include <cmath>

#include "datasets.hpp"
#include "oracles.hpp"
#include "partrans/analysis.hpp"

using namespace partrans;

namespace {

KnowledgeGraph from_ids(const std::vector<std::array<int, 3>>& rows) {
  std::vector<RawTriple> raw;
  for (auto [h, r, t] : rows)
    raw.push_back({"e" + std::to_string(h), "r" + std::to_string(r), "e" + std::to_string(t)});
  return build_graph(raw, {}, {});
}

// prod_{i=1}^{p-1} (1 - i c / n) in plain double, for cross-checking.
double naive_product(double n, std::size_t p, double c) {
  double prod = 1.0;
  for (std::size_t i = 1; i < p; ++i) prod *= std::max(0.0, 1.0 - i * c / n);
  return prod;
}

}  // namespace

TEST_CASE("relation_stats") {
  auto one = from_ids({{0, 0, 1}, {1, 0, 2}, {2, 0, 3}, {3, 0, 4}});
  auto r = relation_stats(one);
  CHECK(r.max == 4);
  CHECK(r.mean == 4.0);

  auto distinct = from_ids({{0, 0, 1}, {1, 1, 2}, {2, 2, 3}});
  r = relation_stats(distinct);
  CHECK(r.max == 1);
  CHECK(r.mean == 1.0);
}

TEST_CASE("entity_stats") {
  auto disjoint = from_ids({{0, 0, 1}, {2, 0, 3}});
  CHECK(entity_stats(disjoint).max == 1);
  CHECK(entity_stats(disjoint).mean == 1.0);

  auto star = from_ids({{0, 0, 1}, {0, 0, 2}, {0, 1, 3}, {0, 1, 4}, {0, 2, 5}});
  CHECK(entity_stats(star).max == 5);

  // Self loops and repeated pairs.
  auto odd = from_ids({{0, 0, 0}, {0, 1, 1}, {1, 0, 0}, {0, 1, 1}, {2, 0, 3}});
  auto b = oracle::brute_stats(odd);
  CHECK(entity_stats(odd).max == b.rho_hat);
  CHECK(entity_stats(odd).mean == doctest::Approx(b.rho_bar).epsilon(1e-12));
}

TEST_CASE("statistics agree with the brute-force double loop") {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto g = synth_graph(200, 7, 3000, seed);
    auto s = hypergraph_stats(g);
    auto b = oracle::brute_stats(g);
    CHECK(s.n == 3000);
    CHECK(s.sigma_hat == b.sigma_hat);
    CHECK(s.rho_hat == b.rho_hat);
    CHECK(s.sigma_bar == doctest::Approx(b.sigma_bar).epsilon(1e-12));
    CHECK(s.rho_bar == doctest::Approx(b.rho_bar).epsilon(1e-12));
    CHECK(s.sigma_bar <= s.sigma_hat);
    CHECK(s.rho_bar <= s.rho_hat);
    CHECK(s.sparsity > 0.0);
    CHECK(s.sparsity <= 1.0);
  }
  // Dense graph close to the 5000-line limit, with duplicates.
  auto g = synth_graph(40, 3, 4000, 4);
  auto train = g.train();
  train.insert(train.end(), g.train().begin(), g.train().begin() + 900);
  KnowledgeGraph dup(g.vocab(), train, {}, {});
  auto s = hypergraph_stats(dup);
  auto b = oracle::brute_stats(dup);
  CHECK(s.sigma_hat == b.sigma_hat);
  CHECK(s.rho_hat == b.rho_hat);
  CHECK(s.rho_bar == doctest::Approx(b.rho_bar).epsilon(1e-12));
}

TEST_CASE("sparsity") {
  HypergraphStats s;
  s.n = 100;
  s.sigma_hat = 100;
  s.rho_hat = 30;
  CHECK(sparsity(s) == 0.3);
  s.sigma_hat = s.rho_hat = 1;
  CHECK(sparsity(s) == 0.01);
}

TEST_CASE("theorem products") {
  CHECK(prob_distinct_samples(10, 1) == 1.0);
  CHECK(prob_distinct_samples(4, 5) == 0.0);
  CHECK(std::abs(prob_distinct_samples(483142, 20) - 0.999607) <= 1e-6);

  CHECK(prob_no_relation_collision(1000, 1, 10) == 1.0);
  CHECK(prob_no_relation_collision(50, 2, 50) == 0.0);
  CHECK(prob_no_relation_collision(1000, 4, 10) == doctest::Approx(0.941094).epsilon(1e-12));

  CHECK(prob_no_entity_collision(1000, 1, 50) == 1.0);
  CHECK(prob_no_entity_collision(80, 2, 80) == 0.0);
  CHECK(prob_no_entity_collision(1000, 3, 50) == doctest::Approx(0.855).epsilon(1e-12));

  // Long products take the logarithmic path; both agree with a plain loop.
  for (std::size_t p : {999u, 1000u, 1001u, 3000u})
    CHECK(prob_distinct_samples(10000000, p) ==
          doctest::Approx(naive_product(1e7, p, 1)).epsilon(1e-9));
}

TEST_CASE("theorem monotonicity and ordering") {
  const std::size_t n = 5000;
  for (std::size_t p = 1; p < 60; ++p) {
    CHECK(prob_distinct_samples(n, p + 1) <= prob_distinct_samples(n, p));
    CHECK(prob_no_relation_collision(n, p + 1, 20) <= prob_no_relation_collision(n, p, 20));
    CHECK(prob_no_entity_collision(n, p, 20) <= prob_no_entity_collision(n, p, 10));
    CHECK(prob_no_relation_collision(n, p, 3) <= prob_distinct_samples(n, p));
    CHECK(prob_no_entity_collision(n, p, 3) <= prob_distinct_samples(n, p));
  }
  HypergraphStats s;
  s.n = 1000;
  s.sigma_hat = 10;
  s.rho_hat = 50;
  auto c = collision_probabilities(s, 3);
  CHECK(c.p == 3);
  CHECK(c.p_no_ent == doctest::Approx(0.855));
  CHECK(c.p_no_rel == doctest::Approx(0.99 * 0.98));
}

TEST_CASE("simulate_collisions") {
  SUBCASE("p = 1") {
    auto g = synth_graph(50, 5, 300, 1);
    auto r = simulate_collisions(g, 1, 1000, 3);
    CHECK(r.p_distinct == 1.0);
    CHECK(r.p_no_rel == 1.0);
    CHECK(r.p_no_ent == 1.0);
    CHECK(r.stderr_distinct == 0.0);
  }
  SUBCASE("single relation, p = 2") {
    auto g = synth_graph(50, 1, 300, 1);
    auto r = simulate_collisions(g, 2, 5000, 3);
    CHECK(r.p_no_rel == 0.0);
  }
  SUBCASE("agrees with the distinct-sample product on a uniform graph") {
    auto g = synth_graph(2000, 50, 10000, 7);
    auto r = simulate_collisions(g, 8, 100000, 11);
    double expect = prob_distinct_samples(10000, 8);
    CHECK(r.stderr_distinct == doctest::Approx(std::sqrt(r.p_distinct * (1 - r.p_distinct) / 1e5)));
    CHECK(std::abs(r.p_distinct - expect) <= 3 * r.stderr_distinct);
  }
  SUBCASE("deterministic in the seed, independent of team size") {
    auto g = synth_graph(100, 5, 500, 2);
    auto a = simulate_collisions(g, 4, 10000, 5);
    auto b = simulate_collisions(g, 4, 10000, 5);
    CHECK(a.p_no_ent == b.p_no_ent);
    CHECK(a.p_distinct == b.p_distinct);
  }
}

TEST_CASE("public dataset statistics") {
  std::optional<HypergraphStats> wn, fb;
  if (auto f = datasets::find("WN18")) wn = hypergraph_stats(datasets::load(*f));
  if (auto f = datasets::find("FB15k")) fb = hypergraph_stats(datasets::load(*f));
  if (!wn || !fb) MESSAGE("WN18/FB15k not found under " << datasets::root().string());
  if (wn && fb) CHECK(fb->sparsity < static_cast<double>(wn->sigma_hat) / wn->n);
}
