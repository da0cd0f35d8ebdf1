#include <doctest.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

#include "oracles.hpp"
#include "partrans/error.hpp"
#include "partrans/trainer.hpp"

using namespace partrans;

namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.dim = 8;
  c.epochs = 5;
  c.margin = 1.0;
  c.rate = 0.01;
  return c;
}

// Store with hand-set values over a graph of `ne` entities and one relation.
EmbeddingStore blank_store(std::size_t ne, std::size_t d, bool transh = false) {
  EmbeddingStore s;
  s.entities = Matrix(ne, d);
  s.relations = Matrix(1, d);
  if (transh) s.hyperplanes = Matrix(1, d);
  return s;
}

Sample make_sample(Triple pos, Triple neg) {
  Sample s;
  s.positive = pos;
  s.negative = neg;
  s.corrupted_side = pos.head != neg.head ? Side::Head : Side::Tail;
  return s;
}

}  // namespace

TEST_CASE("config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  for (auto bad : std::vector<std::function<void(TrainConfig&)>>{
           [](TrainConfig& x) { x.threads = 0; }, [](TrainConfig& x) { x.epochs = 0; },
           [](TrainConfig& x) { x.margin = 0; }, [](TrainConfig& x) { x.rate = -1; },
           [](TrainConfig& x) { x.dim = 0; }}) {
    TrainConfig b;
    bad(b);
    CHECK_THROWS_AS(b.validate(), Error);
  }
  c.epochs = 10;
  c.threads = 4;
  CHECK(c.epochs_per_worker() == 3);
  CHECK(parse_optimizer("adagrad") == Optimizer::AdaGrad);
  CHECK(parse_norm_policy("epoch") == NormPolicy::AllPerEpoch);
  CHECK_THROWS_AS(parse_optimizer("adam"), Error);
}

TEST_CASE("init_store") {
  auto g = synth_graph(30, 4, 100, 1);
  auto c = small_config();
  c.dim = 4;
  auto s = init_store(c, g);
  CHECK(s.entities.rows() == 30);
  CHECK(s.relations.rows() == 4);
  CHECK_FALSE(s.has_hyperplanes());
  for (double x : s.entities.data()) {
    CHECK(x >= -3.0);
    CHECK(x <= 3.0);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    double n = 0;
    for (double x : s.relations.row(i)) n += x * x;
    CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(init_store(c, g) == s);

  c.model.type = ModelType::TransH;
  auto h = init_store(c, g);
  REQUIRE(h.has_hyperplanes());
  for (std::size_t i = 0; i < 4; ++i) {
    double n = 0;
    for (double x : h.hyperplanes.row(i)) n += x * x;
    CHECK(std::abs(std::sqrt(n) - 1.0) <= 1e-9);
  }
}

TEST_CASE("sgd_iteration: inactive hinge leaves the store unchanged") {
  auto c = small_config();
  c.dim = 1;
  c.model.sim = Similarity::L2;
  auto s = blank_store(3, 1);
  s.entities.at(0, 0) = 1;   // h
  s.entities.at(1, 0) = 1;   // t
  s.entities.at(2, 0) = -1;  // corrupted tail
  s.relations.at(0, 0) = 0;
  auto before = s;
  double hinge = sgd_iteration(s, make_sample({0, 0, 1}, {0, 0, 2}), c);
  CHECK(hinge == 0.0);
  CHECK(s == before);
}

TEST_CASE("sgd_iteration: d=1 TransE L2 by hand") {
  // h = 1, t = -1, t' = 1 (all unit length), r = 0.5, rate 0.1, M = 1.
  auto c = small_config();
  c.dim = 1;
  c.rate = 0.1;
  c.model.sim = Similarity::L2;
  auto s = blank_store(3, 1);
  s.entities.at(0, 0) = 1;
  s.entities.at(1, 0) = -1;
  s.entities.at(2, 0) = 1;
  s.relations.at(0, 0) = 0.5;
  // e = h + r - t = 2.5, e' = h + r - t' = 0.5; hinge = 6.25 + 1 - 0.25 = 7.
  double hinge = sgd_iteration(s, make_sample({0, 0, 1}, {0, 0, 2}), c);
  CHECK(hinge == doctest::Approx(7.0));
  // h gets -0.1*2*2.5 from the positive and +0.1*2*0.5 from the negative.
  CHECK(s.entities.at(0, 0) == doctest::Approx(1 - 0.5 + 0.1));
  CHECK(s.entities.at(1, 0) == doctest::Approx(-1 + 0.5));
  CHECK(s.entities.at(2, 0) == doctest::Approx(1 - 0.1));
  CHECK(s.relations.at(0, 0) == doctest::Approx(0.5 - 0.5 + 0.1));
}

TEST_CASE("sgd_iteration normalizes the sample's entities first") {
  auto c = small_config();
  c.dim = 2;
  auto s = blank_store(3, 2);
  s.entities.at(0, 0) = 3;
  s.entities.at(0, 1) = 4;
  s.entities.at(1, 0) = 10;
  s.entities.at(2, 1) = 0.5;
  s.relations.at(0, 0) = 100;
  c.margin = 0.1;  // energies 100.4 and 100.8 after normalization: inactive
  CHECK(sgd_iteration(s, make_sample({0, 0, 1}, {0, 0, 2}), c) == 0.0);
  CHECK(s.entities.at(0, 0) == doctest::Approx(0.6));
  CHECK(s.entities.at(1, 0) == doctest::Approx(1.0));
  CHECK(s.entities.at(2, 1) == doctest::Approx(1.0));

  c.norm_policy = NormPolicy::AllPerEpoch;
  auto s2 = blank_store(3, 2);
  s2.entities.at(0, 0) = 3;
  s2.entities.at(2, 1) = 50;
  s2.relations.at(0, 0) = 100;
  CHECK(sgd_iteration(s2, make_sample({0, 0, 1}, {0, 0, 2}), c) == 0.0);
  CHECK(s2.entities.at(0, 0) == 3.0);
}

TEST_CASE("two serial iterations equal applying the bundles in turn") {
  auto g = synth_graph(20, 2, 60, 3);
  auto c = small_config();
  c.norm_policy = NormPolicy::AllPerEpoch;  // no hidden normalization between steps
  c.rate = 0.05;
  auto store = init_store(c, g);
  auto rng = seed_rand(0, 9);
  auto manual = store;
  for (int step = 0; step < 2; ++step) {
    auto smp = draw_sample(g, rng);
    auto row = [&](const Matrix& m, std::size_t i) {
      return std::vector<double>(m.row(i).begin(), m.row(i).end());
    };
    auto h = row(manual.entities, smp.positive.head), t = row(manual.entities, smp.positive.tail);
    auto r = row(manual.relations, smp.positive.relation);
    auto hn = row(manual.entities, smp.negative.head),
         tn = row(manual.entities, smp.negative.tail);
    auto b = grad_transe({h, r, t, hn, r, tn, {}}, c.model.sim, c.margin, c.rate);
    auto add = [&](Matrix& m, std::size_t i, const std::vector<double>& d) {
      for (std::size_t k = 0; k < d.size(); ++k) m.at(i, k) += d[k];
    };
    if (b.active) {
      // Same accumulation order as the trainer: merge per row, then add once.
      std::vector<std::pair<std::size_t, std::vector<double>>> rows;
      auto merge = [&](std::size_t i, const std::vector<double>& d) {
        for (auto& [ri, acc] : rows)
          if (ri == i) {
            for (std::size_t k = 0; k < d.size(); ++k) acc[k] += d[k];
            return;
          }
        rows.push_back({i, d});
      };
      merge(smp.positive.head, b.d_h);
      merge(smp.positive.tail, b.d_t);
      merge(smp.negative.head, b.d_hneg);
      merge(smp.negative.tail, b.d_tneg);
      for (auto& [i, d] : rows) add(manual.entities, i, d);
      std::vector<double> dr(c.dim);
      for (std::size_t k = 0; k < c.dim; ++k) dr[k] = b.d_r[k] + b.d_rneg[k];
      add(manual.relations, smp.positive.relation, dr);
    }
    sgd_iteration(store, smp, c);
    CHECK(store == manual);
  }
}

TEST_CASE("sgd_iteration rejects non-finite updates and mismatched stores") {
  auto c = small_config();
  c.dim = 1;
  c.norm_policy = NormPolicy::AllPerEpoch;
  c.model.sim = Similarity::L2;
  c.rate = 1e308;
  auto s = blank_store(3, 1);
  s.entities.at(1, 0) = -2;  // positive energy 4, negative energy 0
  CHECK_THROWS_AS(sgd_iteration(s, make_sample({0, 0, 1}, {0, 0, 2}), c), NumericError);
  CHECK(s.entities.at(1, 0) == -2.0);

  c.rate = 0.1;
  auto wrong = blank_store(3, 2);
  CHECK_THROWS_AS(sgd_iteration(wrong, make_sample({0, 0, 1}, {0, 0, 2}), c), Error);
  auto small = blank_store(2, 1);
  CHECK_THROWS_AS(sgd_iteration(small, make_sample({0, 0, 1}, {0, 0, 2}), c), Error);
}

TEST_CASE("TransH iteration keeps hyperplanes unit length") {
  auto g = synth_graph(30, 3, 200, 4);
  auto c = small_config();
  c.model = {ModelType::TransH, Similarity::L2};
  auto s = init_store(c, g);
  auto rng = seed_rand(0, 1);
  for (int i = 0; i < 500; ++i) sgd_iteration(s, draw_sample(g, rng), c);
  for (std::size_t r = 0; r < 3; ++r) {
    double n = 0;
    for (double x : s.hyperplanes.row(r)) n += x * x;
    CHECK(std::abs(std::sqrt(n) - 1.0) <= 1e-9);
  }
  CHECK(s.all_finite());
}

TEST_CASE("adagrad_iteration") {
  auto c = small_config();
  c.dim = 1;
  c.rate = 0.5;
  c.optimizer = Optimizer::AdaGrad;
  c.model.sim = Similarity::L1;
  c.norm_policy = NormPolicy::AllPerEpoch;
  c.margin = 100;  // always active

  SUBCASE("first step is rate * g / sqrt(g^2 + eps)") {
    auto s = blank_store(3, 1);
    s.entities.at(0, 0) = 0;
    s.entities.at(1, 0) = 1;  // e = -1 -> g_h = -1
    s.entities.at(2, 0) = 1;
    auto st = init_adagrad(s);
    adagrad_iteration(s, st, make_sample({0, 0, 1}, {0, 0, 2}), c);
    // h: positive g = sign(-1) = -1, negative g' = -sign(-1) = +1, merged to 0: untouched.
    CHECK(s.entities.at(0, 0) == 0.0);
    CHECK(st.entities.at(0, 0) == 0.0);
    // t: g = +1 from the positive side.
    double g = 1.0;
    CHECK(s.entities.at(1, 0) == doctest::Approx(1 - 0.5 * g / std::sqrt(g * g + 1e-8)));
    CHECK(st.entities.at(1, 0) == 1.0);
  }

  SUBCASE("constant gradient: step j scales as 1/sqrt(j)") {
    // Positive and negative share h and r but not t, so t sees a constant L1 gradient.
    auto s = blank_store(3, 1);
    s.entities.at(0, 0) = 0;
    s.entities.at(1, 0) = 1000;
    s.entities.at(2, 0) = -1000;
    auto st = init_adagrad(s);
    std::vector<double> steps;
    double prev = s.entities.at(1, 0);
    for (int j = 1; j <= 16; ++j) {
      double acc_before = st.entities.at(1, 0);
      adagrad_iteration(s, st, make_sample({0, 0, 1}, {0, 0, 2}), c);
      CHECK(st.entities.at(1, 0) >= acc_before);
      steps.push_back(std::abs(s.entities.at(1, 0) - prev));
      prev = s.entities.at(1, 0);
    }
    for (int j = 1; j <= 16; ++j)
      CHECK(steps[j - 1] == doctest::Approx(steps[0] / std::sqrt(double(j))).epsilon(1e-6));
  }

  SUBCASE("inactive hinge leaves store and accumulators alone") {
    c.margin = 0.1;
    auto s = blank_store(3, 1);
    s.entities.at(0, 0) = 0;
    s.entities.at(1, 0) = 0;
    s.entities.at(2, 0) = 5;
    auto st = init_adagrad(s);
    auto before = s;
    adagrad_iteration(s, st, make_sample({0, 0, 1}, {0, 0, 2}), c);
    CHECK(s == before);
    for (double x : st.entities.data()) CHECK(x == 0.0);
  }
}

TEST_CASE("train with one worker reproduces the serial reference") {
  auto g = synth_graph(40, 4, 300, 5);
  for (auto opt : {Optimizer::SGD, Optimizer::AdaGrad})
    for (auto type : {ModelType::TransE, ModelType::TransH})
      for (auto pol : {NormPolicy::SampleEntities, NormPolicy::AllPerEpoch}) {
        auto c = small_config();
        c.optimizer = opt;
        c.model.type = type;
        c.norm_policy = pol;
        auto a = train(g, c);
        auto b = train_serial(g, c);
        CHECK(a.store == b.store);
        CHECK(a.report.loss_curve == b.report.loss_curve);
        CHECK(a.store.all_finite());
      }
}

TEST_CASE("serial determinism") {
  auto g = synth_graph(40, 4, 300, 6);
  auto c = small_config();
  CHECK(train(g, c).store == train(g, c).store);
  auto c2 = c;
  c2.seed = 2;
  CHECK_FALSE(train(g, c2).store == train(g, c).store);
}

TEST_CASE("report contents and epoch accounting") {
  auto g = synth_graph(40, 4, 300, 7);
  for (std::size_t p : {1u, 2u, 3u, 4u}) {
    auto c = small_config();
    c.epochs = 10;
    c.threads = p;
    auto r = train(g, c).report;
    const auto n = g.num_train();
    CHECK(r.epoch_seconds.size() == c.epochs_per_worker());
    CHECK(r.loss_curve.size() == c.epochs_per_worker());
    for (double t : r.epoch_seconds) CHECK(t > 0.0);
    CHECK(r.total_seconds > 0.0);
    CHECK(r.iterations_per_worker.size() == p);
    CHECK(r.total_iterations() >= c.epochs * n);
    CHECK(r.total_iterations() <= (c.epochs + p) * n);
  }
}

TEST_CASE("parallel training keeps the store finite and learns") {
  auto g = synth_typed_graph(50, 5, 4, 500, 50, 1);
  auto c = small_config();
  c.epochs = 40;
  c.threads = 4;
  c.dim = 10;
  auto res = train(g, c);
  CHECK(res.store.all_finite());
  CHECK(res.report.loss_curve.back() < res.report.loss_curve.front());
}

TEST_CASE("a slowed worker does not block the others") {
  auto g = synth_graph(40, 4, 200, 8);
  auto c = small_config();
  c.epochs = 4;
  c.threads = 4;
  WorkerHooks hooks;
  hooks.before_iteration = [](std::size_t w) {
    if (w == 3) std::this_thread::sleep_for(std::chrono::microseconds(200));
  };
  auto r = train(g, c, hooks).report;
  for (std::size_t w = 0; w < 4; ++w)
    CHECK(r.iterations_per_worker[w] == c.epochs_per_worker() * g.num_train());
  for (std::size_t w = 0; w < 3; ++w) CHECK(r.worker_seconds[w] < r.worker_seconds[3]);
}

TEST_CASE("a failing worker aborts training with an error") {
  auto g = synth_graph(40, 4, 200, 9);
  auto c = small_config();
  c.threads = 3;
  WorkerHooks hooks;
  hooks.before_iteration = [](std::size_t w) {
    if (w == 1) throw std::runtime_error("boom");
  };
  CHECK_THROWS_AS(train(g, c, hooks), Error);

  auto bad = small_config();
  bad.rate = 1e308;
  bad.model.sim = Similarity::L2;
  CHECK_THROWS_AS(train(g, bad), NumericError);
}

TEST_CASE("pinning is optional and reported") {
  auto g = synth_graph(20, 2, 50, 1);
  auto c = small_config();
  c.pin_threads = true;
  c.threads = 2;
  auto r = train(g, c).report;
  CHECK((r.pinned || !r.note.empty()));
}
