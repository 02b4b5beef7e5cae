#include "doctest.h"

#include <cmath>
#include <numeric>
#include <set>

#include "posture/adalstm.hpp"
#include "posture/rng.hpp"
#include "posture/signal.hpp"
#include "posture/synth.hpp"
#include "test_util.hpp"

using namespace posture;

namespace {

const LabelSet kThree{PostureLabel::Supine, PostureLabel::Prone, PostureLabel::LeftSide};

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::vector<AccelSample> random_sequence(Rng& rng, std::size_t n) {
  std::vector<AccelSample> s(n);
  for (auto& a : s) a = {rng.normal(), rng.normal(), rng.normal()};
  return s;
}

Episode episode_of_length(std::size_t n, std::size_t tag) {
  Episode ep = constant_episode({0, 0, 1}, n);
  ep.id = "e" + std::to_string(tag);
  return ep;
}

// Central-difference gradient of batch_loss, the reference for backprop.
std::vector<double> numeric_gradient(AdaLstmModel model, const Batch& batch, double h) {
  std::vector<double> g(model.params.size());
  for (std::size_t k = 0; k < model.params.size(); ++k) {
    const double keep = model.params[k];
    model.params[k] = keep + h;
    const double up = batch_loss(model, batch);
    model.params[k] = keep - h;
    const double down = batch_loss(model, batch);
    model.params[k] = keep;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_SUITE("adalstm") {

TEST_CASE("cell: zero weights give zero hidden state") {
  const auto p = LstmDirectionParams::zeros(3, 10);
  const std::vector<double> x{0.3, -1.2, 2.0}, h(10, 0.0), c(10, 0.0);
  const auto s = lstm_cell_forward(p, x, h, c);
  for (double v : s.h) CHECK(v == 0.0);
  for (double v : s.c) CHECK(v == 0.0);
}

TEST_CASE("cell: scalar update matches the gate equations") {
  LstmDirectionParams p = LstmDirectionParams::zeros(1, 1);
  p.w_input = {0.5, -0.3, 0.8, 0.1};
  p.w_recurrent = {0.2, 0.4, -0.6, 0.7};
  p.bias = {0.1, 1.0, -0.2, 0.05};
  const double x = 0.7, h0 = -0.4, c0 = 0.9;
  const double i = sigmoid(0.5 * x + 0.2 * h0 + 0.1);
  const double f = sigmoid(-0.3 * x + 0.4 * h0 + 1.0);
  const double g = std::tanh(0.8 * x - 0.6 * h0 - 0.2);
  const double o = sigmoid(0.1 * x + 0.7 * h0 + 0.05);
  const double c = f * c0 + i * g;
  const auto s = lstm_cell_forward(p, std::vector<double>{x}, std::vector<double>{h0}, std::vector<double>{c0});
  CHECK(s.c[0] == doctest::Approx(c).epsilon(1e-14));
  CHECK(s.h[0] == doctest::Approx(o * std::tanh(c)).epsilon(1e-14));
}

TEST_CASE("cell: hidden state stays inside (-1, 1)") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    LstmDirectionParams p = LstmDirectionParams::zeros(3, 4);
    for (auto* w : {&p.w_input, &p.w_recurrent, &p.bias}) {
      for (auto& v : *w) v = rng.normal(0, 5);
    }
    std::vector<double> h(4, 0.0), c(4, 0.0);
    for (int t = 0; t < 30; ++t) {
      const std::vector<double> x{rng.normal(0, 10), rng.normal(0, 10), rng.normal(0, 10)};
      const auto s = lstm_cell_forward(p, x, h, c);
      h = s.h;
      c = s.c;
      for (double v : h) CHECK(std::abs(v) < 1.0);
    }
  }
}

TEST_CASE("cell: errors") {
  const auto p = LstmDirectionParams::zeros(3, 2);
  const std::vector<double> h(2, 0.0), c(2, 0.0);
  CHECK_THROWS_CODE(lstm_cell_forward(p, std::vector<double>{1.0, NAN, 0.0}, h, c), Errc::NonFinite);
  CHECK_THROWS_CODE(lstm_cell_forward(p, std::vector<double>{1.0}, h, c), Errc::ShapeMismatch);
}

TEST_CASE("network: readout shape, probabilities and errors") {
  const auto m = init_model(kThree, AdaLstmConfig{}, 3);
  CHECK(m.params.size() == layout_for(m.shape).total);
  Rng rng(1);
  const auto seq = random_sequence(rng, 12);
  CHECK(bilstm_forward(m, seq).size() == 20);
  const auto probs = predict_logits(m, seq);
  REQUIRE(probs.size() == 3);
  CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_CODE(bilstm_forward(m, std::vector<AccelSample>{}), Errc::EmptySequence);

  const auto z = zero_model(kThree);
  for (double v : bilstm_forward(z, seq)) CHECK(v == 0.0);
  CHECK(predict(z, seq) == PostureLabel::Supine);
}

TEST_CASE("network: forget bias starts at one") {
  const auto m = init_model(kThree, AdaLstmConfig{}, 5);
  for (auto d : {AdaLstmModel::Direction::Forward, AdaLstmModel::Direction::Backward}) {
    const auto p = m.direction(d);
    for (std::size_t r = 0; r < 40; ++r) CHECK(p.bias[r] == (r >= 10 && r < 20 ? 1.0 : 0.0));
    for (double w : p.w_input) CHECK(std::abs(w) <= m.config.init_range);
  }
}

TEST_CASE("network: backward direction reads the sequence reversed") {
  auto m = init_model(kThree, AdaLstmConfig{}, 8);
  Rng rng(2);
  const auto seq = random_sequence(rng, 7);
  const auto out = bilstm_forward(m, seq);
  const auto run = [](const LstmDirectionParams& p, auto first, auto last) {
    std::vector<double> h(p.hidden, 0.0), c(p.hidden, 0.0);
    for (auto it = first; it != last; ++it) {
      const std::vector<double> x{it->x, it->y, it->z};
      const auto s = lstm_cell_forward(p, x, h, c);
      h = s.h;
      c = s.c;
    }
    return h;
  };
  const auto fwd = run(m.direction(AdaLstmModel::Direction::Forward), seq.begin(), seq.end());
  const auto bwd = run(m.direction(AdaLstmModel::Direction::Backward), seq.rbegin(), seq.rend());
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(out[k] == doctest::Approx(fwd[k]).epsilon(1e-14));
    CHECK(out[10 + k] == doctest::Approx(bwd[k]).epsilon(1e-14));
  }
}

TEST_CASE("loss: length weighting") {
  const double p = 0.3, c = -std::log(p);
  const std::vector<std::vector<double>> probs{{p, 0.7}, {0.7, p}};
  const std::vector<std::size_t> labels{0, 1}, lengths{1, 3};
  CHECK(weighted_cross_entropy(probs, labels, lengths) == doctest::Approx(c).epsilon(1e-14));
  CHECK(weighted_cross_entropy(probs, labels, lengths, LossMode::RawSum) == doctest::Approx(4 * c).epsilon(1e-14));
  CHECK(weighted_cross_entropy({{0.0, 1.0}}, {0}, {2}) == doctest::Approx(-std::log(kLogClamp)));
  CHECK_THROWS_CODE(weighted_cross_entropy(probs, {0}, lengths), Errc::DimensionMismatch);
}

TEST_CASE("gradient: backprop matches central differences on tiny models") {
  const NetworkShape tiny{3, 2, 3, 3, 3};
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    AdaLstmConfig cfg;
    cfg.init_range = 0.8;
    cfg.loss_mode = trial % 2 ? LossMode::RawSum : LossMode::LengthNormalized;
    const auto m = init_model(kThree, cfg, 100 + static_cast<std::uint64_t>(trial), tiny);
    const auto a = random_sequence(rng, 3), b = random_sequence(rng, 2);
    const auto batch = make_batch({a, b}, {static_cast<std::size_t>(trial % 3), 1});
    const auto exact = compute_gradients(m, batch);
    CHECK(exact.loss == doctest::Approx(batch_loss(m, batch)).epsilon(1e-12));
    const auto num = numeric_gradient(m, batch, 1e-6);
    for (std::size_t k = 0; k < num.size(); ++k) {
      const double err = std::abs(exact.grad[k] - num[k]) / std::max(1e-4, std::abs(exact.grad[k]) + std::abs(num[k]));
      worst = std::max(worst, err);
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("gradient: padding never enters, duplicates add up") {
  AdaLstmConfig cfg;
  cfg.loss_mode = LossMode::RawSum;
  const auto m = init_model(kThree, cfg, 4);
  Rng rng(3);
  const auto s = random_sequence(rng, 9), longer = random_sequence(rng, 20);
  const auto single = compute_gradients(m, make_batch({s}, {2}));
  const auto twice = compute_gradients(m, make_batch({s, s}, {2, 2}));
  for (std::size_t k = 0; k < single.grad.size(); ++k) {
    CHECK(twice.grad[k] == doctest::Approx(2 * single.grad[k]).epsilon(1e-12));
  }
  // The same sequence padded next to a longer one contributes exactly as before.
  const auto mixed = compute_gradients(m, make_batch({s, longer}, {2, 0}));
  const auto alone = compute_gradients(m, make_batch({longer}, {0}));
  for (std::size_t k = 0; k < single.grad.size(); ++k) {
    CHECK(mixed.grad[k] == doctest::Approx(single.grad[k] + alone.grad[k]).epsilon(1e-10));
  }
}

TEST_CASE("batches: padding and mask") {
  Rng rng(1);
  const auto a = random_sequence(rng, 2), b = random_sequence(rng, 5);
  const auto batch = make_batch({a, b}, {0, 1});
  CHECK(batch.max_len == 5);
  CHECK(batch.padded.size() == 30);
  std::size_t real = 0;
  for (auto v : batch.mask) real += v;
  CHECK(real == 7);
  for (std::size_t t = 2; t < 5; ++t) {
    CHECK(batch.mask[t] == 0);
    for (std::size_t d = 0; d < 3; ++d) CHECK(batch.padded[t * 3 + d] == 0.0);
  }
  CHECK(batch.sequence(0).size() == 6);
  CHECK_THROWS_CODE(make_batch({a, std::vector<AccelSample>{}}, {0, 1}), Errc::EmptySequence);
}

TEST_CASE("batches: partitioning by length") {
  std::vector<Episode> eps;
  for (std::size_t i = 0; i < 27; ++i) eps.push_back(episode_of_length(50 + i, i));
  CHECK(make_minibatches(eps, kThree, 27, 1).size() == 1);
  eps.push_back(episode_of_length(10, 27));
  const auto two = make_minibatches(eps, kThree, 27, 1);
  REQUIRE(two.size() == 2);
  std::multiset<std::size_t> sizes{two[0].size(), two[1].size()};
  CHECK(sizes == std::multiset<std::size_t>{1, 27});

  std::vector<Episode> grouped;
  std::size_t tag = 0;
  for (auto [count, len] : {std::pair{10, 100}, std::pair{17, 100}, std::pair{27, 500}}) {
    for (int i = 0; i < count; ++i) grouped.push_back(episode_of_length(static_cast<std::size_t>(len), tag++));
  }
  const auto batches = make_minibatches(grouped, kThree, 27, 9);
  CHECK(batches.size() == 2);
  std::set<std::size_t> seen;
  for (const auto& b : batches) {
    for (auto v : b.mask) CHECK(v == 1);
    for (auto i : b.episode_indices) seen.insert(i);
  }
  CHECK(seen.size() == grouped.size());
}

TEST_CASE("batches: every episode appears exactly once") {
  Rng rng(6);
  std::vector<Episode> eps;
  for (std::size_t i = 0; i < 100; ++i) eps.push_back(episode_of_length(1 + rng.below(40), i));
  const auto batches = make_minibatches(eps, kThree, 27, 4);
  std::vector<int> hits(eps.size(), 0);
  for (const auto& b : batches) {
    CHECK(b.size() <= 27);
    for (auto i : b.episode_indices) hits[i]++;
  }
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("schedule: step decay and fixed baseline") {
  const AdaLstmConfig cfg;
  CHECK(lr_schedule(cfg, 0) == 0.01);
  CHECK(lr_schedule(cfg, 19) == 0.01);
  CHECK(lr_schedule(cfg, 20) == 0.005);
  CHECK(lr_schedule(cfg, 45) == 0.0025);
  CHECK(lr_schedule(cfg, 99) == doctest::Approx(0.01 / 16));
  const auto fixed = AdaLstmConfig::fixed_lr_baseline();
  CHECK(fixed.schedule == LrSchedule::Fixed);
  CHECK(lr_schedule(fixed, 99) == 0.01);
}

TEST_CASE("adam: first step moves each weight by the learning rate") {
  std::vector<double> p{1.0, -2.0, 0.5};
  auto st = OptimizerState::for_params(3);
  const std::vector<double> g{0.3, -4.0, 0.0};
  adam_update(p, st, g, 0.9, 0.99, 0.01);
  CHECK(p[0] == doctest::Approx(0.99).epsilon(1e-9));
  CHECK(p[1] == doctest::Approx(-1.99).epsilon(1e-9));
  CHECK(p[2] == 0.5);
  CHECK(st.step == 1);

  // Second step against a reference computed from the update rule.
  const std::vector<double> g2{0.1, 1.0, 2.0};
  const double m0 = 0.9 * 0.03 + 0.1 * 0.1, v0 = 0.99 * 0.01 * 0.09 + 0.01 * 0.01;
  const double expect = p[0] - 0.01 * (m0 / (1 - 0.81)) / (std::sqrt(v0 / (1 - 0.9801)) + 1e-8);
  adam_update(p, st, g2, 0.9, 0.99, 0.01);
  CHECK(p[0] == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_CODE(adam_update(p, st, std::vector<double>{1.0}, 0.9, 0.99, 0.01), Errc::ShapeMismatch);
}

TEST_CASE("training: loss falls on synthetic chest data and is reproducible") {
  SynthConfig sc;
  sc.postures = kThree;
  sc.locations = {SensorLocation::Chest};
  const auto ds = generate_dataset(sc);
  REQUIRE(ds.episodes.size() == 60);
  std::vector<Episode> eps;
  for (const auto& e : ds.episodes) eps.push_back(normalize_episode(e));
  const AdaLstmConfig cfg;
  const auto m0 = init_model(ds.label_set, cfg, 1);
  const double initial = dataset_loss(m0, eps);
  const auto r = train(m0, eps, 2);
  CHECK(r.trace.size() == 100);
  CHECK(r.trace[20].lr == 0.005);
  CHECK(r.trace.back().mean_loss < r.trace.front().mean_loss);
  CHECK(dataset_loss(r.model, eps) < 0.1 * initial);
  CHECK(r.warnings.empty());
  std::size_t correct = 0;
  for (const auto& e : eps) correct += predict(r.model, e) == e.label;
  CHECK(correct >= 57);

  AdaLstmConfig short_cfg = cfg;
  short_cfg.max_epochs = 2;
  const auto a = train(init_model(ds.label_set, short_cfg, 1), eps, 2);
  const auto b = train(init_model(ds.label_set, short_cfg, 1), eps, 2);
  CHECK(a.model.params == b.model.params);
}

TEST_CASE("training: missing class is reported") {
  std::vector<Episode> eps{episode_of_length(10, 0)};
  AdaLstmConfig cfg;
  cfg.max_epochs = 1;
  const auto r = train(init_model(kThree, cfg, 1), eps, 1);
  CHECK(r.warnings.size() == 2);
  CHECK_THROWS_CODE(train(init_model(kThree, cfg, 1), {}, 1), Errc::EmptyDataset);
}

}  // TEST_SUITE
