#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "dam/rng.hpp"
#include "dam/synth.hpp"
#include "dam/trainer.hpp"

using namespace dam;

TEST_CASE("learning rate decay is epoch-indexed") {
  TrainConfig config;
  config.eps0 = 0.04;
  config.decay = 0.998;
  CHECK(learning_rate_at(config, 0) == 0.04);
  CHECK(learning_rate_at(config, 100) / config.eps0 ==
        doctest::Approx(0.8187).epsilon(2e-4));
}

TEST_CASE("temperature anneal is linear then constant") {
  TrainConfig config;
  config.t_initial = 400.0;
  config.t_final = 100.0;
  config.anneal_epochs = 200;
  CHECK(temperature_at(config, 0) == 400.0);
  CHECK(temperature_at(config, 100) == doctest::Approx(250.0));
  CHECK(temperature_at(config, 200) == 100.0);
  CHECK(temperature_at(config, 2000) == 100.0);
  CHECK(beta_from_temperature(10.0, 3) == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("apply_update normalises by the per-memory velocity maximum") {
  ClassifierModel<double> model;
  model.visible = 2;
  model.classes = 1;
  model.energy = rectified(2);
  model.weights = Eigen::MatrixXd::Zero(1, 3);
  Eigen::MatrixXd velocity(1, 3);
  velocity.setZero();
  Eigen::MatrixXd gradient(1, 3);
  gradient << -0.5, 1.0, -0.25;  // velocity becomes (0.5, -1.0, 0.25)
  apply_update(model, velocity, gradient, 0.01, 0.0);
  CHECK(model.weights(0, 0) == doctest::Approx(0.005).epsilon(1e-14));
  CHECK(model.weights(0, 1) == doctest::Approx(-0.01).epsilon(1e-14));
  CHECK(model.weights(0, 2) == doctest::Approx(0.0025).epsilon(1e-14));
}

TEST_CASE("apply_update clips to the weight box") {
  ClassifierModel<double> model;
  model.visible = 1;
  model.classes = 1;
  model.energy = rectified(2);
  model.weights = Eigen::MatrixXd::Ones(1, 2);
  Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(1, 2);
  Eigen::MatrixXd gradient(1, 2);
  gradient << -1.0, -1.0;  // pushes weights further up
  apply_update(model, velocity, gradient, 0.5, 0.0);
  CHECK(model.weights(0, 0) == 1.0);
  CHECK(model.weights(0, 1) == 1.0);
}

TEST_CASE("apply_update skips all-zero velocity rows") {
  ClassifierModel<double> model;
  model.visible = 2;
  model.classes = 1;
  model.energy = rectified(2);
  model.weights = Eigen::MatrixXd::Constant(2, 3, 0.25);
  Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(2, 3);
  Eigen::MatrixXd gradient = Eigen::MatrixXd::Zero(2, 3);
  gradient(1, 2) = -0.125;
  apply_update(model, velocity, gradient, 0.01, 0.9);
  CHECK(model.weights.row(0) == Eigen::MatrixXd::Constant(1, 3, 0.25).row(0));
  CHECK(model.weights(1, 2) == doctest::Approx(0.26).epsilon(1e-12));
}

TEST_CASE("momentum accumulates across updates") {
  ClassifierModel<double> model;
  model.visible = 1;
  model.classes = 1;
  model.energy = rectified(2);
  model.weights = Eigen::MatrixXd::Zero(1, 2);
  Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(1, 2);
  Eigen::MatrixXd gradient(1, 2);
  gradient << -1.0, 0.0;
  apply_update(model, velocity, gradient, 0.1, 0.5);
  CHECK(velocity(0, 0) == 1.0);
  apply_update(model, velocity, gradient, 0.1, 0.5);
  CHECK(velocity(0, 0) == 1.5);  // 0.5 * 1 + 1
}

TEST_CASE("make_classifier draws clipped gaussian weights") {
  TrainConfig config;
  config.seed = 7;
  const auto model = make_classifier(400, 49, 10, rectified(3), config);
  CHECK(model.shape_ok());
  CHECK(model.in_box());
  const double mean = model.weights.array().mean();
  CHECK(mean == doctest::Approx(-0.3).epsilon(0.05));
  // beta initialised from t_initial
  CHECK(model.beta ==
        doctest::Approx(beta_from_temperature(config.t_initial, 3)).epsilon(1e-12));
}

TEST_CASE("train drives a small synthetic problem to low error") {
  const LabeledImageSet train_set = make_synthetic_dataset(600, 11);
  const LabeledImageSet test_set = make_synthetic_dataset(200, 12);

  TrainConfig config;
  config.seed = 3;
  config.epochs = 60;
  config.per_class = 10;
  config.loss_power = 3;
  config.eps0 = 0.04;
  config.momentum = 0.9;
  config.t_initial = 450.0;
  config.t_final = 300.0;
  config.anneal_epochs = 30;

  auto model = make_classifier(60, train_set.pixels(), 10, rectified(3), config);
  const auto history = train(model, train_set, nullptr, &test_set, config);
  REQUIRE(history.size() == 60);
  CHECK(model.in_box());
  CHECK(std::isnan(history.front().validation_error));
  CHECK(history.front().epoch == 1);
  CHECK(history.back().epoch == 60);
  CHECK(history.back().test_error < history.front().test_error);
  CHECK(history.back().train_error <= 0.05);
  // the recorded schedule matches the closed forms
  CHECK(history[5].learning_rate ==
        doctest::Approx(learning_rate_at(config, 5)).epsilon(1e-12));
  CHECK(history[5].temperature == doctest::Approx(temperature_at(config, 5)));
}

TEST_CASE("both framings train with identical schedules and stay in the box") {
  const LabeledImageSet train_set = make_synthetic_dataset(200, 21);
  for (GradFraming framing : {GradFraming::Dual, GradFraming::AssociativeMemory}) {
    TrainConfig config;
    config.seed = 5;
    config.epochs = 3;
    config.per_class = 10;
    config.framing = framing;
    config.t_initial = 150.0;
    config.t_final = 80.0;
    config.anneal_epochs = 10;
    auto model = make_classifier(20, train_set.pixels(), 10, rectified(2), config);
    const auto history = train(model, train_set, nullptr, nullptr, config);
    CHECK(history.size() == 3);
    CHECK(model.in_box());
    CHECK(std::isnan(history.back().test_error));
  }
}

TEST_CASE("training is deterministic in the seed") {
  const LabeledImageSet train_set = make_synthetic_dataset(200, 31);
  TrainConfig config;
  config.seed = 9;
  config.epochs = 4;
  config.per_class = 10;
  auto first = make_classifier(15, train_set.pixels(), 10, rectified(3), config);
  auto second = make_classifier(15, train_set.pixels(), 10, rectified(3), config);
  const auto h1 = train(first, train_set, nullptr, nullptr, config);
  const auto h2 = train(second, train_set, nullptr, nullptr, config);
  CHECK(first.weights == second.weights);
  for (std::size_t e = 0; e < h1.size(); ++e)
    CHECK(h1[e].train_error == h2[e].train_error);
}

TEST_CASE("NaN loss aborts with a diagnostic") {
  LabeledImageSet poisoned = make_synthetic_dataset(100, 41);
  poisoned.images(0, 0) = std::numeric_limits<double>::quiet_NaN();
  TrainConfig config;
  config.seed = 1;
  config.epochs = 2;
  config.per_class = 10;
  auto model = make_classifier(10, poisoned.pixels(), 10, rectified(3), config);
  CHECK_THROWS_AS(train(model, poisoned, nullptr, nullptr, config), TrainingDiverged);
}

TEST_CASE("evaluate: memorised tiny dataset and chance-level random weights") {
  // one example per class, trained to exact memorisation
  const LabeledImageSet ten = make_synthetic_dataset(10, 51);
  TrainConfig config;
  config.seed = 2;
  config.epochs = 60;
  config.per_class = 1;
  config.loss_power = 3;
  config.eps0 = 0.04;
  config.momentum = 0.9;
  config.t_initial = 350.0;
  config.t_final = 250.0;
  config.anneal_epochs = 20;
  auto model = make_classifier(20, ten.pixels(), 10, rectified(3), config);
  train(model, ten, nullptr, nullptr, config);
  CHECK(evaluate(model, ten) == 0.0);
  CHECK(evaluate(model, ten.subset({3})) == 0.0);

  // uniform random recognition weights on a balanced set: error ~ 0.9
  const LabeledImageSet balanced = make_synthetic_dataset(4000, 52);
  Rng rng = make_stream(53, 1);
  ClassifierModel<double> random;
  random.visible = balanced.pixels();
  random.classes = 10;
  random.energy = rectified(3);
  random.beta = 1e-6;
  random.weights.resize(40, random.visible + 10);
  for (int mu = 0; mu < 40; ++mu)
    for (int j = 0; j < random.units(); ++j)
      random.weights(mu, j) = rng.next_double() * 2.0 - 1.0;
  const double err = evaluate(random, balanced);
  CHECK(err >= 0.8);
  CHECK(err <= 1.0);
}

TEST_CASE("invalid configs are rejected") {
  TrainConfig config;
  config.decay = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = {};
  config.momentum = 1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = {};
  config.loss_power = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
