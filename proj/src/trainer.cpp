#include "dam/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dam/rng.hpp"

namespace dam {

namespace {

constexpr int kEvalChunk = 4096;

double evaluate_on(const ClassifierModel<double>& model, const Eigen::MatrixXd& images,
                   const std::vector<int>& labels, GradFraming framing) {
  const int count = int(images.cols());
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  std::int64_t wrong = 0;
  for (int begin = 0; begin < count; begin += kEvalChunk) {
    const int len = std::min(kEvalChunk, count - begin);
    const Eigen::MatrixXd block = images.middleCols(begin, len);
    const Eigen::MatrixXd outputs =
        framing == GradFraming::Dual
            ? forward_dual_batch<double>(model, block)
            : forward_am_batch<double>(model, block, -1.0);
    const Eigen::VectorXi predicted = argmax_labels<double>(outputs);
    for (int k = 0; k < len; ++k)
      wrong += predicted[k] != labels[std::size_t(begin + k)];
  }
  return double(wrong) / double(count);
}

}  // namespace

double learning_rate_at(const TrainConfig& config, int epoch) {
  return config.eps0 * std::pow(config.decay, double(epoch));
}

double temperature_at(const TrainConfig& config, int epoch) {
  if (config.anneal_epochs <= 0 || epoch >= config.anneal_epochs) return config.t_final;
  return config.t_initial +
         (config.t_final - config.t_initial) * double(epoch) / double(config.anneal_epochs);
}

double beta_from_temperature(double temperature, int power) {
  return 1.0 / std::pow(temperature, double(power));
}

ClassifierModel<double> make_classifier(int memory_count, int visible, int classes,
                                        const EnergyModel& energy,
                                        const TrainConfig& config) {
  if (memory_count < 1 || visible < 1 || classes < 1)
    throw std::invalid_argument("make_classifier: bad dimensions");
  ClassifierModel<double> model;
  model.visible = visible;
  model.classes = classes;
  model.energy = energy;
  model.beta = beta_from_temperature(config.t_initial, energy.power);
  model.weights.resize(memory_count, visible + classes);
  Rng rng = make_stream(config.seed, streams::kWeightInit);
  for (int mu = 0; mu < memory_count; ++mu)
    for (int j = 0; j < visible + classes; ++j)
      model.weights(mu, j) =
          std::clamp(rng.next_gaussian(config.init_mean, config.init_std), -1.0, 1.0);
  return model;
}

void apply_update(ClassifierModel<double>& model, Eigen::MatrixXd& velocity,
                  const Eigen::MatrixXd& gradient, double eps, double momentum) {
  if (velocity.rows() != gradient.rows() || velocity.cols() != gradient.cols() ||
      model.weights.rows() != gradient.rows() || model.weights.cols() != gradient.cols())
    throw std::invalid_argument("apply_update: shape mismatch");
  velocity = momentum * velocity - gradient;
  const Eigen::VectorXd row_max = velocity.cwiseAbs().rowwise().maxCoeff();
  const Eigen::VectorXd scale =
      (row_max.array() > 0.0).select(eps / row_max.array(), 0.0);
  model.weights += (velocity.array().colwise() * scale.array()).matrix();
  model.weights = model.weights.cwiseMax(-1.0).cwiseMin(1.0);
}

std::vector<EpochMetrics> train(ClassifierModel<double>& model,
                                const LabeledImageSet& train_set,
                                const LabeledImageSet* validation_set,
                                const LabeledImageSet* test_set,
                                const TrainConfig& config,
                                const std::function<void(const EpochMetrics&)>& on_epoch) {
  config.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (train_set.pixels() != model.visible || train_set.classes != model.classes)
    throw std::invalid_argument("train: dataset does not match model shape");

  Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(model.weights.rows(), model.weights.cols());
  std::vector<EpochMetrics> history;
  history.reserve(std::size_t(config.epochs));

  // Per-epoch train error optionally over a fixed-size leading subsample;
  // the gradient path always sees the full set.
  std::vector<int> eval_idx;
  if (config.train_eval_cap > 0 && config.train_eval_cap < train_set.count()) {
    eval_idx.resize(std::size_t(config.train_eval_cap));
    for (int k = 0; k < config.train_eval_cap; ++k) eval_idx[std::size_t(k)] = k;
  }
  const LabeledImageSet train_eval_set =
      eval_idx.empty() ? LabeledImageSet{} : train_set.subset(eval_idx);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double temperature = temperature_at(config, epoch);
    model.beta = beta_from_temperature(temperature, model.energy.power);
    const double eps = learning_rate_at(config, epoch);

    const auto batches = minibatch_indices(train_set, config.per_class, config.seed, epoch);
    if (batches.empty())
      throw std::invalid_argument("train: no full minibatch available (per_class too large)");

    int batch_index = 0;
    for (const auto& batch : batches) {
      const LabeledImageSet part = train_set.subset(batch);
      double loss = 0.0;
      if (config.framing == GradFraming::Dual) {
        const Eigen::MatrixXd targets =
            targets_from_labels<double>(part.labels, model.classes);
        GradResult<double> result =
            grad_dual<double>(model, part.images, targets, config.loss_power);
        loss = result.loss;
        if (std::isfinite(loss))
          apply_update(model, velocity, result.gradient, eps, config.momentum);
      } else {
        const MinibatchTensors<double> tensors =
            build_minibatch_tensors<double>(part.images, part.labels, model.classes);
        GradResult<double> result = grad_am<double>(model, tensors, config.loss_power);
        loss = result.loss;
        if (std::isfinite(loss))
          apply_update(model, velocity, result.gradient, eps, config.momentum);
      }
      if (!std::isfinite(loss))
        throw TrainingDiverged("train: non-finite loss at epoch " +
                                   std::to_string(epoch + 1) + ", minibatch " +
                                   std::to_string(batch_index) + " (eps " +
                                   std::to_string(eps) + ", T " +
                                   std::to_string(temperature) + ")",
                               epoch + 1, batch_index);
      ++batch_index;
    }

    EpochMetrics metrics;
    metrics.epoch = epoch + 1;
    metrics.learning_rate = eps;
    metrics.temperature = temperature;
    metrics.train_error = evaluate_on(
        model, eval_idx.empty() ? train_set.images : train_eval_set.images,
        eval_idx.empty() ? train_set.labels : train_eval_set.labels, config.framing);
    metrics.validation_error =
        validation_set && !validation_set->empty()
            ? evaluate_on(model, validation_set->images, validation_set->labels,
                          config.framing)
            : std::numeric_limits<double>::quiet_NaN();
    metrics.test_error =
        test_set && !test_set->empty()
            ? evaluate_on(model, test_set->images, test_set->labels, config.framing)
            : std::numeric_limits<double>::quiet_NaN();
    history.push_back(metrics);
    if (on_epoch) on_epoch(metrics);
  }
  return history;
}

Eigen::VectorXi predict(const ClassifierModel<double>& model, const Eigen::MatrixXd& images,
                        GradFraming framing) {
  const Eigen::MatrixXd outputs = framing == GradFraming::Dual
                                      ? forward_dual_batch<double>(model, images)
                                      : forward_am_batch<double>(model, images, -1.0);
  return argmax_labels<double>(outputs);
}

double evaluate(const ClassifierModel<double>& model, const LabeledImageSet& data,
                GradFraming framing) {
  return evaluate_on(model, data.images, data.labels, framing);
}

}  // namespace dam
