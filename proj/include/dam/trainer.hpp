#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dam/classifier.hpp"
#include "dam/data.hpp"

namespace dam {

enum class GradFraming { Dual, AssociativeMemory };

// Full training recipe: 2m-power objective, per-memory max-normalised momentum
// updates, exponential learning-rate decay, linear temperature anneal.
struct TrainConfig {
  int loss_power = 3;       // m
  int epochs = 100;
  double eps0 = 0.02;
  double decay = 0.998;     // epoch-indexed: eps(t) = eps0 * decay^t
  double momentum = 0.8;    // p
  double t_initial = 300.0;
  double t_final = 50.0;
  int anneal_epochs = 200;  // linear T_i -> T_f over these epochs, then constant
  int per_class = 100;      // minibatch composition
  std::uint64_t seed = 0;
  GradFraming framing = GradFraming::Dual;
  double init_mean = -0.3;
  double init_std = 0.3;
  int train_eval_cap = 0;   // >0: per-epoch train error over this many examples

  void validate() const {
    if (loss_power < 1) throw std::invalid_argument("TrainConfig: loss_power < 1");
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs < 1");
    if (!(decay > 0.0 && decay <= 1.0))
      throw std::invalid_argument("TrainConfig: decay outside (0, 1]");
    if (!(momentum >= 0.0 && momentum < 1.0))
      throw std::invalid_argument("TrainConfig: momentum outside [0, 1)");
    if (!(t_initial > 0.0 && t_final > 0.0))
      throw std::invalid_argument("TrainConfig: temperatures must be positive");
    if (anneal_epochs < 0) throw std::invalid_argument("TrainConfig: anneal_epochs < 0");
    if (per_class < 1) throw std::invalid_argument("TrainConfig: per_class < 1");
  }
};

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double train_error = 0.0;
  double validation_error = 0.0;  // NaN when no validation set
  double test_error = 0.0;        // NaN when no test set
  double learning_rate = 0.0;
  double temperature = 0.0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, int epoch, int batch)
      : std::runtime_error(what), epoch(epoch), batch(batch) {}
  int epoch = 0;
  int batch = 0;
};

double learning_rate_at(const TrainConfig& config, int epoch);
double temperature_at(const TrainConfig& config, int epoch);
double beta_from_temperature(double temperature, int power);

// Gaussian(init_mean, init_std) weights clipped to [-1, 1].
ClassifierModel<double> make_classifier(int memory_count, int visible, int classes,
                                        const EnergyModel& energy,
                                        const TrainConfig& config);

// Momentum step with the per-memory max-normalisation, then box clipping.
// Rows whose velocity is identically zero are left untouched.
void apply_update(ClassifierModel<double>& model, Eigen::MatrixXd& velocity,
                  const Eigen::MatrixXd& gradient, double eps, double momentum);

// Stratified-minibatch descent in the selected framing. Records
// train/validation/test error per epoch; beta is recomputed from the
// temperature schedule each epoch. Throws TrainingDiverged on a NaN loss.
std::vector<EpochMetrics> train(
    ClassifierModel<double>& model, const LabeledImageSet& train_set,
    const LabeledImageSet* validation_set, const LabeledImageSet* test_set,
    const TrainConfig& config,
    const std::function<void(const EpochMetrics&)>& on_epoch = {});

Eigen::VectorXi predict(const ClassifierModel<double>& model,
                        const Eigen::MatrixXd& images,
                        GradFraming framing = GradFraming::Dual);

// Fraction of mismatched labels under argmax readout.
double evaluate(const ClassifierModel<double>& model, const LabeledImageSet& data,
                GradFraming framing = GradFraming::Dual);

}  // namespace dam
