#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "dam/energy.hpp"

namespace dam {

// Dense-memory classifier: K continuous memories over N visible plus Nc
// classification units, entries kept in [-1, 1]; the overall weight scale is
// absorbed into beta.
template <class Scalar>
struct ClassifierModel {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Mat weights;  // K x (visible + classes), one row per memory
  int visible = 0;
  int classes = 0;
  EnergyModel energy;
  Scalar beta = Scalar(1);

  int memory_count() const { return int(weights.rows()); }
  int units() const { return visible + classes; }

  auto visible_weights() const { return weights.leftCols(visible); }
  auto class_weights() const { return weights.rightCols(classes); }

  bool shape_ok() const {
    return visible >= 1 && classes >= 1 && weights.cols() == visible + classes &&
           weights.rows() >= 1 && beta > Scalar(0);
  }
  bool in_box() const {
    return (weights.array().abs() <= Scalar(1)).all();
  }
};

namespace detail {

template <class Scalar, class Derived>
auto apply_kind_power(const Eigen::ArrayBase<Derived>& x, int p, EnergyKind kind) {
  return x.unaryExpr([p, kind](Scalar v) { return kind_power(v, p, kind); });
}

template <class Scalar>
void check_images(const ClassifierModel<Scalar>& model,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& images,
                  const char* where) {
  if (!model.shape_ok()) throw std::invalid_argument(std::string(where) + ": bad model");
  if (images.rows() != model.visible)
    throw std::invalid_argument(std::string(where) + ": image rows != visible units");
}

}  // namespace detail

// One-step update of the classification units with the visible units clamped
// to the image and every classification unit initialised at x_init:
//   c_a = tanh(beta * sum_mu [F(base_mu - 2 x_init xi_mu_a) - F(base_mu)]),
//   base_mu = xi_vis . v + x_init * sum_g xi_mu_g.
// x_init = -1 reproduces the U/V minibatch form; x_init = -eps with
// beta = 1/(2 eps) approaches the feedforward dual.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> forward_am_batch(
    const ClassifierModel<Scalar>& model,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& images,
    Scalar x_init) {
  detail::check_images(model, images, "forward_am");
  using Mat = typename ClassifierModel<Scalar>::Mat;
  const int batch = int(images.cols());
  const auto& energy = model.energy;

  Mat base = model.visible_weights() * images;  // K x M
  base.colwise() += (x_init * model.class_weights().rowwise().sum()).eval();

  using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  const RowVec base_sums =
      detail::apply_kind_power<Scalar>(base.array(), energy.power, energy.kind)
          .colwise()
          .sum()
          .matrix();

  Mat pre(model.classes, batch);
  Mat shifted(base.rows(), base.cols());
  for (int a = 0; a < model.classes; ++a) {
    shifted = base;
    shifted.colwise() += (Scalar(-2) * x_init * model.class_weights().col(a)).eval();
    pre.row(a) =
        detail::apply_kind_power<Scalar>(shifted.array(), energy.power, energy.kind)
            .colwise()
            .sum()
            .matrix() -
        base_sums;
  }
  return (model.beta * pre).array().tanh().matrix();
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> forward_am(
    const ClassifierModel<Scalar>& model,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& image, Scalar x_init) {
  return forward_am_batch<Scalar>(model, image, x_init).col(0);
}

// Activation used on the hidden pre-activations h_mu = xi_vis . v in the
// feedforward description.
enum class DualActivation {
  TrainingPower,     // kind-power of degree n, the minibatch training form
  EnergyDerivative,  // f = F' = n * kind-power of degree n-1, the strict dual
};

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> forward_dual_batch(
    const ClassifierModel<Scalar>& model,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& images,
    DualActivation activation = DualActivation::TrainingPower) {
  detail::check_images(model, images, "forward_dual");
  using Mat = typename ClassifierModel<Scalar>::Mat;
  const auto& energy = model.energy;

  const Mat hidden = model.visible_weights() * images;  // K x M
  Mat activated(hidden.rows(), hidden.cols());
  if (activation == DualActivation::TrainingPower) {
    activated =
        detail::apply_kind_power<Scalar>(hidden.array(), energy.power, energy.kind)
            .matrix();
  } else {
    activated = hidden.unaryExpr([&energy](Scalar v) { return eval_f(v, energy); });
  }
  Mat pre = model.class_weights().transpose() * activated;  // Nc x M
  return (model.beta * pre).array().tanh().matrix();
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> forward_dual(
    const ClassifierModel<Scalar>& model,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& image,
    DualActivation activation = DualActivation::TrainingPower) {
  return forward_dual_batch<Scalar>(model, image, activation).col(0);
}

// C = sum over examples and classes of (c - t)^(2m).
template <class Scalar>
Scalar loss_value(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& outputs,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& targets,
                  int loss_power) {
  if (loss_power < 1) throw std::invalid_argument("loss: power must be >= 1");
  if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
    throw std::invalid_argument("loss: output/target shape mismatch");
  return (outputs - targets)
      .array()
      .unaryExpr([loss_power](Scalar d) { return pow_int(d, 2 * loss_power); })
      .sum();
}

// Target matrix with +1 on the labelled class, -1 elsewhere.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> targets_from_labels(
    const std::vector<int>& labels, int classes) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> targets(classes,
                                                                Eigen::Index(labels.size()));
  targets.setConstant(Scalar(-1));
  for (std::size_t a = 0; a < labels.size(); ++a) {
    if (labels[a] < 0 || labels[a] >= classes)
      throw std::invalid_argument("targets_from_labels: label out of range");
    targets(labels[a], Eigen::Index(a)) = Scalar(1);
  }
  return targets;
}

// The (N+Nc) x (M*Nc) clamped-configuration matrices of the minibatch form.
// Fused column index a = A*Nc + alpha. The visible rows of U and V both carry
// the image; U's classification rows are all -1, V's flip unit alpha on.
template <class Scalar>
struct MinibatchTensors {
  using Mat = typename ClassifierModel<Scalar>::Mat;
  Mat U, V;
  Mat targets;  // Nc x M
  int examples = 0;
  int classes = 0;
};

template <class Scalar>
MinibatchTensors<Scalar> build_minibatch_tensors(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& images,
    const std::vector<int>& labels, int classes) {
  if (std::size_t(images.cols()) != labels.size())
    throw std::invalid_argument("build_minibatch_tensors: image/label count mismatch");
  MinibatchTensors<Scalar> out;
  const int visible = int(images.rows());
  const int batch = int(images.cols());
  out.examples = batch;
  out.classes = classes;
  out.U.resize(visible + classes, batch * classes);
  out.V.resize(visible + classes, batch * classes);
  for (int ex = 0; ex < batch; ++ex) {
    for (int a = 0; a < classes; ++a) {
      const int col = ex * classes + a;
      out.U.col(col).head(visible) = images.col(ex);
      out.U.col(col).tail(classes).setConstant(Scalar(-1));
      out.V.col(col) = out.U.col(col);
      out.V(visible + a, col) = Scalar(1);
    }
  }
  out.targets = targets_from_labels<Scalar>(labels, classes);
  return out;
}

template <class Scalar>
struct GradResult {
  typename ClassifierModel<Scalar>::Mat gradient;  // K x (visible + classes)
  typename ClassifierModel<Scalar>::Mat outputs;   // Nc x M
  Scalar loss = Scalar(0);
};

// dC/dxi in the clamped-configuration framing:
//   (2 m beta n) sum_{a,A} (c-t)^(2m-1) (1-c^2)
//                [P_{n-1}(xi.V) V_I - P_{n-1}(xi.U) U_I],
// with P the kind-power. Evaluated as two K x (M Nc) by (M Nc) x (N+Nc)
// matrix products over the fused (alpha, A) index.
template <class Scalar>
GradResult<Scalar> grad_am(const ClassifierModel<Scalar>& model,
                           const MinibatchTensors<Scalar>& batch, int loss_power) {
  using Mat = typename ClassifierModel<Scalar>::Mat;
  using RowArr = Eigen::Array<Scalar, 1, Eigen::Dynamic>;
  if (!model.shape_ok() || batch.classes != model.classes)
    throw std::invalid_argument("grad_am: bad model/batch");
  const auto& energy = model.energy;
  const int n = energy.power;

  const Mat YV = model.weights * batch.V;  // K x M*Nc
  const Mat YU = model.weights * batch.U;

  RowArr pre = (detail::apply_kind_power<Scalar>(YV.array(), n, energy.kind) -
                detail::apply_kind_power<Scalar>(YU.array(), n, energy.kind))
                   .colwise()
                   .sum();
  pre *= model.beta;
  const RowArr c = pre.tanh();

  RowArr t(batch.examples * batch.classes);
  for (int ex = 0; ex < batch.examples; ++ex)
    for (int a = 0; a < batch.classes; ++a)
      t(ex * batch.classes + a) = batch.targets(a, ex);

  const RowArr diff = c - t;
  const RowArr scale =
      Scalar(2 * loss_power) * model.beta * Scalar(n) *
      diff.unaryExpr([loss_power](Scalar d) { return pow_int(d, 2 * loss_power - 1); }) *
      (Scalar(1) - c.square());

  GradResult<Scalar> out;
  out.gradient =
      (detail::apply_kind_power<Scalar>(YV.array(), n - 1, energy.kind).rowwise() * scale)
          .matrix() *
          batch.V.transpose() -
      (detail::apply_kind_power<Scalar>(YU.array(), n - 1, energy.kind).rowwise() * scale)
          .matrix() *
          batch.U.transpose();

  out.outputs.resize(batch.classes, batch.examples);
  for (int ex = 0; ex < batch.examples; ++ex)
    for (int a = 0; a < batch.classes; ++a)
      out.outputs(a, ex) = c(ex * batch.classes + a);
  out.loss = loss_value<Scalar>(out.outputs, batch.targets, loss_power);
  return out;
}

// dC/dxi in the feedforward framing (TrainingPower activation):
//   visible:  (2 m beta n) sum_A G xi_a P_{n-1}(h) v_i
//   class:    (2 m beta)   sum_A G P_n(h)
// with G = (c-t)^(2m-1) (1-c^2) and h = xi_vis . v.
template <class Scalar>
GradResult<Scalar> grad_dual(
    const ClassifierModel<Scalar>& model,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& images,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& targets,
    int loss_power) {
  using Mat = typename ClassifierModel<Scalar>::Mat;
  detail::check_images(model, images, "grad_dual");
  if (targets.rows() != model.classes || targets.cols() != images.cols())
    throw std::invalid_argument("grad_dual: bad target shape");
  const auto& energy = model.energy;
  const int n = energy.power;

  const Mat hidden = model.visible_weights() * images;  // K x M
  const Mat activated =
      detail::apply_kind_power<Scalar>(hidden.array(), n, energy.kind).matrix();
  const Mat pre = model.beta * (model.class_weights().transpose() * activated);
  const Mat c = pre.array().tanh().matrix();

  const Mat G =
      ((c - targets)
           .array()
           .unaryExpr([loss_power](Scalar d) { return pow_int(d, 2 * loss_power - 1); }) *
       (Scalar(1) - c.array().square()))
          .matrix();  // Nc x M

  GradResult<Scalar> out;
  out.gradient.resize(model.memory_count(), model.units());
  out.gradient.rightCols(model.classes) =
      Scalar(2 * loss_power) * model.beta * (activated * G.transpose());

  const Mat back = model.class_weights() * G;  // K x M
  out.gradient.leftCols(model.visible) =
      Scalar(2 * loss_power) * model.beta * Scalar(n) *
      ((back.array() * detail::apply_kind_power<Scalar>(hidden.array(), n - 1, energy.kind))
           .matrix() *
       images.transpose());

  out.outputs = c;
  out.loss = loss_value<Scalar>(c, targets, loss_power);
  return out;
}

// Predicted class per image: argmax over the output units (first index wins
// ties). Invariant under any positive rescaling of beta.
template <class Scalar>
Eigen::VectorXi argmax_labels(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& outputs) {
  Eigen::VectorXi labels(outputs.cols());
  for (Eigen::Index ex = 0; ex < outputs.cols(); ++ex) {
    Eigen::Index best = 0;
    outputs.col(ex).maxCoeff(&best);
    labels[int(ex)] = int(best);
  }
  return labels;
}

}  // namespace dam
