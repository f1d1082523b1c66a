#include "dam/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace dam {

namespace {

void write_counts_csv(const std::vector<std::int64_t>& counts, const char* key,
                      const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << key << ",count\n";
  for (std::size_t k = 0; k < counts.size(); ++k) out << k << ',' << counts[k] << '\n';
}

std::string format_metric(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace

double VoteHistogram::mean() const {
  if (total == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) acc += double(k) * double(counts[k]);
  return acc / double(total);
}

VoteHistogram votes_per_memory(const ClassifierModel<double>& model, double cutoff) {
  if (!model.shape_ok()) throw std::invalid_argument("votes_per_memory: bad model");
  VoteHistogram histogram;
  histogram.cutoff = cutoff;
  histogram.counts.assign(std::size_t(model.classes) + 1, 0);
  const auto recognition = model.class_weights();
  for (int mu = 0; mu < model.memory_count(); ++mu) {
    const int votes = int((recognition.row(mu).array() > cutoff).count());
    ++histogram.counts[std::size_t(votes)];
    ++histogram.total;
  }
  return histogram;
}

double ContributionHistogram::fraction_single() const {
  if (total == 0) return 0.0;
  return double(counts[1]) / double(total);
}

int count_within_band(const Eigen::VectorXd& terms, double band) {
  const double top = terms.maxCoeff();
  // A non-positive maximum would make band*top exceed the maximum itself;
  // fall back to counting exact ties so the maximizer always counts.
  const double threshold = top > 0.0 ? band * top : top;
  return int((terms.array() >= threshold).count());
}

ContributionHistogram dominant_contributions(const ClassifierModel<double>& model,
                                             const LabeledImageSet& data, double band,
                                             GapChannel channel) {
  if (!model.shape_ok()) throw std::invalid_argument("dominant_contributions: bad model");
  if (data.pixels() != model.visible)
    throw std::invalid_argument("dominant_contributions: dataset/model size mismatch");

  ContributionHistogram histogram;
  histogram.band = band;
  histogram.counts.assign(std::size_t(model.memory_count()) + 1, 0);

  const auto& energy = model.energy;
  const Eigen::VectorXd class_sums = model.class_weights().rowwise().sum();
  Eigen::VectorXd base(model.memory_count());
  Eigen::VectorXd terms(model.memory_count());
  Eigen::VectorXd gaps(model.classes);

  for (int ex = 0; ex < data.count(); ++ex) {
    // x_init = -1 clamped-configuration terms, the summand of the one-step
    // update on the classification units.
    base = model.visible_weights() * data.images.col(ex) - class_sums;
    Eigen::VectorXd base_F =
        base.unaryExpr([&](double v) { return eval_F(v, energy); });

    int selected = 0;
    if (channel == GapChannel::TrueLabel) {
      selected = data.labels[std::size_t(ex)];
    } else {
      for (int a = 0; a < model.classes; ++a)
        gaps[a] = ((base + 2.0 * model.class_weights().col(a))
                       .unaryExpr([&](double v) { return eval_F(v, energy); }) -
                   base_F)
                      .sum();
      Eigen::Index best = 0;
      gaps.maxCoeff(&best);
      selected = int(best);
    }

    terms = (base + 2.0 * model.class_weights().col(selected))
                .unaryExpr([&](double v) { return eval_F(v, energy); }) -
            base_F;
    const int j = count_within_band(terms, band);
    ++histogram.counts[std::size_t(j)];
    ++histogram.total;
  }
  return histogram;
}

void export_memory_images(const ClassifierModel<double>& model,
                          const std::vector<int>& indices, const std::string& directory,
                          int rows, int cols) {
  if (rows * cols != model.visible)
    throw std::invalid_argument("export_memory_images: rows*cols != visible units");
  std::filesystem::create_directories(directory);
  std::ofstream side(directory + "/recognition.csv", std::ios::trunc);
  side << "memory";
  for (int a = 0; a < model.classes; ++a) side << ",xi_class_" << a;
  side << '\n';
  for (int idx : indices) {
    if (idx < 0 || idx >= model.memory_count())
      throw std::invalid_argument("export_memory_images: memory index out of range");
    std::ofstream pgm(directory + "/memory_" + std::to_string(idx) + ".pgm",
                      std::ios::binary | std::ios::trunc);
    pgm << "P5\n" << cols << ' ' << rows << "\n255\n";
    for (int p = 0; p < model.visible; ++p) {
      const double w = model.weights(idx, p);
      const auto byte =
          std::uint8_t(std::lround(std::clamp((w + 1.0) * 127.5, 0.0, 255.0)));
      pgm.put(char(byte));
    }
    side << idx;
    for (int a = 0; a < model.classes; ++a)
      side << ',' << format_metric(model.weights(idx, model.visible + a));
    side << '\n';
  }
}

void export_training_curve(const std::vector<EpochMetrics>& metrics,
                           const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "epoch,train_err,val_err,test_err,lr,T\n";
  for (const EpochMetrics& m : metrics)
    out << m.epoch << ',' << format_metric(m.train_error) << ','
        << format_metric(m.validation_error) << ',' << format_metric(m.test_error)
        << ',' << format_metric(m.learning_rate) << ',' << format_metric(m.temperature)
        << '\n';
}

std::optional<int> first_crossing(const std::vector<double>& errors, double threshold) {
  for (std::size_t k = 0; k < errors.size(); ++k)
    if (errors[k] < threshold) return int(k) + 1;
  return std::nullopt;
}

void export_crossing_summary(const std::vector<EpochMetrics>& metrics, double threshold,
                             const std::string& path) {
  std::vector<double> test_errors;
  test_errors.reserve(metrics.size());
  for (const EpochMetrics& m : metrics) test_errors.push_back(m.test_error);
  const auto crossing = first_crossing(test_errors, threshold);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "{\"threshold\": " << format_metric(threshold) << ", \"crossing_epoch\": ";
  if (crossing)
    out << *crossing;
  else
    out << "null";
  out << "}\n";
}

void write_vote_csv(const VoteHistogram& votes, const std::string& path) {
  write_counts_csv(votes.counts, "k", path);
}

void write_contribution_csv(const ContributionHistogram& contributions,
                            const std::string& path) {
  write_counts_csv(contributions.counts, "j", path);
}

}  // namespace dam
