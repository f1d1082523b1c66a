#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dam/classifier.hpp"
#include "dam/data.hpp"
#include "dam/trainer.hpp"

namespace dam {

// counts[k] = number of memories whose recognition row has exactly k entries
// above the cutoff ("on" votes).
struct VoteHistogram {
  std::vector<std::int64_t> counts;  // index k in [0, classes]
  double cutoff = 0.5;
  std::int64_t total = 0;

  double mean() const;
};

VoteHistogram votes_per_memory(const ClassifierModel<double>& model, double cutoff = 0.5);

// counts[j] = number of test images for which exactly j memories contribute
// at least `band` of the largest per-memory term of the output-channel gap.
struct ContributionHistogram {
  std::vector<std::int64_t> counts;  // index j in [0, K]; j >= 1 always
  double band = 0.9;
  std::int64_t total = 0;

  double fraction_single() const;  // share of images with j == 1
};

enum class GapChannel { Predicted, TrueLabel };

ContributionHistogram dominant_contributions(const ClassifierModel<double>& model,
                                             const LabeledImageSet& data,
                                             double band = 0.9,
                                             GapChannel channel = GapChannel::Predicted);

// Pure counting rule, exposed for direct testing: terms >= band * max(terms)
// when the maximum is positive, exact ties with the maximum otherwise.
int count_within_band(const Eigen::VectorXd& terms, double band);

// Visible part of each selected memory as an 8-bit PGM (the documented
// [-1,1] -> [0,255] affine map, 0 -> 128); recognition rows collected in a
// side CSV. rows*cols must equal the visible unit count.
void export_memory_images(const ClassifierModel<double>& model,
                          const std::vector<int>& indices, const std::string& directory,
                          int rows = 28, int cols = 28);

// epoch,train_err,val_err,test_err,lr,T per line.
void export_training_curve(const std::vector<EpochMetrics>& metrics,
                           const std::string& path);

// First 1-based epoch with error strictly below the threshold.
std::optional<int> first_crossing(const std::vector<double>& errors, double threshold);

// {"threshold": ..., "crossing_epoch": <int or null>}
void export_crossing_summary(const std::vector<EpochMetrics>& metrics, double threshold,
                             const std::string& path);

void write_vote_csv(const VoteHistogram& votes, const std::string& path);
void write_contribution_csv(const ContributionHistogram& contributions,
                            const std::string& path);

}  // namespace dam
