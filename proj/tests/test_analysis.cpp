#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dam/analysis.hpp"
#include "dam/rng.hpp"
#include "dam/synth.hpp"

using namespace dam;

namespace {

ClassifierModel<double> small_model(int memory_count, int visible, int classes,
                                    std::uint64_t seed) {
  ClassifierModel<double> model;
  model.visible = visible;
  model.classes = classes;
  model.energy = rectified(3);
  model.beta = 1e-4;
  model.weights.resize(memory_count, visible + classes);
  Rng rng = make_stream(seed, 61);
  for (int mu = 0; mu < memory_count; ++mu)
    for (int j = 0; j < visible + classes; ++j)
      model.weights(mu, j) = rng.next_double() * 2.0 - 1.0;
  return model;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("votes per memory counts entries above the cutoff") {
  ClassifierModel<double> model;
  model.visible = 2;
  model.classes = 10;
  model.energy = rectified(2);
  model.weights = Eigen::MatrixXd::Constant(3, 12, -1.0);
  // row 0: the worked example (0.9, -0.8, 0.7, -1, ...): two votes at 0.5
  model.weights(0, 2) = 0.9;
  model.weights(0, 3) = -0.8;
  model.weights(0, 4) = 0.7;
  // row 1: all recognition weights at -1: zero votes
  // row 2: exactly at the cutoff does not count
  model.weights(2, 5) = 0.5;

  const VoteHistogram votes = votes_per_memory(model, 0.5);
  CHECK(votes.total == 3);
  CHECK(votes.counts[2] == 1);
  CHECK(votes.counts[0] == 2);
  std::int64_t sum = 0;
  for (auto c : votes.counts) sum += c;
  CHECK(sum == votes.total);
  CHECK(votes.mean() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("count_within_band thresholds against the maximum") {
  Eigen::VectorXd terms(3);
  terms << 10.0, 9.5, 3.0;
  CHECK(count_within_band(terms, 0.9) == 2);
  CHECK(count_within_band(terms, 1.0) == 1);
  Eigen::VectorXd ties(4);
  ties << 7.0, 7.0, 6.9, 0.0;
  CHECK(count_within_band(ties, 1.0) == 2);
  // non-positive maximum: only exact ties with the maximum count
  Eigen::VectorXd negative(3);
  negative << -5.0, -8.0, -5.0;
  CHECK(count_within_band(negative, 0.9) == 2);
  // j is non-increasing in the band
  Rng rng = make_stream(62, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd random_terms(8);
    for (int k = 0; k < 8; ++k) random_terms[k] = rng.next_double() * 10.0 - 2.0;
    int previous = 9;
    for (double band : {0.1, 0.5, 0.9, 1.0}) {
      const int j = count_within_band(random_terms, band);
      CHECK(j >= 1);
      CHECK(j <= previous);
      previous = j;
    }
  }
}

TEST_CASE("single-memory model always has j = 1") {
  const LabeledImageSet data = make_synthetic_dataset(30, 7);
  const auto model = small_model(1, data.pixels(), 10, 8);
  const ContributionHistogram h = dominant_contributions(model, data, 0.9);
  CHECK(h.total == 30);
  CHECK(h.counts[1] == 30);
  CHECK(h.fraction_single() == 1.0);
}

TEST_CASE("dominant contributions conserve the image count on both channels") {
  const LabeledImageSet data = make_synthetic_dataset(40, 9);
  const auto model = small_model(6, data.pixels(), 10, 9);
  for (GapChannel channel : {GapChannel::Predicted, GapChannel::TrueLabel}) {
    const ContributionHistogram h = dominant_contributions(model, data, 0.9, channel);
    std::int64_t sum = 0;
    for (auto c : h.counts) sum += c;
    CHECK(sum == 40);
    CHECK(h.counts[0] == 0);  // the maximizer always counts itself
  }
}

TEST_CASE("memory image export writes the documented PGM encoding") {
  ClassifierModel<double> model;
  model.visible = 4;
  model.classes = 2;
  model.energy = rectified(2);
  model.beta = 1.0;
  model.weights = Eigen::MatrixXd::Zero(2, 6);
  model.weights.row(1).head(4).setConstant(1.0);
  model.weights(1, 4) = 0.25;
  model.weights(1, 5) = -0.75;

  const std::string dir = "test_analysis_scratch";
  export_memory_images(model, {0, 1}, dir, 2, 2);
  const std::string zero = slurp(dir + "/memory_0.pgm");
  CHECK(zero.substr(0, 9) == "P5\n2 2\n25");
  // all-zero memory renders mid-gray 128
  CHECK(std::uint8_t(zero[zero.size() - 1]) == 128);
  // all-ones memory renders white
  const std::string ones = slurp(dir + "/memory_1.pgm");
  CHECK(std::uint8_t(ones[ones.size() - 1]) == 255);
  // recognition side CSV carries the class rows
  const std::string side = slurp(dir + "/recognition.csv");
  CHECK(side.find("0.25") != std::string::npos);
  CHECK(side.find("-0.75") != std::string::npos);

  CHECK_THROWS_AS(export_memory_images(model, {0}, dir, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(export_memory_images(model, {7}, dir, 2, 2), std::invalid_argument);
}

TEST_CASE("training curve export and threshold crossing") {
  CHECK(first_crossing({0.05, 0.03, 0.019}, 0.02) == 3);
  CHECK(first_crossing({0.05, 0.03}, 0.02) == std::nullopt);
  CHECK(first_crossing({}, 0.02) == std::nullopt);

  std::vector<EpochMetrics> metrics(3);
  for (int e = 0; e < 3; ++e) {
    metrics[std::size_t(e)].epoch = e + 1;
    metrics[std::size_t(e)].train_error = 0.1 / (e + 1);
    metrics[std::size_t(e)].test_error = std::vector<double>{0.05, 0.03, 0.019}[std::size_t(e)];
    metrics[std::size_t(e)].learning_rate = 0.01;
    metrics[std::size_t(e)].temperature = 100.0;
  }
  const std::string dir = "test_analysis_scratch";
  std::filesystem::create_directories(dir);
  export_training_curve(metrics, dir + "/curve.csv");
  const std::string curve = slurp(dir + "/curve.csv");
  CHECK(curve.rfind("epoch,train_err,val_err,test_err,lr,T\n", 0) == 0);
  CHECK(curve.find("\n3,") != std::string::npos);

  export_crossing_summary(metrics, 0.02, dir + "/crossing.json");
  CHECK(slurp(dir + "/crossing.json").find("\"crossing_epoch\": 3") != std::string::npos);
  metrics[2].test_error = 0.5;
  export_crossing_summary(metrics, 0.02, dir + "/no_crossing.json");
  CHECK(slurp(dir + "/no_crossing.json").find("null") != std::string::npos);
}

TEST_CASE("vote and contribution CSVs conserve totals") {
  const LabeledImageSet data = make_synthetic_dataset(20, 13);
  const auto model = small_model(5, data.pixels(), 10, 13);
  const std::string dir = "test_analysis_scratch";
  std::filesystem::create_directories(dir);
  write_vote_csv(votes_per_memory(model, 0.5), dir + "/votes.csv");
  write_contribution_csv(dominant_contributions(model, data, 0.9), dir + "/contrib.csv");
  const std::string votes = slurp(dir + "/votes.csv");
  CHECK(votes.rfind("k,count\n", 0) == 0);
  const std::string contrib = slurp(dir + "/contrib.csv");
  CHECK(contrib.rfind("j,count\n", 0) == 0);
}
