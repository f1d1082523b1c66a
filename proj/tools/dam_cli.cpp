// Command-line harness for the dense associative memory experiments:
// XOR truth tables, capacity theory and Monte-Carlo runs, classifier
// training/evaluation, and trained-model diagnostics. Every run writes its
// resolved configuration as a JSON-lines provenance record before any result,
// and all result CSVs are byte-reproducible from the seed for any --threads.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "dam/analysis.hpp"
#include "dam/capacity.hpp"
#include "dam/capacity_lab.hpp"
#include "dam/checkpoint.hpp"
#include "dam/data.hpp"
#include "dam/dynamics.hpp"
#include "dam/parallel.hpp"
#include "dam/synth.hpp"
#include "dam/trainer.hpp"
#include "dam/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

dam::EnergyKind parse_kind(const std::string& name) {
  if (name == "poly" || name == "polynomial") return dam::EnergyKind::Polynomial;
  if (name == "rect" || name == "rectified") return dam::EnergyKind::RectifiedPolynomial;
  throw CLI::ValidationError("--kind", "expected poly|rect");
}

struct GlobalOptions {
  int threads = 0;
  std::string outdir;
  std::string run_id;
  std::uint64_t seed = 0;
};

// <outdir>/<run-id>/ plus the provenance sink.
class RunContext {
 public:
  RunContext(const GlobalOptions& options, const std::string& command, json config)
      : directory_(fs::path(options.outdir) / resolve_run_id(options, command)) {
    fs::create_directories(directory_);
    json record;
    record["command"] = command;
    record["config"] = std::move(config);
    record["seed"] = options.seed;
    record["threads"] = options.threads;
    record["versions"] = {{"dam", std::string(dam::kVersion)},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)}};
    const auto now = std::chrono::system_clock::now();
    record["timestamp_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch())
            .count();
    std::ofstream out(path("provenance.jsonl"), std::ios::app);
    out << record.dump() << '\n';
  }

  std::string path(const std::string& name) const { return (directory_ / name).string(); }
  const fs::path& directory() const { return directory_; }

 private:
  static std::string resolve_run_id(const GlobalOptions& options,
                                    const std::string& command) {
    if (!options.run_id.empty()) return options.run_id;
    std::string id = command;
    for (char& c : id)
      if (c == ' ') c = '-';
    return id + "-s" + std::to_string(options.seed);
  }

  fs::path directory_;
};

// ---------------------------------------------------------------------------
// xor

int cmd_xor(const GlobalOptions& global, int power, const std::string& kind_name) {
  const dam::EnergyModel model{power, parse_kind(kind_name)};
  RunContext run(global, "xor", {{"n", power}, {"kind", kind_name}});

  int solved = 0;
  std::cout << "x y -> z (expected)\n";
  for (const dam::XorRow& row : dam::xor_dataset()) {
    const auto z = dam::xor_solve(row.x, row.y, model);
    std::cout << (row.x > 0 ? " 1" : "-1") << ' ' << (row.y > 0 ? " 1" : "-1")
              << " -> ";
    if (z) {
      std::cout << (*z > 0 ? " 1" : "-1");
      solved += *z == row.z;
    } else {
      std::cout << "undecidable";
    }
    std::cout << "  (" << (row.z > 0 ? " 1" : "-1") << ")\n";
  }
  std::cout << solved << "/4 rows solved\n";
  return solved == 4 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// capacity

int cmd_capacity_theory(const GlobalOptions& global, const std::vector<int>& sites,
                        const std::vector<int>& powers,
                        const std::vector<std::int64_t>& memory_counts,
                        double threshold) {
  json config = {{"N", sites}, {"n", powers}, {"K", memory_counts},
                 {"threshold", threshold}};
  RunContext run(global, "capacity theory", config);

  {
    std::ofstream out(run.path("theory.csv"));
    out << "N,n,k_max_no_errors,k_max_at_threshold,alpha_n,threshold\n";
    for (int n : powers)
      for (int N : sites)
        out << N << ',' << n << ',' << dam::k_max_no_errors(N, n) << ','
            << dam::k_max_at_error(N, n, threshold) << ','
            << fmt17(dam::alpha_n(n, threshold)) << ',' << fmt17(threshold) << '\n';
  }
  if (!memory_counts.empty()) {
    std::ofstream out(run.path("perror.csv"));
    out << "N,n,K,p_error\n";
    for (int n : powers)
      for (int N : sites)
        for (std::int64_t K : memory_counts)
          out << N << ',' << n << ',' << K << ','
              << fmt17(dam::error_probability(N, K, n)) << '\n';
  }
  std::cout << "capacity theory written to " << run.directory().string() << '\n';
  return 0;
}

int cmd_capacity_hist(const GlobalOptions& global, const std::vector<int>& sites,
                      const std::vector<int>& memory_counts,
                      const std::vector<int>& powers, const std::string& kind_name,
                      int trials, bool full, int max_sweeps) {
  dam::TrialGrid grid;
  grid.sites_values = sites;
  grid.memory_counts = memory_counts;
  grid.powers = powers;
  grid.trials_per_cell = full ? 10000 : trials;
  grid.seed = global.seed;
  grid.kind = parse_kind(kind_name);

  json config = {{"N", sites},       {"K", memory_counts},
                 {"n", powers},      {"kind", kind_name},
                 {"trials", grid.trials_per_cell}, {"max_sweeps", max_sweeps}};
  RunContext run(global, "capacity hist", config);

  dam::RecoveryOptions options;
  options.threads = global.threads;
  options.max_sweeps = max_sweeps;
  const auto cells = dam::run_grid(grid, options);

  std::ofstream summary(run.path("summary.csv"));
  summary << "N,K,n,kind,trials,nonconverged,perfect_fraction,perfect_fraction_signed\n";
  for (const dam::OverlapHistogram& cell : cells) {
    const std::string stem = "hist_N" + std::to_string(cell.sites) + "_K" +
                             std::to_string(cell.memory_count) + "_n" +
                             std::to_string(cell.power) + "_" +
                             dam::kind_name(cell.kind);
    {
      std::ofstream out(run.path(stem + ".csv"));
      dam::write_histogram_csv(out, cell);
    }
    {
      std::ofstream out(run.path(stem + "_abs.csv"));
      dam::write_histogram_abs_csv(out, cell);
    }
    summary << cell.sites << ',' << cell.memory_count << ',' << cell.power << ','
            << dam::kind_name(cell.kind) << ',' << cell.total << ','
            << cell.nonconverged << ',' << fmt17(cell.perfect_fraction()) << ','
            << fmt17(cell.perfect_fraction_signed()) << '\n';
    std::cout << "N=" << cell.sites << " K=" << cell.memory_count
              << " n=" << cell.power << " " << dam::kind_name(cell.kind)
              << ": perfect fraction " << cell.perfect_fraction()
              << " (nonconverged " << cell.nonconverged << ")\n";
  }
  std::cout << "histograms written to " << run.directory().string() << '\n';
  return 0;
}

int cmd_capacity_khalf(const GlobalOptions& global, const std::vector<int>& sites,
                       int power, const std::string& kind_name, int trials,
                       int max_sweeps) {
  json config = {{"N", sites}, {"n", power}, {"kind", kind_name}, {"trials", trials},
                 {"max_sweeps", max_sweeps}};
  RunContext run(global, "capacity khalf", config);

  dam::KHalfOptions options;
  options.threads = global.threads;
  options.max_sweeps = max_sweeps;

  std::vector<dam::KHalfResult> results;
  for (int N : sites) {
    const std::uint64_t cell_seed =
        dam::derive_seed(global.seed, dam::streams::kCell, std::uint64_t(N));
    results.push_back(
        dam::find_k_half(N, power, parse_kind(kind_name), trials, cell_seed, options));
    const dam::KHalfResult& r = results.back();
    std::cout << "N=" << N << " n=" << power << " " << kind_name
              << ": K_1/2 = " << r.k_half << " (fraction " << r.fraction_at_khalf
              << (r.saturated ? ", saturated" : "") << ")\n";
  }
  std::ofstream out(run.path("khalf.csv"));
  dam::write_khalf_csv(out, results);

  std::ofstream probes(run.path("khalf_probes.csv"));
  probes << "N,n,kind,K,fraction\n";
  for (const dam::KHalfResult& r : results)
    for (const dam::KHalfPoint& p : r.probes)
      probes << r.sites << ',' << r.power << ',' << dam::kind_name(r.kind) << ','
             << p.memory_count << ',' << fmt17(p.fraction) << '\n';
  std::cout << "khalf written to " << run.directory().string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const GlobalOptions& global, int train_count, int test_count) {
  RunContext run(global, "synth", {{"train", train_count}, {"test", test_count}});
  const dam::SynthDigits train =
      dam::make_synthetic_digits(train_count, dam::derive_seed(global.seed, 1));
  const dam::SynthDigits test =
      dam::make_synthetic_digits(test_count, dam::derive_seed(global.seed, 2));
  dam::write_file(run.path("train-images.idx"), dam::encode_idx_images(train.images));
  dam::write_file(run.path("train-labels.idx"), dam::encode_idx_labels(train.labels));
  dam::write_file(run.path("test-images.idx"), dam::encode_idx_images(test.images));
  dam::write_file(run.path("test-labels.idx"), dam::encode_idx_labels(test.labels));
  std::cout << "synthetic corpus written to " << run.directory().string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// train / eval / analyze

struct DataArgs {
  std::string images_path, labels_path;
  int synth_count = 0;
  std::uint64_t synth_seed = 1;
};

dam::LabeledImageSet load_data(const DataArgs& args, const char* what) {
  if (!args.images_path.empty() && !args.labels_path.empty())
    return dam::load_idx_dataset(args.images_path, args.labels_path);
  if (args.synth_count > 0)
    return dam::make_synthetic_dataset(args.synth_count, args.synth_seed);
  throw CLI::ValidationError(std::string(what) +
                             ": pass --images/--labels or --synth COUNT");
}

struct TrainArgs {
  DataArgs train_data;
  DataArgs test_data;
  int memory_count = 200;
  int power = 3;
  std::string kind_name = "rect";
  std::string framing = "dual";
  dam::TrainConfig config;
  std::vector<int> split;  // train,validation; empty = full-train mode
  std::string preset;
  double crossing_threshold = 0.02;
};

void apply_preset(TrainArgs& args, const std::string& name) {
  // Hyperparameter windows for the full-scale recipes; desk presets shrink
  // K and the epoch budget to laptop scale.
  auto set_small_n = [&](int n, int m) {
    args.power = n;
    args.kind_name = "rect";
    args.config.loss_power = m;
    args.config.eps0 = 0.04;
    args.config.momentum = 0.9;
    args.config.t_initial = 300.0;
    args.config.t_final = 60.0;
    args.config.anneal_epochs = 200;
  };
  if (name == "paper-n2") {
    set_small_n(2, 2);
    args.memory_count = 2000;
    args.config.epochs = 3000;
  } else if (name == "paper-n3") {
    set_small_n(3, 3);
    args.memory_count = 2000;
    args.config.epochs = 3000;
  } else if (name == "paper-n20" || name == "paper-n30") {
    args.power = name == "paper-n20" ? 20 : 30;
    args.kind_name = "rect";
    args.memory_count = 2000;
    args.config.loss_power = 30;
    args.config.epochs = 3000;
    args.config.eps0 = 0.02;
    args.config.momentum = 0.75;
    args.config.t_initial = 600.0;
    args.config.t_final = 600.0;
    args.config.anneal_epochs = 0;
  } else if (name == "desk-n2") {
    set_small_n(2, 2);
    args.memory_count = 200;
    args.config.epochs = 100;
    args.config.t_initial = 800.0;
    args.config.t_final = 500.0;
    args.config.anneal_epochs = 50;
    args.config.train_eval_cap = 10000;
  } else if (name == "desk-n3") {
    set_small_n(3, 3);
    args.memory_count = 200;
    args.config.epochs = 100;
    args.config.t_initial = 500.0;
    args.config.t_final = 350.0;
    args.config.anneal_epochs = 50;
    args.config.train_eval_cap = 10000;
  } else if (name == "desk-n20") {
    args.power = 20;
    args.kind_name = "rect";
    args.memory_count = 200;
    args.config.loss_power = 30;
    args.config.epochs = 100;
    args.config.eps0 = 0.02;
    args.config.momentum = 0.75;
    args.config.t_initial = 430.0;
    args.config.t_final = 430.0;
    args.config.anneal_epochs = 0;
    args.config.train_eval_cap = 10000;
  } else if (!name.empty()) {
    throw CLI::ValidationError("--preset", "unknown preset " + name);
  }
}

int cmd_train(const GlobalOptions& global, const TrainArgs& args) {
  json config = {{"K", args.memory_count},
                 {"n", args.power},
                 {"kind", args.kind_name},
                 {"m", args.config.loss_power},
                 {"epochs", args.config.epochs},
                 {"eps0", args.config.eps0},
                 {"decay", args.config.decay},
                 {"momentum", args.config.momentum},
                 {"T_initial", args.config.t_initial},
                 {"T_final", args.config.t_final},
                 {"anneal_epochs", args.config.anneal_epochs},
                 {"per_class", args.config.per_class},
                 {"framing", args.framing},
                 {"preset", args.preset},
                 {"split", args.split},
                 {"train_eval_cap", args.config.train_eval_cap}};
  RunContext run(global, "train", config);

  dam::LabeledImageSet full_train = load_data(args.train_data, "train");
  dam::LabeledImageSet train_set, validation_set;
  if (!args.split.empty()) {
    if (args.split.size() != 2)
      throw CLI::ValidationError("--split", "expected TRAIN,VALIDATION");
    auto [tr, va] =
        dam::split_dataset(full_train, {args.split[0], args.split[1], global.seed});
    train_set = std::move(tr);
    validation_set = std::move(va);
  } else {
    train_set = std::move(full_train);
  }

  std::optional<dam::LabeledImageSet> test_set;
  if (!args.test_data.images_path.empty() || args.test_data.synth_count > 0)
    test_set = load_data(args.test_data, "test");

  dam::TrainConfig config_resolved = args.config;
  config_resolved.seed = global.seed;
  config_resolved.framing = args.framing == "am" ? dam::GradFraming::AssociativeMemory
                                                 : dam::GradFraming::Dual;

  auto model = dam::make_classifier(args.memory_count, train_set.pixels(),
                                    train_set.classes,
                                    {args.power, parse_kind(args.kind_name)},
                                    config_resolved);

  const auto history = dam::train(
      model, train_set, validation_set.empty() ? nullptr : &validation_set,
      test_set ? &*test_set : nullptr, config_resolved,
      [](const dam::EpochMetrics& m) {
        std::cout << "epoch " << m.epoch << ": train " << m.train_error << " val "
                  << m.validation_error << " test " << m.test_error << " (lr "
                  << m.learning_rate << ", T " << m.temperature << ")\n";
      });

  dam::save_checkpoint(run.path("model.dam"), model, config_resolved.loss_power);
  dam::export_training_curve(history, run.path("metrics.csv"));
  dam::export_crossing_summary(history, args.crossing_threshold,
                               run.path("crossing.json"));
  std::cout << "checkpoint and metrics written to " << run.directory().string() << '\n';
  return 0;
}

int cmd_eval(const GlobalOptions& global, const std::string& checkpoint_path,
             const DataArgs& data_args, const std::string& framing) {
  RunContext run(global, "eval",
                 {{"checkpoint", checkpoint_path}, {"framing", framing}});
  const dam::Checkpoint ckpt = dam::load_checkpoint(checkpoint_path);
  const dam::LabeledImageSet data = load_data(data_args, "eval");
  const double error =
      dam::evaluate(ckpt.model, data,
                    framing == "am" ? dam::GradFraming::AssociativeMemory
                                    : dam::GradFraming::Dual);
  std::cout << "error rate: " << fmt17(error) << '\n';
  std::ofstream out(run.path("eval.csv"));
  out << "count,error\n" << data.count() << ',' << fmt17(error) << '\n';
  return 0;
}

int cmd_analyze(const GlobalOptions& global, const std::string& checkpoint_path,
                const DataArgs& data_args, bool votes, bool contrib, double cutoff,
                double band, const std::string& channel_name,
                const std::vector<int>& export_indices) {
  json config = {{"checkpoint", checkpoint_path}, {"votes", votes},
                 {"contrib", contrib},           {"cutoff", cutoff},
                 {"band", band},                 {"channel", channel_name}};
  RunContext run(global, "analyze", config);
  const dam::Checkpoint ckpt = dam::load_checkpoint(checkpoint_path);

  if (votes) {
    const dam::VoteHistogram histogram = dam::votes_per_memory(ckpt.model, cutoff);
    dam::write_vote_csv(histogram, run.path("votes.csv"));
    std::cout << "mean votes per memory: " << histogram.mean() << '\n';
  }
  if (contrib) {
    const dam::LabeledImageSet data = load_data(data_args, "analyze");
    const dam::GapChannel channel = channel_name == "true"
                                        ? dam::GapChannel::TrueLabel
                                        : dam::GapChannel::Predicted;
    const dam::ContributionHistogram histogram =
        dam::dominant_contributions(ckpt.model, data, band, channel);
    dam::write_contribution_csv(histogram, run.path("contributions.csv"));
    std::cout << "single-memory decisions: " << histogram.fraction_single() << '\n';
  }
  if (!export_indices.empty()) {
    int side = 1;
    while (side * side < ckpt.model.visible) ++side;
    dam::export_memory_images(ckpt.model, export_indices,
                              (run.directory() / "memories").string(), side,
                              ckpt.model.visible / side);
  }
  std::cout << "analysis written to " << run.directory().string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dense associative memory laboratory"};
  app.set_config("--config", "", "flat key=value config file; flags override");

  GlobalOptions global;
  app.add_option("--threads", global.threads,
                 "worker thread cap (0 = hardware concurrency)");
  global.outdir = [] {
    const char* env = std::getenv("DAM_OUTDIR");
    return env ? std::string(env) : std::string("runs");
  }();
  app.add_option("--outdir", global.outdir, "output root directory");
  app.add_option("--run-id", global.run_id,
                 "run directory name (default: derived from command and seed)");
  app.add_option("--seed", global.seed, "master seed");
  app.require_subcommand(1);

  // xor
  auto* xor_cmd = app.add_subcommand("xor", "solve the XOR truth table");
  int xor_power = 3;
  std::string xor_kind = "poly";
  xor_cmd->add_option("--n", xor_power, "interaction power");
  xor_cmd->add_option("--kind", xor_kind, "poly|rect");

  // capacity
  auto* capacity = app.add_subcommand("capacity", "capacity theory and experiments");
  capacity->require_subcommand(1);

  auto* theory = capacity->add_subcommand("theory", "closed-form capacity tables");
  std::vector<int> theory_sites{100};
  std::vector<int> theory_powers{2, 3, 4};
  std::vector<std::int64_t> theory_memories;
  double theory_threshold = 0.005;
  theory->add_option("--N", theory_sites, "site counts")->delimiter(',');
  theory->add_option("--n", theory_powers, "interaction powers")->delimiter(',');
  theory->add_option("--K", theory_memories, "memory counts for the P_error table")
      ->delimiter(',');
  theory->add_option("--threshold", theory_threshold, "retrieval error threshold");

  auto* hist = capacity->add_subcommand("hist", "overlap histograms");
  std::vector<int> hist_sites{100};
  std::vector<int> hist_memories{2000};
  std::vector<int> hist_powers{2, 3, 4, 5};
  std::string hist_kind = "poly";
  int hist_trials = 1000;
  int hist_sweeps = 200;
  bool hist_full = false;
  hist->add_option("--N", hist_sites, "site counts")->delimiter(',');
  hist->add_option("--K", hist_memories, "memory counts")->delimiter(',');
  hist->add_option("--n", hist_powers, "interaction powers")->delimiter(',');
  hist->add_option("--kind", hist_kind, "poly|rect");
  hist->add_option("--trials", hist_trials, "trials per cell");
  hist->add_option("--max-sweeps", hist_sweeps, "sweep budget per trial");
  hist->add_flag("--full", hist_full, "use the full 10000-trial protocol");

  auto* khalf = capacity->add_subcommand("khalf", "half-recovery memory count");
  std::vector<int> khalf_sites{50, 100, 150, 200};
  int khalf_power = 3;
  std::string khalf_kind = "poly";
  int khalf_trials = 1000;
  int khalf_sweeps = 200;
  khalf->add_option("--N", khalf_sites, "site counts")->delimiter(',');
  khalf->add_option("--n", khalf_power, "interaction power");
  khalf->add_option("--kind", khalf_kind, "poly|rect");
  khalf->add_option("--trials", khalf_trials, "trials per probe");
  khalf->add_option("--max-sweeps", khalf_sweeps, "sweep budget per trial");

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic digit corpus as IDX");
  int synth_train = 60000;
  int synth_test = 10000;
  synth->add_option("--train", synth_train, "training image count");
  synth->add_option("--test", synth_test, "test image count");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the classifier");
  TrainArgs train_args;
  std::string preset_name;
  train_cmd->add_option("--preset", preset_name,
                        "desk-n2|desk-n3|desk-n20|paper-n2|paper-n3|paper-n20|paper-n30");
  train_cmd->add_option("--images", train_args.train_data.images_path, "train IDX images");
  train_cmd->add_option("--labels", train_args.train_data.labels_path, "train IDX labels");
  train_cmd->add_option("--synth", train_args.train_data.synth_count,
                        "use a synthetic corpus of this size instead of IDX files");
  train_cmd->add_option("--synth-seed", train_args.train_data.synth_seed,
                        "seed for the synthetic train corpus");
  train_cmd->add_option("--test-images", train_args.test_data.images_path, "test IDX images");
  train_cmd->add_option("--test-labels", train_args.test_data.labels_path, "test IDX labels");
  train_cmd->add_option("--synth-test", train_args.test_data.synth_count,
                        "synthetic test corpus size");
  train_cmd->add_option("--synth-test-seed", train_args.test_data.synth_seed,
                        "seed for the synthetic test corpus");
  auto* opt_k = train_cmd->add_option("--K", train_args.memory_count, "memory count");
  auto* opt_n = train_cmd->add_option("--n", train_args.power, "interaction power");
  auto* opt_kind = train_cmd->add_option("--kind", train_args.kind_name, "poly|rect");
  auto* opt_m = train_cmd->add_option("--m", train_args.config.loss_power, "loss power m");
  auto* opt_epochs = train_cmd->add_option("--epochs", train_args.config.epochs, "epochs");
  auto* opt_eps0 = train_cmd->add_option("--eps0", train_args.config.eps0, "initial learning rate");
  auto* opt_decay = train_cmd->add_option("--decay", train_args.config.decay, "per-epoch decay");
  auto* opt_p = train_cmd->add_option("--momentum", train_args.config.momentum, "momentum p");
  auto* opt_ti = train_cmd->add_option("--Ti", train_args.config.t_initial, "initial temperature");
  auto* opt_tf = train_cmd->add_option("--Tf", train_args.config.t_final, "final temperature");
  auto* opt_anneal = train_cmd->add_option("--anneal", train_args.config.anneal_epochs,
                                           "anneal epochs");
  auto* opt_pc = train_cmd->add_option("--per-class", train_args.config.per_class,
                                       "examples per class per minibatch");
  auto* opt_cap = train_cmd->add_option("--train-eval-cap", train_args.config.train_eval_cap,
                                        "cap the per-epoch train-error sample (0 = full)");
  train_cmd->add_option("--framing", train_args.framing, "dual|am gradient framing");
  train_cmd->add_option("--split", train_args.split,
                        "TRAIN,VALIDATION split sizes (omit for full-train mode)")
      ->delimiter(',');
  train_cmd->add_option("--crossing-threshold", train_args.crossing_threshold,
                        "error threshold for the crossing report");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string eval_checkpoint;
  DataArgs eval_data;
  std::string eval_framing = "dual";
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "model checkpoint")->required();
  eval_cmd->add_option("--images", eval_data.images_path, "IDX images");
  eval_cmd->add_option("--labels", eval_data.labels_path, "IDX labels");
  eval_cmd->add_option("--synth", eval_data.synth_count, "synthetic corpus size");
  eval_cmd->add_option("--synth-seed", eval_data.synth_seed, "synthetic corpus seed");
  eval_cmd->add_option("--framing", eval_framing, "dual|am");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "trained-model diagnostics");
  std::string analyze_checkpoint;
  DataArgs analyze_data;
  bool analyze_votes = false;
  bool analyze_contrib = false;
  double analyze_cutoff = 0.5;
  double analyze_band = 0.9;
  std::string analyze_channel = "predicted";
  std::vector<int> analyze_export;
  analyze_cmd->add_option("--checkpoint", analyze_checkpoint, "model checkpoint")
      ->required();
  analyze_cmd->add_option("--images", analyze_data.images_path, "IDX images");
  analyze_cmd->add_option("--labels", analyze_data.labels_path, "IDX labels");
  analyze_cmd->add_option("--synth", analyze_data.synth_count, "synthetic corpus size");
  analyze_cmd->add_option("--synth-seed", analyze_data.synth_seed, "synthetic corpus seed");
  analyze_cmd->add_flag("--votes", analyze_votes, "vote histogram");
  analyze_cmd->add_flag("--contrib", analyze_contrib, "dominant-contribution histogram");
  analyze_cmd->add_option("--cutoff", analyze_cutoff, "vote cutoff");
  analyze_cmd->add_option("--band", analyze_band, "contribution band");
  analyze_cmd->add_option("--channel", analyze_channel, "predicted|true gap channel");
  analyze_cmd->add_option("--export-memories", analyze_export,
                          "memory indices to dump as PGM")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Eigen::setNbThreads(dam::resolve_threads(global.threads));

  try {
    if (*xor_cmd) return cmd_xor(global, xor_power, xor_kind);
    if (*theory)
      return cmd_capacity_theory(global, theory_sites, theory_powers, theory_memories,
                                 theory_threshold);
    if (*hist)
      return cmd_capacity_hist(global, hist_sites, hist_memories, hist_powers,
                               hist_kind, hist_trials, hist_full, hist_sweeps);
    if (*khalf)
      return cmd_capacity_khalf(global, khalf_sites, khalf_power, khalf_kind,
                                khalf_trials, khalf_sweeps);
    if (*synth) return cmd_synth(global, synth_train, synth_test);
    if (*train_cmd) {
      // Preset fills the recipe; explicitly passed flags win over it.
      TrainArgs resolved = train_args;
      if (!preset_name.empty()) {
        TrainArgs preset_values;
        apply_preset(preset_values, preset_name);
        if (!opt_k->count()) resolved.memory_count = preset_values.memory_count;
        if (!opt_n->count()) resolved.power = preset_values.power;
        if (!opt_kind->count()) resolved.kind_name = preset_values.kind_name;
        if (!opt_m->count()) resolved.config.loss_power = preset_values.config.loss_power;
        if (!opt_epochs->count()) resolved.config.epochs = preset_values.config.epochs;
        if (!opt_eps0->count()) resolved.config.eps0 = preset_values.config.eps0;
        if (!opt_decay->count()) resolved.config.decay = preset_values.config.decay;
        if (!opt_p->count()) resolved.config.momentum = preset_values.config.momentum;
        if (!opt_ti->count()) resolved.config.t_initial = preset_values.config.t_initial;
        if (!opt_tf->count()) resolved.config.t_final = preset_values.config.t_final;
        if (!opt_anneal->count())
          resolved.config.anneal_epochs = preset_values.config.anneal_epochs;
        if (!opt_pc->count()) resolved.config.per_class = preset_values.config.per_class;
        if (!opt_cap->count())
          resolved.config.train_eval_cap = preset_values.config.train_eval_cap;
      }
      resolved.preset = preset_name;
      return cmd_train(global, resolved);
    }
    if (*eval_cmd) return cmd_eval(global, eval_checkpoint, eval_data, eval_framing);
    if (*analyze_cmd)
      return cmd_analyze(global, analyze_checkpoint, analyze_data, analyze_votes,
                         analyze_contrib, analyze_cutoff, analyze_band,
                         analyze_channel, analyze_export);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
