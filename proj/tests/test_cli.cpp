// Exercises the installed CLI binary end to end: exit-code contract,
// determinism of result CSVs across reruns and thread counts, checkpoint and
// analysis flows. The binary path arrives via --cli-path.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_cli_path;
std::string g_scratch = "test_cli_scratch";

int run_cli(const std::string& args) {
  const std::string command = g_cli_path + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "missing file ", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string scratch(const std::string& leaf) { return g_scratch + "/" + leaf; }

}  // namespace

TEST_CASE("xor exit codes follow the solved/unsolved contract") {
  CHECK(run_cli("--outdir " + scratch("xor") + " xor --n 3 --kind poly") == 0);
  CHECK(run_cli("--outdir " + scratch("xor") + " xor --n 5 --kind poly") == 0);
  CHECK(run_cli("--outdir " + scratch("xor") + " xor --n 2 --kind rect") == 0);
  CHECK(run_cli("--outdir " + scratch("xor") + " xor --n 2 --kind poly") == 1);
  CHECK(run_cli("--outdir " + scratch("xor") + " xor --n 1 --kind poly") == 1);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("definitely-not-a-command") == 2);
  CHECK(run_cli("xor --kind banana") == 2);
  CHECK(run_cli("eval") == 2);  // missing required --checkpoint
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("capacity hist CSVs are byte-identical across reruns and thread counts") {
  const std::string base = " capacity hist --N 40 --K 60 --n 3 --kind poly"
                           " --trials 150 --max-sweeps 200 --seed 5";
  REQUIRE(run_cli("--threads 1 --outdir " + scratch("hist1") + base) == 0);
  REQUIRE(run_cli("--threads 2 --outdir " + scratch("hist2") + base) == 0);
  REQUIRE(run_cli("--threads 2 --outdir " + scratch("hist3") + base) == 0);
  const std::string name = "capacity-hist-s5/hist_N40_K60_n3_poly.csv";
  const std::string one = slurp(scratch("hist1") + "/" + name);
  CHECK(one == slurp(scratch("hist2") + "/" + name));
  CHECK(one == slurp(scratch("hist3") + "/" + name));
  const std::string summary = slurp(scratch("hist1") + "/capacity-hist-s5/summary.csv");
  CHECK(summary == slurp(scratch("hist2") + "/capacity-hist-s5/summary.csv"));
}

TEST_CASE("khalf CSVs are byte-identical across thread counts") {
  const std::string base =
      " capacity khalf --N 30 --n 3 --kind poly --trials 80 --max-sweeps 200 --seed 9";
  REQUIRE(run_cli("--threads 1 --outdir " + scratch("kh1") + base) == 0);
  REQUIRE(run_cli("--threads 2 --outdir " + scratch("kh2") + base) == 0);
  const std::string name = "capacity-khalf-s9/khalf.csv";
  CHECK(slurp(scratch("kh1") + "/" + name) == slurp(scratch("kh2") + "/" + name));
  const std::string probes = "capacity-khalf-s9/khalf_probes.csv";
  CHECK(slurp(scratch("kh1") + "/" + probes) == slurp(scratch("kh2") + "/" + probes));
}

TEST_CASE("capacity theory table pins the closed-form values") {
  REQUIRE(run_cli("--outdir " + scratch("theory") +
                  " capacity theory --N 100 --n 2,3,4 --K 11,2000") == 0);
  const std::string table = slurp(scratch("theory") + "/capacity-theory-s0/theory.csv");
  CHECK(table.find("100,2,11,") != std::string::npos);
  CHECK(table.find("100,4,7238,") != std::string::npos);
  CHECK(std::filesystem::exists(scratch("theory") + "/capacity-theory-s0/perror.csv"));
}

TEST_CASE("synth + train + eval + analyze round trip deterministically") {
  // write a small corpus as IDX, then consume it through the real file path
  REQUIRE(run_cli("--outdir " + scratch("synth") + " --seed 3 synth --train 400 --test 100") == 0);
  const std::string corpus = scratch("synth") + "/synth-s3";

  const std::string train_flags =
      " train --images " + corpus + "/train-images.idx --labels " + corpus +
      "/train-labels.idx --test-images " + corpus + "/test-images.idx --test-labels " +
      corpus + "/test-labels.idx --K 20 --n 3 --kind rect --m 2 --epochs 3"
      " --per-class 10 --Ti 150 --Tf 80 --anneal 10 --seed 11";
  REQUIRE(run_cli("--threads 1 --outdir " + scratch("tr1") + train_flags) == 0);
  REQUIRE(run_cli("--threads 2 --outdir " + scratch("tr2") + train_flags) == 0);
  const std::string metrics1 = slurp(scratch("tr1") + "/train-s11/metrics.csv");
  CHECK(metrics1 == slurp(scratch("tr2") + "/train-s11/metrics.csv"));
  CHECK(metrics1.rfind("epoch,train_err,val_err,test_err,lr,T\n", 0) == 0);
  // checkpoints byte-identical as well
  CHECK(slurp(scratch("tr1") + "/train-s11/model.dam") ==
        slurp(scratch("tr2") + "/train-s11/model.dam"));

  const std::string ckpt = scratch("tr1") + "/train-s11/model.dam";
  REQUIRE(run_cli("--outdir " + scratch("ev") + " eval --checkpoint " + ckpt +
                  " --images " + corpus + "/test-images.idx --labels " + corpus +
                  "/test-labels.idx") == 0);
  const std::string eval_csv = slurp(scratch("ev") + "/eval-s0/eval.csv");
  CHECK(eval_csv.rfind("count,error\n100,", 0) == 0);

  const std::string analyze_flags = " analyze --checkpoint " + ckpt +
                                    " --images " + corpus + "/test-images.idx"
                                    " --labels " + corpus + "/test-labels.idx"
                                    " --votes --contrib --export-memories 0,1";
  REQUIRE(run_cli("--threads 1 --outdir " + scratch("an1") + analyze_flags) == 0);
  REQUIRE(run_cli("--threads 2 --outdir " + scratch("an2") + analyze_flags) == 0);
  CHECK(slurp(scratch("an1") + "/analyze-s0/votes.csv") ==
        slurp(scratch("an2") + "/analyze-s0/votes.csv"));
  CHECK(slurp(scratch("an1") + "/analyze-s0/contributions.csv") ==
        slurp(scratch("an2") + "/analyze-s0/contributions.csv"));
  CHECK(std::filesystem::exists(scratch("an1") + "/analyze-s0/memories/memory_1.pgm"));

  // provenance records exist and carry the seed
  const std::string provenance = slurp(scratch("tr1") + "/train-s11/provenance.jsonl");
  CHECK(provenance.find("\"seed\":11") != std::string::npos);
}

int main(int argc, char** argv) {
  doctest::Context context;
  std::vector<char*> forwarded;
  for (int i = 0; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli-path" && i + 1 < argc) {
      g_cli_path = argv[++i];
    } else if (arg == "--scratch" && i + 1 < argc) {
      g_scratch = argv[++i];
    } else {
      forwarded.push_back(argv[i]);
    }
  }
  if (g_cli_path.empty()) {
    std::fprintf(stderr, "test_cli: --cli-path is required\n");
    return 1;
  }
  std::filesystem::remove_all(g_scratch);
  std::filesystem::create_directories(g_scratch);
  context.applyCommandLine(int(forwarded.size()), forwarded.data());
  return context.run();
}
