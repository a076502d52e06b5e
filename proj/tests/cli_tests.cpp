// End-to-end checks of the command-line surface: exit codes, file outputs,
// schemas, and reproducibility. argv[1] is the path to the pixelcode binary.

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

#define CHECK(cond)                                                        \
  do {                                                                     \
    if (!(cond)) {                                                         \
      ++failures;                                                          \
      std::cerr << "CHECK failed at " << __LINE__ << ": " #cond << "\n";   \
    }                                                                      \
  } while (0)

std::string cli;
fs::path work;

int run(const std::string& args, std::string* output = nullptr) {
  const fs::path log = work / "cmd.log";
  const std::string cmd = cli + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_tests <path-to-pixelcode>\n";
    return 2;
  }
  cli = argv[1];
  work = fs::temp_directory_path() / ("pixelcode_cli_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  // --- gen-antenna: determinism, digest echo, validation ---------------------
  const fs::path ant_a = work / "a.antenna";
  const fs::path ant_b = work / "b.antenna";
  std::string out;
  CHECK(run("gen-antenna --q 6 --k 4 --seed 3 --out " + q(ant_a), &out) == 0);
  CHECK(out.find("digest") != std::string::npos);
  CHECK(run("gen-antenna --q 6 --k 4 --seed 3 --out " + q(ant_b)) == 0);
  CHECK(slurp(ant_a) == slurp(ant_b));
  CHECK(fs::exists(ant_a.string() + ".manifest.json"));

  CHECK(run("gen-antenna --q 0 --k 4 --seed 1 --out " + q(work / "bad.antenna")) == 2);
  CHECK(run("gen-antenna --bogus-flag 1 --out x") == 2);
  CHECK(run("definitely-not-a-command") == 2);

  // --- gen-channel + optimize over an explicit channel file ------------------
  const fs::path chan = work / "c.channel";
  CHECK(run("gen-channel --k 4 --seed 9 --out " + q(chan)) == 0);
  const fs::path resjson = work / "result.json";
  CHECK(run("optimize --algo sebo --kind siso --antenna " + q(ant_a) + " --channel " + q(chan) +
            " --block 6 --out " + q(resjson)) == 0);
  {
    json res = json::parse(slurp(resjson));
    CHECK(res["algorithm"] == "sebo");
    CHECK(res["best_bits"].get<std::string>().size() == 6);
    const auto sweeps = res["sweep_trace"].size();
    CHECK(res["evaluations"].get<std::uint64_t>() == sweeps * 64);
    CHECK(res["best_value"].get<double>() > 0.0);
  }

  // Channel with the wrong K is rejected up front.
  const fs::path chan5 = work / "c5.channel";
  CHECK(run("gen-channel --k 5 --seed 9 --out " + q(chan5)) == 0);
  CHECK(run("optimize --algo sebo --antenna " + q(ant_a) + " --channel " + q(chan5)) == 2);

  // --- guard rails ------------------------------------------------------------
  const fs::path ant25 = work / "q25.antenna";
  CHECK(run("gen-antenna --q 25 --k 4 --seed 5 --out " + q(ant25)) == 0);
  CHECK(run("optimize --algo exhaustive --antenna " + q(ant25) + " --channel-seed 1") == 4);
  CHECK(run("optimize --algo hmsm --antenna " + q(ant_a) + " --channel-seed 1") == 2);
  CHECK(run("optimize --algo nope --antenna " + q(ant_a) + " --channel-seed 1") == 2);

  // sebo evaluations follow sweeps x sum(2^block bits) for uneven blocks too.
  {
    std::string text;
    CHECK(run("optimize --algo sebo --antenna " + q(ant_a) + " --channel-seed 4 --block 4",
              &text) == 0);
    json res = json::parse(text);
    const auto sweeps = res["sweep_trace"].size();
    CHECK(res["evaluations"].get<std::uint64_t>() == sweeps * (16 + 4));
  }

  // --- dataset -> train -> ensemble -> eval/bench ------------------------------
  const fs::path dataset = work / "toy.dataset";
  const std::string genargs = "gen-dataset --kind siso --antenna " + q(ant_a) +
                              " --samples 12 --train-count 10 --sebo-block 6 --seed 21"
                              " --jobs 2 --out " +
                              q(dataset);
  CHECK(run(genargs) == 0);
  const std::string first = slurp(dataset);
  CHECK(run(genargs) == 0);  // complete file short-circuits regeneration
  CHECK(slurp(dataset) == first);

  const fs::path head_b = work / "head_binary.model";
  const fs::path head_g = work / "head_gray.model";
  const std::string hyper = " --hidden 8 --epochs 3 --batch 4 --seed 2 --out ";
  CHECK(run("train --dataset " + q(dataset) + " --scheme binary --m 3" + hyper + q(head_b)) == 0);
  CHECK(run("train --dataset " + q(dataset) + " --scheme gray --m 3" + hyper + q(head_g)) == 0);
  CHECK(run("train --dataset " + q(dataset) + " --scheme binary --m 4" + hyper +
            q(work / "no.model")) == 2);

  const fs::path manifest = work / "ensemble.json";
  {
    std::ofstream f(manifest);
    f << json{{"heads",
               {{{"model", "head_binary.model"}, {"scheme", "binary:3"}},
                {{"model", "head_gray.model"}, {"scheme", "gray:3"}}}}}
             .dump(2);
  }

  {
    std::string text;
    CHECK(run("optimize --algo hmsm --antenna " + q(ant_a) + " --channel-seed 77 --ensemble " +
              q(manifest),
              &text) == 0);
    json res = json::parse(text);
    CHECK(res["per_head_values"].size() == 2);
    CHECK(res["best_coders"].size() == 1);
  }

  const fs::path evaldir = work / "eval";
  CHECK(run("eval --dataset " + q(dataset) + " --ensemble " + q(manifest) + " --antenna " +
            q(ant_a) + " --out " + q(evaldir)) == 0);
  CHECK(fs::exists(evaldir / "report.json"));
  CHECK(fs::exists(evaldir / "confusion_binary.csv"));
  CHECK(fs::exists(evaldir / "confusion_gray.csv"));
  {
    json report = json::parse(slurp(evaldir / "report.json"));
    CHECK(report["dominance_ok"].get<bool>());
    CHECK(report["heads"].size() == 2);
    CHECK(report["n_test"].get<int>() == 2);
  }

  const fs::path benchdir = work / "bench";
  CHECK(run("bench --kind siso --antenna " + q(ant_a) + " --count 5 --seed 31 --block 6 " +
            "--codebook-size 16 --ensemble " + q(manifest) + " --out " + q(benchdir)) == 0);
  CHECK(fs::exists(benchdir / "bench_results.csv"));
  CHECK(fs::exists(benchdir / "bench_summary.csv"));
  CHECK(fs::exists(benchdir / "summary.json"));
  {
    const std::string csv = slurp(benchdir / "bench_results.csv");
    CHECK(csv.rfind("instance,algo,status,value,ratio_vs_sebo,evaluations", 0) == 0);
    CHECK(csv.find("sebo") != std::string::npos);
    CHECK(csv.find("hmsm") != std::string::npos);
    // SEBO normalizes itself: every sebo row carries ratio 1.
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line))
      if (line.find(",sebo,ok,") != std::string::npos)
        CHECK(line.find(",1,") != std::string::npos);
  }

  // Deterministic rerun: bench_results.csv is bit-identical.
  const fs::path benchdir2 = work / "bench2";
  CHECK(run("bench --kind siso --antenna " + q(ant_a) + " --count 5 --seed 31 --block 6 " +
            "--codebook-size 16 --ensemble " + q(manifest) + " --out " + q(benchdir2)) == 0);
  CHECK(slurp(benchdir / "bench_results.csv") == slurp(benchdir2 / "bench_results.csv"));

  // --- output directory override ----------------------------------------------
  const fs::path outbase = work / "outdir";
  ::setenv("PIXELCODE_OUT_DIR", outbase.string().c_str(), 1);
  CHECK(run("gen-antenna --q 4 --k 3 --seed 8 --out env.antenna") == 0);
  ::unsetenv("PIXELCODE_OUT_DIR");
  CHECK(fs::exists(outbase / "env.antenna"));

  if (failures == 0) {
    std::cout << "cli_tests: all checks passed\n";
    fs::remove_all(work);
    return 0;
  }
  std::cerr << "cli_tests: " << failures << " check(s) failed (artifacts kept in " << work
            << ")\n";
  return 1;
}
