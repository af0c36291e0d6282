#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

const std::string kTmp = std::string(DPCOPULA_TEST_TMP) + "/cli";

// Runs the CLI with stdout and stderr captured to files; returns the exit code.
int run(const std::string& args) {
  std::filesystem::create_directories(kTmp);
  const std::string cmd = std::string("\"") + DPCOPULA_CLI_PATH + "\" " + args + " >\"" + kTmp +
                          "/stdout.txt\" 2>\"" + kTmp + "/stderr.txt\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& name) { return kTmp + "/" + name; }

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const std::string& file, const std::string& text) {
  std::filesystem::create_directories(kTmp);
  std::ofstream(file, std::ios::binary) << text;
}

// Gaussian-ish columns with distinctive decimals, so leaks would be visible.
std::string dataset(int n, int p, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> z;
  std::ostringstream out;
  for (int j = 0; j < p; ++j) out << (j ? "," : "") << "v" << j;
  out << "\n";
  out.precision(17);
  for (int i = 0; i < n; ++i) {
    const double common = z(rng);
    for (int j = 0; j < p; ++j) out << (j ? "," : "") << 0.7 * common + 0.5 * z(rng) + 1234.5678901;
    out << "\n";
  }
  return out.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("privatize writes one entry per pair and no raw data") {
  write(path("two.csv"), dataset(200, 2, 1));
  write(path("five.csv"), dataset(300, 5, 2));
  REQUIRE(run("privatize --input " + path("two.csv") + " --output " + path("two.json") +
              " --epsilon 1 --mechanism geometric --seed 5") == 0);
  const auto two = json::parse(slurp(path("two.json")));
  CHECK(two["counts"].size() == 1);
  CHECK(two["epsilon_pair"] == 1.0);
  CHECK(two["n"] == 200);
  CHECK(two["half_n"] == 100);

  REQUIRE(run("privatize --input " + path("five.csv") + " --output " + path("five.json") +
              " --epsilon 1 --seed 5") == 0);
  const std::string text = slurp(path("five.json"));
  const auto five = json::parse(text);
  CHECK(five["counts"].size() == 10);
  CHECK(five["epsilon_pair"].get<double>() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(text.find("1234") == std::string::npos);
  CHECK(text.find("v0") == std::string::npos);

  REQUIRE(run("privatize --input " + path("five.csv") + " --output " + path("five_again.json") +
              " --epsilon 1 --seed 5") == 0);
  CHECK(slurp(path("five_again.json")) == text);
  REQUIRE(run("privatize --input " + path("five.csv") + " --epsilon 1 --seed 5") == 0);
  CHECK(slurp(path("stdout.txt")) == text);
}

TEST_CASE("exit codes") {
  write(path("bad.csv"), "a,b\n1,2\n3,oops\n");
  write(path("ok.csv"), dataset(50, 2, 3));
  CHECK(run("privatize --input " + path("missing.csv") + " --epsilon 1 --seed 1") == 3);
  CHECK(run("privatize --input " + path("bad.csv") + " --epsilon 1 --seed 1") == 2);
  CHECK(run("privatize --input " + path("ok.csv") + " --epsilon 1 --seed 1 --mechanism laplace") == 2);
  CHECK(run("privatize --input " + path("ok.csv") + " --epsilon -1 --seed 1") == 2);
  CHECK(run("privatize --input " + path("ok.csv") + " --epsilon 1") == 2);
  CHECK(run("privatize --input " + path("ok.csv") + " --epsilon 1 --seed 1 --output /nonexistent/x.json") == 3);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("simulate --config " + path("missing.cfg")) == 3);
  CHECK(run("estimate-mle --input " + path("bad.csv")) == 2);
  CHECK(run("verify-dp --mechanism tgm --epsilon 1 --lower 0 --upper 10") == 0);
}

TEST_CASE("estimate-mle") {
  write(path("mle.csv"), dataset(400, 3, 4));
  REQUIRE(run("privatize --input " + path("mle.csv") + " --output " + path("btgm.json") +
              " --epsilon 3 --mechanism btgm --seed 9") == 0);
  REQUIRE(run("estimate-mle --input " + path("btgm.json") + " --output " + path("mle_est.json")) == 0);
  const auto est = json::parse(slurp(path("mle_est.json")));
  CHECK(est["estimate"].size() == 3);
  CHECK(est["estimate"][0][0] == 1.0);
  CHECK(est["estimate"][0][1].get<double>() > 0.3);
  CHECK(est.contains("was_psd"));
  CHECK(est.contains("frobenius_adjustment"));

  REQUIRE(run("privatize --input " + path("mle.csv") + " --output " + path("geo.json") +
              " --epsilon 3 --mechanism geometric --seed 9") == 0);
  CHECK(run("estimate-mle --input " + path("geo.json")) == 2);
  CHECK(slurp(path("stderr.txt")).find("range-preserving") != std::string::npos);

  write(path("center.json"),
        R"({"format":"dpcopula.noisy_counts","n":100,"p":2,"half_n":50,"mechanism":"tgm",)"
        R"("epsilon_total":1,"epsilon_pair":1,"delta":1,"bounds":[0,50],)"
        R"("counts":[{"j":0,"jp":1,"value":25}]})");
  REQUIRE(run("estimate-mle --input " + path("center.json")) == 0);
  CHECK(std::abs(json::parse(slurp(path("stdout.txt")))["estimate"][0][1].get<double>()) < 1e-6);
}

TEST_CASE("estimate-bayes") {
  write(path("bayes.csv"), dataset(500, 2, 6));
  REQUIRE(run("privatize --input " + path("bayes.csv") + " --output " + path("bgeo.json") +
              " --epsilon 1 --seed 2") == 0);
  REQUIRE(run("estimate-bayes --input " + path("bgeo.json") + " --output " + path("grid.json") +
              " --seed 3") == 0);
  REQUIRE(run("estimate-bayes --input " + path("bgeo.json") + " --output " + path("mh.json") +
              " --seed 3 --force-mh") == 0);
  const auto grid = json::parse(slurp(path("grid.json")));
  const auto mh = json::parse(slurp(path("mh.json")));
  CHECK(grid["method"] == "grid");
  CHECK(mh["method"] == "mh");
  CHECK(grid["alpha"] == 0.05);
  const auto& g = grid["intervals"][0];
  const auto& m = mh["intervals"][0];
  CHECK(g["lower"].get<double>() < g["mean"].get<double>());
  CHECK(g["mean"].get<double>() < g["upper"].get<double>());
  CHECK(std::abs(g["mean"].get<double>() - m["mean"].get<double>()) <
        3 * m["mc_std_error"].get<double>());

  REQUIRE(run("estimate-bayes --input " + path("bgeo.json") + " --output " + path("grid2.json") +
              " --seed 3") == 0);
  CHECK(slurp(path("grid2.json")) == slurp(path("grid.json")));

  REQUIRE(run("privatize --input " + path("bayes.csv") + " --output " + path("brgm.json") +
              " --epsilon 1 --mechanism rgm --seed 2") == 0);
  CHECK(run("estimate-bayes --input " + path("brgm.json") + " --seed 3") == 2);
  CHECK(run("estimate-bayes --input " + path("bgeo.json") + " --seed 3 --grid-size 2") == 2);
}

TEST_CASE("simulate") {
  write(path("sim.cfg"),
        "p = 2\nn = 200\nmarginals = gamma(2,1), normal(0,1)\nepsilon = 1\nruns = 3\nseed = 11\n");
  REQUIRE(run("simulate --config " + path("sim.cfg") + " --runs 1 --output " + path("r1.json") +
              " --records " + path("r1.csv")) == 0);
  const std::string csv = slurp(path("r1.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.rfind("replicate,j,jp,truth_r,est_r,lo,hi,seed\n", 0) == 0);
  const auto report = json::parse(slurp(path("r1.json")));
  CHECK(report["replicates"] == 1);
  CHECK(report.contains("coverage"));
  CHECK(report.contains("mean_length"));

  REQUIRE(run("simulate --config " + path("sim.cfg") + " --output " + path("r3a.json") + " --records " +
              path("r3a.csv") + " --threads 1") == 0);
  REQUIRE(run("simulate --config " + path("sim.cfg") + " --output " + path("r3b.json") + " --records " +
              path("r3b.csv") + " --threads 2") == 0);
  CHECK(slurp(path("r3a.csv")) == slurp(path("r3b.csv")));
  CHECK(slurp(path("r3a.json")) == slurp(path("r3b.json")));

  write(path("bad.cfg"),
        "p = 2\nn = 200\nmarginals = normal(0,1)\nepsilon = 1\nruns = 3\nseed = 1\nestimator = mle\n");
  CHECK(run("simulate --config " + path("bad.cfg")) == 2);
}

TEST_CASE("verify-dp") {
  REQUIRE(run("verify-dp --mechanism rgm --epsilon 0.5 --lower 0 --upper 25 --output " + path("v.json")) == 0);
  const auto v = json::parse(slurp(path("v.json")));
  CHECK(v["satisfied"] == true);
  CHECK(v["max_log_ratio"].get<double>() <= 0.5 + 1e-9);
  CHECK(run("verify-dp --mechanism btgm --epsilon 1 --upper 10 --delta 1.5") == 2);
}

}  // TEST_SUITE
