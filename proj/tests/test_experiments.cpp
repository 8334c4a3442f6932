#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "hopt/error.hpp"
#include "hopt/experiments.hpp"
#include "hopt/parallel.hpp"

using namespace hopt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("hopt_exp_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + HOPT_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parses comments, overrides and rejects unknown keys") {
  std::istringstream in("# comment\nmu = 1e-4\n\nepochs=7  # trailing\n");
  ExperimentConfig cfg = ExperimentConfig::parse(in);
  CHECK(cfg.mu() == 1e-4);
  CHECK(cfg.get_size("epochs") == 7);
  CHECK(cfg.nu() == doctest::Approx(0.25 * 1e-2));
  cfg.apply_override("nu_rule=0.5");
  CHECK(cfg.nu() == 0.5);
  CHECK(cfg.get_u64s("seeds") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK_THROWS_AS(cfg.apply_override("no_such_key=1"), Error);
  CHECK_THROWS_AS(cfg.apply_override("missing-equals"), Error);
  std::istringstream bad("mu = -1\n");
  CHECK_THROWS_AS(ExperimentConfig::parse(bad).mu(), Error);
}

TEST_CASE("config hash ignores output location and worker count only") {
  ExperimentConfig a, b;
  b.set("outputs_dir", "/elsewhere");
  b.set("workers", "4");
  CHECK(a.hash("primal-gd") == b.hash("primal-gd"));
  CHECK(a.hash("primal-gd") != a.hash("dual-compare"));
  b.set("mu", "1e-3");
  CHECK(a.hash("primal-gd") != b.hash("primal-gd"));
  CHECK(a.hash("x").size() == 16);
}

TEST_CASE("sha256 matches known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("parallel_for covers every index and propagates exceptions") {
  std::vector<int> hits(100, 0);
  parallel_for(100, [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw std::runtime_error("boom"); }, 3),
                  std::runtime_error);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("tau-profile run writes its files and a manifest with digests") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.set("outputs_dir", tmp.path.string());
  std::ostringstream log;
  const RunResult r = run_experiment("tau-profile", cfg, log);
  CHECK(r.numerical_ok);
  CHECK(r.directory == tmp.path / "tau-profile" / cfg.hash("tau-profile"));
  CHECK(r.files.size() == 3);
  for (const auto& f : r.files) CHECK(sha256_file(r.directory / f.name) == f.sha256);
  std::ifstream m(r.manifest);
  std::stringstream text;
  text << m.rdbuf();
  CHECK(text.str().find("config.mu=1e-6") != std::string::npos);
  CHECK(text.str().find("file.tau_summary.csv=") != std::string::npos);
}

TEST_CASE("dual-compare with nu = mu starts the homotopic curve at zero") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.set("outputs_dir", tmp.path.string());
  cfg.set("nu_rule", "1e-6");
  cfg.set("epochs", "2");
  cfg.set("seeds", "1");
  std::ostringstream log;
  const RunResult r = run_experiment("dual-compare", cfg, log);
  std::ifstream in(r.directory / "dual_homotopic_seed1.csv");
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  const auto c1 = first.find(',', first.find(',') + 1);
  const double subopt = std::stod(first.substr(c1 + 1));
  CHECK(subopt < 1e-20);
}

TEST_CASE("CLI exit codes") {
  TempDir tmp;
  const std::string out = " --set outputs_dir=" + tmp.path.string();
  CHECK(run_cli("tau-profile" + out) == 0);
  CHECK(run_cli("no-such-experiment" + out) == 2);
  CHECK(run_cli("tau-profile --set mu=-1" + out) == 2);
  CHECK(run_cli("tau-profile --set bogus=1" + out) == 2);
  CHECK(run_cli("tau-profile --config /nonexistent.cfg" + out) == 2);
  std::ofstream(tmp.path / "empty.svm") << "";
  CHECK(run_cli("tau-profile --set dataset=" + (tmp.path / "empty.svm").string() + out) == 2);
  CHECK(run_cli("--list") == 0);
}
