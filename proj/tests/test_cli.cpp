#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* cli() { return VANETSEC_CLI_PATH; }

int run(const std::string& args, const fs::path& stdout_file = {}) {
  std::string cmd = std::string(cli()) + " " + args + " 2>/dev/null";
  if (!stdout_file.empty())
    cmd += " > " + stdout_file.string();
  else
    cmd += " > /dev/null";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path tmp_dir() {
  auto d = fs::temp_directory_path() / "vanetsec_cli_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("solve happy path writes a trace and exits 0") {
  const auto dir = tmp_dir();
  const auto trace = dir / "trace.csv";
  const auto summary = dir / "solve_out.csv";
  const int rc = run("solve --method fista-l --seed 7 --set M=2 --set K=2 "
                     "--out " + trace.string(),
                     summary);
  CHECK(rc == 0);
  const std::string t = read_file(trace);
  CHECK(t.rfind("iter,objective_bits_per_s,step_size,cum_time_s", 0) == 0);
  CHECK(read_file(summary).find("fista-l,7,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("invalid config values exit 2 citing the invariant") {
  CHECK(run("solve --method fista --set K=0") == 2);
  CHECK(run("solve --method fista --set bogus=1") == 2);
  CHECK(run("solve --method fista --set K=two") == 2);
}

TEST_CASE("malformed flags exit 2") {
  CHECK(run("solve --method newton") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("solve") == 2);  // missing required --method
}

TEST_CASE("gradcheck reports the error and respects the threshold") {
  const auto dir = tmp_dir();
  const auto out = dir / "grad.csv";
  CHECK(run("gradcheck --seed 3 --points 5 --set M=2 --set K=2", out) == 0);
  const std::string body = read_file(out);
  CHECK(body.rfind("points,step,max_relative_error", 0) == 0);
  // an absurd threshold forces the failure exit code
  CHECK(run("gradcheck --seed 3 --points 5 --set M=2 --set K=2 "
            "--threshold 1e-18") == 1);
  fs::remove_all(dir);
}

TEST_CASE("gridcheck passes on a tiny scenario") {
  const auto dir = tmp_dir();
  const auto out = dir / "grid.csv";
  const int rc = run("gridcheck --seed 41 --set M=2 --set K=2 --set Nt=2 "
                     "--set Ne=1 --restarts 3 --points-per-dim 12",
                     out);
  CHECK(rc == 0);
  CHECK(read_file(out).find("sca,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("generate-channels is reproducible and respects --seed") {
  const auto dir = tmp_dir();
  const auto a = dir / "a.csv", b = dir / "b.csv", c = dir / "c.csv";
  CHECK(run("generate-channels --seed 5 --set M=2 --set K=2 --out " +
            a.string()) == 0);
  CHECK(run("generate-channels --seed 5 --set M=2 --set K=2 --out " +
            b.string()) == 0);
  CHECK(run("generate-channels --seed 6 --set M=2 --set K=2 --out " +
            c.string()) == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(a) != read_file(c));
  fs::remove_all(dir);
}

TEST_CASE("config file plus --set override precedence") {
  const auto dir = tmp_dir();
  const auto cfg = dir / "base.cfg";
  {
    std::ofstream f(cfg);
    f << "M = 2\nK = 2\nseed = 11\n";
  }
  const auto out = dir / "solve.csv";
  CHECK(run("solve --method fista --config " + cfg.string() +
            " --set K=3 --seed 12",
            out) == 0);
  // seed flag wins over the config file's seed
  CHECK(read_file(out).find("fista,12,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("environment variable supplies the default config path") {
  const auto dir = tmp_dir();
  const auto cfg = dir / "env.cfg";
  {
    std::ofstream f(cfg);
    f << "M = 2\nK = 2\nseed = 21\n";
  }
  const auto out = dir / "env_solve.csv";
  const std::string cmd = "VANETSEC_CONFIG=" + cfg.string() + " " + cli() +
                          " solve --method fista > " + out.string() +
                          " 2>/dev/null";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(read_file(out).find("fista,21,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("sweep ne experiment writes results and summary") {
  const auto dir = tmp_dir() / "sweep_ne";
  fs::remove_all(dir);
  const int rc = run("sweep --experiment ne --seeds 2 --ne-list 2,4 "
                     "--k-list 2 --speeds 50 --out " + dir.string());
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "results.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
  const std::string results = read_file(dir / "results.csv");
  // 2 cells x 2 seeds x 1 method
  CHECK(std::count(results.begin(), results.end(), '\n') == 5);
  fs::remove_all(dir);
}
