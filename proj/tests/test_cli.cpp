#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("SPOTVOL_CLI");
  REQUIRE_MESSAGE(p != nullptr, "SPOTVOL_CLI must point at the binary");
  return p;
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI with the given arguments inside dir, capturing stdout+stderr.
RunResult run_cli(const fs::path& dir, const std::string& args) {
  const fs::path log = dir / "run.log";
  const std::string cmd = "cd '" + dir.string() + "' && '" + cli_path() +
                          "' " + args + " > '" + log.string() + "' 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  res.output = ss.str();
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file: " + p.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("spotvol_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("simulate writes data plus manifest") {
  TempDir tmp;
  const auto res = run_cli(
      tmp.path, "simulate --scenario sine --n 4096 --noise-a 0.01 --seed 7");
  CHECK(res.exit_code == 0);
  REQUIRE(fs::exists(tmp.path / "obs.csv"));
  REQUIRE(fs::exists(tmp.path / "obs.manifest.json"));

  const auto csv = slurp(tmp.path / "obs.csv");
  CHECK(csv.rfind("t,z,x,sigma2\n", 0) == 0);
  size_t rows = 0;
  for (char c : csv) rows += (c == '\n') ? 1 : 0;
  CHECK(rows == 4098);  // header + n + 1 samples

  const auto manifest = slurp(tmp.path / "obs.manifest.json");
  CHECK(manifest.find("\"format_version\"") != std::string::npos);
  CHECK(manifest.find("\"seed\": 7") != std::string::npos);
}

TEST_CASE("simulate usage errors") {
  TempDir tmp;
  CHECK(run_cli(tmp.path, "simulate --seed 7").exit_code == 2);   // missing --n
  CHECK(run_cli(tmp.path, "simulate --n 1024").exit_code == 2);   // missing --seed
  CHECK(run_cli(tmp.path, "simulate --n 1024 --seed 1 --scenario warp")
            .exit_code == 2);
}

TEST_CASE("simulate determinism") {
  TempDir tmp;
  CHECK(run_cli(tmp.path,
                "simulate --n 2048 --seed 11 --out a.csv").exit_code == 0);
  CHECK(run_cli(tmp.path,
                "simulate --n 2048 --seed 11 --out b.csv").exit_code == 0);
  CHECK(slurp(tmp.path / "a.csv") == slurp(tmp.path / "b.csv"));

  CHECK(run_cli(tmp.path,
                "simulate --n 2048 --seed 12 --out c.csv").exit_code == 0);
  CHECK(slurp(tmp.path / "a.csv") != slurp(tmp.path / "c.csv"));
}

TEST_CASE("estimate end to end") {
  TempDir tmp;
  REQUIRE(run_cli(tmp.path, "simulate --scenario sine --n 65536 --noise-a "
                            "0.01 --seed 3 --no-truth")
              .exit_code == 0);
  const auto res =
      run_cli(tmp.path, "estimate --in obs.csv --basis haar");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("n=65536") != std::string::npos);
  CHECK(res.output.find("m=256") != std::string::npos);
  CHECK(res.output.find("ell0=4") != std::string::npos);
  CHECK(res.output.find("ell1=5") != std::string::npos);
  CHECK(res.output.find("kept=") != std::string::npos);
  CHECK(fs::exists(tmp.path / "estimate.csv"));
  CHECK(fs::exists(tmp.path / "estimate.coeffs.json"));
  CHECK(fs::exists(tmp.path / "estimate.manifest.json"));
  CHECK(slurp(tmp.path / "estimate.csv").rfind("t,sigma2_hat\n", 0) == 0);
}

TEST_CASE("estimate rejects a non-uniform grid") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "bad.csv");
    out << "t,z\n0,0\n0.3,0.1\n0.5,0.2\n1,0.3\n";
  }
  CHECK(run_cli(tmp.path, "estimate --in bad.csv").exit_code == 3);
  CHECK(run_cli(tmp.path, "estimate --in missing.csv").exit_code == 3);
}

TEST_CASE("kernel-info reports closed forms") {
  TempDir tmp;
  auto res = run_cli(tmp.path, "kernel-info --kernel step");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("0.816497") != std::string::npos);
  CHECK(res.output.find("1.000000") != std::string::npos);  // ||Lambda||_L2

  res = run_cli(tmp.path, "kernel-info --kernel sine");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("0.551329") != std::string::npos);

  // degenerate descriptor file: exit 2 with a kernel validation message
  {
    std::ofstream out(tmp.path / "zero.json");
    out << R"({"family":"tabulated","breakpoints":[0.0,2.0],"values":[0.0,0.0]})";
  }
  res = run_cli(tmp.path, "kernel-info --kernel zero.json");
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("kernel error") != std::string::npos);
}

TEST_CASE("mc-rate smoke and norm ordering") {
  TempDir tmp;
  const std::string base =
      "mc-rate --n-grid 256 1024 4096 --scenario const --noise-a 0.01 "
      "--replicates 3 --basis haar --refinement 2 --seed 21 --jobs 2 ";
  auto res = run_cli(tmp.path, base + "--p 2 --out-prefix l2");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("slope=") != std::string::npos);
  CHECK(res.output.find("se=") != std::string::npos);
  REQUIRE(fs::exists(tmp.path / "l2.cells.csv"));
  REQUIRE(fs::exists(tmp.path / "l2.summary.csv"));
  REQUIRE(fs::exists(tmp.path / "l2.json"));

  res = run_cli(tmp.path, base + "--p 1 --out-prefix l1");
  CHECK(res.exit_code == 0);

  // L1 <= L2 on [0,1], cell by cell
  std::istringstream c2(slurp(tmp.path / "l2.cells.csv"));
  std::istringstream c1(slurp(tmp.path / "l1.cells.csv"));
  std::string line1, line2;
  std::getline(c1, line1);
  std::getline(c2, line2);  // headers
  CHECK(line1 == "n,replicate,lp_error");
  while (std::getline(c1, line1) && std::getline(c2, line2)) {
    const auto e1 = std::stod(line1.substr(line1.rfind(',') + 1));
    const auto e2 = std::stod(line2.substr(line2.rfind(',') + 1));
    CHECK(e1 <= e2 + 1e-12);
  }

  // too-small n grid is a usage error
  CHECK(run_cli(tmp.path, "mc-rate --n-grid 256 1024 --seed 1").exit_code == 2);
}

TEST_CASE("mc-rate determinism across runs and job counts") {
  TempDir tmp;
  const std::string base =
      "mc-rate --n-grid 256 1024 4096 --scenario sine --replicates 2 "
      "--basis haar --refinement 2 --seed 33 --out-prefix r";
  CHECK(run_cli(tmp.path, base + "1 --jobs 1").exit_code == 0);
  CHECK(run_cli(tmp.path, base + "4 --jobs 4").exit_code == 0);
  for (const char* suffix : {".cells.csv", ".summary.csv", ".json"}) {
    CHECK(slurp(tmp.path / ("r1" + std::string(suffix))) ==
          slurp(tmp.path / ("r4" + std::string(suffix))));
  }
}
