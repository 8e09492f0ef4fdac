// End-to-end checks of the CLI binary: exit codes, CSV shape, byte stability.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = EXFLOW_CLI_PATH;

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "exflow_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

int run(const std::string& args, std::string* out = nullptr) {
  const fs::path dir = fs::temp_directory_path() / "exflow_cli_test";
  fs::create_directories(dir);
  const fs::path out_file = dir / "stdout.txt";
  const std::string cmd =
      kCli + " " + args + " > " + out_file.string() + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kConstantScenario = R"(
[algebra]
dimension = 2
ranks = 1,1
[path]
generator = zero
t_min = 0
t_max = 1
[run]
samples = 5
grid = 11
seed = 7
)";

const char* kRotationScenario = R"(
[algebra]
dimension = 2
ranks = 1,1
[path]
generator = rotation(1,2,1.0)
t_min = 0
t_max = 1
[run]
samples = 8
grid = 21
seed = 7
)";

}  // namespace

TEST_CASE("verify on a constant path exits 0 with all passes") {
  const auto cfg = write_config("const.cfg", kConstantScenario);
  std::string out;
  CHECK(run("verify --config " + cfg.string(), &out) == 0);
  CHECK(out.find("FAIL") == std::string::npos);
  CHECK(out.find("intertwining pass") != std::string::npos);
}

TEST_CASE("verify --list prints check names without running") {
  const auto cfg = write_config("const.cfg", kConstantScenario);
  std::string out;
  CHECK(run("verify --list --config " + cfg.string(), &out) == 0);
  CHECK(out.find("codiagonal") != std::string::npos);
  CHECK(out.find("pass") == std::string::npos);
}

TEST_CASE("malformed config exits 2 naming the field") {
  const auto cfg = write_config("noseed.cfg",
                                "[algebra]\ndimension = 2\nranks = 1,1\n");
  CHECK(run("verify --config " + cfg.string()) == 2);
}

TEST_CASE("deliberately coarse step makes verify fail with exit 1") {
  const auto cfg = write_config("coarse.cfg", std::string(kRotationScenario) +
                                                  "[solver]\nstep = 0.5\n");
  std::string out;
  CHECK(run("verify --config " + cfg.string(), &out) == 1);
  CHECK(out.find("intertwining FAIL") != std::string::npos);
}

TEST_CASE("simulate writes the expected CSV, byte-stable across runs") {
  const auto cfg = write_config("rot.cfg", kRotationScenario);
  const fs::path out1 = cfg.parent_path() / "out1.csv";
  const fs::path out2 = cfg.parent_path() / "out2.csv";
  CHECK(run("simulate --config " + cfg.string() + " --output " +
            out1.string()) == 0);
  CHECK(run("simulate --config " + cfg.string() + " --output " +
            out2.string()) == 0);
  const std::string csv = read_file(out1);
  CHECK(csv == read_file(out2));
  CHECK(csv.rfind("t,quantity,value\n", 0) == 0);
  // 21 grid rows x 5 quantities + header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21 * 5 + 1);
}

TEST_CASE("simulate on a constant path reports zero residuals") {
  const auto cfg = write_config("const.cfg", kConstantScenario);
  const fs::path out = cfg.parent_path() / "const.csv";
  CHECK(run("simulate --config " + cfg.string() + " --output " +
            out.string()) == 0);
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const std::string quantity = line.substr(c1 + 1, c2 - c1 - 1);
    const double value = std::stod(line.substr(c2 + 1));
    if (quantity.find("residual") != std::string::npos)
      CHECK(std::abs(value) <= 1e-12);
  }
}

TEST_CASE("simulate with an unwritable output exits 4") {
  const auto cfg = write_config("rot.cfg", kRotationScenario);
  CHECK(run("simulate --config " + cfg.string() +
            " --output /nonexistent/dir/out.csv") == 4);
}

TEST_CASE("estimate-constants prints empirical below the bound") {
  const auto cfg = write_config("rot.cfg", kRotationScenario);
  std::string out;
  CHECK(run("estimate-constants --config " + cfg.string(), &out) == 0);
  double c_emp = -1.0, c_bound = -1.0;
  std::istringstream in(out);
  std::string name;
  double value;
  while (in >> name >> value) {
    if (name == "C_J_empirical") c_emp = value;
    if (name == "C_J_bound") c_bound = value;
    in.ignore(1000, '\n');
  }
  REQUIRE(c_emp >= 0.0);
  REQUIRE(c_bound >= 0.0);
  CHECK(c_emp <= c_bound + 1e-9);
}

TEST_CASE("estimate-constants on a constant path gives all zeros") {
  const auto cfg = write_config("const.cfg", kConstantScenario);
  std::string out;
  CHECK(run("estimate-constants --config " + cfg.string(), &out) == 0);
  CHECK(out.find("C_J_empirical 0.0000000000000000e+00") != std::string::npos);
  CHECK(out.find("K_J 0.0000000000000000e+00") != std::string::npos);
}

TEST_CASE("compare-propagators thresholds per system size") {
  const auto cfg2 = write_config("rot.cfg", kRotationScenario);
  std::string out;
  CHECK(run("compare-propagators --config " + cfg2.string(), &out) == 0);
  CHECK(out.find("omega_vs_g_global pass") != std::string::npos);

  const auto cfg3 = write_config("three.cfg", R"(
[algebra]
dimension = 3
ranks = 1,1,1
[path]
generator = random(1.0)
t_min = 0
t_max = 1
[run]
samples = 6
seed = 11
)");
  CHECK(run("compare-propagators --config " + cfg3.string(), &out) == 0);
  CHECK(out.find("omega_vs_g_on_B0 pass") != std::string::npos);
  CHECK(out.find("omega_vs_g_global info") != std::string::npos);
}

TEST_CASE("--dump-config re-emits the resolved scenario") {
  const auto cfg = write_config("rot.cfg", kRotationScenario);
  std::string out;
  CHECK(run("verify --dump-config --config " + cfg.string(), &out) == 0);
  CHECK(out.find("[solver]") != std::string::npos);
  CHECK(out.find("backend = rk4") != std::string::npos);
  CHECK(out.find("seed = 7") != std::string::npos);
}

TEST_CASE("--seed override changes the resolved seed") {
  const auto cfg = write_config("rot.cfg", kRotationScenario);
  std::string out;
  CHECK(run("verify --dump-config --seed 99 --config " + cfg.string(), &out) ==
        0);
  CHECK(out.find("seed = 99") != std::string::npos);
}
