#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("nergpsa_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ostringstream eas;
    eas << "frequency_hz,eas\n";
    for (int i = 0; i <= 150; ++i) {
      const double f = 0.1 * std::pow(10.0, i / 50.0);
      const double a = 0.01 * f * f / (1 + f * f / 0.16) * std::exp(-3.14159 * 0.04 * f);
      eas << f << "," << a << "\n";
    }
    write("eas.csv", eas.str());
    write("scn.json", R"({"magnitude": 6.5, "r_rup_km": 20, "vs30_ms": 400})");
    write("desc.csv", "frequency_hz,eas\n1,1\n0.5,1\n2,1\n");
    write("field.csv",
          "frequency_hz,mean_ln,sd_ln\n0.1,0,0\n0.3,0,0\n1,0,0\n3,0,0\n10,0,0\n20,0,0\n30,0,0\n"
          "50,0,0\n");
    write("cfg.json", R"({"periods": [0.1, 0.5, 1.0]})");
  }
  ~Sandbox() { fs::remove_all(dir); }
  void write(const std::string& name, const std::string& s) const {
    std::ofstream(dir / name) << s;
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string read(const std::string& name) const {
    std::ifstream in(dir / name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  int run(const std::string& args) const {
    const std::string cmd = std::string(NERGPSA_CLI) + " " + args + " > " + path("stdout.txt") +
                            " 2> " + path("stderr.txt");
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
};

}  // namespace

TEST_CASE("psa command writes csv and manifest") {
  Sandbox s;
  CHECK(s.run("psa --eas " + s.path("eas.csv") + " --scenario " + s.path("scn.json") +
              " --config " + s.path("cfg.json") + " --out " + s.path("o")) == 0);
  const auto csv = s.read("o/psa.csv");
  CHECK(csv.rfind("period_s,psa,m0,delta,n_z,pf,d_gm,d_rms\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(s.read("o/manifest.json").find("\"psa.csv\"") != std::string::npos);
}

TEST_CASE("descending frequencies exit with a validation code") {
  Sandbox s;
  CHECK(s.run("psa --eas " + s.path("desc.csv") + " --scenario " + s.path("scn.json") +
              " --out " + s.path("o")) == 2);
  CHECK(s.read("stderr.txt").find("frequencies must be strictly ascending") != std::string::npos);
  CHECK(s.read("stderr.txt").find("desc.csv:3") != std::string::npos);
}

TEST_CASE("missing input exits with the I/O code") {
  Sandbox s;
  CHECK(s.run("psa --eas " + s.path("nope.csv") + " --scenario " + s.path("scn.json") +
              " --out " + s.path("o")) == 4);
}

TEST_CASE("bad arguments exit with the validation code") {
  Sandbox s;
  CHECK(s.run("psa --scenario x.json") == 2);
  CHECK(s.run("bogus") == 2);
}

TEST_CASE("zero-sd field gives identical realizations") {
  Sandbox s;
  CHECK(s.run("fnerg --eas-erg " + s.path("eas.csv") + " --field " + s.path("field.csv") +
              " --scenario " + s.path("scn.json") + " --config " + s.path("cfg.json") +
              " --samples 5 --seed 3 --out " + s.path("f")) == 0);
  std::istringstream in(s.read("f/fnerg.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "realization,period_s,fnerg");
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("mean", 0) == 0 || line.rfind("sd", 0) == 0) continue;
    CHECK(line.substr(line.rfind(',') + 1) == "0");
    ++rows;
  }
  CHECK(rows == 15);
}

TEST_CASE("identical spectra give zero factors") {
  Sandbox s;
  CHECK(s.run("fnerg --eas-erg " + s.path("eas.csv") + " --eas-nerg " + s.path("eas.csv") +
              " --scenario " + s.path("scn.json") + " --config " + s.path("cfg.json") +
              " --out " + s.path("f")) == 0);
  CHECK(s.read("f/fnerg.csv") == "realization,period_s,fnerg\n0,0.1,0\n0,0.5,0\n0,1,0\n");
}

TEST_CASE("absent seed is generated and recorded") {
  Sandbox s;
  CHECK(s.run("sample --field " + s.path("field.csv") + " --samples 2 --out " + s.path("g")) == 0);
  const auto m = s.read("g/manifest.json");
  CHECK(m.find("\"seed_generated\": true") != std::string::npos);
}

TEST_CASE("hazard weights must sum to one") {
  Sandbox s;
  s.write("hs.json", R"({"period_s": 0.2, "scenarios": [{"id": "a", "rate": 0.01,
    "magnitude": 6, "r_rup_km": 10, "vs30_ms": 400, "median_ln_psa": -1.5, "sigma": 0.6}]})");
  s.write("hb.json", R"({"branches": [{"weight": 0.5}, {"weight": 0.4}]})");
  CHECK(s.run("hazard --scenarios " + s.path("hs.json") + " --branches " + s.path("hb.json") +
              " --out " + s.path("h")) == 2);
  CHECK(s.read("stderr.txt").find("hb.json") != std::string::npos);
  s.write("hb.json", R"({"branches": [{"weight": 1.0}]})");
  CHECK(s.run("hazard --scenarios " + s.path("hs.json") + " --branches " + s.path("hb.json") +
              " --out " + s.path("h")) == 0);
}

TEST_CASE("fixed seed reproduces the summary sd") {
  Sandbox s;
  s.write("field2.csv",
          "frequency_hz,mean_ln,sd_ln\n0.1,0,0.3\n0.3,0,0.3\n1,0,0.4\n3,0,0.4\n10,0,0.3\n20,0,0.3\n"
          "30,0,0.3\n50,0,0.3\n");
  const std::string args = "fnerg --eas-erg " + s.path("eas.csv") + " --field " + s.path("field2.csv") +
                           " --scenario " + s.path("scn.json") + " --config " + s.path("cfg.json") +
                           " --samples 100 --seed 11 --out ";
  CHECK(s.run(args + s.path("r1")) == 0);
  CHECK(s.run(args + s.path("r2")) == 0);
  const auto a = s.read("r1/fnerg.csv");
  CHECK(a == s.read("r2/fnerg.csv"));
  CHECK(a.find("\nsd,0.5,") != std::string::npos);
}
