#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr
};

Run run(const std::string& args) {
  Run r;
  const std::string cmd = std::string(DIRBOOT_EXE) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string cfg(const std::string& name) { return std::string(DIRBOOT_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("dirboot_cli_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("help for every subcommand") {
  CHECK(run("--help").code == 0);
  for (const char* sub : {"expand", "sde", "closure", "interval", "region", "mc", "eqm", "spectral", "check"}) {
    CAPTURE(sub);
    const auto r = run(std::string(sub) + " --help");
    CHECK(r.code == 0);
    CHECK(r.out.find("--model") != std::string::npos);
    CHECK(r.out.find("--threads") != std::string::npos);
  }
}

TEST_CASE("validation errors exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("nosuch").code == 2);
  CHECK(run("expand --sig 9,9 --k 2").code == 2);
  CHECK(run("closure --model " + cfg("semicircle.json")).code == 2);
  CHECK(run("interval --model /nonexistent.json").code == 2);
  const fs::path d = fresh_dir("bad");
  std::ofstream(d / "bad.json") << R"({"scan": {"lambda": 3, "typo": 1}})";
  const auto r = run("region --model " + (d / "bad.json").string());
  CHECK(r.code == 2);
  CHECK(r.out.find("/scan/typo") != std::string::npos);
}

TEST_CASE("numerical failure exits 3") {
  const fs::path d = fresh_dir("num");
  std::ofstream(d / "e.json") << R"({"equilibrium": {"max_iter": 1, "restarts": 1, "g2": -3.99, "g4": 1, "n": 64}})";
  const auto r = run("eqm --model " + (d / "e.json").string() + " --out " + d.string());
  CHECK(r.code == 3);
}

TEST_CASE("expand and sde print expansions") {
  auto r = run("expand --sig 1,0 --k 4");
  CHECK(r.code == 0);
  CHECK(r.out.find("2*N*Tr(H^4) + 8*Tr(H)*Tr(H^3) + 6*(Tr(H^2))^2") != std::string::npos);
  r = run("sde --model " + cfg("cubic.json") + " --l 0");
  CHECK(r.code == 0);
  CHECK(r.out.find("0 = 2*m_1 + g*(2*m_2 + 2*m_1^2)") != std::string::npos);
  CHECK(run("closure --model " + cfg("cubic.json")).code == 0);
  CHECK(run("check").code == 0);
}

TEST_CASE("CSV headers") {
  const fs::path d = fresh_dir("csv");
  const std::string out = " --out " + d.string();
  REQUIRE(run("interval --model " + cfg("quartic10.json") + out).code == 0);
  CHECK(first_line(d / "intervals.csv") == "coupling,lo,hi,lambda,empty");
  REQUIRE(run("region --model " + cfg("cubic.json") + " --lambda 3" + out).code == 0);
  CHECK(first_line(d / "region.csv") == "c1,c2,v1,feasible,min_eig,closure_ok");
  REQUIRE(run("region --model " + cfg("quartic01.json") + " --lambda 2" + out).code == 0);
  CHECK(first_line(d / "region.csv") == "c1,c2,v1,v2,feasible,min_eig,closure_ok");
  REQUIRE(run("mc --model " + cfg("gaussian.json") + out).code == 0);
  CHECK(first_line(d / "mc.csv") == "word,mean,stderr,N,steps,seed");
  REQUIRE(run("spectral --model " + cfg("semicircle.json") + out).code == 0);
  CHECK(first_line(d / "density.csv") == "x,rho");
  CHECK(first_line(d / "curves.csv") == "t,K,ds,vs");
  std::ofstream(d / "sweep.json") << R"({"equilibrium": {"g4": 1, "n": 64, "sweep": [[-3.99, 1, 0], [-3.99, 1, 2]]}})";
  REQUIRE(run("eqm --model " + (d / "sweep.json").string() + out).code == 0);
  CHECK(first_line(d / "phase.csv") == "g2,g4,m,cuts,m2,energy");
}

TEST_CASE("reruns are byte-identical") {
  const fs::path a = fresh_dir("ra"), b = fresh_dir("rb");
  REQUIRE(run("mc --model " + cfg("gaussian.json") + " --seed 11 --out " + a.string()).code == 0);
  REQUIRE(run("mc --model " + cfg("gaussian.json") + " --seed 11 --threads 2 --out " + b.string()).code == 0);
  CHECK(slurp(a / "mc.csv") == slurp(b / "mc.csv"));
  CHECK(slurp(a / "mc.csv").find(",11\n") != std::string::npos);
  REQUIRE(run("region --model " + cfg("cubic.json") + " --lambda 3 --out " + a.string()).code == 0);
  REQUIRE(run("region --model " + cfg("cubic.json") + " --lambda 3 --threads 2 --out " + b.string()).code == 0);
  CHECK(slurp(a / "region.csv") == slurp(b / "region.csv"));
}
