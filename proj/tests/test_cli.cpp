#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "offo/trace.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("offo_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  // Exit status of the CLI; stdout goes to out.txt in the sandbox.
  int run(const std::string& args) const {
    const std::string cmd = "cd \"" + dir.string() + "\" && OFFO_OUTPUT_ROOT=runs \"" OFFO_CLI_BINARY "\" " +
                            args + " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const {
    std::ifstream is(dir / name);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
};

}  // namespace

TEST_CASE("cli: three-level membrane run converges") {
  Sandbox s;
  CHECK(s.run("run --problem membrane --n 32 --solver ml --levels 3 --output ml3") == 0);
  const offo::Trace t = offo::load_trace((s.dir / "runs/ml3.jsonl").string());
  CHECK(t.summary.converged);
  CHECK(t.meta.levels == 3);
  CHECK(t.meta.cost_kind == "C_ML");
  CHECK(t.records.size() == t.summary.cycles + 1);
  CHECK(fs::exists(s.dir / "runs/ml3.csv"));
}

TEST_CASE("cli: decomposition configuration") {
  Sandbox s;
  CHECK(s.run("run --problem membrane --n 16 --solver dd --subdomains 4 --overlap 2 --variant wras --output dd") == 0);
  const offo::Trace t = offo::load_trace((s.dir / "runs/dd.jsonl").string());
  CHECK(t.meta.subdomains == 4);
  CHECK(t.meta.overlap == 2);
  CHECK(t.meta.variant == "WRAS");
  CHECK(t.meta.sizes.size() == 5);
  CHECK(t.meta.cost_kind == "C_DD");

  CHECK(s.run("summarize runs/dd.jsonl") == 0);
  CHECK(s.read("out.txt").find("C_DD versus subdomains") != std::string::npos);
}

TEST_CASE("cli: config files, flags and exit codes") {
  Sandbox s;
  s.write("good.yaml", "problem: poisson1d\nn: 32\nsolver: ml\nlevels: 2\n");
  s.write("bad.yaml", "problem: poisson1d\nn: [32\n");
  s.write("unknown.yaml", "problem: poisson1d\nspeed: 3\n");
  CHECK(s.run("run -c good.yaml --no-write --quiet") == 0);
  CHECK(s.run("run -c bad.yaml --no-write") == 1);
  CHECK(s.run("run -c unknown.yaml --no-write") == 1);
  CHECK(s.read("err.txt").find("unknown.yaml:2: unknown key 'speed'") != std::string::npos);
  CHECK(s.run("run -c missing.yaml --no-write") == 1);
  CHECK(s.run("run --problem membrane --n 30 --levels 3 --no-write") == 1);
  CHECK(s.run("run --bogus-flag 1") == 1);
  // flags override the file; a tiny budget ends without convergence
  CHECK(s.run("run -c good.yaml --max-cycles 2 --no-write") == 2);
  CHECK(s.run("summarize") == 1);
  CHECK(s.run("summarize nothing.jsonl") == 1);
}
