#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef SARICOS_CLI
#error "SARICOS_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& stdout_file = "/dev/null") {
  const std::string cmd = std::string(SARICOS_CLI) + " " + args + " >" + stdout_file.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("saricos_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("exit statuses separate usage, invalid config, I/O and check failures") {
  Scratch s("codes");
  CHECK(run("") == 1);
  CHECK(run("train --no-such-flag") == 1);
  CHECK(run("train --scenario drawing") == 1);
  CHECK(run("show-config") == 0);

  std::ofstream(s.dir / "bad.ini") << "[learner]\nbatch_size = 0\np_a = 2\n";
  CHECK(run("show-config --config " + (s.dir / "bad.ini").string()) == 2);
  CHECK(run("train --config " + (s.dir / "missing.ini").string()) == 3);
  CHECK(run("eval --checkpoint " + (s.dir / "missing.json").string()) == 3);
  CHECK(run("verify --manifest " + (s.dir / "missing.json").string()) == 3);
}

TEST_CASE("gradcheck passes on the real gradients and fails on an injected sign flip") {
  Scratch s("grad");
  CHECK(run("gradcheck", s.dir / "report.txt") == 0);
  const std::string report = slurp(s.dir / "report.txt");
  for (const char* name : {"gibbs_log_grad_vs_central_difference", "gaussian_rad_log_grad_vs_central_difference",
                           "two_tiered_log_grad_vs_central_difference", "tolerance"}) {
    CHECK(report.find(name) != std::string::npos);
  }
  CHECK(run("gradcheck --inject-fault rad-sign") == 4);
}

TEST_CASE("500-episode smoke run, then eval, heatmap and verify on its output") {
  Scratch s("smoke");
  const auto start = std::chrono::steady_clock::now();
  REQUIRE(run("train --trials 1 --episodes 500 --episodes-eval 20 --out " + (s.dir / "run").string()) == 0);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 60.0);
  MESSAGE("500-episode smoke run took " << seconds << " s");

  const fs::path manifest = s.dir / "run" / "manifest.json";
  CHECK(run("verify --manifest " + manifest.string()) == 0);

  const std::string ckpt = (s.dir / "run" / "trial_0" / "checkpoint.json").string();
  CHECK(run("eval --greedy --episodes 20 --checkpoint " + ckpt + " --out " + (s.dir / "e1").string()) == 0);
  CHECK(run("eval --greedy --episodes 20 --checkpoint " + ckpt + " --out " + (s.dir / "e2").string()) == 0);
  CHECK(slurp(s.dir / "e1" / "eval_table.txt") == slurp(s.dir / "e2" / "eval_table.txt"));
  CHECK(!slurp(s.dir / "e1" / "eval_metrics.tsv").empty());

  CHECK(run("heatmap --resolution 1 --checkpoint " + ckpt + " --out " + (s.dir / "h.tsv").string()) == 0);
  std::istringstream rows(slurp(s.dir / "h.tsv"));
  std::string line;
  int data_rows = 0;
  while (std::getline(rows, line))
    if (!line.empty() && line[0] != '#' && line[0] != 'x') ++data_rows;
  CHECK(data_rows == 1);

  // A checkpoint whose parameters do not fit its feature layout is refused as invalid input.
  auto doc = nlohmann::json::parse(slurp(ckpt));
  doc["features"]["order"] = 2;
  std::ofstream(s.dir / "order2.json") << doc.dump();
  CHECK(run("eval --checkpoint " + (s.dir / "order2.json").string()) == 2);

  std::ofstream(s.dir / "run" / "summary.txt", std::ios::app) << "edited\n";
  CHECK(run("verify --manifest " + manifest.string()) == 4);
}
