// End-to-end command-line coverage on tiny synthetic data. The binary path
// comes from the build system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const char* cli() { return DUALLSTM_CLI_PATH; }

int run(const std::string& args) {
  const std::string cmd = std::string(cli()) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("duallstm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: full synth/train/predict/eval pipeline") {
  TempDir dir;
  const std::string cfg = dir / "synth.cfg";
  {
    std::ofstream f(cfg);
    f << "lk_tracks=5\nllc_tracks=2\nrlc_tracks=2\nduration_s=22\n";
  }
  const std::string hyper = dir / "hyper.cfg";
  {
    std::ofstream f(hyper);
    f << "epochs=1\nseed=3\n";
  }
  const std::string tracks = dir / "tracks.txt";
  const std::string ckpt = dir / "model.ckpt";

  CHECK(run("synth --config " + cfg + " --out " + tracks + " --seed 3") == 0);
  CHECK(fs::exists(tracks));
  CHECK(fs::exists(tracks + ".manifest"));

  CHECK(run("train --data " + tracks + " --hyper " + hyper + " --out " + ckpt) == 0);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(ckpt + ".intent_history.txt"));
  CHECK(fs::exists(ckpt + ".traj_history.txt"));
  CHECK(slurp(ckpt).rfind("DUALLSTM v1", 0) == 0);

  const std::string preds = dir / "preds.txt";
  CHECK(run("predict --checkpoint " + ckpt + " --data " + tracks + " --out " + preds) == 0);
  const std::string pred_text = slurp(preds);
  CHECK(pred_text.find("# vehicle=") != std::string::npos);
  CHECK(pred_text.find("target_lane=") != std::string::npos);

  const std::string eval_prefix = dir / "eval";
  CHECK(run("eval --checkpoint " + ckpt + " --data " + tracks + " --out " + eval_prefix) == 0);
  CHECK(fs::exists(eval_prefix + ".rmse.txt"));
  CHECK(fs::exists(eval_prefix + ".rmse_stage.txt"));
  CHECK(fs::exists(eval_prefix + ".lead_times.txt"));
  const std::string rmse = slurp(eval_prefix + ".rmse.txt");
  CHECK(rmse.find("horizon_s") != std::string::npos);
  CHECK(rmse.find("5.0\t") != std::string::npos);
}

TEST_CASE("cli: epochs=0 checkpoint equals the initialization and reruns are identical") {
  TempDir dir;
  const std::string cfg = dir / "synth.cfg";
  {
    std::ofstream f(cfg);
    f << "lk_tracks=3\nllc_tracks=1\nrlc_tracks=1\nduration_s=20\n";
  }
  const std::string hyper = dir / "hyper.cfg";
  {
    std::ofstream f(hyper);
    f << "epochs=0\nseed=9\n";
  }
  const std::string tracks = dir / "tracks.txt";
  CHECK(run("synth --config " + cfg + " --out " + tracks + " --seed 9") == 0);

  const std::string c1 = dir / "a.ckpt";
  const std::string c2 = dir / "b.ckpt";
  CHECK(run("train --data " + tracks + " --hyper " + hyper + " --out " + c1) == 0);
  CHECK(run("train --data " + tracks + " --hyper " + hyper + " --out " + c2) == 0);
  CHECK(slurp(c1) == slurp(c2));
  CHECK(!slurp(c1).empty());
}

TEST_CASE("cli: synth determinism is byte-exact") {
  TempDir dir;
  const std::string a = dir / "a.txt";
  const std::string b = dir / "b.txt";
  const std::string cfg = dir / "synth.cfg";
  {
    std::ofstream f(cfg);
    f << "lk_tracks=4\nllc_tracks=1\nrlc_tracks=0\nduration_s=18\n";
  }
  CHECK(run("synth --config " + cfg + " --out " + a + " --seed 5") == 0);
  CHECK(run("synth --config " + cfg + " --out " + b + " --seed 5") == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("cli: error paths map to the documented exit codes") {
  TempDir dir;
  // Usage errors.
  CHECK(run("") == 1);
  CHECK(run("synth") == 1);                       // missing required --out
  CHECK(run("unknown --out x") == 1);

  // Data errors.
  CHECK(run("synth --config " + (dir / "missing.cfg") + " --out " + (dir / "o.txt")) == 2);
  CHECK(!fs::exists(dir / "o.txt"));  // no partial output
  CHECK(run("train --data " + (dir / "missing.txt") + " --out " + (dir / "m.ckpt")) == 2);

  const std::string corrupt = dir / "corrupt.txt";
  {
    std::ofstream f(corrupt);
    f << "1 1 garbage\n2 not numbers\n";
  }
  CHECK(run("train --data " + corrupt + " --out " + (dir / "m.ckpt")) == 2);

  // Too-short data: parses but yields no windows.
  const std::string tiny = dir / "tiny.txt";
  {
    std::ofstream f(tiny);
    for (int i = 1; i <= 30; ++i) {
      f << "1 " << i << " 30 " << i * 100 << " 1.83 " << i * 2.0
        << " 1.83 " << i * 2.0 << " 4.5 2 2 20 0 1 0 0 0 0\n";
    }
  }
  CHECK(run("train --data " + tiny + " --out " + (dir / "m.ckpt")) == 2);

  // Checkpoint version mismatch.
  const std::string bad_ckpt = dir / "bad.ckpt";
  {
    std::ofstream f(bad_ckpt);
    f << "DUALLSTM v9\n";
  }
  CHECK(run("predict --checkpoint " + bad_ckpt + " --data " + tiny + " --out " +
            (dir / "p.txt")) == 2);
}
