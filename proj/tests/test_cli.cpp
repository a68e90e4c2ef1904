// SPDX-License-Identifier: Apache-2.0
// End-to-end checks of the command-line tool: exit codes, error reporting,
// config handling, and the on-disk artifacts of the cheap stages. Each case
// runs the real binary in a scratch directory.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "trackpred/dataset.hpp"
#include "trackpred/homography.hpp"

using namespace trackpred;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CmdResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out_f = scratch / "cmd_stdout.txt";
  const fs::path err_f = scratch / "cmd_stderr.txt";
  const std::string cmd =
      std::string(TRACKPRED_CLI_PATH) + " " + args + " >" + out_f.string() + " 2>" + err_f.string();
  const int raw = std::system(cmd.c_str());
  CmdResult r;
  if (raw != -1 && WIFEXITED(raw)) r.code = WEXITSTATUS(raw);
  r.out = slurp(out_f);
  r.err = slurp(err_f);
  return r;
}

/// Fresh scratch directory per test case.
fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("trackpred_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help output and parse failures") {
  const fs::path dir = scratch_dir("help");

  const CmdResult help = run_cli("--help", dir);
  CHECK(help.code == 0);
  for (const char* sub : {"track", "make-dataset", "train", "predict", "eval", "bench", "synth", "pipeline"})
    CHECK(help.out.find(sub) != std::string::npos);

  const CmdResult sub_help = run_cli("track --help", dir);
  CHECK(sub_help.code == 0);
  CHECK(sub_help.out.find("--detections") != std::string::npos);

  const CmdResult keys_help = run_cli("make-dataset --help", dir);
  CHECK(keys_help.code == 0);
  CHECK(keys_help.out.find("dataset.tau") != std::string::npos);

  CHECK(run_cli("", dir).code == 2);             // a subcommand is required
  CHECK(run_cli("frobnicate", dir).code == 2);   // unknown subcommand
  CHECK(run_cli("track", dir).code == 2);        // missing required options
  fs::remove_all(dir);
}

TEST_CASE("missing and empty input files") {
  const fs::path dir = scratch_dir("inputs");
  write_homography(Homography::identity(), dir / "h.txt");

  const fs::path missing = dir / "does_not_exist.csv";
  const CmdResult bad = run_cli("track --detections " + missing.string() + " --homography " + (dir / "h.txt").string() +
                                    " --out " + (dir / "out").string(),
                                dir);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("does_not_exist.csv") != std::string::npos);

  // A zero-byte detection file is an empty video, not an error.
  write_text(dir / "empty.csv", "");
  const CmdResult ok = run_cli("track --detections " + (dir / "empty.csv").string() + " --homography " +
                                   (dir / "h.txt").string() + " --out " + (dir / "out").string(),
                               dir);
  CHECK(ok.code == 0);
  REQUIRE(fs::exists(dir / "out" / "trajectories.csv"));
  CHECK(fs::exists(dir / "out" / "track_classes.csv"));
  CHECK(parse_trajectory_file(dir / "out" / "trajectories.csv").empty());
  fs::remove_all(dir);
}

TEST_CASE("config validation names the offending key") {
  const fs::path dir = scratch_dir("config");
  write_text(dir / "traj.csv", "frame_id,vehicle_id,x,y\n0,1,0.0,0.0\n");

  write_text(dir / "bad_tau.conf", "# comment line\ndataset.tau = 0\n");
  const CmdResult bad_value = run_cli("make-dataset --trajectories " + (dir / "traj.csv").string() + " --config " +
                                          (dir / "bad_tau.conf").string() + " --out " + (dir / "out").string(),
                                      dir);
  CHECK(bad_value.code == 2);
  CHECK(bad_value.err.find("dataset.tau") != std::string::npos);

  write_text(dir / "unknown.conf", "dataset.flux_capacitor = 1\n");
  const CmdResult unknown = run_cli("make-dataset --trajectories " + (dir / "traj.csv").string() + " --config " +
                                        (dir / "unknown.conf").string() + " --out " + (dir / "out").string(),
                                    dir);
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("unknown config key") != std::string::npos);

  const CmdResult set_unknown = run_cli("make-dataset --trajectories " + (dir / "traj.csv").string() +
                                            " --set nosuch.key=1 --out " + (dir / "out").string(),
                                        dir);
  CHECK(set_unknown.code == 2);
  CHECK(set_unknown.err.find("unknown config key") != std::string::npos);

  const CmdResult malformed = run_cli("make-dataset --trajectories " + (dir / "traj.csv").string() +
                                          " --set dataset.tau --out " + (dir / "out").string(),
                                      dir);
  CHECK(malformed.code == 2);
  fs::remove_all(dir);
}

TEST_CASE("synthetic data generation writes the per-video artifacts") {
  const fs::path dir = scratch_dir("synth");
  const std::string args =
      "synth --out " + (dir / "videos").string() +
      " --seed 3"
      " --set scenario.n_videos=1 --set scenario.n_agents=2 --set scenario.duration=2"
      " --set scenario.arena_width=40 --set scenario.arena_height=30 --set run.fps=5";
  const CmdResult r = run_cli(args, dir);
  CHECK(r.code == 0);
  const fs::path video = dir / "videos" / "video_0";
  REQUIRE(fs::exists(video / "truth.csv"));
  CHECK(fs::exists(video / "classes.csv"));
  CHECK(fs::exists(video / "homography.txt"));
  CHECK(fs::exists(video / "detections_sigma0.00.csv"));
  CHECK(fs::exists(video / "detections_sigma0.20.csv"));

  // The config override really drove the generator: exactly two agents.
  const auto records = parse_trajectory_file(video / "truth.csv");
  std::set<int> ids;
  for (const TrajectoryRecord& rec : records) ids.insert(rec.vehicle_id);
  CHECK(ids.size() == 2);

  // And the truth spans duration * fps + 1 frames.
  std::set<int> frames;
  for (const TrajectoryRecord& rec : records) frames.insert(rec.frame_id);
  CHECK(frames.size() == 11);

  // Rerunning with the same seed reproduces the files byte for byte.
  const fs::path again = dir / "videos2";
  const std::string args2 =
      "synth --out " + again.string() +
      " --seed 3"
      " --set scenario.n_videos=1 --set scenario.n_agents=2 --set scenario.duration=2"
      " --set scenario.arena_width=40 --set scenario.arena_height=30 --set run.fps=5";
  CHECK(run_cli(args2, dir).code == 0);
  CHECK(slurp(video / "truth.csv") == slurp(again / "video_0" / "truth.csv"));
  CHECK(slurp(video / "detections_sigma0.20.csv") == slurp(again / "video_0" / "detections_sigma0.20.csv"));
  fs::remove_all(dir);
}

TEST_CASE("tracking and windowing consume the generated artifacts") {
  const fs::path dir = scratch_dir("stages");
  const std::string synth_args =
      "synth --out " + (dir / "videos").string() +
      " --seed 5"
      " --set scenario.n_videos=1 --set scenario.n_agents=3 --set scenario.duration=4"
      " --set scenario.arena_width=50 --set scenario.arena_height=30 --set run.fps=5";
  REQUIRE(run_cli(synth_args, dir).code == 0);
  const fs::path video = dir / "videos" / "video_0";

  const CmdResult tracked = run_cli("track --detections " + (video / "detections_sigma0.00.csv").string() +
                                        " --homography " + (video / "homography.txt").string() + " --out " +
                                        (dir / "tracked").string(),
                                    dir);
  CHECK(tracked.code == 0);
  const auto rows = parse_trajectory_file(dir / "tracked" / "trajectories.csv");
  CHECK(!rows.empty());

  const CmdResult windowed = run_cli("make-dataset --trajectories " + (video / "truth.csv").string() + " --classes " +
                                         (video / "classes.csv").string() + " --out " + (dir / "data").string() +
                                         " --seed 7 --set dataset.tau=1 --set dataset.k=1 --set run.fps=5" +
                                         " --set dataset.stride=1",
                                     dir);
  CHECK(windowed.code == 0);
  REQUIRE(fs::exists(dir / "data" / "train.bin"));
  CHECK(fs::exists(dir / "data" / "val.bin"));
  CHECK(fs::exists(dir / "data" / "test.bin"));
  std::size_t total = 0;
  for (const char* name : {"train.bin", "val.bin", "test.bin"})
    total += read_samples(dir / "data" / name).samples.size();
  CHECK(total > 0);
  fs::remove_all(dir);
}

}  // TEST_SUITE
