#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "evbias/event_io.hpp"
#include "evbias/frame.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string output;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + EVBIAS_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path tmp_dir(const std::string& name) {
  const fs::path dir = fs::path(EVBIAS_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const char* kTinyScene =
    R"({"width": 16, "height": 16, "duration_us": 200000, "kind": "grating",
        "speed_px_s": 40, "half_period_us": 100000})";

}  // namespace

TEST_CASE("simulate on a zero-contrast scene without noise writes an empty stream") {
  const auto dir = tmp_dir("zero");
  const auto scene = write_text(dir / "flat.json",
                                R"({"width": 16, "height": 16, "duration_us": 100000, "contrast": 0})");
  const auto r = run_cli("simulate --no-noise --scene " + q(scene) + " --out " + q(dir / "e.evt0"));
  CHECK(r.code == 0);
  CHECK(r.output.find("events: 0") != std::string::npos);
  CHECK(fs::file_size(dir / "e.evt0") == 12);
}

TEST_CASE("simulate rejects out-of-range biases with exit code 2") {
  const auto dir = tmp_dir("badbias");
  const auto r = run_cli("simulate --bias-diff-on 80 --out " + q(dir / "e.evt0"));
  CHECK(r.code == 2);
  CHECK(r.output.find("bias_diff_on") != std::string::npos);
  CHECK(r.output.find("81-255") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "e.evt0"));

  CHECK(run_cli("simulate --bias-refr 256 --out " + q(dir / "e.evt0")).code == 2);
  CHECK(run_cli("simulate --bias-fo abc --out " + q(dir / "e.evt0")).code == 2);
  CHECK(run_cli("simulate").code == 2);
}

TEST_CASE("simulate is deterministic and csv output matches evt0") {
  const auto dir = tmp_dir("determinism");
  const auto scene = write_text(dir / "s.json", kTinyScene);
  const std::string base = "simulate --scene " + q(scene) + " --seed 3 --out ";
  REQUIRE(run_cli(base + q(dir / "a.evt0")).code == 0);
  REQUIRE(run_cli(base + q(dir / "b.evt0") + " --threads 2").code == 0);
  REQUIRE(run_cli(base + q(dir / "c.csv")).code == 0);
  const auto a = evbias::read_file(dir / "a.evt0");
  CHECK(a == evbias::read_file(dir / "b.evt0"));
  CHECK(a.size() > 12);
  const auto from_csv = evbias::load_events(dir / "c.csv", {16, 16});
  CHECK(evbias::encode_evt0(from_csv) == a);
}

TEST_CASE("accumulate reports frames and writes pgm files") {
  const auto dir = tmp_dir("accumulate");
  const auto scene = write_text(dir / "s.json", kTinyScene);
  REQUIRE(run_cli("simulate --scene " + q(scene) + " --out " + q(dir / "e.evt0")).code == 0);

  const auto r = run_cli("accumulate --in " + q(dir / "e.evt0") + " --period-us 50000 --out-dir " +
                         q(dir / "frames") + " --pgm");
  REQUIRE(r.code == 0);
  const auto events = evbias::load_events(dir / "e.evt0", {16, 16});
  const std::size_t expected = events.events().back().t / 50000 + 1;
  CHECK(r.output.find("frames: " + std::to_string(expected)) != std::string::npos);
  CHECK(fs::exists(dir / "frames" / "frame_000000.pgm"));
  CHECK(fs::exists(dir / "frames" / "frames.csv"));

  const auto count = run_cli("accumulate --mode count --in " + q(dir / "e.evt0"));
  CHECK(count.code == 0);
  CHECK(count.output.find("frames: ") != std::string::npos);
}

TEST_CASE("accumulate input errors map to exit codes") {
  const auto dir = tmp_dir("accumulate_errors");
  const auto empty = dir / "empty.evt0";
  evbias::save_events(empty, evbias::EventStream({16, 16}));

  const auto zero = run_cli("accumulate --in " + q(empty));
  CHECK(zero.code == 0);
  CHECK(zero.output.find("frames: 0") != std::string::npos);

  const auto period = run_cli("accumulate --period-us 0 --in " + q(empty));
  CHECK(period.code == 2);
  CHECK(period.output.find("--period-us") != std::string::npos);

  CHECK(run_cli("accumulate --in " + q(dir / "missing.evt0")).code == 1);
  const auto garbage = write_text(dir / "garbage.evt0", "not an event file");
  CHECK(run_cli("accumulate --in " + q(garbage)).code == 1);
  CHECK(run_cli("accumulate --mode sum --in " + q(empty)).code == 2);
  CHECK(run_cli("accumulate --pgm --in " + q(empty)).code == 2);
}

TEST_CASE("ag scores a directory of uniform frames as zero") {
  const auto dir = tmp_dir("ag");
  const evbias::Frame flat({8, 8}, 0.5);
  for (int k = 0; k < 3; ++k) {
    evbias::write_file(dir / ("frame_00000" + std::to_string(k) + ".pgm"), evbias::write_pgm(flat));
  }
  const auto r = run_cli("ag --in " + q(dir));
  CHECK(r.code == 0);
  CHECK(r.output.find("mean_ag: 0.000000") != std::string::npos);

  const auto empty_dir = tmp_dir("ag_empty");
  CHECK(run_cli("ag --in " + q(empty_dir)).code == 2);
}

TEST_CASE("ag on an event file matches the accumulate pipeline") {
  const auto dir = tmp_dir("ag_events");
  const auto scene = write_text(dir / "s.json", kTinyScene);
  REQUIRE(run_cli("simulate --scene " + q(scene) + " --out " + q(dir / "e.evt0")).code == 0);
  const auto r = run_cli("ag --in " + q(dir / "e.evt0"));
  CHECK(r.code == 0);
  CHECK(r.output.find("mean_ag: 0.") != std::string::npos);
  CHECK(r.output.find("mean_ag: 0.000000") == std::string::npos);
}

TEST_CASE("sweep over the tested grid writes one row per value") {
  const auto dir = tmp_dir("sweep");
  const auto scene = write_text(dir / "s.json", kTinyScene);
  const auto r = run_cli("sweep --bias bias_hpf --values paper --scene " + q(scene) + " --out " +
                         q(dir / "hpf.csv"));
  REQUIRE(r.code == 0);
  CHECK(r.output.find("rows: 10") != std::string::npos);
  std::ifstream in(dir / "hpf.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "bias,value,mean_ag,events,frames");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("bias_hpf,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 10);
}

TEST_CASE("sweep prints csv to stdout and accepts explicit values") {
  const auto dir = tmp_dir("sweep_stdout");
  const auto scene = write_text(dir / "s.json", kTinyScene);
  const auto r = run_cli("sweep --bias fo --values 60,74 --no-noise --scene " + q(scene));
  REQUIRE(r.code == 0);
  CHECK(r.output.rfind("bias,value,mean_ag,events,frames\nbias_fo,60,", 0) == 0);
  CHECK(r.output.find("\nbias_fo,74,") != std::string::npos);
}

TEST_CASE("sweep rejects unknown biases and bad values") {
  const auto bogus = run_cli("sweep --bias bogus");
  CHECK(bogus.code == 2);
  for (const char* name : {"bias_fo", "bias_hpf", "bias_diff_on", "bias_diff_off", "bias_refr"}) {
    CHECK(bogus.output.find(name) != std::string::npos);
  }
  CHECK(run_cli("sweep --bias bias_diff_on --values 80").code == 2);
  CHECK(run_cli("sweep --bias bias_fo --values 10,x").code == 2);
}

TEST_CASE("help lists every subcommand and flag default") {
  const auto top = run_cli("--help");
  CHECK(top.code == 0);
  for (const char* sub : {"simulate", "accumulate", "ag", "sweep"}) {
    CHECK(top.output.find(sub) != std::string::npos);
  }
  const auto sim = run_cli("simulate --help");
  CHECK(sim.code == 0);
  CHECK(sim.output.find("--bias-diff-off INT [52]") != std::string::npos);
  CHECK(sim.output.find("--dt-us UINT [200]") != std::string::npos);
  const auto acc = run_cli("accumulate --help");
  CHECK(acc.output.find("[33333]") != std::string::npos);
}
