// evbias: simulate event streams under sensor biases, accumulate them into
// frames, score frames by average gradient and run one-bias sweeps.
//
// Exit codes: 0 success, 1 I/O or environment failure, 2 invalid user input.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evbias/accumulate.hpp"
#include "evbias/biases.hpp"
#include "evbias/error.hpp"
#include "evbias/event_io.hpp"
#include "evbias/pixel_sim.hpp"
#include "evbias/scene.hpp"
#include "evbias/sharpness.hpp"
#include "evbias/sweep.hpp"

namespace fs = std::filesystem;
using namespace evbias;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

/// Thrown for input errors that should name the offending flag.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string flag_for(BiasName b) {
  std::string flag = "--" + std::string(to_string(b));
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

Scene load_scene(const std::string& path) {
  if (path.empty()) return desk_scene();
  const auto bytes = read_file(path);
  try {
    return parse_scene_json({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
  } catch (const ValidationError& e) {
    throw UsageError("--scene " + path + ": " + e.what());
  }
}

struct StreamInput {
  std::string path;
  int width = 64;
  int height = 64;
  bool lenient = false;

  void add_to(CLI::App* cmd, const std::string& what) {
    cmd->add_option("--in", path, what)->required();
    cmd->add_option("--width", width, "Sensor width for CSV input")->capture_default_str();
    cmd->add_option("--height", height, "Sensor height for CSV input")->capture_default_str();
    cmd->add_flag("--lenient", lenient, "Sort out-of-order events instead of failing");
  }

  [[nodiscard]] EventStream load() const {
    if (width < 2 || height < 2 || width > 65535 || height > 65535) {
      throw UsageError("--width/--height must be within 2-65535");
    }
    const SensorGeometry g{static_cast<std::uint16_t>(width), static_cast<std::uint16_t>(height)};
    try {
      return load_events(path, g, lenient ? OrderPolicy::Lenient : OrderPolicy::Strict);
    } catch (const FormatError& e) {
      throw IoError(path + ": " + e.what());
    }
  }
};

struct AccumulationFlags {
  std::uint64_t period_us = kDefaultPeriodUs;
  std::string mode = "polarity";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--period-us", period_us, "Accumulation window length in microseconds")
        ->capture_default_str();
    cmd->add_option("--mode", mode, "Frame rendering: polarity or count")->capture_default_str();
  }

  [[nodiscard]] AccumulationOptions options() const {
    if (period_us == 0) throw UsageError("--period-us must be positive");
    try {
      return {period_us, parse_accumulation_mode(mode)};
    } catch (const ValidationError& e) {
      throw UsageError(std::string("--mode: ") + e.what());
    }
  }
};

// ── simulate ─────────────────────────────────────────────────────────────────

struct SimulateCommand {
  std::string scene_path;
  BiasSet biases = default_biases();
  std::uint64_t dt_us = 200;
  std::uint64_t seed = 0;
  bool no_noise = false;
  unsigned threads = 0;
  std::string out;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("simulate", "Simulate the pixel array on a scene");
    cmd->add_option("--scene", scene_path, "Scene JSON document (default: 64x64 desk scene)");
    cmd->add_option("--bias-fo", biases.bias_fo, "Buffer bandwidth register")->capture_default_str();
    cmd->add_option("--bias-hpf", biases.bias_hpf, "High-pass filter register")->capture_default_str();
    cmd->add_option("--bias-diff-on", biases.bias_diff_on, "ON threshold register")->capture_default_str();
    cmd->add_option("--bias-diff-off", biases.bias_diff_off, "OFF threshold register")->capture_default_str();
    cmd->add_option("--bias-refr", biases.bias_refr, "Refractory register")->capture_default_str();
    cmd->add_option("--dt-us", dt_us, "Simulation step in microseconds")->capture_default_str();
    cmd->add_option("--seed", seed, "Noise seed")->capture_default_str();
    cmd->add_flag("--no-noise", no_noise, "Disable background activity");
    cmd->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
    cmd->add_option("--out", out, "Output file; .csv writes CSV, anything else EVT0")->required();
    cmd->callback([this] { run(); });
  }

  void run() const {
    const auto violations = validate(biases);
    if (!violations.empty()) {
      throw UsageError(flag_for(violations.front().bias) + ": " + violations.front().message());
    }
    if (dt_us == 0) throw UsageError("--dt-us must be positive");
    const Scene scene = load_scene(scene_path);
    const EventStream stream = simulate(scene, biases, dt_us, seed,
                                        no_noise ? NoiseMode::Disabled : NoiseMode::Enabled,
                                        SimOptions{threads});
    save_events(out, stream);
    std::cout << "events: " << stream.size() << "\n";
  }
};

// ── accumulate ───────────────────────────────────────────────────────────────

struct AccumulateCommand {
  StreamInput input;
  AccumulationFlags accumulation;
  std::string out_dir;
  bool pgm = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("accumulate", "Cut an event stream into fixed-period frames");
    input.add_to(cmd, "Event file (.evt0 or .csv)");
    accumulation.add_to(cmd);
    cmd->add_option("--out-dir", out_dir,
                    "Directory for frames.csv (index, start, events, AG) and PGM frames");
    cmd->add_flag("--pgm", pgm, "Also write one frame_NNNNNN.pgm per window (needs --out-dir)");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const AccumulationOptions options = accumulation.options();
    if (pgm && out_dir.empty()) throw UsageError("--pgm needs --out-dir");
    const EventStream stream = input.load();
    std::string summary = "index,t_start_us,events,ag\n";
    if (!out_dir.empty()) {
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    }
    std::size_t frames = 0;
    for_each_frame(stream, options, [&](std::size_t k, const Frame& frame, std::size_t events) {
      ++frames;
      if (out_dir.empty()) return;
      summary += std::to_string(k) + "," + std::to_string(k * options.period_us) + "," +
                 std::to_string(events) + "," + format_fixed6(average_gradient(frame)) + "\n";
      if (pgm) write_file(fs::path(out_dir) / frame_file_name(k), write_pgm(frame));
    });
    if (!out_dir.empty()) {
      write_file(fs::path(out_dir) / "frames.csv",
                 {reinterpret_cast<const std::uint8_t*>(summary.data()), summary.size()});
    }
    std::cout << "frames: " << frames << "\n";
  }
};

// ── ag ───────────────────────────────────────────────────────────────────────

struct AgCommand {
  StreamInput input;
  AccumulationFlags accumulation;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("ag", "Mean average gradient of an event file or a PGM frame directory");
    input.add_to(cmd, "Event file, or a directory of .pgm frames");
    accumulation.add_to(cmd);
    cmd->callback([this] { run(); });
  }

  void run() const {
    if (fs::is_directory(input.path)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(input.path)) {
        if (entry.path().extension() == ".pgm") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw UsageError("--in " + input.path + ": no .pgm frames found");
      std::vector<Frame> frames;
      for (const auto& f : files) {
        try {
          frames.push_back(read_pgm(read_file(f)));
        } catch (const FormatError& e) {
          throw IoError(f.string() + ": " + e.what());
        }
      }
      double ag = 0.0;
      try {
        ag = mean_ag(frames);
      } catch (const ValidationError& e) {
        throw UsageError("--in " + input.path + ": " + e.what());
      }
      std::cout << "mean_ag: " << format_fixed6(ag) << "\nframes: " << frames.size() << "\n";
      return;
    }
    const AccumulationOptions options = accumulation.options();
    const StreamScore score = score_stream(input.load(), options);
    std::cout << "mean_ag: " << format_fixed6(score.mean_ag) << "\nframes: " << score.frames << "\n";
  }
};

// ── sweep ────────────────────────────────────────────────────────────────────

struct SweepCommand {
  std::string bias;
  std::string values = "paper";
  std::string scene_path;
  std::uint64_t dt_us = 200;
  AccumulationFlags accumulation;
  std::uint64_t seed = 0;
  bool no_noise = false;
  unsigned threads = 0;
  std::string out;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("sweep", "Sweep one bias with the others at factory defaults");
    cmd->add_option("--bias", bias, "Bias to sweep: bias_fo, bias_hpf, bias_diff_on, bias_diff_off, bias_refr")
        ->required();
    cmd->add_option("--values", values, "Comma-separated register values, or 'paper' for the tested grid")
        ->capture_default_str();
    cmd->add_option("--scene", scene_path, "Scene JSON document (default: 64x64 desk scene)");
    cmd->add_option("--dt-us", dt_us, "Simulation step in microseconds")->capture_default_str();
    accumulation.add_to(cmd);
    cmd->add_option("--seed", seed, "Noise seed shared by every value")->capture_default_str();
    cmd->add_flag("--no-noise", no_noise, "Disable background activity");
    cmd->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
    cmd->add_option("--out", out, "Output CSV (default: standard output)");
    cmd->callback([this] { run(); });
  }

  [[nodiscard]] std::vector<int> parse_values(BiasName name) const {
    if (values == "paper") {
      const auto grid = tested_values(name);
      return {grid.begin(), grid.end()};
    }
    std::vector<int> parsed;
    std::size_t start = 0;
    while (start <= values.size()) {
      const std::size_t comma = std::min(values.find(',', start), values.size());
      const std::string item = values.substr(start, comma - start);
      try {
        std::size_t used = 0;
        parsed.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("--values: '" + item + "' is not an integer");
      }
      start = comma + 1;
    }
    return parsed;
  }

  void run() const {
    SweepConfig config;
    try {
      config.bias = parse_bias_name(bias);
    } catch (const ValidationError& e) {
      throw UsageError(std::string("--bias: ") + e.what());
    }
    config.values = parse_values(config.bias);
    const BiasRange range = range_of(config.bias);
    for (int v : config.values) {
      if (!range.contains(v)) {
        throw UsageError("--values: " + std::string(to_string(config.bias)) + " = " +
                         std::to_string(v) + " is outside " + std::to_string(range.min) + "-" +
                         std::to_string(range.max));
      }
    }
    if (dt_us == 0) throw UsageError("--dt-us must be positive");
    config.accumulation = accumulation.options();
    config.scene = load_scene(scene_path);
    config.dt_us = dt_us;
    config.seed = seed;
    config.noise = no_noise ? NoiseMode::Disabled : NoiseMode::Enabled;
    config.sim.threads = threads;

    const SweepResult result = run_sweep(config);
    const std::string csv = write_sweep_csv(result);
    if (out.empty()) {
      std::cout << csv;
      return;
    }
    write_file(out, {reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()});
    std::cout << "rows: " << result.rows.size() << "\n";
    if (result.rows.size() >= 3) std::cout << "spearman: " << format_fixed6(trend(result)) << "\n";
    if (const auto best = best_row(result)) std::cout << "best_value: " << best->value << "\n";
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-camera bias toolkit: simulate, accumulate, score and sweep"};
  app.require_subcommand(1);

  SimulateCommand simulate_cmd;
  AccumulateCommand accumulate_cmd;
  AgCommand ag_cmd;
  SweepCommand sweep_cmd;
  simulate_cmd.add_to(app);
  accumulate_cmd.add_to(app);
  ag_cmd.add_to(app);
  sweep_cmd.add_to(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
