// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every simulated run is checked for refractory spacing.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evbias/accumulate.hpp"
#include "evbias/biases.hpp"
#include "evbias/event_io.hpp"
#include "evbias/pixel_sim.hpp"
#include "evbias/scene.hpp"
#include "evbias/sharpness.hpp"
#include "evbias/sweep.hpp"
#include "oracles.hpp"

using namespace evbias;

namespace {

// Tolerances.
constexpr double kOracleRelTol = 1e-9;
constexpr double kExactTol = 1e-12;
constexpr double kRhoMin = 0.8;
constexpr double kFoPlateauRatio = 1.10;
constexpr double kHpfFloorRatio = 0.05;
constexpr double kSweepSecondsMax = 60.0;
constexpr int kRoundTrips = 1000;
constexpr int kRandomFrames = 100;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s [%2d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// ── refractory bookkeeping shared by all simulated runs ─────────────────────

struct RefractoryLedger {
  std::size_t runs = 0;
  std::size_t events = 0;
  std::size_t violations = 0;

  void check(const EventStream& stream, double t_refr_us) {
    ++runs;
    events += stream.size();
    std::vector<std::int64_t> last(stream.geometry().pixel_count(), -1);
    for (const Event& e : stream.events()) {
      auto& l = last[std::size_t{e.y} * stream.geometry().width + e.x];
      if (l >= 0 && static_cast<double>(e.t - static_cast<std::uint64_t>(l)) < t_refr_us) ++violations;
      l = static_cast<std::int64_t>(e.t);
    }
  }
};

RefractoryLedger refractory;

// ── desk-scale sweeps ───────────────────────────────────────────────────────

SweepConfig desk_config(BiasName bias, NoiseMode noise = NoiseMode::Enabled) {
  SweepConfig c;
  c.bias = bias;
  c.scene = desk_scene();
  c.dt_us = 200;
  c.accumulation = {kDefaultPeriodUs, AccumulationMode::Polarity};
  c.seed = 0;
  c.noise = noise;
  return c;
}

struct TimedSweep {
  SweepResult result;
  double seconds;
};

TimedSweep timed_sweep(const SweepConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  SweepResult result = run_sweep(config, [&](const SweepRow& row, const EventStream& stream) {
    refractory.check(stream, bias_to_params(row.biases, config.dt_us).t_refr_us);
  });
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(result), seconds};
}

double ag_at(const SweepResult& r, int value) {
  for (const auto& row : r.rows)
    if (row.value == value) return row.mean_ag;
  return std::nan("");
}

std::string timing(const TimedSweep& s) {
  return "sweep " + num(s.seconds, 3) + " s (limit " + num(kSweepSecondsMax) + " s)";
}

std::string curve(const SweepResult& r) {
  std::string out;
  for (const auto& row : r.rows) {
    out += (out.empty() ? "" : " ") + std::to_string(row.value) + ":" + format_fixed6(row.mean_ag);
  }
  return out;
}

bool defaults_elsewhere(const SweepResult& r) {
  const BiasSet d = default_biases();
  for (const auto& row : r.rows) {
    for (BiasName b : kAllBiases) {
      if (b != row.bias && row.biases.get(b) != d.get(b)) return false;
    }
    if (row.biases.get(row.bias) != row.value) return false;
  }
  return true;
}

// ── criteria ────────────────────────────────────────────────────────────────

Frame make_frame(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return Frame({static_cast<std::uint16_t>(rows[0].size()), static_cast<std::uint16_t>(rows.size())},
               flat);
}

std::vector<std::vector<double>> random_grid(std::mt19937_64& rng, double hi) {
  std::uniform_int_distribution<int> dim(2, 64);
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<std::vector<double>> g(dim(rng), std::vector<double>(dim(rng)));
  for (auto& row : g)
    for (auto& v : row) v = u(rng);
  return g;
}

void metric_oracle() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < kRandomFrames; ++i) {
    const auto grid = random_grid(rng, 1.0);
    const double expected = oracle::average_gradient(grid);
    worst = std::max(worst, std::abs(average_gradient(make_frame(grid)) - expected) / expected);
  }
  const double two = average_gradient(make_frame({{0, 1}, {0, 1}}));
  const double checker = average_gradient(make_frame({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
  const bool ok = worst <= kOracleRelTol && std::abs(two - 1.0) <= kExactTol &&
                  std::abs(checker - std::sqrt(2.0)) <= kExactTol;
  report(1, "metric oracle", ok,
         "worst relative error " + num(worst) + " over " + std::to_string(kRandomFrames) +
             " frames; 2x2 = " + num(two, 17) + ", checkerboard = " + num(checker, 17));
}

void metric_properties() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_shift = 0.0, worst_scale = 0.0;
  for (int i = 0; i < kRandomFrames; ++i) {
    const auto grid = random_grid(rng, 0.5);
    const double base = average_gradient(make_frame(grid));
    const double c = 2.0 * u(rng);
    const double shift = 0.5 * u(rng);
    auto scaled = grid, shifted = grid;
    for (auto& row : scaled)
      for (auto& v : row) v *= c;
    for (auto& row : shifted)
      for (auto& v : row) v += shift;
    worst_scale = std::max(worst_scale, std::abs(average_gradient(make_frame(scaled)) - c * base));
    worst_shift = std::max(worst_shift, std::abs(average_gradient(make_frame(shifted)) - base));
  }
  bool uniform_zero = true;
  for (double v : {0.0, 0.2, 0.5, 1.0}) uniform_zero = uniform_zero && average_gradient(Frame({23, 11}, v)) == 0.0;
  const bool ok = worst_shift <= kExactTol && worst_scale <= kExactTol && uniform_zero;
  report(2, "metric shift/scale invariance", ok,
         "worst shift error " + num(worst_shift) + ", worst scale error " + num(worst_scale) +
             ", uniform frames zero: " + (uniform_zero ? "yes" : "no"));
}

void trend_criterion(int id, const std::string& name, const TimedSweep& s, double rho, bool extra_ok,
                     const std::string& extra) {
  const bool in_time = s.seconds < kSweepSecondsMax;
  report(id, name, extra_ok && in_time,
         extra + "; " + timing(s) + "; curve " + curve(s.result) + "; rho = " + num(rho, 4));
}

void reconstruction_and_silence(std::string& detail, bool& ok) {
  // Noise-free, wide-band: slow texture at bias_fo 135.
  SceneSpec spec;
  spec.geometry = {32, 32};
  spec.speed_px_s = 2;
  spec.duration_us = 5'000'000;
  const Scene scene(spec);
  const BiasSet biases = default_biases().with(BiasName::Fo, 135);
  const SimParams params = bias_to_params(biases);
  const EventStream s = simulate(scene, biases, 200, 0, NoiseMode::Disabled);
  refractory.check(s, params.t_refr_us);
  std::vector<int> net(spec.geometry.pixel_count(), 0);
  for (const Event& e : s.events()) net[std::size_t{e.y} * spec.geometry.width + e.x] += sign(e.p);
  const std::uint64_t t_end = spec.duration_us / params.dt_us * params.dt_us;
  double worst = 0.0;
  for (std::uint32_t y = 0; y < spec.geometry.height; ++y) {
    for (std::uint32_t x = 0; x < spec.geometry.width; ++x) {
      const double change = std::log(scene.luminance(x, y, t_end) + params.eps) -
                            std::log(scene.luminance(x, y, 0) + params.eps);
      worst = std::max(worst, std::abs(params.theta_on * net[y * spec.geometry.width + x] - change));
    }
  }
  const bool recon_ok = worst <= params.theta_on && s.size() > 0;

  SceneSpec flat = desk_scene().spec();
  flat.contrast = 0.0;
  std::size_t silent_events = 0;
  for (SceneKind kind : {SceneKind::Texture, SceneKind::Grating, SceneKind::Bar}) {
    flat.kind = kind;
    const EventStream z = simulate(Scene::oscillating(flat, 1'000'000), default_biases(), 200, 0,
                                   NoiseMode::Disabled);
    refractory.check(z, bias_to_params(default_biases()).t_refr_us);
    silent_events += z.size();
  }
  ok = recon_ok && silent_events == 0;
  detail = "reconstruction worst " + num(worst) + " <= theta " + num(params.theta_on) + " over " +
           std::to_string(s.size()) + " events; zero-contrast events " + std::to_string(silent_events);
}

void calibration() {
  const SimParams p = bias_to_params(default_biases());
  report(9, "calibration anchors", p.theta_on == 0.25 && p.theta_off == 0.25,
         "theta_on = " + num(p.theta_on, 17) + ", theta_off = " + num(p.theta_off, 17));
}

struct Outcome {
  bool ok;
  std::string detail;
};

Outcome io_checks() {
  std::mt19937_64 rng(31337);
  int evt0_bad = 0, csv_bad = 0;
  for (int i = 0; i < kRoundTrips; ++i) {
    const EventStream s = oracle::random_stream(rng, 200);
    if (decode_evt0(encode_evt0(s)) != s) ++evt0_bad;
    if (read_csv(write_csv(s), s.geometry()) != s) ++csv_bad;
  }

  const Scene desk = desk_scene();
  auto run = [&](unsigned threads) {
    const EventStream s = simulate(desk, default_biases(), 200, 0, NoiseMode::Enabled, SimOptions{threads});
    refractory.check(s, bias_to_params(default_biases()).t_refr_us);
    return encode_evt0(s);
  };
  const auto a = run(1);
  const auto b = run(1);
  const auto c = run(4);
  const bool stable = a == b && a == c;

  const EventStream one({64, 64}, {{3, 5, 1000, Polarity::On}});
  const std::vector<std::uint8_t> hand{'E', 'V', 'T', '0', 64,   0,    64,   0,    0,
                                       0,   0,   0,   0xE8, 0x03, 0,    0,    0,    0,
                                       0,   0,   0x03, 0x00, 0x05, 0x00, 0x01, 0x00};
  const bool hand_ok = hand.size() == 26 && encode_evt0(one) == hand && decode_evt0(hand) == one;

  return {evt0_bad == 0 && csv_bad == 0 && stable && hand_ok,
          std::to_string(kRoundTrips) + " streams, EVT0 mismatches " + std::to_string(evt0_bad) +
             ", CSV mismatches " + std::to_string(csv_bad) + "; desk EVT0 " +
             std::to_string(a.size()) + " bytes identical over runs and 1/4 threads: " +
             (stable ? "yes" : "no") + "; 26-byte file: " + (hand_ok ? "match" : "mismatch")};
}

}  // namespace

int main() {
  metric_oracle();
  metric_properties();

  const TimedSweep fo = timed_sweep(desk_config(BiasName::Fo));
  {
    const double rho = trend(fo.result);
    const double ratio = ag_at(fo.result, 135) / ag_at(fo.result, 105);
    trend_criterion(3, "bias_fo rises to a plateau", fo, rho, rho >= kRhoMin && ratio <= kFoPlateauRatio,
                    "ag(135)/ag(105) = " + num(ratio, 4) + " (max " + num(kFoPlateauRatio) + ")");
  }

  const TimedSweep hpf = timed_sweep(desk_config(BiasName::Hpf));
  {
    const double ratio = ag_at(hpf.result, 255) / ag_at(hpf.result, 0);
    trend_criterion(4, "bias_hpf drives AG toward zero", hpf, trend(hpf.result),
                    ratio <= kHpfFloorRatio,
                    "ag(255)/ag(0) = " + num(ratio, 4) + " (max " + num(kHpfFloorRatio) + ")");
  }

  const TimedSweep on = timed_sweep(desk_config(BiasName::DiffOn));
  {
    const double rho = trend(on.result);
    trend_criterion(5, "bias_diff_on lowers AG", on, rho, rho <= -kRhoMin,
                    "required rho <= " + num(-kRhoMin));
  }

  const TimedSweep off = timed_sweep(desk_config(BiasName::DiffOff));
  {
    const double rho = trend(off.result);
    trend_criterion(6, "bias_diff_off raises AG", off, rho, rho >= kRhoMin,
                    "required rho >= " + num(kRhoMin));
  }

  const TimedSweep refr = timed_sweep(desk_config(BiasName::Refr, NoiseMode::Disabled));
  {
    bool non_increasing = true;
    std::string counts;
    for (std::size_t i = 0; i < refr.result.rows.size(); ++i) {
      if (i > 0 && refr.result.rows[i].events > refr.result.rows[i - 1].events) non_increasing = false;
      counts += (counts.empty() ? "" : " ") + std::to_string(refr.result.rows[i].events);
    }
    report(7, "bias_refr event count non-increasing", non_increasing && refr.seconds < kSweepSecondsMax,
           "counts " + counts + "; " + timing(refr));
  }

  {
    std::string detail;
    bool ok = false;
    reconstruction_and_silence(detail, ok);
    const Outcome io = io_checks();
    report(8, "simulator invariants", ok && refractory.violations == 0,
           std::to_string(refractory.violations) + " refractory violations over " +
               std::to_string(refractory.runs) + " runs / " + std::to_string(refractory.events) +
               " events; " + detail);
    calibration();
    report(10, "I/O round trips and stable bytes", io.ok, io.detail);
  }

  {
    const TimedSweep again = timed_sweep(desk_config(BiasName::Fo));
    const bool same = write_sweep_csv(fo.result) == write_sweep_csv(again.result);
    bool defaults = true;
    for (const auto* s : {&fo, &hpf, &on, &off, &refr, &again}) defaults = defaults && defaults_elsewhere(s->result);
    report(11, "sweep reproducibility", same && defaults,
           std::string("repeat bias_fo CSV identical: ") + (same ? "yes" : "no") +
               "; non-swept biases at defaults in every row: " + (defaults ? "yes" : "no"));
  }

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
