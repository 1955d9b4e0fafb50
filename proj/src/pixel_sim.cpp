#include "evbias/pixel_sim.hpp"

#include <algorithm>
#include <numbers>
#include <string>
#include <thread>

#include "evbias/error.hpp"

namespace evbias {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double lowpass_gain(double cutoff_hz, std::uint64_t dt_us) {
  return -std::expm1(-2.0 * std::numbers::pi * cutoff_hz * static_cast<double>(dt_us) / 1e6);
}

// Default-register cutoff, the reference point for the noise scaling.
const double kDefaultCutoff = source_follower_cutoff_hz(74);

}  // namespace

double source_follower_cutoff_hz(int bias_fo) {
  return 3.0 * std::pow(1000.0, bias_fo / 255.0);
}

double highpass_corner_hz(int bias_hpf) {
  return bias_hpf == 0 ? 0.0 : 0.05 * std::pow(4000.0, bias_hpf / 255.0);
}

double on_threshold(int bias_diff_on) {
  return 0.25 * std::exp(std::numbers::ln10 * (bias_diff_on - 115) / 140.0);
}

double off_threshold(int bias_diff_off) {
  return 0.25 * std::exp(-std::numbers::ln10 * (bias_diff_off - 52) / 52.0);
}

double refractory_us(int bias_refr) {
  return 20.0 * std::exp(bias_refr / 255.0 * std::log(100.0));
}

double background_rate_hz(int bias_fo, int bias_hpf) {
  const double hpf_attenuation = std::max(0.1, 1.0 - bias_hpf / 255.0);
  return 0.1 * (source_follower_cutoff_hz(bias_fo) / kDefaultCutoff) * hpf_attenuation;
}

SimParams bias_to_params(const BiasSet& biases, std::uint64_t dt_us) {
  require_valid(biases);
  SimParams p;
  p.f_c1_hz = 3000.0;
  p.f_c2_hz = source_follower_cutoff_hz(biases.bias_fo);
  p.f_h_hz = highpass_corner_hz(biases.bias_hpf);
  p.theta_on = on_threshold(biases.bias_diff_on);
  p.theta_off = off_threshold(biases.bias_diff_off);
  p.t_refr_us = refractory_us(biases.bias_refr);
  p.lambda_ba_hz = background_rate_hz(biases.bias_fo, biases.bias_hpf);
  p.dt_us = dt_us;
  p.eps = 1e-3;
  validate(p);
  return p;
}

void validate(const SimParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("invalid simulation parameter: ") + what);
  };
  require(std::isfinite(p.f_c1_hz) && p.f_c1_hz > 0, "f_c1 must be positive");
  require(std::isfinite(p.f_c2_hz) && p.f_c2_hz > 0, "f_c2 must be positive");
  require(std::isfinite(p.f_h_hz) && p.f_h_hz >= 0, "f_h must be non-negative");
  require(std::isfinite(p.theta_on) && p.theta_on > 0, "theta_on must be positive");
  require(std::isfinite(p.theta_off) && p.theta_off > 0, "theta_off must be positive");
  require(std::isfinite(p.t_refr_us) && p.t_refr_us >= 0, "t_refr must be non-negative");
  require(std::isfinite(p.lambda_ba_hz) && p.lambda_ba_hz >= 0, "lambda_ba must be non-negative");
  require(p.dt_us > 0, "dt must be positive");
  require(std::isfinite(p.eps) && p.eps > 0, "eps must be positive");
}

PixelRng pixel_rng(std::uint64_t seed, std::uint64_t pixel_index) {
  return PixelRng(splitmix64(seed ^ splitmix64(pixel_index)));
}

double uniform01(PixelRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

PixelModel::PixelModel(const SimParams& params) : params_(params) {
  validate(params_);
  highpass_ = params_.f_h_hz > 0.0;
  a1_ = lowpass_gain(params_.f_c1_hz, params_.dt_us);
  a2_ = lowpass_gain(params_.f_c2_hz, params_.dt_us);
  ah_ = highpass_ ? lowpass_gain(params_.f_h_hz, params_.dt_us) : 0.0;
  p_noise_ = -std::expm1(-params_.lambda_ba_hz * static_cast<double>(params_.dt_us) / 1e6);
}

PixelState PixelModel::initial_state(double luminance) const noexcept {
  const double v = std::log(luminance + params_.eps);
  PixelState s;
  s.v_lp1 = v;
  s.v_lp2 = v;
  // With the high-pass active the baseline starts settled on the scene, so
  // the comparator input (v_lp2 - v_base) and its reference both start at 0.
  s.v_base = highpass_ ? v : 0.0;
  s.v_mem = highpass_ ? 0.0 : v;
  return s;
}

PixelStep step_pixel(const PixelState& state, const SimParams& params, double luminance,
                     std::uint64_t t, PixelRng& rng) {
  if (!std::isfinite(luminance) || luminance < 0.0 || luminance > 1.0) {
    throw ValidationError("pixel luminance must be finite and within [0, 1]");
  }
  const PixelModel model(params);
  PixelStep out{state, {}};
  model.step(out.state, luminance, t, rng, [&](Polarity p) { out.events.push_back(p); });
  return out;
}

EventStream simulate(const Scene& scene, const SimParams& params, std::uint64_t seed,
                     const SimOptions& options) {
  const PixelModel model(params);
  const SensorGeometry g = scene.geometry();
  const std::uint64_t dt = params.dt_us;
  const std::uint64_t steps = scene.duration_us() / dt + 1;

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, g.height);

  std::vector<double> shift(steps), wrapped(steps);
  for (std::uint64_t k = 0; k < steps; ++k) {
    shift[k] = scene.displacement(k * dt);
    wrapped[k] = scene.wrap_offset(shift[k]);
  }

  // Rows are split into contiguous bands, and each pixel runs through the
  // whole recording before the next starts. Pixels own their RNG substream,
  // so neither the split nor the loop order changes the output.
  std::vector<std::vector<Event>> band_events(threads);
  auto run_band = [&](unsigned band) {
    const std::uint32_t y0 = g.height * band / threads;
    const std::uint32_t y1 = g.height * (band + 1) / threads;
    auto& out = band_events[band];
    for (std::uint32_t y = y0; y < y1; ++y) {
      for (std::uint32_t x = 0; x < g.width; ++x) {
        PixelRng rng = pixel_rng(seed, static_cast<std::uint64_t>(y) * g.width + x);
        PixelState state = model.initial_state(scene.sample_shifted(x, y, shift[0], wrapped[0]));
        const auto ex = static_cast<std::uint16_t>(x);
        const auto ey = static_cast<std::uint16_t>(y);
        for (std::uint64_t k = 0; k < steps; ++k) {
          const std::uint64_t t = k * dt;
          model.step(state, scene.sample_shifted(x, y, shift[k], wrapped[k]), t, rng,
                     [&](Polarity p) { out.push_back(Event{ex, ey, t, p}); });
        }
      }
    }
  };

  if (threads == 1) {
    run_band(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned b = 0; b < threads; ++b) pool.emplace_back(run_band, b);
  }

  std::size_t total = 0;
  for (const auto& b : band_events) total += b.size();
  std::vector<Event> events;
  events.reserve(total);
  for (auto& b : band_events) {
    events.insert(events.end(), b.begin(), b.end());
    std::vector<Event>().swap(b);
  }
  sort_canonical(events);
  return EventStream(g, std::move(events), OrderPolicy::Strict);
}

EventStream simulate(const Scene& scene, const BiasSet& biases, std::uint64_t dt_us,
                     std::uint64_t seed, NoiseMode noise, const SimOptions& options) {
  SimParams params = bias_to_params(biases, dt_us);
  if (noise == NoiseMode::Disabled) params.lambda_ba_hz = 0.0;
  return simulate(scene, params, seed, options);
}

}  // namespace evbias
