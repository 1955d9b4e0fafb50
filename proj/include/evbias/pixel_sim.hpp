#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "evbias/biases.hpp"
#include "evbias/event.hpp"
#include "evbias/scene.hpp"

namespace evbias {

/// Behavioral pixel parameters derived from a BiasSet.
struct SimParams {
  double f_c1_hz = 3000.0;  // photoreceptor stage, fixed
  double f_c2_hz = 0.0;     // source-follower stage (bias_fo)
  double f_h_hz = 0.0;      // high-pass corner (bias_hpf); 0 bypasses the filter
  double theta_on = 0.25;   // log-intensity units (bias_diff_on)
  double theta_off = 0.25;  // log-intensity units (bias_diff_off)
  double t_refr_us = 0.0;   // deadtime (bias_refr)
  double lambda_ba_hz = 0.0;  // background activity per pixel
  std::uint64_t dt_us = 200;
  double eps = 1e-3;  // luminance floor inside the log
};

/// Throws ValidationError when any invariant of SimParams is broken.
void validate(const SimParams& params);

// Register -> parameter maps. Each is exponential in the register value and
// anchored so the factory defaults give 25% contrast thresholds.
double source_follower_cutoff_hz(int bias_fo);  // 3 * 1000^(b/255)
double highpass_corner_hz(int bias_hpf);        // 0 at b = 0, else 0.05 * 4000^(b/255)
double on_threshold(int bias_diff_on);          // 0.25 * 10^((b - 115) / 140)
double off_threshold(int bias_diff_off);        // 0.25 * 10^(-(b - 52) / 52)
double refractory_us(int bias_refr);            // 20 * 100^(b/255)
double background_rate_hz(int bias_fo, int bias_hpf);

/// Requires validate(biases) to be empty; throws ValidationError otherwise.
SimParams bias_to_params(const BiasSet& biases, std::uint64_t dt_us = 200);

struct PixelState {
  double v_lp1 = 0.0;
  double v_lp2 = 0.0;
  double v_base = 0.0;
  double v_mem = 0.0;
  std::optional<std::uint64_t> t_last;  // empty: never fired
};

// Per-pixel random substream. The engine is std::mt19937_64 seeded with
//   splitmix64(seed ^ splitmix64(pixel_index))
// where pixel_index = y * width + x and splitmix64 is the standard finalizer
// (increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and
// 0x94D049BB133111EB). Uniform doubles use the top 53 bits of one draw.
using PixelRng = std::mt19937_64;
PixelRng pixel_rng(std::uint64_t seed, std::uint64_t pixel_index);
double uniform01(PixelRng& rng);

/// Discrete-time pixel: log transduction, two cascaded low-pass stages,
/// optional high-pass, ON/OFF delta modulator with increment reset and
/// deadtime, and Poisson background activity.
class PixelModel {
 public:
  explicit PixelModel(const SimParams& params);

  [[nodiscard]] const SimParams& params() const noexcept { return params_; }

  /// State settled on a constant luminance.
  [[nodiscard]] PixelState initial_state(double luminance) const noexcept;

  /// Comparator input for the current state.
  [[nodiscard]] double change_signal(const PixelState& s) const noexcept {
    return highpass_ ? s.v_lp2 - s.v_base : s.v_lp2;
  }

  /// Advances one step at time t and calls emit(Polarity) for every event.
  template <typename Emit>
  void step(PixelState& s, double luminance, std::uint64_t t, PixelRng& rng, Emit&& emit) const {
    const double v_p = std::log(luminance + params_.eps);
    s.v_lp1 += a1_ * (v_p - s.v_lp1);
    s.v_lp2 += a2_ * (s.v_lp1 - s.v_lp2);
    if (highpass_) s.v_base += ah_ * (s.v_lp2 - s.v_base);
    const double v_cd = change_signal(s);

    while (v_cd - s.v_mem >= params_.theta_on && ready(s, t)) {
      emit(Polarity::On);
      s.v_mem += params_.theta_on;
      s.t_last = t;
    }
    while (s.v_mem - v_cd >= params_.theta_off && ready(s, t)) {
      emit(Polarity::Off);
      s.v_mem -= params_.theta_off;
      s.t_last = t;
    }
    if (p_noise_ > 0.0 && uniform01(rng) < p_noise_ && ready(s, t)) {
      emit((rng() & 1U) ? Polarity::On : Polarity::Off);
      s.t_last = t;
    }
  }

 private:
  [[nodiscard]] bool ready(const PixelState& s, std::uint64_t t) const noexcept {
    return !s.t_last || static_cast<double>(t - *s.t_last) >= params_.t_refr_us;
  }

  SimParams params_;
  bool highpass_ = false;
  double a1_ = 0.0;
  double a2_ = 0.0;
  double ah_ = 0.0;
  double p_noise_ = 0.0;
};

struct PixelStep {
  PixelState state;
  std::vector<Polarity> events;  // all stamped at the step time
};

/// One step of a single pixel. Throws ValidationError for luminance that is
/// not finite or lies outside [0, 1].
PixelStep step_pixel(const PixelState& state, const SimParams& params, double luminance,
                     std::uint64_t t, PixelRng& rng);

enum class NoiseMode { Enabled, Disabled };

struct SimOptions {
  unsigned threads = 0;  // 0 picks std::thread::hardware_concurrency()
};

/// Simulates every pixel at t = 0, dt, 2dt, ... <= duration. Output is
/// identical for any thread count.
EventStream simulate(const Scene& scene, const SimParams& params, std::uint64_t seed,
                     const SimOptions& options = {});

EventStream simulate(const Scene& scene, const BiasSet& biases, std::uint64_t dt_us,
                     std::uint64_t seed, NoiseMode noise = NoiseMode::Enabled,
                     const SimOptions& options = {});

}  // namespace evbias
