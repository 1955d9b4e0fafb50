#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evbias/accumulate.hpp"
#include "evbias/biases.hpp"
#include "evbias/pixel_sim.hpp"
#include "evbias/scene.hpp"

namespace evbias {

struct StreamScore {
  double mean_ag = 0.0;
  std::size_t frames = 0;
};

/// Accumulates and scores one frame at a time. An empty stream scores 0
/// over 0 frames.
StreamScore score_stream(const EventStream& stream, const AccumulationOptions& options);

/// One test bias swept with the other four at factory defaults.
struct SweepConfig {
  BiasName bias = BiasName::Fo;
  std::vector<int> values;  // empty: tested_values(bias)
  Scene scene = desk_scene();
  std::uint64_t dt_us = 200;
  AccumulationOptions accumulation{};
  std::uint64_t seed = 0;  // shared by every value
  NoiseMode noise = NoiseMode::Enabled;
  SimOptions sim{};
};

struct SweepRow {
  BiasName bias = BiasName::Fo;
  int value = 0;
  double mean_ag = 0.0;
  std::size_t events = 0;
  std::size_t frames = 0;
  BiasSet biases{};  // the full register set this row was simulated with

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Called after each row with the stream that produced it.
using SweepObserver = std::function<void(const SweepRow&, const EventStream&)>;

/// Rows follow the order of config.values. Throws ValidationError when a
/// value is outside the bias range.
SweepResult run_sweep(const SweepConfig& config, const SweepObserver& observer = {});

/// Spearman rank correlation with average ranks on ties. Returns 0 when
/// either side has no rank variance. Throws ValidationError for fewer than
/// 3 points or mismatched lengths.
double spearman(std::span<const double> a, std::span<const double> b);

/// Spearman correlation between bias value and mean AG.
double trend(const SweepResult& result);

/// Row with the highest mean AG (first one on ties).
std::optional<SweepRow> best_row(const SweepResult& result);

/// "bias,value,mean_ag,events,frames" header; mean_ag fixed with 6 decimals.
std::string write_sweep_csv(const SweepResult& result);
/// Inverse of write_sweep_csv; biases are rebuilt as defaults plus the row value.
SweepResult read_sweep_csv(std::string_view text);

/// Locale-independent fixed-point formatting with 6 decimals.
std::string format_fixed6(double value);

}  // namespace evbias
