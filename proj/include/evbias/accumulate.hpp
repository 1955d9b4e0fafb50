#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "evbias/event.hpp"
#include "evbias/frame.hpp"

namespace evbias {

inline constexpr std::uint64_t kDefaultPeriodUs = 33'333;

enum class AccumulationMode {
  Polarity,  // (clamp(sum p, -1, 1) + 1) / 2; idle pixels 0.5
  Count,     // min(count, clip) / clip; idle pixels 0
};

std::string_view to_string(AccumulationMode mode);
AccumulationMode parse_accumulation_mode(std::string_view text);

struct AccumulationOptions {
  std::uint64_t period_us = kDefaultPeriodUs;
  AccumulationMode mode = AccumulationMode::Polarity;
  int count_clip = 5;
};

/// ceil((t_max + 1) / period) for a non-empty stream, 0 otherwise.
std::size_t frame_count(const EventStream& stream, std::uint64_t period_us);

/// Frame k covers [k * period, (k + 1) * period). Calls
/// visit(index, frame, events_in_window) in index order, one frame at a time.
void for_each_frame(const EventStream& stream, const AccumulationOptions& options,
                    const std::function<void(std::size_t, const Frame&, std::size_t)>& visit);

/// Throws ValidationError when the period is zero or count_clip < 1.
std::vector<Frame> accumulate(const EventStream& stream, const AccumulationOptions& options = {});

inline std::vector<Frame> accumulate(const EventStream& stream, std::uint64_t period_us,
                                     AccumulationMode mode) {
  return accumulate(stream, AccumulationOptions{period_us, mode});
}

/// "frame_000042.pgm"
std::string frame_file_name(std::size_t index);

}  // namespace evbias
