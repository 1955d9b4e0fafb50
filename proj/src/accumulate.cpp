#include "evbias/accumulate.hpp"

#include <algorithm>
#include <cstdio>

#include "evbias/error.hpp"

namespace evbias {

std::string_view to_string(AccumulationMode mode) {
  return mode == AccumulationMode::Polarity ? "polarity" : "count";
}

AccumulationMode parse_accumulation_mode(std::string_view text) {
  if (text == "polarity") return AccumulationMode::Polarity;
  if (text == "count") return AccumulationMode::Count;
  throw ValidationError("unknown accumulation mode '" + std::string(text) +
                        "'; expected polarity or count");
}

std::size_t frame_count(const EventStream& stream, std::uint64_t period_us) {
  if (period_us == 0) throw ValidationError("accumulation period must be positive");
  if (stream.empty()) return 0;
  const std::uint64_t t_max = stream.events().back().t;
  return static_cast<std::size_t>(t_max / period_us + 1);  // == ceil((t_max + 1) / period)
}

void for_each_frame(const EventStream& stream, const AccumulationOptions& options,
                    const std::function<void(std::size_t, const Frame&, std::size_t)>& visit) {
  if (options.count_clip < 1) throw ValidationError("count clip must be at least 1");
  const std::size_t frames = frame_count(stream, options.period_us);
  const SensorGeometry g = stream.geometry();
  const auto events = stream.events();
  const bool polarity = options.mode == AccumulationMode::Polarity;

  std::vector<int> acc(g.pixel_count());
  std::vector<double> values(g.pixel_count());
  std::size_t next = 0;
  for (std::size_t k = 0; k < frames; ++k) {
    const std::uint64_t end = (k + 1) * options.period_us;
    std::fill(acc.begin(), acc.end(), 0);
    const std::size_t first = next;
    for (; next < events.size() && events[next].t < end; ++next) {
      const Event& e = events[next];
      acc[static_cast<std::size_t>(e.y) * g.width + e.x] += polarity ? sign(e.p) : 1;
    }
    const double clip = options.count_clip;
    for (std::size_t i = 0; i < acc.size(); ++i) {
      values[i] = polarity ? (std::clamp(acc[i], -1, 1) + 1) / 2.0
                           : std::min<double>(acc[i], clip) / clip;
    }
    visit(k, Frame(g, values), next - first);
  }
}

std::vector<Frame> accumulate(const EventStream& stream, const AccumulationOptions& options) {
  std::vector<Frame> frames;
  frames.reserve(frame_count(stream, options.period_us));
  for_each_frame(stream, options,
                 [&](std::size_t, const Frame& f, std::size_t) { frames.push_back(f); });
  return frames;
}

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.pgm", index);
  return buf;
}

}  // namespace evbias
