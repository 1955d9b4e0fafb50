#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace evbias {

enum class Polarity : std::int8_t { Off = -1, On = 1 };

constexpr int sign(Polarity p) noexcept { return static_cast<int>(p); }

struct SensorGeometry {
  std::uint16_t width = 64;
  std::uint16_t height = 64;

  [[nodiscard]] std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * height;
  }
  [[nodiscard]] bool contains(std::uint32_t x, std::uint32_t y) const noexcept {
    return x < width && y < height;
  }
  bool operator==(const SensorGeometry&) const = default;
};

/// Throws ValidationError unless width >= 2 and height >= 2.
void validate(SensorGeometry geometry);

struct Event {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::uint64_t t = 0;  // microseconds
  Polarity p = Polarity::On;

  bool operator==(const Event&) const = default;
};

/// Canonical stream order: (t, y, x, p) ascending, OFF before ON.
constexpr bool canonical_less(const Event& a, const Event& b) noexcept {
  if (a.t != b.t) return a.t < b.t;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return sign(a.p) < sign(b.p);
}

void sort_canonical(std::vector<Event>& events);

enum class OrderPolicy {
  Strict,   // out-of-order input is an error
  Lenient,  // out-of-order input is sorted
};

/// Immutable, canonically ordered sequence of events over one sensor.
class EventStream {
 public:
  EventStream() = default;
  explicit EventStream(SensorGeometry geometry);
  /// Validates geometry and coordinates. Ordering violations throw
  /// FormatError under OrderPolicy::Strict and are sorted away otherwise.
  EventStream(SensorGeometry geometry, std::vector<Event> events,
              OrderPolicy policy = OrderPolicy::Strict);

  [[nodiscard]] SensorGeometry geometry() const noexcept { return geometry_; }
  [[nodiscard]] std::span<const Event> events() const noexcept { return events_; }
  [[nodiscard]] std::size_t size() const noexcept { return events_.size(); }
  [[nodiscard]] bool empty() const noexcept { return events_.empty(); }

  bool operator==(const EventStream&) const = default;

 private:
  SensorGeometry geometry_{};
  std::vector<Event> events_;
};

}  // namespace evbias
