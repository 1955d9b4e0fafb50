#include "evbias/event.hpp"

#include <algorithm>
#include <string>

#include "evbias/error.hpp"

namespace evbias {

void validate(SensorGeometry geometry) {
  if (geometry.width < 2 || geometry.height < 2) {
    throw ValidationError("sensor geometry must be at least 2x2, got " +
                          std::to_string(geometry.width) + "x" +
                          std::to_string(geometry.height));
  }
}

void sort_canonical(std::vector<Event>& events) {
  std::sort(events.begin(), events.end(), canonical_less);
}

EventStream::EventStream(SensorGeometry geometry) : geometry_(geometry) { validate(geometry); }

EventStream::EventStream(SensorGeometry geometry, std::vector<Event> events, OrderPolicy policy)
    : geometry_(geometry), events_(std::move(events)) {
  validate(geometry_);
  bool ordered = true;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (!geometry_.contains(e.x, e.y)) {
      throw FormatError("event " + std::to_string(i) + " at (" + std::to_string(e.x) + ", " +
                        std::to_string(e.y) + ") lies outside " +
                        std::to_string(geometry_.width) + "x" +
                        std::to_string(geometry_.height));
    }
    if (e.p != Polarity::On && e.p != Polarity::Off) {
      throw FormatError("event " + std::to_string(i) + " has invalid polarity");
    }
    if (ordered && i > 0 && canonical_less(e, events_[i - 1])) {
      if (policy == OrderPolicy::Strict) {
        throw FormatError("event " + std::to_string(i) + " (t=" + std::to_string(e.t) +
                          ") breaks canonical (t, y, x, p) order");
      }
      ordered = false;
    }
  }
  if (!ordered) sort_canonical(events_);
}

}  // namespace evbias
