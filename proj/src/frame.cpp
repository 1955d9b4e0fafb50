#include "evbias/frame.hpp"

#include <string>

#include "evbias/error.hpp"

namespace evbias {
namespace {

void check_unit_interval(double v, std::size_t index) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError("frame value " + std::to_string(v) + " at index " +
                          std::to_string(index) + " is outside [0, 1]");
  }
}

}  // namespace

Frame::Frame(SensorGeometry geometry, double fill)
    : geometry_(geometry), values_(geometry.pixel_count(), fill) {
  validate(geometry_);
  check_unit_interval(fill, 0);
}

Frame::Frame(SensorGeometry geometry, std::vector<double> values)
    : geometry_(geometry), values_(std::move(values)) {
  validate(geometry_);
  if (values_.size() != geometry_.pixel_count()) {
    throw ValidationError("frame has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(geometry_.pixel_count()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) check_unit_interval(values_[i], i);
}

}  // namespace evbias
