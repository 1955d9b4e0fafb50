#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evbias/event.hpp"

namespace evbias {

/// Row-major grid of intensities in [0, 1]; rows = height, cols = width.
class Frame {
 public:
  /// Filled with `fill`. Throws ValidationError for fill outside [0, 1].
  explicit Frame(SensorGeometry geometry, double fill = 0.0);
  /// Throws ValidationError on size mismatch or any value outside [0, 1].
  Frame(SensorGeometry geometry, std::vector<double> values);

  [[nodiscard]] SensorGeometry geometry() const noexcept { return geometry_; }
  [[nodiscard]] std::size_t rows() const noexcept { return geometry_.height; }
  [[nodiscard]] std::size_t cols() const noexcept { return geometry_.width; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] double at(std::size_t row, std::size_t col) const {
    return values_[row * cols() + col];
  }

  bool operator==(const Frame&) const = default;

 private:
  SensorGeometry geometry_;
  std::vector<double> values_;
};

}  // namespace evbias
