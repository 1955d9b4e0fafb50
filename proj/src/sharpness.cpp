#include "evbias/sharpness.hpp"

#include <cmath>
#include <string>

#include "evbias/error.hpp"

namespace evbias {
namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

double average_gradient(std::span<const double> values, std::size_t rows, std::size_t cols) {
  if (rows < 2 || cols < 2) {
    throw ValidationError("average gradient needs at least a 2x2 frame");
  }
  if (values.size() != rows * cols) {
    throw ValidationError("frame has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(rows * cols));
  }
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < rows; ++i) {
    const double* row = &values[i * cols];
    const double* below = row + cols;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      const double gx = row[j + 1] - row[j];
      const double gy = below[j] - row[j];
      total.add(std::sqrt(gx * gx + gy * gy));
    }
  }
  return total.value() / (static_cast<double>(rows - 1) * static_cast<double>(cols - 1));
}

double average_gradient(const Frame& frame) {
  return average_gradient(frame.values(), frame.rows(), frame.cols());
}

double mean_ag(std::span<const Frame> frames) {
  if (frames.empty()) throw ValidationError("mean AG of an empty frame sequence");
  CompensatedSum total;
  for (const Frame& f : frames) {
    if (f.geometry() != frames.front().geometry()) {
      throw ValidationError("mean AG over frames of different geometry");
    }
    total.add(average_gradient(f));
  }
  return total.value() / static_cast<double>(frames.size());
}

}  // namespace evbias
