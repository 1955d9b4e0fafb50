#pragma once

#include <cstddef>
#include <span>

#include "evbias/frame.hpp"

namespace evbias {

/// Mean forward-difference gradient magnitude over the (rows-1) x (cols-1)
/// interior grid:
///
///   AG = 1/((m-1)(n-1)) * sum_{i<m-1, j<n-1} sqrt(Gx^2 + Gy^2)
///   Gx = I(i, j+1) - I(i, j),  Gy = I(i+1, j) - I(i, j)
///
/// `values` is row-major. Throws ValidationError when rows or cols < 2 or
/// the span size does not match.
double average_gradient(std::span<const double> values, std::size_t rows, std::size_t cols);
double average_gradient(const Frame& frame);

/// Arithmetic mean of average_gradient. Throws ValidationError for an empty
/// sequence or mixed geometries.
double mean_ag(std::span<const Frame> frames);

}  // namespace evbias
