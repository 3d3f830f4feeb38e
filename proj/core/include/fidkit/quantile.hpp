#pragma once

#include <vector>

#include "fidkit/types.hpp"

namespace fidkit {

/// Order-statistic interpolation on an ascending-sorted sample:
/// h = (n - 1) p + 1, result = x_(floor(h)) + (h - floor(h)) (x_(floor(h)+1) - x_(floor(h))).
/// p = 0 and p = 1 return the extremes.
double interpolated_quantile(const std::vector<double>& sorted_values, double p);

}  // namespace fidkit
