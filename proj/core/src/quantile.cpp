#include "fidkit/quantile.hpp"

#include <cmath>

namespace fidkit {

double interpolated_quantile(const std::vector<double>& sorted_values, double p) {
    if (sorted_values.empty()) throw Error("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw Error("quantile: p must lie in [0, 1]");
    const std::size_t n = sorted_values.size();
    if (n == 1) return sorted_values[0];
    const double h = (static_cast<double>(n) - 1.0) * p + 1.0;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo >= n) return sorted_values[n - 1];  // p == 1
    const double frac = h - static_cast<double>(lo);
    const double a = sorted_values[lo - 1];
    const double b = sorted_values[lo];
    return a + frac * (b - a);
}

}  // namespace fidkit
