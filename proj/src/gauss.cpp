#include "hkb/gauss.hpp"

#include <cmath>
#include <numbers>

#include "hkb/common.hpp"

namespace hkb {

double log_gauss_kernel_sq(int d, double t, double dist_sq) {
    if (!(t > 0.0)) throw UsageError("gauss_kernel: t must be positive");
    return -0.5 * d * std::log(4.0 * std::numbers::pi * t) - dist_sq / (4.0 * t);
}

double log_gauss_kernel(int d, double t, std::span<const double> x, std::span<const double> y) {
    if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
        throw UsageError("gauss_kernel: dimension mismatch");
    return log_gauss_kernel_sq(d, t, distance_sq(x, y));
}

double gauss_kernel(int d, double t, std::span<const double> x, std::span<const double> y) {
    return std::exp(log_gauss_kernel(d, t, x, y));
}

double gauss_diagonal(int d, double t) { return std::exp(log_gauss_kernel_sq(d, t, 0.0)); }

}  // namespace hkb
