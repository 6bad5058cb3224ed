#pragma once

#include <span>

namespace hkb {

// g_t(x,y) = (4 pi t)^{-d/2} exp(-|x-y|^2 / (4t))
double gauss_kernel(int d, double t, std::span<const double> x, std::span<const double> y);
double log_gauss_kernel(int d, double t, std::span<const double> x, std::span<const double> y);
double log_gauss_kernel_sq(int d, double t, double dist_sq);
double gauss_diagonal(int d, double t);  // g_t(0,0)

}  // namespace hkb
