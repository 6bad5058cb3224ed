#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hkb {

// Generator is the full Laplacian, so a coordinate of the process has
// Var[X_t - X_s] = kIncrementVariance * (t - s).
inline constexpr double kIncrementVariance = 2.0;

// two-sided 99% normal quantile
inline constexpr double kZ99 = 2.5758293035489004;

using Point = std::vector<double>;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotImplemented : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

double norm(std::span<const double> x);
double distance_sq(std::span<const double> x, std::span<const double> y);

// splitmix64 finalizer, used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

std::string format_double(double v);  // %.17g, with inf/nan spelled out

std::string utc_timestamp();  // ISO 8601, seconds

}  // namespace hkb
