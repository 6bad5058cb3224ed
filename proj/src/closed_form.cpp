#include <cmath>
#include <numbers>

#include "hkb/gauss.hpp"
#include "hkb/oracles.hpp"

namespace hkb {

namespace {

// log sinh(z), z > 0
double log_sinh(double z) { return z > 20.0 ? z - std::log(2.0) + std::log1p(-std::exp(-2.0 * z)) : std::log(std::sinh(z)); }

// Kernel of -d^2/dx^2 + w^2 x^2 in one variable (Mehler).
double log_mehler_1d(double w, double t, double x, double y) {
    const double z = 2.0 * w * t;
    // (x^2+y^2) coth z - 2xy / sinh z, rearranged to avoid cancellation
    const double q = (x - y) * (x - y) / std::sinh(z) + (x * x + y * y) * std::tanh(0.5 * z);
    return 0.5 * (std::log(w) - std::log(2.0 * std::numbers::pi) - log_sinh(z)) - 0.5 * w * q;
}

}  // namespace

std::optional<KernelEstimate> closed_form(const Potential& v, double t, std::span<const double> x,
                                          std::span<const double> y) {
    const int d = v.dim();
    if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
        throw UsageError("closed_form: point dimension does not match potential");
    if (!(t > 0.0)) throw UsageError("closed_form: t must be positive");
    double lv;
    if (const auto c = v.constant_value()) {
        lv = log_gauss_kernel(d, t, x, y) - *c * t;
    } else if (v.is_harmonic()) {
        const double w = std::sqrt(v.k());
        lv = 0.0;
        for (int j = 0; j < d; ++j) lv += log_mehler_1d(w, t, x[j], y[j]);
    } else {
        return std::nullopt;
    }
    KernelEstimate e;
    e.method = OracleMethod::closed_form;
    e.log_value = e.log_ci_low = e.log_ci_high = lv;
    e.value = e.ci_low = e.ci_high = std::exp(lv);
    return e;
}

}  // namespace hkb
