#include "hkb/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hkb/common.hpp"

namespace hkb {

namespace {

constexpr double kSeriesTol = 1e-17;

double nu_of_dim(int d) { return 0.5 * d - 1.0; }

// Ascending series of J_nu(x) / (x/2)^nu; same positive zeros as J_nu.
long double j_series_reduced(long double nu, long double x) {
    const long double q = 0.25L * x * x;
    long double term = 1.0L / std::tgamma(static_cast<double>(nu) + 1.0);
    long double sum = term;
    long double peak = std::fabs(term);
    for (int k = 0; k < 400; ++k) {
        term *= -q / ((k + 1.0L) * (k + 1.0L + nu));
        sum += term;
        peak = std::fmax(peak, std::fabs(term));
        if (k > x && std::fabs(term) < 1e-22L * peak) break;
    }
    return sum;
}

double first_zero(double nu) {
    double lo = 0.25, hi = 0.25;
    long double f_lo = j_series_reduced(nu, lo);
    while (true) {
        hi = lo + 0.05;
        if (hi > 12.0) throw std::runtime_error("first_zero: no sign change below 12");
        const long double f_hi = j_series_reduced(nu, hi);
        if ((f_lo > 0) != (f_hi > 0)) break;
        lo = hi;
        f_lo = f_hi;
    }
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const long double f_mid = j_series_reduced(nu, mid);
        if ((f_mid > 0) == (f_lo > 0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

const std::array<double, 10>& mu0_table() {
    static const std::array<double, 10> table = [] {
        std::array<double, 10> t{};
        for (int d = 1; d <= 10; ++d) {
            const double j = first_zero(nu_of_dim(d));
            t[d - 1] = j * j;
        }
        return t;
    }();
    return table;
}

}  // namespace

double log_bessel_i(double nu, double u) {
    if (!(nu >= -0.5)) throw UsageError("bessel_i: order must be >= -1/2");
    if (!(u >= 0.0)) throw UsageError("bessel_i: argument must be nonnegative");
    if (u == 0.0) {
        if (nu == 0.0) return 0.0;
        return nu > 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    }
    if (std::isinf(u)) return std::numeric_limits<double>::infinity();
    const double q = 0.25 * u * u;
    // index of the largest term: (k+1)(k+1+nu) ~ q
    const double m = 0.5 * (-nu + std::sqrt(nu * nu + 4.0 * q)) - 1.0;
    const double kstar = m > 0.0 ? std::floor(m + 0.5) : 0.0;
    const double log_peak = (nu + 2.0 * kstar) * std::log(0.5 * u) - std::lgamma(kstar + 1.0) - std::lgamma(nu + kstar + 1.0);

    double sum = 1.0;
    double term = 1.0;
    for (double k = kstar;; k += 1.0) {
        term *= q / ((k + 1.0) * (k + 1.0 + nu));
        sum += term;
        if (term < kSeriesTol * sum) break;
    }
    term = 1.0;
    for (double k = kstar; k > 0.0; k -= 1.0) {
        term *= k * (k + nu) / q;
        sum += term;
        if (term < kSeriesTol * sum) break;
    }
    return log_peak + std::log(sum);
}

double bessel_i(double nu, double u) {
    const double l = log_bessel_i(nu, u);
    if (l > std::log(std::numeric_limits<double>::max())) throw std::overflow_error("bessel_i: result overflows");
    return std::exp(l);
}

double bessel_j(double nu, double x) {
    if (!(nu >= -0.5)) throw UsageError("bessel_j: order must be >= -1/2");
    if (!(x >= 0.0)) throw UsageError("bessel_j: argument must be nonnegative");
    if (x == 0.0) return nu == 0.0 ? 1.0 : (nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return static_cast<double>(j_series_reduced(nu, x) * std::pow(0.5L * x, static_cast<long double>(nu)));
}

Mu0 dirichlet_mu0(int d) {
    if (d < 1 || d > 10) throw UsageError("dirichlet_mu0: d must be in 1..10");
    return {d, mu0_table()[d - 1]};
}

double mu0(int d) { return dirichlet_mu0(d).value; }

double log_wendel_laplace(int d, double lambda, double r) {
    if (d < 1) throw UsageError("wendel_laplace: d must be >= 1");
    if (!(lambda >= 0.0)) throw UsageError("wendel_laplace: lambda must be nonnegative");
    if (!(r > 0.0)) throw UsageError("wendel_laplace: r must be positive");
    if (lambda == 0.0) return 0.0;
    const double nu = nu_of_dim(d);
    const double u = std::sqrt(lambda) * r;
    const double l = nu * std::log(u) - nu * std::log(2.0) - std::lgamma(nu + 1.0) - log_bessel_i(nu, u);
    return std::fmin(l, 0.0);
}

double wendel_laplace(int d, double lambda, double r) { return std::exp(log_wendel_laplace(d, lambda, r)); }

bool wendel_upper_check(int d, double lambda, double r, double C) {
    if (!(C > 0.0)) throw UsageError("wendel_upper_check: C must be positive");
    return log_wendel_laplace(d, lambda, r) <= std::log(C) - 0.5 * std::sqrt(lambda) * r;
}

WendelSweep wendel_sweep(int d, std::span<const double> lambdas, std::span<const double> radii) {
    WendelSweep out;
    double worst = -std::numeric_limits<double>::infinity();
    for (double l : lambdas) {
        for (double r : radii) {
            const double excess = log_wendel_laplace(d, l, r) + 0.5 * std::sqrt(l) * r;
            ++out.n_points;
            if (excess > worst) {
                worst = excess;
                out.worst_lambda = l;
                out.worst_r = r;
            }
        }
    }
    out.C = std::exp(std::fmax(worst, 0.0));
    return out;
}

}  // namespace hkb
