#include "hkb/dirichlet_ball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hkb/gauss.hpp"
#include "hkb/special_functions.hpp"

namespace hkb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxTerms = 2'000'000;

void check_ball(const BallSpec& b) {
    if (!(b.r > 0.0)) throw UsageError("ball radius must be positive");
    if (b.d < 1) throw UsageError("ball dimension must be >= 1");
}

void check_series_dim(int d) {
    if (d != 1 && d != 3) throw NotImplemented("series available for d=1,3 only; use the Monte Carlo estimators");
}

// d=1, unit ball, tau = t/r^2, points a, b in (-1,1).
// Images: g^B = sum_n g(a, b+4n) - g(a, 2-b+4n); returned relative to g(a,b).
double d1_image_ratio(double tau, double a, double b) {
    const double base = (a - b) * (a - b);
    auto e = [&](double z) { return -((a - z) * (a - z) - base) / (4.0 * tau); };
    double s = -std::expm1(-(1.0 - a) * (1.0 - b) / tau) - std::exp(-(1.0 + a) * (1.0 + b) / tau);
    for (int n = -4; n <= 4; ++n) {
        if (n != 0) s += std::exp(e(b + 4.0 * n));
        if (n != 0 && n != -1) s -= std::exp(e(2.0 - b + 4.0 * n));
    }
    return s;
}

double d1_eigen_sum(double tau, double a, double b) {
    const double c = kPi * kPi * tau / 4.0;
    double sum = 0.0;
    for (std::size_t k = 1; k < kMaxTerms; ++k) {
        const double kk = static_cast<double>(k);
        sum += std::exp(-c * kk * kk) * std::sin(kk * kPi * (a + 1.0) / 2.0) * std::sin(kk * kPi * (b + 1.0) / 2.0);
        const double q = std::exp(-c * (kk + 1.0));
        const double tail = std::exp(-c * (kk + 1.0) * (kk + 1.0)) / (1.0 - q);
        if (q < 1.0 && tail < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
}

// d=3, unit ball, density between the centre and radius rho, relative to the free kernel.
double d3_image_ratio(double tau, double rho) {
    double s = 1.0;
    for (int n = 1; n < 64; ++n) {
        const double nn = n;
        const double a = nn * rho / tau;
        const double base = -nn * nn / tau;
        double pair;
        if (rho < 1e-4) {
            const double sinhc = a < 1e-8 ? 1.0 : std::sinh(a) / a;
            pair = std::exp(base) * (2.0 * std::cosh(a) - 4.0 * nn * nn / tau * sinhc);
        } else {
            const double ep = std::exp(base + a), em = std::exp(base - a);
            pair = ep * (1.0 - 2.0 * nn / rho) + em * (1.0 + 2.0 * nn / rho);
        }
        s += pair;
        if (nn * (nn - rho) / tau > 800.0) break;
    }
    return s;
}

double d3_eigen_sum(double tau, double rho) {
    double sum = 0.0;
    for (std::size_t n = 1; n < kMaxTerms; ++n) {
        const double nn = static_cast<double>(n);
        const double weight = rho < 1e-12 ? nn * nn * kPi / 2.0 : nn * std::sin(nn * kPi * rho) / (2.0 * rho);
        sum += weight * std::exp(-kPi * kPi * tau * nn * nn);
        const double m = nn + 1.0;
        const double q = (m + 1.0) * (m + 1.0) / (m * m) * std::exp(-kPi * kPi * tau * (2.0 * m + 1.0));
        const double tail = kPi / 2.0 * m * m * std::exp(-kPi * kPi * tau * m * m) / (1.0 - q);
        if (q < 1.0 && tail < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
}

}  // namespace

EigenSeries ball_eigen_series(const BallSpec& ball, double t, std::size_t truncation) {
    check_ball(ball);
    check_series_dim(ball.d);
    if (!(t > 0.0)) throw UsageError("t must be positive");
    if (truncation < 1) throw UsageError("truncation must be >= 1");
    EigenSeries s;
    s.truncation = truncation;
    const double tau = t / (ball.r * ball.r);
    const double m = static_cast<double>(truncation) + 1.0;
    for (std::size_t k = 1; k <= truncation; ++k) {
        const double kk = static_cast<double>(k);
        const double w = ball.d == 1 ? kk * kPi / (2.0 * ball.r) : kk * kPi / ball.r;
        s.modes.push_back({static_cast<int>(k), w * w});
    }
    if (ball.d == 1) {
        const double c = kPi * kPi * tau / 4.0;
        s.tail_bound = std::exp(-c * m * m) / (-std::expm1(-c * m)) / ball.r;
    } else {
        const double q = (m + 1.0) * (m + 1.0) / (m * m) * std::exp(-kPi * kPi * tau * (2.0 * m + 1.0));
        s.tail_bound = q < 1.0 ? kPi / 2.0 * m * m * std::exp(-kPi * kPi * tau * m * m) / (1.0 - q) /
                                     (ball.r * ball.r * ball.r)
                               : std::numeric_limits<double>::infinity();
    }
    return s;
}

double log_killed_density(const BallSpec& ball, double t, std::span<const double> x, std::span<const double> y) {
    check_ball(ball);
    check_series_dim(ball.d);
    if (!(t > 0.0)) throw UsageError("t must be positive");
    if (static_cast<int>(x.size()) != ball.d || static_cast<int>(y.size()) != ball.d)
        throw UsageError("killed_density: dimension mismatch");
    const double r = ball.r;
    const double nx = norm(x), ny = norm(y);
    if (nx >= r || ny >= r) return kNegInf;
    const double tau = t / (r * r);

    if (ball.d == 1) {
        // ordered arguments make the result exactly symmetric
        const double a = std::min(x[0], y[0]) / r, b = std::max(x[0], y[0]) / r;
        if (tau < 0.25) {
            const double s = d1_image_ratio(tau, a, b);
            if (s > 0.0) return log_gauss_kernel(1, t, x, y) + std::log(s);
        }
        const double s = d1_eigen_sum(tau, a, b);
        return s > 0.0 ? std::log(s) - std::log(r) : kNegInf;
    }

    if (nx != 0.0 && ny != 0.0)
        throw NotImplemented("killed_density d=3 needs x or y at the centre; use killed_density_mc");
    const double rho = std::max(nx, ny) / r;
    if (tau < 0.2) {
        const double s = d3_image_ratio(tau, rho);
        if (s > 0.0) return log_gauss_kernel(3, t, x, y) + std::log(s);
    }
    const double s = d3_eigen_sum(tau, rho);
    return s > 0.0 ? std::log(s) - 3.0 * std::log(r) : kNegInf;
}

double killed_density(const BallSpec& ball, double t, std::span<const double> x, std::span<const double> y) {
    return std::exp(log_killed_density(ball, t, x, y));
}

double survival_prob(const BallSpec& ball, double t, std::span<const double> x) {
    check_ball(ball);
    check_series_dim(ball.d);
    if (!(t > 0.0)) throw UsageError("t must be positive");
    if (static_cast<int>(x.size()) != ball.d) throw UsageError("survival_prob: dimension mismatch");
    const double rho = norm(x) / ball.r;
    if (rho >= 1.0) return 0.0;
    const double tau = t / (ball.r * ball.r);
    double sum = 0.0;
    if (ball.d == 1) {
        const double a = x[0] / ball.r;
        for (std::size_t k = 1; k < kMaxTerms; k += 2) {
            const double kk = static_cast<double>(k);
            const double decay = std::exp(-(kk * kPi / 2.0) * (kk * kPi / 2.0) * tau);
            sum += 4.0 / (kk * kPi) * std::sin(kk * kPi * (a + 1.0) / 2.0) * decay;
            if (decay < 1e-18) break;
        }
    } else {
        for (std::size_t n = 1; n < kMaxTerms; ++n) {
            const double nn = static_cast<double>(n);
            const double decay = std::exp(-nn * nn * kPi * kPi * tau);
            const double arg = nn * kPi * rho;
            const double sinc = arg < 1e-12 ? 1.0 : std::sin(arg) / arg;
            sum += (n % 2 == 1 ? 2.0 : -2.0) * sinc * decay;
            if (decay < 1e-18) break;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

double log_ctilde_ratio(const BallSpec& ball, double t, std::span<const double> x, std::span<const double> y,
                        double log_killed) {
    const double r = ball.r;
    const double gap = (r - norm(x)) * (r - norm(y));
    const double num = std::min(1.0, gap / t);
    const double den = std::pow(std::min(1.0, r * r / t), 0.5 * (ball.d + 2));
    const double log_ref = std::log(num) - std::log(den) - mu0(ball.d) * t / (r * r) + log_gauss_kernel(ball.d, t, x, y);
    return log_killed - log_ref;
}

}  // namespace hkb
