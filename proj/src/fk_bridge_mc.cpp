#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hkb/gauss.hpp"
#include "hkb/oracles.hpp"

namespace hkb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sums of exp(l_i) and exp(2 l_i) held relative to a running maximum.
struct LogMoments {
    double shift = kNegInf;
    double s1 = 0.0, s2 = 0.0;
    double n = 0.0;

    void add(double l) {
        n += 1.0;
        if (l > shift) {
            const double f = std::exp(shift - l);
            s1 *= f;
            s2 *= f * f;
            shift = l;
        }
        const double e = std::exp(l - shift);
        s1 += e;
        s2 += e * e;
    }
    void merge(const LogMoments& o) {
        n += o.n;
        if (o.shift == kNegInf) return;
        if (o.shift > shift) {
            const double f = std::exp(shift - o.shift);
            s1 = s1 * f + o.s1;
            s2 = s2 * f * f + o.s2;
            shift = o.shift;
        } else {
            const double f = std::exp(o.shift - shift);
            s1 += o.s1 * f;
            s2 += o.s2 * f * f;
        }
    }
};

double log_add(double a, double b) {
    const double m = std::max(a, b);
    if (m == kNegInf) return kNegInf;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

KernelEstimate bridge_impl(const Potential& v, double t, std::span<const double> x, std::span<const double> y,
                           const BridgeMcOptions& opt, bool parallel) {
    const int d = v.dim();
    if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
        throw UsageError("fk_bridge_mc: point dimension does not match potential");
    if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("fk_bridge_mc: t must be positive");
    if (opt.n_steps < 8) throw UsageError("fk_bridge_mc: n_steps must be >= 8");
    if (opt.n_paths < 100) throw UsageError("fk_bridge_mc: n_paths must be >= 100");
    if (opt.chunk_pairs == 0) throw UsageError("fk_bridge_mc: chunk_pairs must be positive");

    KernelEstimate est;
    est.method = OracleMethod::mc_bridge;
    est.n_steps = opt.n_steps;
    est.seed = opt.seed;
    const double log_g = log_gauss_kernel(d, t, x, y);

    if (const auto c = v.constant_value()) {
        // deterministic weight; the trapezoid rule is exact
        est.n_paths = opt.n_paths;
        est.log_value = est.log_ci_low = est.log_ci_high = log_g - *c * t;
        est.value = est.ci_low = est.ci_high = std::exp(est.log_value);
        return est;
    }

    const std::size_t n = opt.n_steps;
    const std::size_t units = opt.antithetic ? (opt.n_paths + 1) / 2 : opt.n_paths;
    est.n_paths = opt.antithetic ? 2 * units : units;
    const double dt = t / static_cast<double>(n);
    const double sd = std::sqrt(kIncrementVariance * dt);
    const std::size_t n_chunks = (units + opt.chunk_pairs - 1) / opt.chunk_pairs;
    std::vector<LogMoments> chunk_out(n_chunks);

    auto run_chunk = [&](std::size_t chunk) {
        std::mt19937_64 rng(mix_seed(opt.seed, chunk));
        std::normal_distribution<double> nd(0.0, 1.0);
        std::vector<double> w((n + 1) * d), fl((n + 1) * d), pv(n + 1), mv(n + 1), p(d);
        LogMoments acc;
        const std::size_t lo = chunk * opt.chunk_pairs;
        const std::size_t count = std::min(opt.chunk_pairs, units - lo);
        for (std::size_t u = 0; u < count; ++u) {
            for (int j = 0; j < d; ++j) w[j] = 0.0;
            for (std::size_t k = 1; k <= n; ++k)
                for (int j = 0; j < d; ++j) w[k * d + j] = w[(k - 1) * d + j] + sd * nd(rng);
            for (std::size_t k = 0; k <= n; ++k) {
                const double frac = static_cast<double>(k) / static_cast<double>(n);
                for (int j = 0; j < d; ++j) fl[k * d + j] = w[k * d + j] - frac * w[n * d + j];
            }
            for (std::size_t k = 0; k <= n; ++k) {
                const std::size_t src = opt.reverse ? n - k : k;
                const double wa = static_cast<double>(n - k) / static_cast<double>(n);
                const double wb = static_cast<double>(k) / static_cast<double>(n);
                for (int j = 0; j < d; ++j) p[j] = x[j] * wa + y[j] * wb + fl[src * d + j];
                pv[k] = v.eval_unchecked(p.data());
                if (opt.antithetic) {
                    for (int j = 0; j < d; ++j) p[j] = x[j] * wa + y[j] * wb - fl[src * d + j];
                    mv[k] = v.eval_unchecked(p.data());
                }
            }
            // pair k with n-k so the sum is unchanged by reversing the path
            auto trapezoid = [&](const std::vector<double>& vals) {
                double s = 0.5 * (vals[0] + vals[n]);
                for (std::size_t k = 1; 2 * k < n; ++k) s += vals[k] + vals[n - k];
                if (n % 2 == 0) s += vals[n / 2];
                return s * dt;
            };
            const double lp = -trapezoid(pv);
            if (opt.antithetic) {
                acc.add(log_add(lp, -trapezoid(mv)) - std::log(2.0));
            } else {
                acc.add(lp);
            }
        }
        chunk_out[chunk] = acc;
    };

    const long long nc = static_cast<long long>(n_chunks);
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long long c = 0; c < nc; ++c) run_chunk(static_cast<std::size_t>(c));
    } else {
        for (long long c = 0; c < nc; ++c) run_chunk(static_cast<std::size_t>(c));
    }

    LogMoments all;
    for (const auto& c : chunk_out) all.merge(c);
    const double mean = all.s1 / all.n;  // relative to exp(shift)
    const double var = all.n > 1.0 ? std::max(0.0, (all.s2 - all.n * mean * mean) / (all.n - 1.0)) : 0.0;
    const double half = kZ99 * std::sqrt(var / all.n);
    const double base = log_g + all.shift;
    est.log_value = base + std::log(mean);
    est.log_ci_high = base + std::log(mean + half);
    est.log_ci_low = mean - half > 0.0 ? base + std::log(mean - half) : kNegInf;
    est.value = std::exp(est.log_value);
    est.ci_low = std::exp(est.log_ci_low);
    est.ci_high = std::exp(est.log_ci_high);
    return est;
}

}  // namespace

std::string to_string(OracleMethod m) {
    switch (m) {
        case OracleMethod::mc_bridge: return "mc-bridge";
        case OracleMethod::pde_1d: return "pde-1d";
        case OracleMethod::closed_form: return "closed-form";
    }
    return "?";
}

KernelEstimate fk_bridge_mc(const Potential& v, double t, std::span<const double> x, std::span<const double> y,
                            const BridgeMcOptions& opt) {
    return bridge_impl(v, t, x, y, opt, true);
}

KernelEstimate fk_bridge_mc_serial(const Potential& v, double t, std::span<const double> x,
                                   std::span<const double> y, const BridgeMcOptions& opt) {
    return bridge_impl(v, t, x, y, opt, false);
}

}  // namespace hkb
