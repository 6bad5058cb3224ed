#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hkb/dirichlet_ball.hpp"
#include "hkb/gauss.hpp"

namespace hkb {

namespace {

constexpr int kRefine = 4;  // fine step = coarse step / 4
constexpr std::uint64_t kMaxFineSteps = 400'000'000ULL;

struct Moments {
    double n = 0.0, s = 0.0, ss = 0.0, f = 0.0, c = 0.0;

    void add(double fine, double coarse) {
        const double x = 2.0 * fine - coarse;
        n += 1.0;
        s += x;
        ss += x * x;
        f += fine;
        c += coarse;
    }
    void merge(const Moments& o) {
        n += o.n;
        s += o.s;
        ss += o.ss;
        f += o.f;
        c += o.c;
    }
    double mean() const { return s / n; }
    double half_width() const {
        if (n < 2.0) return std::numeric_limits<double>::infinity();
        const double m = mean();
        const double var = std::max(0.0, (ss - n * m * m) / (n - 1.0));
        return kZ99 * std::sqrt(var / n);
    }
};

struct ChunkResult {
    Moments tau;
    std::vector<Moments> laplace;
    std::vector<Moments> survival;
};

struct PathSetup {
    int d = 1;
    double r2 = 1.0;
    double sd_fine = 0.0;
    double dt_fine = 0.0;
    std::uint64_t max_fine = kMaxFineSteps;
};

// Steps (fine units) to the first fine and coarse grid exits; max_fine + 1 when not reached.
std::pair<std::uint64_t, std::uint64_t> run_path(const PathSetup& ps, std::span<const double> start,
                                                 std::mt19937_64& rng, std::normal_distribution<double>& nd,
                                                 std::vector<double>& pos) {
    std::copy(start.begin(), start.end(), pos.begin());
    const std::uint64_t never = ps.max_fine + 1;
    std::uint64_t fine = never, coarse = never;
    for (std::uint64_t n = 1; n <= ps.max_fine; ++n) {
        double r2 = 0.0;
        for (int j = 0; j < ps.d; ++j) {
            pos[j] += ps.sd_fine * nd(rng);
            r2 += pos[j] * pos[j];
        }
        if (r2 >= ps.r2) {
            if (fine == never) fine = n;
            if (n % kRefine == 0) {
                coarse = n;
                break;
            }
        }
    }
    return {fine, coarse};
}

template <class Body>
std::vector<ChunkResult> run_chunks(std::size_t n_paths, std::size_t chunk_size, bool parallel, Body body) {
    if (chunk_size == 0) throw UsageError("chunk_size must be positive");
    const std::size_t n_chunks = (n_paths + chunk_size - 1) / chunk_size;
    std::vector<ChunkResult> out(n_chunks);
    const long long nc = static_cast<long long>(n_chunks);
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long long c = 0; c < nc; ++c) {
            const std::size_t lo = static_cast<std::size_t>(c) * chunk_size;
            out[c] = body(static_cast<std::uint64_t>(c), std::min(chunk_size, n_paths - lo));
        }
    } else {
        for (long long c = 0; c < nc; ++c) {
            const std::size_t lo = static_cast<std::size_t>(c) * chunk_size;
            out[c] = body(static_cast<std::uint64_t>(c), std::min(chunk_size, n_paths - lo));
        }
    }
    return out;
}

void check_start(const BallSpec& ball, std::span<const double> start) {
    if (!(ball.r > 0.0)) throw UsageError("ball radius must be positive");
    if (static_cast<int>(start.size()) != ball.d) throw UsageError("start point dimension mismatch");
    if (!(norm(start) < ball.r)) throw UsageError("start point must lie inside the ball");
}

ExitTimeResult exit_time_impl(const BallSpec& ball, std::span<const double> start, const ExitTimeOptions& opt,
                              bool parallel) {
    check_start(ball, start);
    if (opt.n_paths == 0) throw UsageError("exit_time_mc: n_paths must be positive");
    const double dt = opt.dt > 0.0 ? opt.dt : 1e-3 * ball.r * ball.r;
    if (kIncrementVariance * dt > 0.01 * ball.r * ball.r)
        throw UsageError("exit_time_mc: dt too large for the ball radius");
    PathSetup ps;
    ps.d = ball.d;
    ps.r2 = ball.r * ball.r;
    ps.dt_fine = dt / kRefine;
    ps.sd_fine = std::sqrt(kIncrementVariance * ps.dt_fine);
    const std::vector<double> lambdas = opt.lambdas;

    auto body = [&](std::uint64_t chunk, std::size_t count) {
        std::mt19937_64 rng(mix_seed(opt.seed, chunk));
        std::normal_distribution<double> nd(0.0, 1.0);
        std::vector<double> pos(ps.d);
        ChunkResult cr;
        cr.laplace.resize(lambdas.size());
        for (std::size_t p = 0; p < count; ++p) {
            const auto [nf, ncoarse] = run_path(ps, start, rng, nd, pos);
            const double tf = static_cast<double>(nf) * ps.dt_fine;
            const double tc = static_cast<double>(ncoarse) * ps.dt_fine;
            cr.tau.add(tf, tc);
            for (std::size_t i = 0; i < lambdas.size(); ++i)
                cr.laplace[i].add(std::exp(-lambdas[i] * tf), std::exp(-lambdas[i] * tc));
        }
        return cr;
    };
    const auto chunks = run_chunks(opt.n_paths, opt.chunk_size, parallel, body);

    Moments tau;
    std::vector<Moments> lap(lambdas.size());
    for (const auto& c : chunks) {
        tau.merge(c.tau);
        for (std::size_t i = 0; i < lambdas.size(); ++i) lap[i].merge(c.laplace[i]);
    }
    ExitTimeResult res;
    res.n_paths = opt.n_paths;
    res.dt_coarse = dt;
    res.dt_fine = ps.dt_fine;
    res.mean = tau.mean();
    res.ci_low = res.mean - tau.half_width();
    res.ci_high = res.mean + tau.half_width();
    res.mean_fine = tau.f / tau.n;
    res.mean_coarse = tau.c / tau.n;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        LaplaceEstimate le;
        le.lambda = lambdas[i];
        le.value = lap[i].mean();
        le.ci_low = le.value - lap[i].half_width();
        le.ci_high = le.value + lap[i].half_width();
        le.fine = lap[i].f / lap[i].n;
        le.coarse = lap[i].c / lap[i].n;
        res.laplace.push_back(le);
    }
    return res;
}

}  // namespace

ExitTimeResult exit_time_mc(const BallSpec& ball, std::span<const double> start, const ExitTimeOptions& opt) {
    return exit_time_impl(ball, start, opt, true);
}

ExitTimeResult exit_time_mc_serial(const BallSpec& ball, std::span<const double> start, const ExitTimeOptions& opt) {
    return exit_time_impl(ball, start, opt, false);
}

std::vector<McEstimate> survival_prob_mc(const BallSpec& ball, std::span<const double> t_grid,
                                         std::span<const double> start, const ExitTimeOptions& opt) {
    check_start(ball, start);
    if (opt.n_paths == 0) throw UsageError("survival_prob_mc: n_paths must be positive");
    if (t_grid.empty()) return {};
    const double horizon = *std::max_element(t_grid.begin(), t_grid.end());
    if (!(horizon > 0.0)) throw UsageError("survival_prob_mc: times must be positive");
    const double dt_req = opt.dt > 0.0 ? opt.dt : 1e-3 * ball.r * ball.r;
    const auto n_coarse = static_cast<std::uint64_t>(std::ceil(horizon / dt_req));
    PathSetup ps;
    ps.d = ball.d;
    ps.r2 = ball.r * ball.r;
    ps.dt_fine = horizon / static_cast<double>(n_coarse * kRefine);
    ps.sd_fine = std::sqrt(kIncrementVariance * ps.dt_fine);
    ps.max_fine = n_coarse * kRefine;
    const std::vector<double> ts(t_grid.begin(), t_grid.end());

    auto body = [&](std::uint64_t chunk, std::size_t count) {
        std::mt19937_64 rng(mix_seed(opt.seed, chunk));
        std::normal_distribution<double> nd(0.0, 1.0);
        std::vector<double> pos(ps.d);
        ChunkResult cr;
        cr.survival.resize(ts.size());
        for (std::size_t p = 0; p < count; ++p) {
            const auto [nf, nc] = run_path(ps, start, rng, nd, pos);
            const double tf = static_cast<double>(nf) * ps.dt_fine;
            const double tc = static_cast<double>(nc) * ps.dt_fine;
            for (std::size_t i = 0; i < ts.size(); ++i)
                cr.survival[i].add(tf > ts[i] ? 1.0 : 0.0, tc > ts[i] ? 1.0 : 0.0);
        }
        return cr;
    };
    const auto chunks = run_chunks(opt.n_paths, opt.chunk_size, true, body);
    std::vector<Moments> acc(ts.size());
    for (const auto& c : chunks)
        for (std::size_t i = 0; i < ts.size(); ++i) acc[i].merge(c.survival[i]);
    std::vector<McEstimate> out;
    for (const auto& m : acc) {
        McEstimate e;
        e.value = std::clamp(m.mean(), 0.0, 1.0);
        e.ci_low = std::max(0.0, m.mean() - m.half_width());
        e.ci_high = std::min(1.0, m.mean() + m.half_width());
        e.n_paths = opt.n_paths;
        out.push_back(e);
    }
    return out;
}

McEstimate killed_density_mc(const BallSpec& ball, double t, std::span<const double> x, std::span<const double> y,
                             std::size_t n_paths, std::size_t n_steps, std::uint64_t seed) {
    if (!(t > 0.0)) throw UsageError("t must be positive");
    if (n_paths == 0 || n_steps < 2) throw UsageError("killed_density_mc: need paths and at least 2 steps");
    if (static_cast<int>(x.size()) != ball.d || static_cast<int>(y.size()) != ball.d)
        throw UsageError("killed_density_mc: dimension mismatch");
    const double g = gauss_kernel(ball.d, t, x, y);
    if (norm(x) >= ball.r || norm(y) >= ball.r) return {0.0, 0.0, 0.0, n_paths};
    const int d = ball.d;
    const std::size_t n = n_steps;
    const double dt = t / static_cast<double>(n);
    const double sd = std::sqrt(kIncrementVariance * dt);
    std::mt19937_64 rng(mix_seed(seed, 0));
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> w((n + 1) * d);
    double s = 0.0, ss = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        for (int j = 0; j < d; ++j) w[j] = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            for (int j = 0; j < d; ++j) w[k * d + j] = w[(k - 1) * d + j] + sd * nd(rng);
        double weight = 1.0;
        double prev_gap = ball.r - norm(x);
        for (std::size_t k = 1; k <= n && weight > 0.0; ++k) {
            const double frac = static_cast<double>(k) / static_cast<double>(n);
            double r2 = 0.0;
            for (int j = 0; j < d; ++j) {
                const double b = x[j] * (1.0 - frac) + y[j] * frac + w[k * d + j] - frac * w[n * d + j];
                r2 += b * b;
            }
            const double gap = ball.r - std::sqrt(r2);
            if (gap <= 0.0) {
                weight = 0.0;
                break;
            }
            weight *= -std::expm1(-prev_gap * gap / dt);
            prev_gap = gap;
        }
        s += weight;
        ss += weight * weight;
    }
    const double np = static_cast<double>(n_paths);
    const double m = s / np;
    const double half = n_paths > 1 ? kZ99 * std::sqrt(std::max(0.0, (ss - np * m * m) / (np - 1.0)) / np) : 0.0;
    return {g * m, g * std::max(0.0, m - half), g * (m + half), n_paths};
}

}  // namespace hkb
