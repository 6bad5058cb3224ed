// Serial vs OpenMP timings for the two Monte Carlo kernels; results must match bit for bit.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <omp.h>

#include "hkb/dirichlet_ball.hpp"
#include "hkb/oracles.hpp"

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

int main() {
    bool ok = true;
    std::printf("threads=%d\n", omp_get_max_threads());

    {
        const hkb::Potential v = hkb::Potential::polynomial(1, 1.0, 2.0);
        const double x[1] = {0.5}, y[1] = {-1.0};
        hkb::BridgeMcOptions opt;
        opt.n_paths = 200000;
        hkb::KernelEstimate s, p;
        const double ts = seconds([&] { s = hkb::fk_bridge_mc_serial(v, 1.0, x, y, opt); });
        const double tp = seconds([&] { p = hkb::fk_bridge_mc(v, 1.0, x, y, opt); });
        const bool same = same_bits(s.value, p.value) && same_bits(s.ci_low, p.ci_low) && same_bits(s.ci_high, p.ci_high);
        ok = ok && same;
        std::printf("fk_bridge_mc   paths=%zu serial=%.3fs parallel=%.3fs speedup=%.2f identical=%s\n", opt.n_paths,
                    ts, tp, ts / tp, same ? "yes" : "no");
    }
    {
        const hkb::BallSpec ball{3, 1.0};
        const double start[3] = {0.0, 0.0, 0.0};
        hkb::ExitTimeOptions opt;
        opt.n_paths = 50000;
        opt.lambdas = {1.0, 4.0};
        hkb::ExitTimeResult s, p;
        const double ts = seconds([&] { s = hkb::exit_time_mc_serial(ball, start, opt); });
        const double tp = seconds([&] { p = hkb::exit_time_mc(ball, start, opt); });
        bool same = same_bits(s.mean, p.mean) && same_bits(s.ci_low, p.ci_low);
        for (std::size_t i = 0; i < s.laplace.size(); ++i) same = same && same_bits(s.laplace[i].value, p.laplace[i].value);
        ok = ok && same;
        std::printf("exit_time_mc   paths=%zu serial=%.3fs parallel=%.3fs speedup=%.2f identical=%s\n", opt.n_paths,
                    ts, tp, ts / tp, same ? "yes" : "no");
    }
    return ok ? 0 : 1;
}
