#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hkb/gauss.hpp"
#include "hkb/oracles.hpp"

namespace hkb {

// In xi = (z - y)/sqrt(s), tau = log s, the ratio w = u_s(z,y)/g_s(z,y) solves
//   w_tau = w_xixi - (xi/2) w_xi - s V(y + sqrt(s) xi) w,
// with w -> 1 as s -> 0. Strang splitting: exact reaction half steps around a
// Crank-Nicolson step of the constant-coefficient diffusion part.

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Tridiag {
    std::vector<double> lo, di, up;
};

// L w = w'' - (xi/2) w' with reflecting ends.
Tridiag diffusion_operator(std::size_t n, double h, double xi0) {
    Tridiag L{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    const double ih2 = 1.0 / (h * h);
    for (std::size_t j = 0; j < n; ++j) {
        const double xi = xi0 + h * static_cast<double>(j);
        L.di[j] = -2.0 * ih2;
        if (j == 0) {
            L.up[j] = 2.0 * ih2;
        } else if (j == n - 1) {
            L.lo[j] = 2.0 * ih2;
        } else {
            L.lo[j] = ih2 + xi / (4.0 * h);
            L.up[j] = ih2 - xi / (4.0 * h);
        }
    }
    return L;
}

struct CnStepper {
    Tridiag L;
    double half_dt = 0.0;
    std::vector<double> c_prime, inv_den, rhs;

    void prepare(double dt) {
        half_dt = 0.5 * dt;
        const std::size_t n = L.di.size();
        c_prime.assign(n, 0.0);
        inv_den.assign(n, 0.0);
        rhs.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double a = -half_dt * L.lo[j];
            const double b = 1.0 - half_dt * L.di[j];
            const double c = -half_dt * L.up[j];
            const double den = j == 0 ? b : b - a * c_prime[j - 1];
            inv_den[j] = 1.0 / den;
            c_prime[j] = c * inv_den[j];
        }
    }

    void step(std::vector<double>& w) {
        const std::size_t n = w.size();
        for (std::size_t j = 0; j < n; ++j) {
            double lw = L.di[j] * w[j];
            if (j > 0) lw += L.lo[j] * w[j - 1];
            if (j + 1 < n) lw += L.up[j] * w[j + 1];
            rhs[j] = w[j] + half_dt * lw;
        }
        // Thomas sweep
        for (std::size_t j = 0; j < n; ++j) {
            const double a = -half_dt * L.lo[j];
            rhs[j] = (rhs[j] - (j == 0 ? 0.0 : a * rhs[j - 1])) * inv_den[j];
        }
        w[n - 1] = rhs[n - 1];
        for (std::size_t j = n - 1; j-- > 0;) w[j] = rhs[j] - c_prime[j] * w[j + 1];
    }
};

double lagrange4(const double* f, double u) {
    // nodes at -1, 0, 1, 2
    return f[0] * (-u * (u - 1.0) * (u - 2.0) / 6.0) + f[1] * ((u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0) +
           f[2] * (-(u + 1.0) * u * (u - 2.0) / 2.0) + f[3] * ((u + 1.0) * u * (u - 1.0) / 6.0);
}

}  // namespace

double PdeSolution::log_value(std::size_t time_index, double x) const {
    if (time_index >= times_.size()) throw UsageError("PdeSolution: time index out of range");
    const double t = times_[time_index];
    const double xi = (x - y_) / std::sqrt(t);
    const auto& w = w_[time_index];
    const std::size_t n = w.size();
    const double pos = (xi + xi_max_) / h_;
    if (pos < 1.0 || pos > static_cast<double>(n) - 3.0) throw UsageError("PdeSolution: point outside the solved window");
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double u = pos - static_cast<double>(i);
    const double* f = &w[i - 1];
    double lw;
    if (f[0] > 0.0 && f[1] > 0.0 && f[2] > 0.0 && f[3] > 0.0) {
        const double lf[4] = {std::log(f[0]), std::log(f[1]), std::log(f[2]), std::log(f[3])};
        lw = lagrange4(lf, u);
    } else {
        const double val = lagrange4(f, u);
        lw = val > 0.0 ? std::log(val) : kNegInf;
    }
    return log_gauss_kernel_sq(1, t, (x - y_) * (x - y_)) + lw;
}

KernelEstimate PdeSolution::estimate(std::size_t time_index, double x) const {
    KernelEstimate e;
    e.method = OracleMethod::pde_1d;
    e.log_value = e.log_ci_low = e.log_ci_high = log_value(time_index, x);
    e.value = e.ci_low = e.ci_high = std::exp(e.log_value);
    e.grid_spacing = h_;
    e.time_step = dtau_;
    e.domain_half_width = xi_max_ * std::sqrt(times_[time_index]);
    e.n_steps = static_cast<std::size_t>(std::ceil((std::log(times_[time_index]) - log_s0_) / dtau_));
    return e;
}

PdeSolution pde_solve_1d(const Potential& v, double y, std::span<const double> times, std::span<const double> xs,
                         const PdeOptions& opt) {
    if (v.dim() != 1) throw UsageError("pde_kernel_1d: potential must be one-dimensional");
    if (times.empty()) throw UsageError("pde_kernel_1d: no times requested");
    if (!(opt.spacing > 0.0) || !(opt.log_time_step > 0.0) || !(opt.margin > 0.0) ||
        !(opt.start_fraction > 0.0 && opt.start_fraction < 1.0))
        throw UsageError("pde_kernel_1d: invalid discretization options");
    std::vector<double> ts(times.begin(), times.end());
    for (double t : ts)
        if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("pde_kernel_1d: times must be positive");
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    double xi_req = 0.0;
    for (double x : xs) xi_req = std::max(xi_req, std::fabs(x - y) / std::sqrt(ts.front()));
    const double h = opt.spacing;
    const double xi_max = std::ceil((xi_req + opt.margin) / h) * h;
    if (xi_max * h > 4.0) {
        char msg[200];
        std::snprintf(msg, sizeof msg,
                      "pde_kernel_1d: spacing %.3g too coarse for half-width %.3g (cell Peclet > 1); use spacing <= %.3g",
                      h, xi_max, 4.0 / xi_max);
        throw UsageError(msg);
    }
    const auto n = static_cast<std::size_t>(std::llround(2.0 * xi_max / h)) + 1;

    PdeSolution sol;
    sol.y_ = y;
    sol.h_ = h;
    sol.xi_max_ = xi_max;
    sol.dtau_ = opt.log_time_step;
    sol.times_ = ts;

    std::vector<double> xi(n), w(n), z(n);
    for (std::size_t j = 0; j < n; ++j) xi[j] = -xi_max + h * static_cast<double>(j);
    const double s0 = opt.start_fraction * ts.front();
    sol.log_s0_ = std::log(s0);
    const double vy = v.eval_1d(y);
    for (std::size_t j = 0; j < n; ++j) w[j] = std::exp(-0.5 * s0 * (vy + v.eval_1d(y + std::sqrt(s0) * xi[j])));

    auto react = [&](double tau_a, double tau_b) {
        const double tm = 0.5 * (tau_a + tau_b);
        const double s = std::exp(tm), rs = std::sqrt(s);
        const double f = (tau_b - tau_a) * s;
        for (std::size_t j = 0; j < n; ++j) w[j] *= std::exp(-f * v.eval_1d(y + rs * xi[j]));
    };

    CnStepper cn;
    cn.L = diffusion_operator(n, h, -xi_max);
    double tau = std::log(s0);
    for (double t : ts) {
        const double tau_end = std::log(t);
        const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((tau_end - tau) / opt.log_time_step)));
        const double dtau = (tau_end - tau) / static_cast<double>(steps);
        cn.prepare(dtau);
        for (std::size_t k = 0; k < steps; ++k) {
            const double ta = tau + dtau * static_cast<double>(k);
            react(ta, ta + 0.5 * dtau);
            cn.step(w);
            react(ta + 0.5 * dtau, ta + dtau);
        }
        tau = tau_end;
        sol.w_.push_back(w);
    }
    return sol;
}

KernelEstimate pde_kernel_1d(const Potential& v, double t, double x, double y, const PdeOptions& opt) {
    const double ts[1] = {t}, xs[1] = {x};
    return pde_solve_1d(v, y, ts, xs, opt).estimate(0, x);
}

}  // namespace hkb
