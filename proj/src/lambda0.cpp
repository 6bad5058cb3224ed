#include <algorithm>
#include <cmath>
#include <limits>

#include "hkb/oracles.hpp"

namespace hkb {

namespace {

struct SymTridiag {
    std::vector<double> diag, off;  // off[i] couples i and i+1
};

// number of eigenvalues below sigma (Sturm count from the LDL^T pivots)
std::size_t count_below(const SymTridiag& m, double sigma) {
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < m.diag.size(); ++i) {
        const double e2 = i == 0 ? 0.0 : m.off[i - 1] * m.off[i - 1];
        q = m.diag[i] - sigma - (i == 0 ? 0.0 : e2 / q);
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

// Solves (m - sigma) x = b in place.
void shifted_solve(const SymTridiag& m, double sigma, std::vector<double>& b) {
    const std::size_t n = m.diag.size();
    std::vector<double> c(n), den(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = i == 0 ? 0.0 : m.off[i - 1];
        den[i] = m.diag[i] - sigma - (i == 0 ? 0.0 : a * c[i - 1]);
        if (den[i] == 0.0) den[i] = 1e-300;
        c[i] = i + 1 < n ? m.off[i] / den[i] : 0.0;
        b[i] = (b[i] - (i == 0 ? 0.0 : a * b[i - 1])) / den[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) b[i] -= c[i] * b[i + 1];
}

double smallest_eigenvalue(const SymTridiag& m) {
    const std::size_t n = m.diag.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::fabs(m.off[i - 1]) : 0.0) + (i + 1 < n ? std::fabs(m.off[i]) : 0.0);
        lo = std::min(lo, m.diag[i] - r);
        hi = std::max(hi, m.diag[i] + r);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(m, mid) >= 1) hi = mid;
        else lo = mid;
        if (hi - lo < 1e-10 * std::max(1.0, std::fabs(hi))) break;
    }
    // polish with inverse iteration and the Rayleigh quotient
    std::vector<double> x(n, 1.0);
    double lambda = 0.5 * (lo + hi);
    const double shift = lo - 1e-9 * std::max(1.0, std::fabs(lo));
    for (int it = 0; it < 4; ++it) {
        shifted_solve(m, shift, x);
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
        double num = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double mx = m.diag[i] * x[i];
            if (i > 0) mx += m.off[i - 1] * x[i - 1];
            if (i + 1 < n) mx += m.off[i] * x[i + 1];
            num += x[i] * mx;
        }
        lambda = num;
    }
    return lambda;
}

// -u'' + V u on (-L, L), Dirichlet ends
SymTridiag line_operator(const Potential& v, double L, std::size_t cells) {
    const double h = 2.0 * L / static_cast<double>(cells);
    SymTridiag m;
    for (std::size_t i = 1; i < cells; ++i) {
        const double x = -L + h * static_cast<double>(i);
        m.diag.push_back(2.0 / (h * h) + v.eval_1d(x));
        if (i + 1 < cells) m.off.push_back(-1.0 / (h * h));
    }
    return m;
}

// radial part of -Laplacian + V in d dimensions, finite volumes on (0, L), symmetrized
SymTridiag radial_operator(const Potential& v, double L, std::size_t cells) {
    const int d = v.dim();
    const double h = L / static_cast<double>(cells);
    auto face = [&](double r) { return std::pow(r, d - 1); };
    SymTridiag m;
    for (std::size_t i = 0; i < cells; ++i) {
        const double r = (static_cast<double>(i) + 0.5) * h;
        const double mass = face(r);
        const double right = face(r + 0.5 * h);
        const double left = i == 0 ? 0.0 : face(r - 0.5 * h);
        m.diag.push_back((left + right) / (h * h * mass) + v.radial(r));
        if (i + 1 < cells) {
            const double rn = r + h;
            m.off.push_back(-right / (h * h * std::sqrt(mass * face(rn))));
        }
    }
    return m;
}

double boundary_value(const Potential& v, double L) {
    if (v.dim() == 1) return std::min(v.eval_1d(L), v.eval_1d(-L));
    return v.radial(L);
}

}  // namespace

std::string to_string(Lambda0Method m) {
    return m == Lambda0Method::eigen_solver_1d ? "eigen-solver-1d" : "long-time-decay";
}

Lambda0Estimate lambda0_estimate(const Potential& v, Lambda0Method method, const Lambda0Options& opt) {
    Lambda0Estimate est;
    est.method = method;
    if (const auto c = v.constant_value()) {
        est.value = *c;
        return est;
    }
    if (method == Lambda0Method::eigen_solver_1d) {
        if (v.dim() > 1 && !v.is_radial()) throw UsageError("lambda0 eigen-solver needs d=1 or a radial potential");
        if (opt.cells < 16) throw UsageError("lambda0: too few cells");
        double L = opt.half_width;
        if (!(L > 0.0)) {
            L = 4.0;
            while (boundary_value(v, L) < 400.0 && L < 64.0) L *= 1.25;
        }
        est.truncation_warning = !v.is_confining();
        est.domain_half_width = L;
        auto solve = [&](std::size_t cells) {
            return smallest_eigenvalue(v.dim() == 1 ? line_operator(v, L, cells) : radial_operator(v, L, cells));
        };
        const std::size_t cells = v.dim() == 1 ? 2 * opt.cells : opt.cells;
        const double coarse = solve(cells), fine = solve(2 * cells);
        est.value = std::max(0.0, (4.0 * fine - coarse) / 3.0);
        est.error_indicator = std::fabs(fine - coarse) / 3.0;
        est.spacing = (v.dim() == 1 ? 2.0 * L : L) / static_cast<double>(2 * cells);
        return est;
    }

    // slope of -log u_t(0,0) over [T, 2T], T doubled until it settles
    std::vector<double> ts;
    for (double t = 1.0; t <= 128.0; t *= 2.0) ts.push_back(t);
    std::vector<double> logs;
    const std::vector<double> origin(v.dim(), 0.0);
    if (v.dim() == 1) {
        const double xs[1] = {0.0};
        const PdeSolution sol = pde_solve_1d(v, 0.0, ts, xs);
        for (std::size_t i = 0; i < ts.size(); ++i) logs.push_back(sol.log_value(i, 0.0));
    } else {
        for (double t : ts) {
            const auto e = closed_form(v, t, origin, origin);
            if (!e) throw UsageError("lambda0 long-time-decay needs d=1 or a closed-form kernel");
            logs.push_back(e->log_value);
        }
    }
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double slope = (logs[i] - logs[i + 1]) / ts[i];
        est.value = std::max(0.0, slope);
        est.error_indicator = std::isnan(prev) ? std::fabs(slope) : std::fabs(slope - prev);
        if (!std::isnan(prev) && std::fabs(slope - prev) <= 0.01 * std::fabs(slope)) return est;
        prev = slope;
    }
    est.truncation_warning = true;
    return est;
}

}  // namespace hkb
