#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hkb/dirichlet_ball.hpp"
#include "hkb/special_functions.hpp"

namespace hkb {

namespace {

std::string list(std::span<const double> v) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << '}';
    return os.str();
}

std::vector<double> mesh_points(double r, int mesh) {
    std::vector<double> p;
    for (int i = 0; i < mesh; ++i) p.push_back(r * (-1.0 + 2.0 * (i + 1) / (mesh + 1)));
    return p;
}

}  // namespace

CalibratedConstant calibrate_ctilde(int d, const CTildeGrid& grid) {
    if (grid.t.empty() || grid.r.empty() || grid.mesh < 1) throw UsageError("calibrate_ctilde: empty grid");
    double worst = std::numeric_limits<double>::infinity();
    std::string method;
    std::size_t used = 0, skipped = 0;
    std::vector<double> ts_used;

    for (double r : grid.r) {
        const BallSpec ball{d, r};
        const auto mesh = mesh_points(r, grid.mesh);
        for (double t : grid.t) {
            if (d == 1) {
                method = "series";
                for (double a : mesh)
                    for (double b : mesh) {
                        const double x[1] = {a}, y[1] = {b};
                        worst = std::min(worst, log_ctilde_ratio(ball, t, x, y, log_killed_density(ball, t, x, y)));
                        ++used;
                    }
            } else if (d == 3) {
                method = "series-centre";
                std::vector<double> radii{0.0};
                for (double a : mesh)
                    if (a > 0.0) radii.push_back(a);
                for (double rho : radii) {
                    const double x[3] = {rho, 0.0, 0.0}, y[3] = {0.0, 0.0, 0.0};
                    worst = std::min(worst, log_ctilde_ratio(ball, t, x, y, log_killed_density(ball, t, x, y)));
                    ++used;
                }
            } else {
                // survivors become too rare for plain sampling beyond t/r^2 ~ 0.3
                method = "mc-bridge";
                if (t / (r * r) > 0.3) continue;
                ts_used.push_back(t);
                const auto pts = mesh_points(r, std::min(grid.mesh, 5));
                for (std::size_t i = 0; i < pts.size(); ++i)
                    for (std::size_t j = i; j < pts.size(); ++j) {
                        std::vector<double> x(d, 0.0), y(d, 0.0);
                        x[0] = pts[i];
                        y[0] = pts[j];
                        const auto est = killed_density_mc(ball, t, x, y, grid.mc_paths, grid.mc_steps,
                                                           mix_seed(grid.seed, used + skipped));
                        if (est.value <= 0.0) {
                            ++skipped;
                            continue;
                        }
                        worst = std::min(worst, log_ctilde_ratio(ball, t, x, y, std::log(est.value)));
                        ++used;
                    }
            }
        }
    }
    if (used == 0) throw UsageError("calibrate_ctilde: no usable grid points");
    std::ostringstream g;
    g << "t=" << list(grid.t) << ";r=" << list(grid.r) << ";mesh=" << grid.mesh << ";method=" << method
      << ";points=" << used;
    if (method == "mc-bridge")
        g << ";paths=" << grid.mc_paths << ";steps=" << grid.mc_steps << ";seed=" << grid.seed << ";skipped=" << skipped;
    return {"Ctilde", d, std::min(1.0, std::exp(worst)), g.str(), utc_timestamp()};
}

CalibratedConstant calibrate_c0(int d, std::span<const double> t_grid, const ExitTimeOptions& mc) {
    if (t_grid.empty()) throw UsageError("calibrate_c0: empty t grid");
    for (double t : t_grid)
        if (!(t > 0.0)) throw UsageError("calibrate_c0: times must be positive");
    const double m0 = mu0(d);
    double c0 = 1.0;
    std::ostringstream g;
    g << "t=" << list(t_grid);
    if (d == 1 || d == 3) {
        const std::vector<double> origin(d, 0.0);
        for (double t : t_grid) c0 = std::max(c0, survival_prob({d, 1.0}, t, origin) * std::exp(m0 * t));
        g << ";method=series";
    } else {
        std::vector<double> ts;
        for (double t : t_grid)
            if (t <= 1.0) ts.push_back(t);
        if (ts.empty()) throw UsageError("calibrate_c0: Monte Carlo fallback needs times <= 1");
        std::sort(ts.begin(), ts.end());
        const std::vector<double> origin(d, 0.0);
        const auto est = survival_prob_mc({d, 1.0}, ts, origin, mc);
        for (std::size_t i = 0; i < ts.size(); ++i) c0 = std::max(c0, est[i].value * std::exp(m0 * ts[i]));
        g << ";method=mc-exit;paths=" << mc.n_paths << ";seed=" << mc.seed << ";t_used=" << list(ts);
    }
    return {"C0", d, c0, g.str(), utc_timestamp()};
}

}  // namespace hkb
