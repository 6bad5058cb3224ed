// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "hkb/harness.hpp"
#include "hkb/special_functions.hpp"

namespace fs = std::filesystem;
using hkb::Potential;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

void fail(Outcome& o, const std::string& what) {
    if (o.ok) o.detail = what;
    o.ok = false;
}

std::string fmt(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
    return g;
}

std::vector<hkb::Point> line_points(std::initializer_list<double> xs) {
    std::vector<hkb::Point> p;
    for (double x : xs) p.push_back({x});
    return p;
}

hkb::BoundConstants calibrated_d1() {
    hkb::CalibrationOptions opt;
    opt.dims = {1};
    return hkb::constants_from(hkb::run_calibration(opt), 1);
}

// first positive zero of J_{d/2-1}; J_{-1/2} has zeros at odd multiples of pi/2
double bessel_zero_oracle(int d) {
    const double nu = 0.5 * d - 1.0;
    if (nu < 0.0) return 0.5 * std::numbers::pi;
    double lo = 0.5, hi = 0.5;
    while (std::cyl_bessel_j(nu, hi) > 0.0) hi += 0.25;
    lo = hi - 0.25;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::cyl_bessel_j(nu, mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Outcome special_function_goldens() {
    Outcome o;
    const double golden[3] = {2.4674011, 5.7831860, 9.8696044};
    for (int d = 1; d <= 3; ++d) {
        const double v = hkb::dirichlet_mu0(d).value;
        const double j = bessel_zero_oracle(d);
        if (std::fabs(v - j * j) > 1e-8) fail(o, "mu0(" + std::to_string(d) + ")=" + fmt(v) + " vs zero oracle");
        // printed goldens are rounded to 7 decimals
        if (std::fabs(v - golden[d - 1]) > 5e-8) fail(o, "mu0(" + std::to_string(d) + ")=" + fmt(v));
    }
    const double w = hkb::wendel_laplace(1, 1.0, 1.0);
    if (std::fabs(w - 1.0 / std::cosh(1.0)) > 1e-10) fail(o, "wendel(1,1,1)=" + fmt(w));
    if (o.ok) o.detail = "mu0(3)=" + fmt(hkb::mu0(3));
    return o;
}

Outcome wendel_sweep() {
    Outcome o;
    const auto lambdas = log_grid(1e-3, 1e4, 20), radii = log_grid(1e-2, 1e2, 20);
    std::string cs;
    for (int d = 1; d <= 3; ++d) {
        const auto s = hkb::wendel_sweep(d, lambdas, radii);
        if (!(s.C <= 4.0)) fail(o, "C(" + std::to_string(d) + ")=" + fmt(s.C));
        cs += (d > 1 ? " " : "") + std::string("C") + std::to_string(d) + "=" + fmt(s.C);
    }
    if (o.ok) o.detail = cs;
    return o;
}

Outcome exit_time() {
    Outcome o;
    double worst_laplace = 0.0, worst_mean = 0.0;
    for (int d : {1, 3}) {
        for (double r : {0.5, 1.0, 2.0}) {
            hkb::ExitTimeOptions opt;
            opt.n_paths = 100000;
            opt.lambdas = {0.5, 1.0, 4.0};
            opt.seed = hkb::mix_seed(11, static_cast<std::uint64_t>(d * 10 + r * 2));
            const std::vector<double> start(d, 0.0);
            const auto res = hkb::exit_time_mc({d, r}, start, opt);
            const double mean = r * r / (2.0 * d);
            const double em = std::fabs(res.mean - mean) / mean;
            worst_mean = std::max(worst_mean, em);
            if (em > 0.01) fail(o, "mean d=" + std::to_string(d) + " r=" + fmt(r) + " rel=" + fmt(em));
            for (const auto& l : res.laplace) {
                const double w = hkb::wendel_laplace(d, l.lambda, r);
                const double el = std::fabs(l.value - w) / w;
                worst_laplace = std::max(worst_laplace, el);
                if (el > 0.02) fail(o, "laplace d=" + std::to_string(d) + " r=" + fmt(r) + " rel=" + fmt(el));
            }
        }
    }
    if (o.ok) o.detail = "worst laplace rel=" + fmt(worst_laplace) + " worst mean rel=" + fmt(worst_mean);
    return o;
}

Outcome killed_ball_calibration() {
    Outcome o;
    const auto ct = hkb::calibrate_ctilde(1, hkb::CTildeGrid{});
    if (!(ct.value > 0.0)) fail(o, "Ctilde=" + fmt(ct.value));
    const std::vector<double> ts{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    const auto c0 = hkb::calibrate_c0(1, ts);
    const double target = 4.0 / std::numbers::pi;
    if (!(c0.value >= target - 0.01 && c0.value <= target + 0.05)) fail(o, "C0=" + fmt(c0.value));
    if (o.ok) o.detail = "Ctilde=" + fmt(ct.value) + " C0=" + fmt(c0.value);
    return o;
}

Outcome oracle_agreement() {
    Outcome o;
    const std::vector<double> ts{0.1, 1.0, 4.0}, xs{-2.0, -1.0, 0.0, 1.0, 2.0};
    double worst_mc = 0.0, worst_pde = 0.0;
    std::uint64_t stream = 0;
    for (const auto& v : {Potential::constant(1, 0.0), Potential::constant(1, 1.0), Potential::polynomial(1, 1.0, 2.0)}) {
        for (double y : xs) {
            const auto pde = hkb::pde_solve_1d(v, y, ts, xs);
            for (std::size_t i = 0; i < ts.size(); ++i) {
                for (double x : xs) {
                    const double xa[1] = {x}, ya[1] = {y};
                    const double exact = hkb::closed_form(v, ts[i], xa, ya)->value;
                    const double ep = std::fabs(pde.estimate(i, x).value - exact) / exact;
                    worst_pde = std::max(worst_pde, ep);
                    if (ep > 1e-3) fail(o, "pde " + v.describe() + " t=" + fmt(ts[i]) + " rel=" + fmt(ep));
                    hkb::BridgeMcOptions opt;
                    opt.n_paths = 100000;
                    opt.n_steps = 256;
                    opt.seed = hkb::mix_seed(5, stream++);
                    const auto mc = hkb::fk_bridge_mc(v, ts[i], xa, ya, opt);
                    const double w = mc.ci_high - mc.ci_low;
                    const double dev = std::fabs(mc.value - exact);
                    if (w > 0.0) worst_mc = std::max(worst_mc, dev / w);
                    if (dev > 3.0 * w) fail(o, "mc " + v.describe() + " t=" + fmt(ts[i]) + " dev=" + fmt(dev / w) + "w");
                }
            }
        }
    }
    const double o0[1] = {0.0};
    const double mehler = hkb::closed_form(Potential::polynomial(1, 1.0, 2.0), 1.0, o0, o0)->value;
    if (std::fabs(mehler - 0.2094770) > 1e-5) fail(o, "mehler=" + fmt(mehler));
    if (o.ok)
        o.detail = "worst mc=" + fmt(worst_mc) + " CI widths, worst pde rel=" + fmt(worst_pde) + ", mehler=" +
                   hkb::format_double(mehler);
    return o;
}

hkb::ExperimentConfig suite_config() {
    hkb::ExperimentConfig cfg;
    cfg.d = 1;
    cfg.t_grid = {0.1, 0.5, 1.0, 5.0, 20.0};
    cfg.x_points = line_points({0.0, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0});
    cfg.y_points = cfg.x_points;
    cfg.oracle = hkb::OracleChoice::pde;
    return cfg;
}

Outcome sandwich_suite() {
    Outcome o;
    const auto base = calibrated_d1();
    std::size_t total = 0, passed = 0, part1 = 0, part2 = 0;
    for (double k : {1.0, 2.0}) {
        for (double alpha : {1.0, 2.0, 4.0}) {
            auto cfg = suite_config();
            cfg.potential.kind = "polynomial";
            cfg.potential.k = k;
            cfg.potential.alpha = alpha;
            cfg.lambda0 = "auto";
            const auto v = cfg.potential.build(1);
            const auto res = hkb::run_sandwich(cfg, base.with_lambda0(hkb::resolve_lambda0(cfg, v)));
            for (const auto& r : res.records) {
                ++total;
                (r.regime == "part1" ? part1 : part2) += 1;
                if (r.verdict == hkb::Verdict::pass) ++passed;
                else fail(o, v.describe() + " t=" + fmt(r.t) + " x=" + fmt(r.x[0]) + " y=" + fmt(r.y[0]) + " " +
                              hkb::to_string(r.verdict) + " " + r.failed_side);
            }
        }
    }
    if (part1 == 0 || part2 == 0) fail(o, "regimes part1=" + std::to_string(part1) + " part2=" + std::to_string(part2));
    const std::string counts = std::to_string(passed) + "/" + std::to_string(total) + " pass, part1=" +
                               std::to_string(part1) + " part2=" + std::to_string(part2);
    o.detail = o.ok ? counts : o.detail + " (" + counts + ")";
    return o;
}

Outcome upper_only_suite() {
    Outcome o;
    const auto c = calibrated_d1();
    std::vector<hkb::PotentialSpec> specs;
    for (double alpha : {1.0, 3.0}) {
        hkb::PotentialSpec s;
        s.kind = "decaying";
        s.alpha = alpha;
        specs.push_back(s);
    }
    hkb::PotentialSpec floor;
    floor.kind = "bounded_away";
    floor.kappa = 1.0;
    floor.r0 = 1.0;
    specs.push_back(floor);
    using hkb::PieceKind;
    const std::pair<hkb::HalfLinePiece, hkb::HalfLinePiece> mixes[4] = {
        {{PieceKind::power, 1.0, 2.0}, {PieceKind::power, 1.0, 1.0}},
        {{PieceKind::decaying, 1.0, 3.0}, {PieceKind::decaying, 1.0, 1.0}},
        {{PieceKind::power, 1.0, 2.0}, {PieceKind::decaying, 1.0, 1.0}},
        {{PieceKind::power, 1.0, 1.0}, {PieceKind::constant, 1.0, 0.0}}};
    for (const auto& [l, r] : mixes) {
        hkb::PotentialSpec s;
        s.kind = "mixture";
        s.left = l;
        s.right = r;
        specs.push_back(s);
    }
    std::size_t total = 0, passed = 0;
    for (const auto& spec : specs) {
        auto cfg = suite_config();
        cfg.potential = spec;
        cfg.mode = hkb::BoundMode::upper_only;
        const auto res = hkb::run_sandwich(cfg, c);
        for (const auto& r : res.records) {
            ++total;
            if (r.verdict == hkb::Verdict::pass) ++passed;
            else fail(o, r.potential + " t=" + fmt(r.t) + " x=" + fmt(r.x[0]) + " y=" + fmt(r.y[0]) + " " +
                          hkb::to_string(r.verdict));
        }
    }
    // decaying example envelope against the generic rate, |x| >= 1
    std::size_t dec_checked = 0;
    for (double alpha : {1.0, 3.0}) {
        const auto v = Potential::decaying(1, 1.0, alpha);
        for (double t : suite_config().t_grid) {
            for (double x : {1.0, -1.0, 2.0, -2.0, 4.0, -4.0}) {
                const double xa[1] = {x};
                const double h_dec = *hkb::example_envelopes(v, c, t, xa).H_tilde;
                const double e_dec = -std::log(h_dec);
                const double e_gen = -hkb::rate_H(c, v, t, xa).log_value;
                const double vs = hkb::lower_profile(v, xa).value, r = std::fabs(x);
                const double e_gen0 = std::sqrt(2.0) / 32.0 * std::min(vs * t, 2.0 * r * std::sqrt(vs));
                ++dec_checked;
                if (e_dec > e_gen * (1.0 + 1e-12)) fail(o, "dec envelope beats rate_H at t=" + fmt(t) + " x=" + fmt(x));
                // the factor form is only stated for alpha < 2; beyond that the envelope is 1
                const bool factor_ok = alpha < 2.0 ? e_dec >= std::pow(2.0 / 3.0, alpha) * e_gen0 * (1.0 - 1e-12)
                                                   : h_dec == 1.0;
                if (!factor_ok) fail(o, "dec envelope alpha=" + fmt(alpha) + " t=" + fmt(t) + " x=" + fmt(x));
            }
        }
    }
    const std::string counts =
        std::to_string(passed) + "/" + std::to_string(total) + " upper pass, dec checks=" + std::to_string(dec_checked);
    o.detail = o.ok ? counts : o.detail + " (" + counts + ")";
    return o;
}

Outcome formula_properties() {
    Outcome o;
    const auto c = calibrated_d1();
    const std::vector<Potential> pots{Potential::polynomial(1, 1.0, 2.0), Potential::polynomial(1, 2.0, 1.0),
                                      Potential::logarithmic(1, 1.0, 1.0), Potential::decaying(1, 1.0, 1.0),
                                      Potential::bounded_away(1, 1.0, 1.0)};
    const auto ts = log_grid(1e-3, 50.0, 40);
    std::size_t checks = 0;
    for (const auto& v : pots) {
        for (double x : {0.0, 0.5, -1.0, 2.0, -4.0, 7.0}) {
            const double xa[1] = {x};
            const double rho = 1.0 + std::fabs(x);
            double prev_H = 1.0, prev_h = 1.0, prev_K = 1.0;
            for (double t : ts) {
                const double H = hkb::rate_H(c, v, t, xa).value(), h = hkb::rate_h(c, v, t, xa).value();
                const double K = hkb::rate_K(c, v, t, rho).value();
                for (double q : {H, h, K})
                    if (!(q > 0.0 && q <= 1.0)) fail(o, "rate outside (0,1] for " + v.describe());
                if (H > prev_H || h > prev_h || K > prev_K) fail(o, "rate increases in t for " + v.describe());
                prev_H = H;
                prev_h = h;
                prev_K = K;
                checks += 3;
            }
            const double up = hkb::upper_profile(v, rho).value;
            const double s = up + c.mu0() / (4.0 * rho * rho);
            const double t4 = 4.0 * hkb::threshold_t_rho(c, v, rho);
            if (std::fabs(s * t4 - 2.0 * rho * std::sqrt(s)) > 1e-12 * 2.0 * rho * std::sqrt(s))
                fail(o, "K branches differ at 4 t_rho for " + v.describe());
            for (double y : {0.0, 1.0, -3.0}) {
                const double ya[1] = {y};
                for (double t : {0.05, 1.0, 10.0}) {
                    const auto a = hkb::envelope(c, v, t, xa, ya), b = hkb::envelope(c, v, t, ya, xa);
                    if (a.log_upper != b.log_upper || a.log_lower != b.log_lower)
                        fail(o, "asymmetric bound for " + v.describe());
                    ++checks;
                }
            }
        }
    }
    const auto zero = Potential::constant(1, 0.0);
    std::size_t grid = 0;
    for (double t : log_grid(1e-2, 1e2, 10))
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const double xa[1] = {-4.5 + i}, ya[1] = {-4.5 + j};
                const auto e = hkb::envelope(c, zero, t, xa, ya);
                const double lg = hkb::log_gauss_kernel(1, t, xa, ya);
                if (!(e.log_lower <= lg && lg <= e.log_upper)) fail(o, "zero potential sandwich at t=" + fmt(t));
                ++grid;
            }
    if (hkb::lambda0_estimate(Potential::constant(1, 0.75), hkb::Lambda0Method::eigen_solver_1d).value != 0.75)
        fail(o, "lambda0 constant");
    const double l1 = hkb::lambda0_estimate(Potential::polynomial(1, 1.0, 2.0), hkb::Lambda0Method::eigen_solver_1d).value;
    if (std::fabs(l1 - 1.0) > 1e-3) fail(o, "lambda0 x^2=" + fmt(l1));
    const double l2 = hkb::lambda0_estimate(Potential::polynomial(2, 1.0, 2.0), hkb::Lambda0Method::eigen_solver_1d).value;
    if (std::fabs(l2 - 2.0) > 1e-2) fail(o, "lambda0 |x|^2 d=2=" + fmt(l2));
    if (o.ok)
        o.detail = std::to_string(checks) + " rate/symmetry checks, " + std::to_string(grid) +
                   " zero-potential points, lambda0 x^2=" + fmt(l1) + " |x|^2=" + fmt(l2);
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "hkb_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const std::string format : {"csv", "jsonl"}) {
        const fs::path cfg = dir / ("verify_" + format + ".cfg");
        std::ofstream(cfg) << "potential = polynomial\nk = 1\nalpha = 4\nt = 0.1, 1, 5\npoints = -2; 0; 1.5\n"
                              "oracle = mc\nmc_paths = 5000\nmc_steps = 64\nseed = 42\nformat = "
                           << format << "\n";
        for (const std::string run : {"a", "b"}) {
            const std::string cmd = std::string(HKB_CLI_PATH) + " verify --config " + cfg.string() + " --out " +
                                    (dir / (format + run)).string() + " > " + (dir / "log.txt").string() + " 2>&1";
            if (std::system(cmd.c_str()) != 0) fail(o, "verify run " + format + run + " did not pass");
        }
        for (const std::string name : {"report." + format, std::string("plot_data.dat"), std::string("summary.txt")}) {
            const std::string a = slurp(dir / (format + "a") / name), b = slurp(dir / (format + "b") / name);
            if (a.empty() || a != b) fail(o, format + " " + name + " differs between runs");
        }
    }
    if (o.ok) o.detail = "csv and jsonl reports byte-identical";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        double budget_s;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, 1.0, special_function_goldens}, {2, 5.0, wendel_sweep},
        {3, 120.0, exit_time},              {4, 10.0, killed_ball_calibration},
        {5, 300.0, oracle_agreement},       {6, 120.0, sandwich_suite},
        {7, 600.0, upper_only_suite},       {8, 30.0, formula_properties},
        {9, 600.0, determinism}};
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_s) fail(o, "runtime " + fmt(secs) + " s over budget " + fmt(c.budget_s) + " s");
        std::printf("criterion %d: %s [%.2f s] %s\n", c.id, o.ok ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        if (!o.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
