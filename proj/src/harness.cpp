#include "hkb/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "hkb/special_functions.hpp"
#include "json.hpp"

namespace hkb {

namespace {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
}

std::string coords(const Point& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + format_double(p[i]);
    return s;
}

std::string json_num(double v) { return std::isfinite(v) ? format_double(v) : "\"" + format_double(v) + "\""; }

std::string json_pt(const Point& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + json_num(p[i]);
    return s + "]";
}

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

KernelEstimate failed_estimate() {
    KernelEstimate e;
    e.value = e.ci_low = e.ci_high = std::numeric_limits<double>::quiet_NaN();
    e.log_value = e.log_ci_low = e.log_ci_high = std::numeric_limits<double>::quiet_NaN();
    return e;
}

}  // namespace

std::vector<CalibratedConstant> run_calibration(const CalibrationOptions& opt) {
    if (opt.dims.empty()) throw UsageError("calibrate: empty dimension list");
    const auto lambdas = log_grid(1e-3, 1e4, opt.wendel_points);
    const auto radii = log_grid(1e-2, 1e2, opt.wendel_points);
    std::vector<CalibratedConstant> out;
    for (int d : opt.dims) {
        if (d < 1) throw UsageError("calibrate: dimensions must be positive");
        const WendelSweep w = wendel_sweep(d, lambdas, radii);
        std::ostringstream g;
        g << "lambda=log[1e-3,1e4]x" << opt.wendel_points << ";r=log[1e-2,1e2]x" << opt.wendel_points
          << ";worst_lambda=" << format_double(w.worst_lambda) << ";worst_r=" << format_double(w.worst_r);
        out.push_back({"C", d, w.C, g.str(), utc_timestamp()});
        out.push_back(calibrate_c0(d, opt.c0_t, opt.c0_mc));
        out.push_back(calibrate_ctilde(d, opt.ctilde));
    }
    return out;
}

std::optional<double> resolve_lambda0(const ExperimentConfig& cfg, const Potential& v) {
    if (cfg.lambda0 == "none") return std::nullopt;
    if (cfg.lambda0 != "auto") {
        double l = 0.0;
        const auto& s = cfg.lambda0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), l);
        if (ec != std::errc{} || p != s.data() + s.size() || l < 0.0)
            throw UsageError("lambda0 must be none, auto or a nonnegative number");
        return l;
    }
    if (const auto c = v.constant_value()) return *c;
    if (v.dim() > 1 && !v.is_radial()) throw UsageError("lambda0 = auto needs d = 1 or a radial potential");
    const Lambda0Estimate e = lambda0_estimate(v, Lambda0Method::eigen_solver_1d);
    // a truncated box overestimates the bottom of the spectrum for non-confining V
    if (e.truncation_warning) return std::nullopt;
    return std::max(0.0, e.value - e.error_indicator);
}

BoundConstants constants_for(const ExperimentConfig& cfg, const Potential& v) {
    BoundConstants c = [&] {
        if (!cfg.constants_path.empty()) return constants_from(read_constants(cfg.constants_path), cfg.d, cfg.a);
        CalibrationOptions opt;
        opt.dims = {cfg.d};
        return constants_from(run_calibration(opt), cfg.d, cfg.a);
    }();
    return c.with_lambda0(resolve_lambda0(cfg, v));
}

std::vector<GridPoint> grid_points(const ExperimentConfig& cfg) {
    std::vector<GridPoint> pts;
    for (double t : cfg.t_grid)
        for (const auto& x : cfg.x_points)
            for (const auto& y : cfg.y_points) pts.push_back({pts.size(), t, x, y});
    return pts;
}

std::vector<BoundEnvelope> run_bounds(const ExperimentConfig& cfg, const BoundConstants& c) {
    const Potential v = cfg.potential.build(cfg.d);
    const auto pts = grid_points(cfg);
    std::vector<BoundEnvelope> out(pts.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = envelope(c, v, pts[i].t, pts[i].x, pts[i].y, cfg.mode);
    return out;
}

std::vector<OracleRecord> run_oracle(const ExperimentConfig& cfg) {
    const Potential v = cfg.potential.build(cfg.d);
    const auto pts = grid_points(cfg);
    std::vector<OracleRecord> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out[i].point = pts[i];

    switch (cfg.oracle) {
        case OracleChoice::closed: {
#pragma omp parallel for schedule(dynamic)
            for (std::size_t i = 0; i < pts.size(); ++i) {
                try {
                    const auto e = closed_form(v, pts[i].t, pts[i].x, pts[i].y);
                    if (e) out[i].estimate = *e;
                    else out[i].error = "no closed form for " + v.describe();
                } catch (const std::exception& ex) {
                    out[i].error = ex.what();
                }
                if (!out[i].error.empty()) out[i].estimate = failed_estimate();
            }
            break;
        }
        case OracleChoice::pde: {
            // one solve per y serves every t and x
            std::vector<std::vector<std::size_t>> groups;
            std::map<Point, std::size_t> group_of;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                auto [it, fresh] = group_of.emplace(pts[i].y, groups.size());
                if (fresh) groups.emplace_back();
                groups[it->second].push_back(i);
            }
            PdeOptions popt;
            popt.spacing = cfg.pde_spacing;
            popt.log_time_step = cfg.pde_log_time_step;
#pragma omp parallel for schedule(dynamic)
            for (std::size_t g = 0; g < groups.size(); ++g) {
                const auto& idx = groups[g];
                try {
                    if (cfg.d != 1) throw UsageError("pde oracle needs d = 1");
                    std::vector<double> xs;
                    for (std::size_t i : idx) xs.push_back(pts[i].x[0]);
                    const PdeSolution sol = pde_solve_1d(v, pts[idx[0]].y[0], cfg.t_grid, xs, popt);
                    const auto& times = sol.times();
                    for (std::size_t i : idx) {
                        const auto ti = static_cast<std::size_t>(
                            std::lower_bound(times.begin(), times.end(), pts[i].t) - times.begin());
                        out[i].estimate = sol.estimate(ti, pts[i].x[0]);
                    }
                } catch (const std::exception& ex) {
                    for (std::size_t i : idx) {
                        out[i].error = ex.what();
                        out[i].estimate = failed_estimate();
                    }
                }
            }
            break;
        }
        case OracleChoice::mc: {
            // each estimate is parallel over path chunks
            BridgeMcOptions mopt;
            mopt.n_paths = cfg.mc_paths;
            mopt.n_steps = cfg.mc_steps;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                mopt.seed = mix_seed(cfg.seed, pts[i].index);
                try {
                    out[i].estimate = fk_bridge_mc(v, pts[i].t, pts[i].x, pts[i].y, mopt);
                } catch (const std::exception& ex) {
                    out[i].error = ex.what();
                    out[i].estimate = failed_estimate();
                    out[i].estimate.seed = mopt.seed;
                }
            }
            break;
        }
    }
    return out;
}

SandwichResult run_sandwich(const ExperimentConfig& cfg, const BoundConstants& c) {
    cfg.validate();
    if (c.d() != cfg.d) throw UsageError("constants were calibrated for a different dimension");
    const Potential v = cfg.potential.build(cfg.d);
    const auto env = run_bounds(cfg, c);
    const auto est = run_oracle(cfg);
    SandwichResult res;
    res.records.reserve(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
        const auto& e = env[i];
        const auto& o = est[i];
        VerificationRecord r;
        r.d = cfg.d;
        r.potential = v.describe();
        r.t = e.t;
        r.x = e.x;
        r.y = e.y;
        r.lower = e.lower;
        r.upper = e.upper;
        r.log_lower = e.log_lower;
        r.log_upper = e.log_upper;
        r.regime = to_string(e.regime);
        r.lower_enabled = e.lower_enabled;
        r.exact_profiles = e.exact_profiles;
        r.constants_hash = e.constants_hash;
        r.estimate = o.estimate.value;
        r.ci_low = o.estimate.ci_low;
        r.ci_high = o.estimate.ci_high;
        r.log_estimate = o.estimate.log_value;
        r.log_ci_low = o.estimate.log_ci_low;
        r.log_ci_high = o.estimate.log_ci_high;
        r.method = o.error.empty() ? to_string(o.estimate.method) : to_string(cfg.oracle);
        r.seed = cfg.oracle == OracleChoice::mc ? mix_seed(cfg.seed, o.point.index) : 0;
        r.error = o.error;
        judge(r);
        res.records.push_back(std::move(r));
    }
    res.summary = summarize(res.records);
    return res;
}

SandwichResult run_sandwich(const ExperimentConfig& cfg) {
    cfg.validate();
    return run_sandwich(cfg, constants_for(cfg, cfg.potential.build(cfg.d)));
}

std::string envelope_csv_header() { return "d,t,x,y,lower,upper,log_lower,log_upper,regime,exact_profiles,constants_hash"; }

std::string envelope_to_csv(const BoundEnvelope& e, int d) {
    std::ostringstream os;
    os << d << ',' << format_double(e.t) << ',' << coords(e.x) << ',' << coords(e.y) << ',' << format_double(e.lower)
       << ',' << format_double(e.upper) << ',' << format_double(e.log_lower) << ',' << format_double(e.log_upper) << ','
       << to_string(e.regime) << ',' << (e.exact_profiles ? "exact" : "sampled") << ',' << e.constants_hash;
    return os.str();
}

std::string envelope_to_jsonl(const BoundEnvelope& e, int d, const std::string& potential) {
    std::ostringstream os;
    os << "{\"d\":" << d << ",\"potential\":" << quoted(potential) << ",\"t\":" << json_num(e.t)
       << ",\"x\":" << json_pt(e.x) << ",\"y\":" << json_pt(e.y) << ",\"lower\":" << json_num(e.lower)
       << ",\"upper\":" << json_num(e.upper) << ",\"log_lower\":" << json_num(e.log_lower)
       << ",\"log_upper\":" << json_num(e.log_upper) << ",\"regime\":" << quoted(to_string(e.regime))
       << ",\"lower_enabled\":" << (e.lower_enabled ? "true" : "false")
       << ",\"exact_profiles\":" << (e.exact_profiles ? "true" : "false")
       << ",\"constants_hash\":" << quoted(e.constants_hash) << '}';
    return os.str();
}

std::string estimate_csv_header() {
    return "d,t,x,y,estimate,ci_low,ci_high,log_estimate,method,n_paths,n_steps,grid_spacing,time_step,"
           "domain_half_width,seed,error";
}

std::string estimate_to_csv(const OracleRecord& r, int d) {
    const auto& e = r.estimate;
    std::ostringstream os;
    os << d << ',' << format_double(r.point.t) << ',' << coords(r.point.x) << ',' << coords(r.point.y) << ','
       << format_double(e.value) << ',' << format_double(e.ci_low) << ',' << format_double(e.ci_high) << ','
       << format_double(e.log_value) << ',' << to_string(e.method) << ',' << e.n_paths << ',' << e.n_steps << ','
       << format_double(e.grid_spacing) << ',' << format_double(e.time_step) << ','
       << format_double(e.domain_half_width) << ',' << e.seed << ',' << quoted(r.error);
    return os.str();
}

std::string estimate_to_jsonl(const OracleRecord& r, int d, const std::string& potential) {
    const auto& e = r.estimate;
    std::ostringstream os;
    os << "{\"d\":" << d << ",\"potential\":" << quoted(potential) << ",\"t\":" << json_num(r.point.t)
       << ",\"x\":" << json_pt(r.point.x) << ",\"y\":" << json_pt(r.point.y) << ",\"value\":" << json_num(e.value)
       << ",\"ci_low\":" << json_num(e.ci_low) << ",\"ci_high\":" << json_num(e.ci_high)
       << ",\"log_value\":" << json_num(e.log_value) << ",\"log_ci_low\":" << json_num(e.log_ci_low)
       << ",\"log_ci_high\":" << json_num(e.log_ci_high) << ",\"method\":" << quoted(to_string(e.method))
       << ",\"n_paths\":" << e.n_paths << ",\"n_steps\":" << e.n_steps
       << ",\"grid_spacing\":" << json_num(e.grid_spacing) << ",\"time_step\":" << json_num(e.time_step)
       << ",\"domain_half_width\":" << json_num(e.domain_half_width) << ",\"seed\":" << e.seed
       << ",\"error\":" << quoted(r.error) << '}';
    return os.str();
}

}  // namespace hkb
