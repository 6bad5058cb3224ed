#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hkb/harness.hpp"

namespace fs = std::filesystem;

namespace {

hkb::ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return hkb::parse_config(in);
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hkb_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// calibrated values for d = 1..3 (Wendel C from the 20x20 sweep)
std::vector<hkb::CalibratedConstant> table() {
    std::vector<hkb::CalibratedConstant> t;
    const double C[3] = {1.1397475212666333, 1.307519303277795, 1.5045783348848356};
    const double C0[3] = {1.2732395447351674, 1.6207136772197879, 2.0000000000000853};
    const double Ct[3] = {0.78916972579181277, 1.0, 1.0};
    for (int d = 1; d <= 3; ++d) {
        t.push_back({"C", d, C[d - 1], "test", "2026-01-01T00:00:00Z"});
        t.push_back({"C0", d, C0[d - 1], "test", "2026-01-01T00:00:00Z"});
        t.push_back({"Ctilde", d, Ct[d - 1], "test", "2026-01-01T00:00:00Z"});
    }
    return t;
}

hkb::VerificationRecord record(double log_lower, double log_est, double half_width, double log_upper) {
    hkb::VerificationRecord r;
    r.log_lower = log_lower;
    r.log_upper = log_upper;
    r.log_estimate = log_est;
    r.log_ci_low = log_est - half_width;
    r.log_ci_high = log_est + half_width;
    r.lower = std::exp(log_lower);
    r.upper = std::exp(log_upper);
    r.estimate = std::exp(log_est);
    hkb::judge(r);
    return r;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse(
        "# harmonic test\n"
        "potential = polynomial\n"
        "d = 2\n"
        "k = 1.5   # coefficient\n"
        "alpha = 2\n"
        "t = 0.1, 1, 4\n"
        "points = 0, 0; 1, -1\n"
        "oracle = mc\n"
        "mode = upper-only\n"
        "seed = 9\n"
        "lambda0 = auto\n");
    CHECK(cfg.d == 2);
    CHECK(cfg.t_grid == std::vector<double>{0.1, 1.0, 4.0});
    REQUIRE(cfg.x_points.size() == 2);
    CHECK(cfg.x_points[1] == hkb::Point{1.0, -1.0});
    CHECK(cfg.y_points == cfg.x_points);
    CHECK(cfg.oracle == hkb::OracleChoice::mc);
    CHECK(cfg.mode == hkb::BoundMode::upper_only);
    CHECK(cfg.seed == 9);
    CHECK(cfg.potential.build(2).describe() == hkb::Potential::polynomial(2, 1.5, 2.0).describe());

    const auto mix = parse("potential = mixture\nleft = power:1:2\nright = constant:1\nt = 1\nx = -1; 1\ny = 0\n");
    CHECK(mix.x_points.size() == 2);
    CHECK(mix.y_points.size() == 1);
    CHECK(mix.potential.build(1).eval_1d(-2.0) == doctest::Approx(4.0));
    CHECK(mix.potential.build(1).eval_1d(2.0) == 1.0);
}

TEST_CASE("config errors are usage errors") {
    const std::string base = "potential = constant\nc = 1\nt = 1\npoints = 0\n";
    CHECK_NOTHROW(parse(base));
    CHECK_THROWS_AS(parse(base + "t = 2\n"), hkb::UsageError);
    CHECK_THROWS_AS(parse(base + "colour = red\n"), hkb::UsageError);
    CHECK_THROWS_AS(parse(base + "oracle = exact\n"), hkb::UsageError);
    CHECK_THROWS_AS(parse(base + "a = 1\n"), hkb::UsageError);
    CHECK_THROWS_AS(parse(base + "mc_steps = 4\n"), hkb::UsageError);
    CHECK_THROWS_AS(parse(base + "lambda0 = lots\n"), hkb::UsageError);
    CHECK_THROWS_AS(parse(base + "d = 2\n"), hkb::UsageError);
    CHECK_THROWS_AS(parse(base + "just some words\n"), hkb::UsageError);
    CHECK_THROWS_AS(parse("potential = constant\nt = -1\npoints = 0\n"), hkb::UsageError);
    CHECK_THROWS_AS(parse("potential = mixture\nleft = power:1\nright = power:1:1\nt = 1\npoints = 0\n"),
                    hkb::UsageError);
    CHECK_THROWS_AS(hkb::load_config("/nonexistent/config.txt"), hkb::UsageError);
}

TEST_CASE("verdict logic") {
    CHECK(record(-2.0, -1.0, 0.1, 0.0).verdict == hkb::Verdict::pass);
    // the CI rescues an estimate just below the lower bound
    CHECK(record(-1.05, -1.1, 0.1, 0.0).verdict == hkb::Verdict::pass);
    const auto low = record(-0.5, -1.0, 0.1, 0.0);
    CHECK(low.verdict == hkb::Verdict::fail);
    CHECK(low.failed_side == "lower");
    CHECK(low.log_margin_lower == doctest::Approx(-0.5));
    const auto high = record(-2.0, 0.5, 0.1, 0.0);
    CHECK(high.failed_side == "upper");
    CHECK(record(1.0, 0.5, 0.1, 0.0).failed_side == "both");

    auto upper_only = record(5.0, -1.0, 0.1, 0.0);
    CHECK(upper_only.verdict == hkb::Verdict::fail);
    upper_only.lower_enabled = false;
    hkb::judge(upper_only);
    CHECK(upper_only.verdict == hkb::Verdict::pass);

    auto sampled = record(-2.0, 0.5, 0.1, 0.0);
    sampled.exact_profiles = false;
    hkb::judge(sampled);
    CHECK(sampled.verdict == hkb::Verdict::warn_sampled_profile);

    auto broken = record(-2.0, NAN, 0.1, 0.0);
    CHECK(broken.verdict == hkb::Verdict::error);
    CHECK_FALSE(broken.error.empty());

    const auto s = hkb::summarize({record(-2.0, -1.0, 0.1, 0.0), low, sampled, broken});
    CHECK(s.line() == "pass=1 fail=1 warn=1");
    CHECK(s.error == 1);
    CHECK_FALSE(s.all_pass());
    CHECK(s.worst_log_margin_lower == doctest::Approx(-0.5));
}

TEST_CASE("report serialization round trips") {
    auto r = record(-2.0, -1.0, 0.1, 0.0);
    r.d = 2;
    r.potential = "polynomial(d=2;k=1;alpha=2)";
    r.t = 0.1;
    r.x = {0.1, -3.0};
    r.y = {1.0 / 3.0, 2.0};
    r.regime = "part2";
    r.constants_hash = "0123456789abcdef";
    r.method = "mc-bridge";
    r.seed = 1234567890123ULL;
    CHECK(hkb::record_from_jsonl(hkb::to_jsonl(r)) == r);
    r.lower_enabled = false;
    hkb::judge(r);
    CHECK(hkb::record_from_jsonl(hkb::to_jsonl(r)) == r);
    CHECK(hkb::to_jsonl(r).find("\"inf\"") != std::string::npos);

    CHECK(hkb::csv_header() == "d,t,x,y,lower,estimate,ci_low,ci_high,upper,regime,verdict");
    const std::string row = hkb::to_csv(r);
    CHECK(std::count(row.begin(), row.end(), ',') == 10);
    CHECK(row.find("0.10000000000000001 -3") != std::string::npos);

    for (auto v : {hkb::Verdict::pass, hkb::Verdict::fail, hkb::Verdict::warn_sampled_profile, hkb::Verdict::error})
        CHECK(hkb::parse_verdict(hkb::to_string(v)) == v);
    CHECK(hkb::to_string(hkb::Verdict::warn_sampled_profile) == "warn-sampled-profile");
}

TEST_CASE("emit_report writes the three files") {
    const auto dir = scratch_dir("emit");
    std::vector<hkb::VerificationRecord> rs;
    for (double t : {1.0, 0.5}) {
        auto r = record(-2.0, -1.0, 0.1, 0.0);
        r.t = t;
        r.x = {0.0};
        r.y = {1.0};
        rs.push_back(r);
    }
    const auto files = hkb::emit_report(rs, hkb::ReportFormat::csv, dir.string());
    const std::string report = slurp(files.report);
    CHECK(report.rfind(hkb::csv_header() + "\n", 0) == 0);
    const std::string plot = slurp(files.plot_data);
    CHECK(plot.find("0.5 ") < plot.find("1 "));
    CHECK(slurp(files.summary).rfind("pass=2 fail=0 warn=0\n", 0) == 0);
    CHECK_THROWS_AS(hkb::emit_report(rs, hkb::ReportFormat::jsonl, "/proc/hkb_cannot_write"), std::runtime_error);
    CHECK_THROWS_AS(hkb::emit_report({}, hkb::ReportFormat::csv, dir.string()), hkb::UsageError);
}

TEST_CASE("constants files round trip") {
    const auto dir = scratch_dir("constants");
    const auto path = (dir / "constants.jsonl").string();
    hkb::write_constants(path, table());
    const auto back = hkb::read_constants(path);
    REQUIRE(back.size() == 9);
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].name == table()[i].name);
        CHECK(back[i].value == table()[i].value);
        CHECK(back[i].timestamp == table()[i].timestamp);
    }
    const auto c = hkb::constants_from(back, 2);
    CHECK(c.C() == table()[3].value);
    CHECK(c.d() == 2);
    CHECK_THROWS_AS(hkb::constants_from(back, 4), hkb::UsageError);
}

TEST_CASE("lambda0 resolution") {
    auto cfg = parse("potential = polynomial\nk = 1\nalpha = 2\nt = 1\npoints = 0\n");
    const auto v = cfg.potential.build(1);
    CHECK_FALSE(hkb::resolve_lambda0(cfg, v));
    cfg.lambda0 = "0.5";
    CHECK(*hkb::resolve_lambda0(cfg, v) == 0.5);
    cfg.lambda0 = "auto";
    const double l0 = *hkb::resolve_lambda0(cfg, v);
    CHECK(l0 <= 1.0);
    CHECK(l0 > 0.99);
    const auto dec = hkb::Potential::decaying(1, 1.0, 1.0);
    CHECK_FALSE(hkb::resolve_lambda0(cfg, dec));
}

TEST_CASE("grid order is t, then x, then y") {
    const auto cfg = parse("potential = constant\nc = 1\nt = 2, 1\nx = -1; 1\ny = 0; 3; 4\n");
    const auto pts = hkb::grid_points(cfg);
    REQUIRE(pts.size() == 12);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i].index == i);
    CHECK(pts[0].t == 2.0);
    CHECK(pts[5].t == 2.0);
    CHECK(pts[6].t == 1.0);
    CHECK(pts[1].x[0] == -1.0);
    CHECK(pts[1].y[0] == 3.0);
    CHECK(pts[3].x[0] == 1.0);
}

TEST_CASE("sandwich runs with closed-form oracles") {
    const auto cs = table();
    for (int d = 1; d <= 3; ++d) {
        std::string pts = d == 1 ? "-2; -1; 0; 1; 2" : (d == 2 ? "0, 0; 1, -1; 2, 0" : "0, 0, 0; 1, 0, -1; 0, 2, 0");
        for (const std::string& pot : {std::string("constant\nc = 0"), std::string("polynomial\nk = 1\nalpha = 2")}) {
            const auto cfg = parse("potential = " + pot + "\nd = " + std::to_string(d) +
                                   "\nt = 0.1, 1, 4\npoints = " + pts + "\nlambda0 = auto\n");
            const auto v = cfg.potential.build(d);
            const auto c = hkb::constants_from(cs, d).with_lambda0(hkb::resolve_lambda0(cfg, v));
            const auto res = hkb::run_sandwich(cfg, c);
            CHECK(res.summary.all_pass());
            CHECK(res.summary.warn == 0);
            CHECK(res.records.size() == cfg.t_grid.size() * cfg.x_points.size() * cfg.y_points.size());
            for (const auto& r : res.records) {
                CHECK(r.method == "closed-form");
                CHECK(r.constants_hash == c.hash());
            }
        }
    }
}

TEST_CASE("upper-only run with the Monte Carlo oracle is deterministic") {
    const auto cfg = parse(
        "potential = decaying\nk = 1\nalpha = 1\nt = 0.5, 2\npoints = -1; 0; 2\n"
        "mode = upper-only\noracle = mc\nmc_paths = 2000\nmc_steps = 64\nseed = 3\n");
    const auto c = hkb::constants_from(table(), 1);
    const auto a = hkb::run_sandwich(cfg, c);
    const auto b = hkb::run_sandwich(cfg, c);
    CHECK(a.summary.all_pass());
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i] == b.records[i]);
        CHECK_FALSE(a.records[i].lower_enabled);
    }
    // distinct points get distinct seeds
    CHECK(a.records[0].seed != a.records[1].seed);
    auto other = cfg;
    other.seed = 4;
    CHECK(hkb::run_sandwich(other, c).records[0].estimate != a.records[0].estimate);
}

TEST_CASE("clear verdicts survive a finer oracle") {
    // records more than 5 CI widths inside the envelope keep their verdict with 4x the paths
    const auto cfg = parse(
        "potential = polynomial\nk = 1\nalpha = 4\nt = 0.5, 2\npoints = -1; 0; 1\n"
        "oracle = mc\nmc_paths = 2000\nmc_steps = 64\n");
    const auto c = hkb::constants_from(table(), 1);
    const auto coarse = hkb::run_sandwich(cfg, c);
    auto finer_cfg = cfg;
    finer_cfg.mc_paths *= 4;
    const auto fine = hkb::run_sandwich(finer_cfg, c);
    std::size_t clear = 0;
    for (std::size_t i = 0; i < coarse.records.size(); ++i) {
        const auto& r = coarse.records[i];
        const double w = r.log_ci_high - r.log_ci_low;
        if (std::min(r.log_margin_lower, r.log_margin_upper) > 5.0 * w) {
            ++clear;
            CHECK(fine.records[i].verdict == r.verdict);
        }
    }
    CHECK(clear > 0);
}

TEST_CASE("PDE oracle inside the harness") {
    const auto cfg = parse("potential = polynomial\nk = 2\nalpha = 4\nt = 0.1, 1\npoints = -2; 0; 1\noracle = pde\n");
    const auto res = hkb::run_sandwich(cfg, hkb::constants_from(table(), 1));
    CHECK(res.summary.all_pass());
    for (const auto& r : res.records) {
        CHECK(r.method == "pde-1d");
        CHECK(r.ci_low == r.ci_high);
    }
    const auto bad = parse("potential = polynomial\nd = 2\nt = 1\npoints = 0, 0\noracle = pde\n");
    const auto res2 = hkb::run_sandwich(bad, hkb::constants_from(table(), 2));
    CHECK(res2.summary.error == 1);
    CHECK(res2.records[0].verdict == hkb::Verdict::error);
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch_dir("cli");
    const std::string cli = HKB_CLI_PATH;
    const auto cpath = dir / "constants.jsonl";
    hkb::write_constants(cpath.string(), table());
    const auto cfg = dir / "good.cfg";
    std::ofstream(cfg) << "potential = polynomial\nk = 1\nalpha = 2\nt = 0.5, 2\npoints = -1; 0; 1\nconstants = "
                       << cpath.string() << "\n";
    auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("verify --config " + cfg.string() + " --out " + (dir / "out").string()) == 0);
    CHECK(slurp(dir / "out" / "summary.txt").rfind("pass=18 fail=0 warn=0", 0) == 0);
    CHECK(run("bounds --config " + cfg.string() + " --format jsonl --out " + (dir / "b").string()) == 0);
    CHECK(fs::exists(dir / "b" / "bounds.jsonl"));
    CHECK(run("oracle --config " + cfg.string() + " --out " + (dir / "o").string()) == 0);
    CHECK(fs::exists(dir / "o" / "oracle.csv"));
    CHECK(run("verify --config " + (dir / "missing.cfg").string()) == 2);
    CHECK(run("verify --config " + cfg.string() + " --a 0.5") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("verify --config " + cfg.string() + " --out /proc/hkb_no") == 3);
    CHECK(run("catalog") == 0);

    // an envelope that cannot hold: lambda0 far above the truth forces the diagonal branch under the kernel
    const auto wrong = dir / "wrong.cfg";
    std::ofstream(wrong) << "potential = polynomial\nk = 1\nalpha = 2\nt = 20\npoints = 0\nlambda0 = 5\nconstants = "
                         << cpath.string() << "\n";
    CHECK(run("verify --config " + wrong.string() + " --out " + (dir / "w").string()) == 1);
}
