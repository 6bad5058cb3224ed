// hkb: heat-kernel bound experiments from the command line.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hkb/harness.hpp"
#include "hkb/special_functions.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format, out, oracle;
    std::optional<double> a;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--format", o.format, "csv | jsonl");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--a", o.a, "Gaussian tuning parameter a > 1");
    cmd->add_option("--oracle", o.oracle, "mc | pde | closed");
}

hkb::ExperimentConfig load(const Overrides& o) {
    hkb::ExperimentConfig cfg = hkb::load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.format) cfg.format = hkb::parse_format(*o.format);
    if (o.out) cfg.out_dir = *o.out;
    if (o.a) cfg.a = *o.a;
    if (o.oracle) cfg.oracle = hkb::parse_oracle(*o.oracle);
    cfg.validate();
    return cfg;
}

void write_lines(const std::string& dir, const std::string& name, const std::string& body) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    if (!out) throw std::runtime_error("write failed for " + path.string());
    std::cout << "wrote " << path.string() << '\n';
}

std::vector<int> parse_dims(const std::string& s) {
    std::vector<int> dims;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const int d = std::stoi(item, &used);
            if (used != item.size() || d < 1) throw std::invalid_argument(item);
            dims.push_back(d);
        } catch (const std::exception&) {
            throw hkb::UsageError("bad dimension '" + item + "'");
        }
    }
    if (dims.empty()) throw hkb::UsageError("empty dimension list");
    return dims;
}

int cmd_constants(const std::string& constants_path) {
    std::cout << "# Dirichlet ground energy mu0(d) of the unit ball\n";
    for (int d = 1; d <= 10; ++d) std::cout << "d=" << d << " mu0=" << hkb::format_double(hkb::mu0(d)) << '\n';
    if (!constants_path.empty()) {
        std::cout << "# calibrated constants from " << constants_path << '\n';
        for (const auto& c : hkb::read_constants(constants_path))
            std::cout << c.name << " d=" << c.d << " value=" << hkb::format_double(c.value) << " grid=" << c.grid
                      << " timestamp=" << c.timestamp << '\n';
    }
    return 0;
}

int cmd_calibrate(const std::string& dims, const std::string& out_dir, std::size_t wendel_points) {
    hkb::CalibrationOptions opt;
    opt.dims = parse_dims(dims);
    opt.wendel_points = wendel_points;
    const auto constants = hkb::run_calibration(opt);
    std::string body;
    for (const auto& c : constants) {
        body += hkb::constant_to_json(c) + "\n";
        std::cout << c.name << " d=" << c.d << " value=" << hkb::format_double(c.value) << '\n';
    }
    write_lines(out_dir, "constants.jsonl", body);
    return 0;
}

int cmd_bounds(const Overrides& o) {
    const auto cfg = load(o);
    const hkb::Potential v = cfg.potential.build(cfg.d);
    const auto c = hkb::constants_for(cfg, v);
    const auto env = hkb::run_bounds(cfg, c);
    std::string body;
    if (cfg.format == hkb::ReportFormat::csv) {
        body = hkb::envelope_csv_header() + "\n";
        for (const auto& e : env) body += hkb::envelope_to_csv(e, cfg.d) + "\n";
    } else {
        for (const auto& e : env) body += hkb::envelope_to_jsonl(e, cfg.d, v.describe()) + "\n";
    }
    write_lines(cfg.out_dir, cfg.format == hkb::ReportFormat::csv ? "bounds.csv" : "bounds.jsonl", body);
    return 0;
}

int cmd_oracle(const Overrides& o) {
    const auto cfg = load(o);
    const hkb::Potential v = cfg.potential.build(cfg.d);
    const auto est = hkb::run_oracle(cfg);
    std::string body;
    bool any_error = false;
    if (cfg.format == hkb::ReportFormat::csv) body = hkb::estimate_csv_header() + "\n";
    for (const auto& r : est) {
        any_error = any_error || !r.error.empty();
        body += (cfg.format == hkb::ReportFormat::csv ? hkb::estimate_to_csv(r, cfg.d)
                                                      : hkb::estimate_to_jsonl(r, cfg.d, v.describe())) +
                "\n";
    }
    write_lines(cfg.out_dir, cfg.format == hkb::ReportFormat::csv ? "oracle.csv" : "oracle.jsonl", body);
    return any_error ? kExitFail : 0;
}

int cmd_verify(const Overrides& o) {
    const auto cfg = load(o);
    const auto res = hkb::run_sandwich(cfg);
    const auto files = hkb::emit_report(res.records, cfg.format, cfg.out_dir);
    std::cout << res.summary.line() << '\n';
    if (res.summary.error) std::cout << "error=" << res.summary.error << '\n';
    std::cout << "report: " << files.report << '\n';
    return res.summary.all_pass() ? 0 : kExitFail;
}

int cmd_catalog() {
    std::cout << "polynomial     k|x|^alpha                      keys: d, k, alpha\n"
                 "logarithmic    log^alpha(2 + k|x|)             keys: d, k, alpha\n"
                 "decaying       k (1 v |x|)^-alpha              keys: d, k, alpha\n"
                 "constant       c                               keys: d, c\n"
                 "bounded_away   kappa on |x| >= r0, else 0      keys: d, kappa, r0\n"
                 "mixture        d=1, separate half-line pieces  keys: left, right = power|decaying|constant:coef[:alpha]\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat kernel bounds for Schroedinger semigroups"};
    app.require_subcommand(1);

    std::string constants_path;
    auto* constants = app.add_subcommand("constants", "print the mu0 table and calibrated constants");
    constants->add_option("--constants", constants_path, "constants file to print")->check(CLI::ExistingFile);

    std::string dims = "1", cal_out = "out";
    std::size_t wendel_points = 100;
    auto* calibrate = app.add_subcommand("calibrate", "calibrate C, C0 and Ctilde");
    calibrate->add_option("--dims", dims, "comma separated dimensions");
    calibrate->add_option("--out", cal_out, "output directory");
    calibrate->add_option("--wendel-points", wendel_points, "Wendel sweep points per axis")->check(CLI::Range(2, 100000));

    Overrides bounds_o, oracle_o, verify_o;
    auto* bounds = app.add_subcommand("bounds", "evaluate the envelopes on the config grid");
    add_common(bounds, bounds_o);
    auto* oracle = app.add_subcommand("oracle", "estimate the kernel on the config grid");
    add_common(oracle, oracle_o);
    auto* verify = app.add_subcommand("verify", "check lower <= kernel <= upper on the config grid");
    add_common(verify, verify_o);
    auto* catalog = app.add_subcommand("catalog", "list potential kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*constants) return cmd_constants(constants_path);
        if (*calibrate) return cmd_calibrate(dims, cal_out, wendel_points);
        if (*bounds) return cmd_bounds(bounds_o);
        if (*oracle) return cmd_oracle(oracle_o);
        if (*verify) return cmd_verify(verify_o);
        if (*catalog) return cmd_catalog();
    } catch (const hkb::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
