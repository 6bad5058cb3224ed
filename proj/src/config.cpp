#include "hkb/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace hkb {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end) throw UsageError("config: bad number for '" + key + "': " + s);
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end) throw UsageError("config: bad integer for '" + key + "': " + s);
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(parse_double(key, item));
    return out;
}

std::vector<Point> parse_points(const std::string& key, const std::string& s) {
    std::vector<Point> out;
    for (const auto& item : split(s, ';')) out.push_back(parse_list(key, item));
    return out;
}

}  // namespace

std::string to_string(OracleChoice o) {
    switch (o) {
        case OracleChoice::mc: return "mc";
        case OracleChoice::pde: return "pde";
        case OracleChoice::closed: return "closed";
    }
    return "closed";
}

OracleChoice parse_oracle(const std::string& s) {
    if (s == "mc") return OracleChoice::mc;
    if (s == "pde") return OracleChoice::pde;
    if (s == "closed") return OracleChoice::closed;
    throw UsageError("unknown oracle '" + s + "' (mc|pde|closed)");
}

ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "jsonl") return ReportFormat::jsonl;
    throw UsageError("unknown format '" + s + "' (csv|jsonl)");
}

HalfLinePiece parse_piece(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("config: piece must be kind:coef[:alpha], got " + s);
    HalfLinePiece p;
    if (parts[0] == "power") p.kind = PieceKind::power;
    else if (parts[0] == "decaying") p.kind = PieceKind::decaying;
    else if (parts[0] == "constant") p.kind = PieceKind::constant;
    else throw UsageError("config: unknown piece kind '" + parts[0] + "'");
    p.coef = parse_double("piece", parts[1]);
    p.alpha = parts.size() == 3 ? parse_double("piece", parts[2]) : 0.0;
    if (p.kind != PieceKind::constant && parts.size() != 3) throw UsageError("config: piece " + s + " needs an exponent");
    return p;
}

Potential PotentialSpec::build(int d) const {
    if (kind == "polynomial") return Potential::polynomial(d, k, alpha);
    if (kind == "logarithmic") return Potential::logarithmic(d, k, alpha);
    if (kind == "decaying") return Potential::decaying(d, k, alpha);
    if (kind == "constant") return Potential::constant(d, c);
    if (kind == "bounded_away") return Potential::bounded_away(d, kappa, r0);
    if (kind == "mixture") {
        if (d != 1) throw UsageError("config: mixture potentials need d = 1");
        return Potential::mixture_1d(left, right);
    }
    throw UsageError("config: unknown potential kind '" + kind + "'");
}

void ExperimentConfig::validate() const {
    if (d < 1) throw UsageError("config: d must be >= 1");
    if (t_grid.empty()) throw UsageError("config: empty t grid");
    for (double t : t_grid)
        if (!(t > 0.0)) throw UsageError("config: t values must be positive");
    if (x_points.empty()) throw UsageError("config: empty point grid");
    for (const auto* pts : {&x_points, &y_points})
        for (const auto& p : *pts)
            if (static_cast<int>(p.size()) != d) throw UsageError("config: point dimension does not match d");
    if (!(a > 1.0)) throw UsageError("config: a must exceed 1");
    if (mc_paths < 100 || mc_steps < 8) throw UsageError("config: mc_paths >= 100 and mc_steps >= 8 required");
    if (!(pde_spacing > 0.0) || !(pde_log_time_step > 0.0)) throw UsageError("config: PDE steps must be positive");
    if (lambda0 != "none" && lambda0 != "auto") parse_double("lambda0", lambda0);
    potential.build(d);
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string val = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, val).second) throw UsageError("config: duplicate key '" + key + "'");
    }

    bool have_y = false;
    for (const auto& [key, val] : kv) {
        if (key == "potential") cfg.potential.kind = val;
        else if (key == "d") cfg.d = static_cast<int>(parse_u64(key, val));
        else if (key == "k") cfg.potential.k = parse_double(key, val);
        else if (key == "alpha") cfg.potential.alpha = parse_double(key, val);
        else if (key == "kappa") cfg.potential.kappa = parse_double(key, val);
        else if (key == "r0") cfg.potential.r0 = parse_double(key, val);
        else if (key == "c") cfg.potential.c = parse_double(key, val);
        else if (key == "left") cfg.potential.left = parse_piece(val);
        else if (key == "right") cfg.potential.right = parse_piece(val);
        else if (key == "t") cfg.t_grid = parse_list(key, val);
        else if (key == "points" || key == "x") cfg.x_points = parse_points(key, val);
        else if (key == "y") {
            cfg.y_points = parse_points(key, val);
            have_y = true;
        } else if (key == "oracle") cfg.oracle = parse_oracle(val);
        else if (key == "mc_paths") cfg.mc_paths = parse_u64(key, val);
        else if (key == "mc_steps") cfg.mc_steps = parse_u64(key, val);
        else if (key == "pde_h") cfg.pde_spacing = parse_double(key, val);
        else if (key == "pde_dtau") cfg.pde_log_time_step = parse_double(key, val);
        else if (key == "a") cfg.a = parse_double(key, val);
        else if (key == "lambda0") cfg.lambda0 = val;
        else if (key == "mode") {
            if (val == "sandwich") cfg.mode = BoundMode::sandwich;
            else if (val == "upper-only") cfg.mode = BoundMode::upper_only;
            else throw UsageError("config: mode must be sandwich or upper-only");
        } else if (key == "constants") cfg.constants_path = val;
        else if (key == "out") cfg.out_dir = val;
        else if (key == "format") cfg.format = parse_format(val);
        else if (key == "seed") cfg.seed = parse_u64(key, val);
        else throw UsageError("config: unknown key '" + key + "'");
    }
    if ((kv.count("points") != 0) + (kv.count("x") != 0) > 1) throw UsageError("config: give either points or x");
    if (!have_y) cfg.y_points = cfg.x_points;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    return parse_config(in);
}

}  // namespace hkb
