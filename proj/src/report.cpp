#include "hkb/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hkb {

namespace {

using nlohmann::json;

std::string join_coords(const Point& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + format_double(p[i]);
    return s;
}

// JSON has no infinities, so non-finite values travel as strings.
std::string json_number(double v) {
    return std::isfinite(v) ? format_double(v) : "\"" + format_double(v) + "\"";
}

std::string json_point(const Point& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + json_number(p[i]);
    return s + "]";
}

double read_number(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw std::runtime_error("record: bad number " + s);
    }
    return j.get<double>();
}

Point read_point(const json& j) {
    Point p;
    for (const auto& v : j) p.push_back(read_number(v));
    return p;
}

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::warn_sampled_profile: return "warn-sampled-profile";
        case Verdict::error: return "error";
    }
    return "error";
}

Verdict parse_verdict(const std::string& s) {
    if (s == "pass") return Verdict::pass;
    if (s == "fail") return Verdict::fail;
    if (s == "warn-sampled-profile") return Verdict::warn_sampled_profile;
    if (s == "error") return Verdict::error;
    throw std::runtime_error("unknown verdict " + s);
}

bool VerificationRecord::operator==(const VerificationRecord& o) const {
    auto pts_equal = [](const Point& a, const Point& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!same(a[i], b[i])) return false;
        return true;
    };
    return d == o.d && potential == o.potential && same(t, o.t) && pts_equal(x, o.x) && pts_equal(y, o.y) &&
           same(lower, o.lower) && same(upper, o.upper) && same(log_lower, o.log_lower) &&
           same(log_upper, o.log_upper) && regime == o.regime && lower_enabled == o.lower_enabled &&
           exact_profiles == o.exact_profiles && constants_hash == o.constants_hash && same(estimate, o.estimate) &&
           same(ci_low, o.ci_low) && same(ci_high, o.ci_high) && same(log_estimate, o.log_estimate) &&
           same(log_ci_low, o.log_ci_low) && same(log_ci_high, o.log_ci_high) && method == o.method &&
           seed == o.seed && verdict == o.verdict && failed_side == o.failed_side &&
           same(log_margin_lower, o.log_margin_lower) && same(log_margin_upper, o.log_margin_upper) &&
           error == o.error;
}

void judge(VerificationRecord& r) {
    r.failed_side.clear();
    if (!r.error.empty() || std::isnan(r.log_estimate) || std::isnan(r.log_ci_low) || std::isnan(r.log_ci_high)) {
        r.verdict = Verdict::error;
        r.log_margin_lower = r.log_margin_upper = std::numeric_limits<double>::quiet_NaN();
        if (r.error.empty()) r.error = "oracle returned nan";
        return;
    }
    r.log_margin_lower = r.lower_enabled ? r.log_estimate - r.log_lower : std::numeric_limits<double>::infinity();
    r.log_margin_upper = r.log_upper - r.log_estimate;
    const bool lower_ok = !r.lower_enabled || r.log_lower <= r.log_ci_high;
    const bool upper_ok = r.log_ci_low <= r.log_upper;
    if (lower_ok && upper_ok) {
        r.verdict = Verdict::pass;
        return;
    }
    r.failed_side = !lower_ok && !upper_ok ? "both" : (!lower_ok ? "lower" : "upper");
    r.verdict = r.exact_profiles ? Verdict::fail : Verdict::warn_sampled_profile;
}

std::string Summary::line() const {
    return "pass=" + std::to_string(pass) + " fail=" + std::to_string(fail) + " warn=" + std::to_string(warn);
}

Summary summarize(const std::vector<VerificationRecord>& records) {
    Summary s;
    for (const auto& r : records) {
        switch (r.verdict) {
            case Verdict::pass: ++s.pass; break;
            case Verdict::fail: ++s.fail; break;
            case Verdict::warn_sampled_profile: ++s.warn; break;
            case Verdict::error: ++s.error; break;
        }
        if (r.verdict == Verdict::error) continue;
        s.worst_log_margin_lower = std::min(s.worst_log_margin_lower, r.log_margin_lower);
        s.worst_log_margin_upper = std::min(s.worst_log_margin_upper, r.log_margin_upper);
    }
    return s;
}

std::string csv_header() { return "d,t,x,y,lower,estimate,ci_low,ci_high,upper,regime,verdict"; }

std::string to_csv(const VerificationRecord& r) {
    std::ostringstream os;
    os << r.d << ',' << format_double(r.t) << ',' << join_coords(r.x) << ',' << join_coords(r.y) << ','
       << format_double(r.lower) << ',' << format_double(r.estimate) << ',' << format_double(r.ci_low) << ','
       << format_double(r.ci_high) << ',' << format_double(r.upper) << ',' << r.regime << ','
       << to_string(r.verdict);
    return os.str();
}

std::string to_jsonl(const VerificationRecord& r) {
    std::ostringstream os;
    auto str = [](const std::string& s) { return json(s).dump(); };
    os << "{\"d\":" << r.d << ",\"potential\":" << str(r.potential) << ",\"t\":" << json_number(r.t)
       << ",\"x\":" << json_point(r.x) << ",\"y\":" << json_point(r.y) << ",\"lower\":" << json_number(r.lower)
       << ",\"upper\":" << json_number(r.upper) << ",\"log_lower\":" << json_number(r.log_lower)
       << ",\"log_upper\":" << json_number(r.log_upper) << ",\"regime\":" << str(r.regime)
       << ",\"lower_enabled\":" << (r.lower_enabled ? "true" : "false")
       << ",\"exact_profiles\":" << (r.exact_profiles ? "true" : "false")
       << ",\"constants_hash\":" << str(r.constants_hash) << ",\"estimate\":" << json_number(r.estimate)
       << ",\"ci_low\":" << json_number(r.ci_low) << ",\"ci_high\":" << json_number(r.ci_high)
       << ",\"log_estimate\":" << json_number(r.log_estimate) << ",\"log_ci_low\":" << json_number(r.log_ci_low)
       << ",\"log_ci_high\":" << json_number(r.log_ci_high) << ",\"method\":" << str(r.method)
       << ",\"seed\":" << r.seed << ",\"verdict\":" << str(to_string(r.verdict))
       << ",\"failed_side\":" << str(r.failed_side) << ",\"log_margin_lower\":" << json_number(r.log_margin_lower)
       << ",\"log_margin_upper\":" << json_number(r.log_margin_upper) << ",\"error\":" << str(r.error) << '}';
    return os.str();
}

VerificationRecord record_from_jsonl(const std::string& line) {
    const json j = json::parse(line);
    VerificationRecord r;
    r.d = j.at("d").get<int>();
    r.potential = j.at("potential").get<std::string>();
    r.t = read_number(j.at("t"));
    r.x = read_point(j.at("x"));
    r.y = read_point(j.at("y"));
    r.lower = read_number(j.at("lower"));
    r.upper = read_number(j.at("upper"));
    r.log_lower = read_number(j.at("log_lower"));
    r.log_upper = read_number(j.at("log_upper"));
    r.regime = j.at("regime").get<std::string>();
    r.lower_enabled = j.at("lower_enabled").get<bool>();
    r.exact_profiles = j.at("exact_profiles").get<bool>();
    r.constants_hash = j.at("constants_hash").get<std::string>();
    r.estimate = read_number(j.at("estimate"));
    r.ci_low = read_number(j.at("ci_low"));
    r.ci_high = read_number(j.at("ci_high"));
    r.log_estimate = read_number(j.at("log_estimate"));
    r.log_ci_low = read_number(j.at("log_ci_low"));
    r.log_ci_high = read_number(j.at("log_ci_high"));
    r.method = j.at("method").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.verdict = parse_verdict(j.at("verdict").get<std::string>());
    r.failed_side = j.at("failed_side").get<std::string>();
    r.log_margin_lower = read_number(j.at("log_margin_lower"));
    r.log_margin_upper = read_number(j.at("log_margin_upper"));
    r.error = j.at("error").get<std::string>();
    return r;
}

ReportFiles emit_report(const std::vector<VerificationRecord>& records, ReportFormat format, const std::string& dir) {
    if (records.empty()) throw UsageError("emit_report: no records");
    namespace fs = std::filesystem;
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec || !fs::is_directory(root)) throw std::runtime_error("cannot create output directory " + dir);

    std::string body;
    if (format == ReportFormat::csv) {
        body = csv_header() + "\n";
        for (const auto& r : records) body += to_csv(r) + "\n";
    } else {
        for (const auto& r : records) body += to_jsonl(r) + "\n";
    }

    // one block per (x, y) slice, rows ordered by t
    std::vector<std::pair<Point, Point>> slices;
    std::map<std::pair<Point, Point>, std::vector<const VerificationRecord*>> by_slice;
    for (const auto& r : records) {
        auto key = std::make_pair(r.x, r.y);
        auto& rows = by_slice[key];
        if (rows.empty()) slices.push_back(key);
        rows.push_back(&r);
    }
    std::string plot = "# t lower estimate ci_low ci_high upper\n";
    for (const auto& key : slices) {
        auto rows = by_slice[key];
        std::stable_sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->t < b->t; });
        plot += "\n# x=" + join_coords(key.first) + " y=" + join_coords(key.second) + "\n";
        for (const auto* r : rows)
            plot += format_double(r->t) + " " + format_double(r->lower) + " " + format_double(r->estimate) + " " +
                    format_double(r->ci_low) + " " + format_double(r->ci_high) + " " + format_double(r->upper) + "\n";
    }

    const Summary s = summarize(records);
    std::string summary = s.line() + "\n";
    summary += "error=" + std::to_string(s.error) + "\n";
    summary += "worst_log_margin_lower=" + format_double(s.worst_log_margin_lower) + "\n";
    summary += "worst_log_margin_upper=" + format_double(s.worst_log_margin_upper) + "\n";

    ReportFiles files;
    files.report = (root / (format == ReportFormat::csv ? "report.csv" : "report.jsonl")).string();
    files.plot_data = (root / "plot_data.dat").string();
    files.summary = (root / "summary.txt").string();
    write_file(files.report, body);
    write_file(files.plot_data, plot);
    write_file(files.summary, summary);
    return files;
}

}  // namespace hkb
