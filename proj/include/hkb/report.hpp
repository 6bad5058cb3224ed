#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hkb/common.hpp"
#include "hkb/config.hpp"

namespace hkb {

enum class Verdict { pass, fail, warn_sampled_profile, error };
std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

struct VerificationRecord {
    int d = 1;
    std::string potential;
    double t = 0.0;
    Point x, y;

    double lower = 0.0, upper = 0.0;
    double log_lower = 0.0, log_upper = 0.0;
    std::string regime;
    bool lower_enabled = true;
    bool exact_profiles = true;
    std::string constants_hash;

    double estimate = 0.0, ci_low = 0.0, ci_high = 0.0;
    double log_estimate = 0.0, log_ci_low = 0.0, log_ci_high = 0.0;
    std::string method;
    std::uint64_t seed = 0;

    Verdict verdict = Verdict::pass;
    std::string failed_side;  // lower | upper | both, empty on pass
    // log(estimate/lower) and log(upper/estimate)
    double log_margin_lower = std::numeric_limits<double>::infinity();
    double log_margin_upper = std::numeric_limits<double>::infinity();
    std::string error;

    bool operator==(const VerificationRecord&) const;
};

// Fills verdict, failed_side and margins from the envelope and estimate fields.
void judge(VerificationRecord& r);

struct Summary {
    std::size_t pass = 0, fail = 0, warn = 0, error = 0;
    double worst_log_margin_lower = std::numeric_limits<double>::infinity();
    double worst_log_margin_upper = std::numeric_limits<double>::infinity();

    bool all_pass() const { return fail == 0 && error == 0; }
    std::string line() const;  // pass=N fail=M warn=K
};

Summary summarize(const std::vector<VerificationRecord>& records);

std::string csv_header();
std::string to_csv(const VerificationRecord& r);
std::string to_jsonl(const VerificationRecord& r);
VerificationRecord record_from_jsonl(const std::string& line);

struct ReportFiles {
    std::string report, plot_data, summary;
};

// Writes report.{csv,jsonl}, plot_data.dat and summary.txt under dir.
// Throws std::runtime_error when the directory or a file cannot be written.
ReportFiles emit_report(const std::vector<VerificationRecord>& records, ReportFormat format, const std::string& dir);

}  // namespace hkb
