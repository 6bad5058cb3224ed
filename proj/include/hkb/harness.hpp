#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hkb/bounds.hpp"
#include "hkb/config.hpp"
#include "hkb/dirichlet_ball.hpp"
#include "hkb/oracles.hpp"
#include "hkb/report.hpp"

namespace hkb {

// Constants file: one JSON object per line, {name, d, value, grid, timestamp}.
void write_constants(const std::string& path, const std::vector<CalibratedConstant>& constants);
std::vector<CalibratedConstant> read_constants(const std::string& path);
std::string constant_to_json(const CalibratedConstant& c);
CalibratedConstant constant_from_json(const std::string& line);

struct CalibrationOptions {
    std::vector<int> dims{1};
    CTildeGrid ctilde{};
    std::vector<double> c0_t{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    ExitTimeOptions c0_mc{};
    std::size_t wendel_points = 100;  // per axis, log-spaced
};

// C (Wendel sweep), C0 and Ctilde for every requested dimension.
std::vector<CalibratedConstant> run_calibration(const CalibrationOptions& opt);

// Latest C, C0, Ctilde for d; throws UsageError when one is missing.
BoundConstants constants_from(const std::vector<CalibratedConstant>& table, int d, double a = 2.0);

// Resolves the lambda0 setting of cfg for v (none | auto | number).
std::optional<double> resolve_lambda0(const ExperimentConfig& cfg, const Potential& v);

// Constants for cfg: from cfg.constants_path, or calibrated on the fly.
BoundConstants constants_for(const ExperimentConfig& cfg, const Potential& v);

struct GridPoint {
    std::size_t index = 0;  // canonical order: t outermost, then x, then y
    double t = 0.0;
    Point x, y;
};
std::vector<GridPoint> grid_points(const ExperimentConfig& cfg);

struct OracleRecord {
    GridPoint point;
    KernelEstimate estimate;
    std::string error;
};

std::vector<BoundEnvelope> run_bounds(const ExperimentConfig& cfg, const BoundConstants& c);
std::vector<OracleRecord> run_oracle(const ExperimentConfig& cfg);

struct SandwichResult {
    std::vector<VerificationRecord> records;
    Summary summary;
};

SandwichResult run_sandwich(const ExperimentConfig& cfg, const BoundConstants& c);
SandwichResult run_sandwich(const ExperimentConfig& cfg);

std::string envelope_csv_header();
std::string envelope_to_csv(const BoundEnvelope& e, int d);
std::string envelope_to_jsonl(const BoundEnvelope& e, int d, const std::string& potential);
std::string estimate_csv_header();
std::string estimate_to_csv(const OracleRecord& r, int d);
std::string estimate_to_jsonl(const OracleRecord& r, int d, const std::string& potential);

}  // namespace hkb
