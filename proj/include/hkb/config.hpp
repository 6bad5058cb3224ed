#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "hkb/bounds.hpp"
#include "hkb/common.hpp"
#include "hkb/potential.hpp"

namespace hkb {

enum class OracleChoice { mc, pde, closed };
enum class ReportFormat { csv, jsonl };

std::string to_string(OracleChoice o);
OracleChoice parse_oracle(const std::string& s);
ReportFormat parse_format(const std::string& s);

struct PotentialSpec {
    std::string kind = "constant";  // polynomial | logarithmic | decaying | constant | bounded_away | mixture
    double k = 1.0, alpha = 1.0, c = 0.0, kappa = 0.0, r0 = 0.0;
    HalfLinePiece left{}, right{};

    Potential build(int d) const;
};

struct ExperimentConfig {
    PotentialSpec potential;
    int d = 1;
    std::vector<double> t_grid;
    std::vector<Point> x_points;
    std::vector<Point> y_points;  // defaults to x_points

    OracleChoice oracle = OracleChoice::closed;
    std::size_t mc_paths = 100000;
    std::size_t mc_steps = 256;
    double pde_spacing = 0.02;
    double pde_log_time_step = 0.005;

    double a = 2.0;
    std::string lambda0 = "none";  // none | auto | <number>
    BoundMode mode = BoundMode::sandwich;

    std::string constants_path;  // empty: calibrate on the fly
    std::string out_dir = "out";
    ReportFormat format = ReportFormat::csv;
    std::uint64_t seed = 1;

    void validate() const;
};

// Flat "key = value" text, '#' starts a comment. Lists use ',' between numbers
// and ';' between points.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

HalfLinePiece parse_piece(const std::string& s);  // kind:coef[:alpha]

}  // namespace hkb
