#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hkb/common.hpp"

namespace hkb {

struct BallSpec {
    int d = 1;
    double r = 1.0;
};

struct EigenMode {
    int index = 0;           // k for d=1 (k >= 1), n for the radial d=3 family
    double eigenvalue = 0.0; // of -Laplacian on B_r
};

struct EigenSeries {
    std::vector<EigenMode> modes;
    std::size_t truncation = 0;
    double tail_bound = 0.0;  // bound on the dropped part of the density series at time t
};

// Modes used by the density series at time t: d=1 sine family, d=3 radial family.
EigenSeries ball_eigen_series(const BallSpec& ball, double t, std::size_t truncation);

// Transition density of Brownian motion killed on leaving B_r.
// d=1: any x, y; d=3: x or y at the centre. Zero outside the open ball.
double killed_density(const BallSpec& ball, double t, std::span<const double> x, std::span<const double> y);
double log_killed_density(const BallSpec& ball, double t, std::span<const double> x, std::span<const double> y);

// P_x(t < tau_{B_r}); d in {1,3}.
double survival_prob(const BallSpec& ball, double t, std::span<const double> x);

struct McEstimate {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_paths = 0;
};

struct ExitTimeOptions {
    std::size_t n_paths = 100000;
    double dt = 0.0;  // coarse step; 0 selects 1e-3 r^2
    std::vector<double> lambdas;
    std::uint64_t seed = 1;
    std::size_t chunk_size = 1024;
};

struct LaplaceEstimate {
    double lambda = 0.0;
    double value = 0.0;  // extrapolated
    double ci_low = 0.0;
    double ci_high = 0.0;
    double coarse = 0.0;
    double fine = 0.0;
};

struct ExitTimeResult {
    double mean = 0.0;  // extrapolated 2 E_fine - E_coarse
    double ci_low = 0.0;
    double ci_high = 0.0;
    double mean_coarse = 0.0;
    double mean_fine = 0.0;
    double dt_coarse = 0.0;
    double dt_fine = 0.0;
    std::size_t n_paths = 0;
    std::vector<LaplaceEstimate> laplace;
};

// Euler paths of the process run to first exit; the fine level uses dt/4 on
// the same path and both levels are combined to cancel the sqrt(dt) bias.
ExitTimeResult exit_time_mc(const BallSpec& ball, std::span<const double> start, const ExitTimeOptions& opt);
ExitTimeResult exit_time_mc_serial(const BallSpec& ball, std::span<const double> start, const ExitTimeOptions& opt);

// Survival probabilities at each t (ascending) from the same coupled paths.
std::vector<McEstimate> survival_prob_mc(const BallSpec& ball, std::span<const double> t_grid,
                                         std::span<const double> start, const ExitTimeOptions& opt);

// Killed density from bridge paths with a half-space crossing correction per step.
McEstimate killed_density_mc(const BallSpec& ball, double t, std::span<const double> x, std::span<const double> y,
                             std::size_t n_paths, std::size_t n_steps, std::uint64_t seed);

// log of g^B_t(x,y) / [ (1 ^ (r-|x|)(r-|y|)/t) / (1 ^ r^2/t)^{(d+2)/2} e^{-mu0 t/r^2} g_t(x,y) ]
double log_ctilde_ratio(const BallSpec& ball, double t, std::span<const double> x, std::span<const double> y,
                        double log_killed);

struct CalibratedConstant {
    std::string name;  // "C0", "Ctilde", "C"
    int d = 1;
    double value = 1.0;
    std::string grid;
    std::string timestamp;
};

struct CTildeGrid {
    std::vector<double> t{0.1, 0.3, 1.0, 3.0, 10.0};
    std::vector<double> r{1.0, 2.0};
    int mesh = 9;  // interior points per axis, spaced 0.2 r for mesh=9
    std::size_t mc_paths = 20000;
    std::size_t mc_steps = 64;
    std::uint64_t seed = 7;
};

CalibratedConstant calibrate_ctilde(int d, const CTildeGrid& grid);
CalibratedConstant calibrate_c0(int d, std::span<const double> t_grid, const ExitTimeOptions& mc = {});

}  // namespace hkb
