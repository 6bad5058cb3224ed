#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hkb/potential.hpp"

namespace hkb {

enum class OracleMethod { mc_bridge, pde_1d, closed_form };
std::string to_string(OracleMethod m);

struct KernelEstimate {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    // log forms stay meaningful where the values underflow
    double log_value = 0.0;
    double log_ci_low = 0.0;
    double log_ci_high = 0.0;
    OracleMethod method = OracleMethod::closed_form;

    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double grid_spacing = 0.0;
    double time_step = 0.0;
    double domain_half_width = 0.0;
    std::uint64_t seed = 0;
};

struct BridgeMcOptions {
    std::size_t n_paths = 100000;
    std::size_t n_steps = 256;
    std::uint64_t seed = 1;
    bool antithetic = true;
    bool reverse = false;  // sample the reversed bridge y -> x with the same noise
    std::size_t chunk_pairs = 256;
};

// u_t(x,y) = g_t(x,y) E[exp(-int_0^t V(B_s) ds)] over the bridge from x to y,
// integral by the trapezoid rule on n_steps uniform intervals.
KernelEstimate fk_bridge_mc(const Potential& v, double t, std::span<const double> x, std::span<const double> y,
                            const BridgeMcOptions& opt);
KernelEstimate fk_bridge_mc_serial(const Potential& v, double t, std::span<const double> x,
                                   std::span<const double> y, const BridgeMcOptions& opt);

struct PdeOptions {
    double spacing = 0.02;        // grid step in xi = (z - y)/sqrt(s)
    double log_time_step = 0.005; // step in tau = log s
    double margin = 8.0;          // xi half-width beyond the largest requested |xi|
    double start_fraction = 1e-6; // s0 = start_fraction * min(t)
};

// Kernel u_s(., y) for d=1, solved for w = u/g_s(., y) in similarity variables.
class PdeSolution {
public:
    double y() const { return y_; }
    const std::vector<double>& times() const { return times_; }
    double spacing() const { return h_; }
    double half_width() const { return xi_max_; }
    double time_step() const { return dtau_; }

    // log u_t(x, y) for t one of times(); cubic interpolation in xi
    double log_value(std::size_t time_index, double x) const;
    KernelEstimate estimate(std::size_t time_index, double x) const;

private:
    friend PdeSolution pde_solve_1d(const Potential&, double, std::span<const double>, std::span<const double>,
                                    const PdeOptions&);
    double y_ = 0.0, h_ = 0.0, xi_max_ = 0.0, dtau_ = 0.0, log_s0_ = 0.0;
    std::vector<double> times_;
    std::vector<std::vector<double>> w_;  // per time, grid values of u/g
};

PdeSolution pde_solve_1d(const Potential& v, double y, std::span<const double> times, std::span<const double> xs,
                         const PdeOptions& opt = {});
KernelEstimate pde_kernel_1d(const Potential& v, double t, double x, double y, const PdeOptions& opt = {});

// zero, constant and harmonic (k|x|^2) potentials; empty otherwise
std::optional<KernelEstimate> closed_form(const Potential& v, double t, std::span<const double> x,
                                          std::span<const double> y);

enum class Lambda0Method { eigen_solver_1d, long_time_decay };
std::string to_string(Lambda0Method m);

struct Lambda0Estimate {
    double value = 0.0;
    Lambda0Method method = Lambda0Method::eigen_solver_1d;
    double error_indicator = 0.0;
    bool truncation_warning = false;
    double domain_half_width = 0.0;
    double spacing = 0.0;
};

struct Lambda0Options {
    double half_width = 0.0;  // 0 picks a width where V is large
    std::size_t cells = 4000;
};

Lambda0Estimate lambda0_estimate(const Potential& v, Lambda0Method method, const Lambda0Options& opt = {});

}  // namespace hkb
