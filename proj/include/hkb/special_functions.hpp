#pragma once

#include <cstddef>
#include <span>

namespace hkb {

// log I_nu(u) for nu >= -1/2, u > 0, from the ascending series summed
// outward from its largest term.
double log_bessel_i(double nu, double u);

// I_nu(u); throws std::overflow_error when the value is not representable.
double bessel_i(double nu, double u);

// J_nu(x) from the ascending series (long double), intended for x <= 12.
double bessel_j(double nu, double x);

struct Mu0 {
    int d = 0;
    double value = 0.0;
};

// Principal Dirichlet eigenvalue of -Laplacian on the unit ball, 1 <= d <= 10.
Mu0 dirichlet_mu0(int d);
double mu0(int d);

// E_0[exp(-lambda tau)] for the exit time of B_r.
double wendel_laplace(int d, double lambda, double r);
double log_wendel_laplace(int d, double lambda, double r);

bool wendel_upper_check(int d, double lambda, double r, double C);

struct WendelSweep {
    double C = 1.0;  // smallest C >= 1 valid on the grid
    double worst_lambda = 0.0;
    double worst_r = 0.0;
    std::size_t n_points = 0;
};

WendelSweep wendel_sweep(int d, std::span<const double> lambdas, std::span<const double> radii);

}  // namespace hkb
