#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hkb/common.hpp"

namespace hkb {

enum class PotentialKind { polynomial, logarithmic, decaying, constant, bounded_away, mixture_1d, custom };

// One side of a 1-D mixture, as a function of |x|:
//   power    coef * |x|^alpha
//   decaying coef * (1 v |x|)^-alpha
//   constant coef
enum class PieceKind { power, decaying, constant };

struct HalfLinePiece {
    PieceKind kind = PieceKind::constant;
    double coef = 0.0;
    double alpha = 1.0;

    double at(double r) const;  // r = |x| >= 0
};

enum class ProfileRigor { exact, sampled_lower, sampled_upper };

std::string to_string(ProfileRigor r);
std::string to_string(PotentialKind k);

struct ProfileEstimate {
    double value = 0.0;
    ProfileRigor rigor = ProfileRigor::exact;
    std::size_t sample_count = 0;
    int refinement_depth = 0;

    bool exact() const { return rigor == ProfileRigor::exact; }
};

struct SamplingControl {
    std::size_t n_samples = 4096;
    int refine_rounds = 3;
    bool force_sampling = false;  // ignore analytic profiles
};

class Potential {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    static Potential polynomial(int d, double k, double alpha);   // k|x|^alpha
    static Potential logarithmic(int d, double k, double alpha);  // log^alpha(2 + k|x|)
    static Potential decaying(int d, double k, double alpha);     // k(1 v |x|)^-alpha
    static Potential constant(int d, double c);
    static Potential bounded_away(int d, double kappa, double r0);  // kappa * 1{|x| >= r0}
    static Potential mixture_1d(HalfLinePiece left, HalfLinePiece right);  // x >= 0 uses right
    static Potential custom(int d, Evaluator f, std::string name, bool confining = false);

    int dim() const { return d_; }
    PotentialKind kind() const { return kind_; }
    double k() const { return k_; }
    double alpha() const { return alpha_; }
    double kappa() const { return kappa_; }
    double r0() const { return r0_; }
    double c() const { return c_; }
    const HalfLinePiece& left() const { return left_; }
    const HalfLinePiece& right() const { return right_; }

    double operator()(std::span<const double> x) const;  // checks dimension
    double eval_unchecked(const double* x) const;
    double eval_1d(double x) const;
    double radial(double r) const;  // requires is_radial()

    bool is_radial() const;
    bool is_confining() const;
    std::optional<double> constant_value() const;
    bool is_zero() const;
    bool is_harmonic() const;  // polynomial with alpha = 2

    std::string describe() const;

    // Analytic profiles; empty when the kind has none.
    std::optional<double> exact_lower_profile(std::span<const double> x) const;
    std::optional<double> exact_upper_profile(double r) const;

private:
    Potential() = default;

    int d_ = 1;
    PotentialKind kind_ = PotentialKind::constant;
    double k_ = 0.0, alpha_ = 0.0, kappa_ = 0.0, r0_ = 0.0, c_ = 0.0;
    HalfLinePiece left_{}, right_{};
    Evaluator custom_{};
    std::string name_{};
    bool confining_ = false;
};

double eval(const Potential& v, std::span<const double> x);

// V_*(x) = inf of V over the closed ball of radius |x|/2 around x.
ProfileEstimate lower_profile(const Potential& v, std::span<const double> x, const SamplingControl& s = {});
// V^*(r) = sup of V over the closed ball of radius 2r around 0.
ProfileEstimate upper_profile(const Potential& v, double r, const SamplingControl& s = {});

// max over radius grid and directions of V^*(|x|) / V_*(x); empty if some V_* vanishes while V^* does not.
std::optional<double> doubling_constant(const Potential& v, std::span<const double> radii,
                                        const SamplingControl& s = {});

}  // namespace hkb
