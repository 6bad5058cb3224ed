#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "hkb/gauss.hpp"
#include "hkb/potential.hpp"

namespace hkb {

class BoundConstants {
public:
    // C: Wendel constant, C0: survival constant, Ct: killed-ball constant.
    static BoundConstants make(int d, double C, double C0, double Ct, double a = 2.0,
                               std::optional<double> lambda0 = std::nullopt);

    int d() const { return d_; }
    double mu0() const { return mu0_; }
    double a() const { return a_; }
    double C() const { return C_; }
    double C0() const { return C0_; }
    double Ct() const { return Ct_; }
    std::optional<double> lambda0() const { return lambda0_; }

    double C1() const { return C1_; }
    double C2() const { return 1.0 / (2.0 * a_); }
    double C3() const { return 2.0 * mu0_ * (a_ - 1.0) / (a_ * a_); }
    double C4() const { return 0.25 * std::sqrt((a_ - 1.0) / a_); }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double log_c1() const { return log_c1_; }
    double log_c2() const { return log_c2_; }
    std::optional<double> gamma1() const;

    BoundConstants with_a(double a) const;
    BoundConstants with_lambda0(std::optional<double> l0) const;

    std::string canonical() const;  // stable text form, hashed below
    std::string hash() const;       // 16 hex digits (FNV-1a 64)

private:
    BoundConstants() = default;
    void derive();

    int d_ = 1;
    double mu0_ = 0.0, a_ = 2.0, C_ = 1.0, C0_ = 1.0, Ct_ = 1.0;
    std::optional<double> lambda0_{};
    double C1_ = 0.0, c1_ = 0.0, c2_ = 0.0, log_c1_ = 0.0, log_c2_ = 0.0;
};

// A rate or bound kept in log form, with the exactness of the profiles it used.
struct LogValue {
    double log_value = 0.0;
    bool exact = true;

    double value() const { return std::exp(log_value); }
};

LogValue rate_H(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                const SamplingControl& s = {});
LogValue rate_h(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                const SamplingControl& s = {});
LogValue rate_K(const BoundConstants& c, const Potential& v, double t, double rho, const SamplingControl& s = {});
double threshold_t_rho(const BoundConstants& c, const Potential& v, double rho, const SamplingControl& s = {});
double gamma2(const BoundConstants& c, const Potential& v, const SamplingControl& s = {});

// Rate exponents from already computed profile values.
double log_H_from_profile(double mu0, double t, double r, double v_lower);
double log_K_from_profile(double mu0, double t, double rho, double v_upper);

enum class Regime { part1, part2 };
std::string to_string(Regime r);

LogValue upper_bound(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                     std::span<const double> y, const SamplingControl& s = {});

struct TunableUpper {
    LogValue gaussian;
    std::optional<LogValue> diagonal;  // needs lambda0
};
TunableUpper upper_bound_tunable(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                                 std::span<const double> y, const SamplingControl& s = {});

struct LowerBound {
    LogValue bound;
    Regime regime = Regime::part2;
};
LowerBound lower_bound(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                       std::span<const double> y, const SamplingControl& s = {});

struct TwoSided {
    LogValue lower;
    LogValue upper;
    Regime regime = Regime::part2;
};
TwoSided two_sided_confining(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                             std::span<const double> y, const SamplingControl& s = {});

struct ExampleEnvelope {
    std::optional<double> H_tilde;
    std::optional<double> K_tilde;
    std::string example;  // conf_gen | dec | bdd
};
ExampleEnvelope example_envelopes(const Potential& v, const BoundConstants& c, double t, std::span<const double> x);

enum class BoundMode { sandwich, upper_only };

struct BoundEnvelope {
    double t = 0.0;
    Point x, y;
    double lower = 0.0, upper = 0.0;
    double log_lower = 0.0, log_upper = 0.0;
    Regime regime = Regime::part2;
    bool exact_profiles = true;
    bool lower_enabled = true;
    std::string constants_hash;
};

BoundEnvelope envelope(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                       std::span<const double> y, BoundMode mode = BoundMode::sandwich, const SamplingControl& s = {});

}  // namespace hkb
