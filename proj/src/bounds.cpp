#include "hkb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "hkb/special_functions.hpp"

namespace hkb {

namespace {

constexpr double kRateH = std::numbers::sqrt2 / 32.0;
constexpr double kRateK = 9.0 / 4.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_t(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("t must be positive and finite");
}

void check_point(const BoundConstants& c, std::span<const double> x) {
    if (static_cast<int>(x.size()) != c.d()) throw UsageError("point dimension does not match constants");
}

void check_potential(const BoundConstants& c, const Potential& v) {
    if (v.dim() != c.d()) throw UsageError("potential dimension does not match constants");
}

double rho_of(std::span<const double> x) { return std::max(norm(x), 1.0); }

struct PartValues {
    double part1 = 0.0, part2 = 0.0;
    bool exact = true;
    double t_rho = 0.0;
};

}  // namespace

BoundConstants BoundConstants::make(int d, double C, double C0, double Ct, double a, std::optional<double> lambda0) {
    if (d < 1 || d > 10) throw UsageError("constants: d must be in 1..10");
    if (!(C >= 1.0) || !std::isfinite(C)) throw UsageError("constants: Wendel C must be >= 1");
    if (!(C0 >= 1.0) || !std::isfinite(C0)) throw UsageError("constants: C0 must be >= 1");
    if (!(Ct > 0.0 && Ct <= 1.0)) throw UsageError("constants: Ctilde must lie in (0,1]");
    if (!(a > 1.0) || !std::isfinite(a)) throw UsageError("constants: a must be > 1");
    if (lambda0 && !(*lambda0 >= 0.0 && std::isfinite(*lambda0))) throw UsageError("constants: lambda0 must be >= 0");
    BoundConstants b;
    b.d_ = d;
    b.mu0_ = hkb::mu0(d);
    b.C_ = C;
    b.C0_ = C0;
    b.Ct_ = Ct;
    b.a_ = a;
    b.lambda0_ = lambda0;
    b.derive();
    return b;
}

void BoundConstants::derive() {
    const double cmax = std::max(C0_, C_);
    const double dd = d_;
    const double log_inner = std::log(2.0) + (a_ - 1.0) / a_ * std::log(cmax) + 0.5 * dd * std::log(a_) +
                             (a_ - 1.0) * dd / (2.0 * a_) * std::log(a_ / (a_ - 1.0));
    C1_ = std::exp(2.0 * log_inner);
    log_c1_ = 0.5 * (3.0 * dd + 4.0) * std::log(2.0) + std::sqrt(mu0_) / 8.0 + std::log(cmax);
    c1_ = std::exp(log_c1_);
    log_c2_ = 4.0 * std::log(Ct_ / 4.0) - dd * std::log(4.0) - 3.0 * std::lgamma(0.5 * dd + 1.0);
    c2_ = std::exp(log_c2_);
    if (!(C1_ > 0.0 && c1_ > 0.0 && c2_ > 0.0 && C2() > 0.0 && C3() > 0.0 && C4() > 0.0))
        throw UsageError("constants: derived constants must be positive");
}

std::optional<double> BoundConstants::gamma1() const {
    if (!lambda0_) return std::nullopt;
    return *lambda0_ / 2.0;
}

BoundConstants BoundConstants::with_a(double a) const { return make(d_, C_, C0_, Ct_, a, lambda0_); }

BoundConstants BoundConstants::with_lambda0(std::optional<double> l0) const { return make(d_, C_, C0_, Ct_, a_, l0); }

std::string BoundConstants::canonical() const {
    char buf[512];
    char l0[40] = "none";
    if (lambda0_) std::snprintf(l0, sizeof l0, "%.17g", *lambda0_);
    std::snprintf(buf, sizeof buf, "d=%d;mu0=%.17g;a=%.17g;C=%.17g;C0=%.17g;Ctilde=%.17g;lambda0=%s", d_, mu0_, a_,
                  C_, C0_, Ct_, l0);
    return buf;
}

std::string BoundConstants::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string to_string(Regime r) { return r == Regime::part1 ? "part1" : "part2"; }

double log_H_from_profile(double mu0, double t, double r, double v_lower) {
    if (r == 0.0) return -std::sqrt(2.0 * mu0) / 32.0;
    const double s = v_lower + mu0 / (4.0 * r * r);
    return -kRateH * std::min(s * t, 2.0 * r * std::sqrt(s));
}

double log_K_from_profile(double mu0, double t, double rho, double v_upper) {
    const double s = v_upper + mu0 / (4.0 * rho * rho);
    return -kRateK * std::min(s * t, 2.0 * rho * std::sqrt(s));
}

LogValue rate_H(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                const SamplingControl& s) {
    check_t(t);
    check_point(c, x);
    const double r = norm(x);
    if (r == 0.0) return {log_H_from_profile(c.mu0(), t, 0.0, 0.0), true};
    const auto p = lower_profile(v, x, s);
    return {log_H_from_profile(c.mu0(), t, r, p.value), p.exact()};
}

LogValue rate_h(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                const SamplingControl& s) {
    check_t(t);
    check_point(c, x);
    const double r = norm(x);
    if (r == 0.0) return {0.0, true};
    const auto p = lower_profile(v, x, s);
    const double time_branch = (c.C2() * p.value + c.C3() / (r * r)) * t;
    const double space_branch = c.C4() * std::sqrt(p.value) * r;
    return {-std::min(time_branch, space_branch), p.exact()};
}

LogValue rate_K(const BoundConstants& c, const Potential& v, double t, double rho, const SamplingControl& s) {
    check_t(t);
    if (!(rho >= 1.0)) throw UsageError("rate_K: rho must be >= 1");
    const auto p = upper_profile(v, rho, s);
    return {log_K_from_profile(c.mu0(), t, rho, p.value), p.exact()};
}

double threshold_t_rho(const BoundConstants& c, const Potential& v, double rho, const SamplingControl& s) {
    if (!(rho >= 1.0)) throw UsageError("threshold_t_rho: rho must be >= 1");
    const double up = upper_profile(v, rho, s).value;
    return rho / (2.0 * std::sqrt(up + c.mu0() / (4.0 * rho * rho)));
}

double gamma2(const BoundConstants& c, const Potential& v, const SamplingControl& s) {
    return c.d() + upper_profile(v, 1.0, s).value + c.mu0() / 4.0;
}

LogValue upper_bound(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                     std::span<const double> y, const SamplingControl& s) {
    check_potential(c, v);
    const LogValue hx = rate_H(c, v, t, x, s), hy = rate_H(c, v, t, y, s);
    double kernel = log_gauss_kernel(c.d(), 2.0 * t, x, y);
    if (const auto g1 = c.gamma1()) kernel = std::min(kernel, -*g1 * t + log_gauss_kernel_sq(c.d(), t, 0.0));
    return {c.log_c1() + (hx.log_value + hy.log_value) + kernel, hx.exact && hy.exact};
}

TunableUpper upper_bound_tunable(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                                 std::span<const double> y, const SamplingControl& s) {
    check_potential(c, v);
    const LogValue hx = rate_h(c, v, t, x, s), hy = rate_h(c, v, t, y, s);
    const bool exact = hx.exact && hy.exact;
    const double log_C1 = std::log(c.C1());
    TunableUpper out;
    out.gaussian = {log_C1 + (hx.log_value + hy.log_value) + log_gauss_kernel(c.d(), c.a() * t, x, y), exact};
    if (const auto l0 = c.lambda0()) {
        const double v_diag = 0.5 * log_C1 - 0.5 * c.d() * std::log(2.0 * c.a() * std::numbers::pi * t) -
                              0.5 * *l0 * t + 0.5 * (hx.log_value + hy.log_value);
        out.diagonal = LogValue{v_diag, exact};
    }
    return out;
}

namespace {

PartValues lower_parts(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                       std::span<const double> y, const SamplingControl& s, bool split_k) {
    const double rx = rho_of(x), ry = rho_of(y), rho = std::max(rx, ry);
    const auto px = upper_profile(v, rx, s), py = upper_profile(v, ry, s), p1 = upper_profile(v, 1.0, s);
    const double vr = rx >= ry ? px.value : py.value;
    const double kx = log_K_from_profile(c.mu0(), t, rx, px.value);
    const double ky = log_K_from_profile(c.mu0(), t, ry, py.value);
    const double g2 = c.d() + p1.value + c.mu0() / 4.0;
    PartValues pv;
    pv.exact = px.exact() && py.exact() && p1.exact();
    pv.t_rho = rho / (2.0 * std::sqrt(vr + c.mu0() / (4.0 * rho * rho)));
    pv.part1 = c.log_c2() - g2 * t + log_gauss_kernel_sq(c.d(), t, 0.0) + (kx + ky);
    const double k_pair = split_k ? kx + ky : log_K_from_profile(c.mu0(), t, rho, vr);
    pv.part2 = c.log_c2() + k_pair + log_gauss_kernel(c.d(), t, x, y);
    return pv;
}

}  // namespace

LowerBound lower_bound(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                       std::span<const double> y, const SamplingControl& s) {
    check_t(t);
    check_potential(c, v);
    check_point(c, x);
    check_point(c, y);
    const PartValues pv = lower_parts(c, v, t, x, y, s, false);
    const double switch_time = 4.0 * pv.t_rho;
    LowerBound out;
    if (t > switch_time) {
        out.bound = {pv.part1, pv.exact};
        out.regime = Regime::part1;
    } else if (t < switch_time) {
        out.bound = {pv.part2, pv.exact};
        out.regime = Regime::part2;
    } else {
        out.bound = {std::max(pv.part1, pv.part2), pv.exact};
        out.regime = Regime::part1;
    }
    return out;
}

TwoSided two_sided_confining(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                             std::span<const double> y, const SamplingControl& s) {
    check_t(t);
    check_potential(c, v);
    check_point(c, x);
    check_point(c, y);
    if (!v.is_confining()) throw UsageError("two_sided_confining: potential is not confining");
    const auto g1 = c.gamma1();
    if (!g1) throw UsageError("two_sided_confining: lambda0 is required");
    const PartValues pv = lower_parts(c, v, t, x, y, s, true);
    const LogValue hx = rate_H(c, v, t, x, s), hy = rate_H(c, v, t, y, s);
    const bool exact = pv.exact && hx.exact && hy.exact;
    TwoSided out;
    if (t >= 4.0 * pv.t_rho) {
        out.regime = Regime::part1;
        out.lower = {pv.part1, exact};
        out.upper = {c.log_c1() - *g1 * t + (hx.log_value + hy.log_value) + log_gauss_kernel_sq(c.d(), t, 0.0), exact};
    } else {
        out.regime = Regime::part2;
        out.lower = {pv.part2, exact};
        out.upper = {c.log_c1() + (hx.log_value + hy.log_value) + log_gauss_kernel(c.d(), 2.0 * t, x, y), exact};
    }
    return out;
}

ExampleEnvelope example_envelopes(const Potential& v, const BoundConstants& c, double t, std::span<const double> x) {
    check_t(t);
    check_point(c, x);
    const double r = norm(x);
    const double mu0 = c.mu0();
    ExampleEnvelope out;
    switch (v.kind()) {
        case PotentialKind::polynomial:
        case PotentialKind::logarithmic: {
            out.example = "conf_gen";
            const double m = std::pow(v.kind() == PotentialKind::polynomial ? 4.0 : 3.0, v.alpha());
            auto W = [&](double rr) { return *v.exact_upper_profile(rr); };
            const double rho = std::max(r, 1.0);
            const double sk = W(rho) + mu0 / (4.0 * rho * rho);
            out.K_tilde = std::exp(-kRateK * std::min(sk * t, 2.0 * rho * std::sqrt(sk)));
            if (r < 1.0) {
                out.H_tilde = 1.0;
            } else {
                const double sh = W(r) + mu0 / (4.0 * r * r);
                out.H_tilde = std::exp(-kRateH / m * std::min(sh * t, 2.0 * r * std::sqrt(sh)));
            }
            return out;
        }
        case PotentialKind::decaying: {
            out.example = "dec";
            const double a = v.alpha(), k = v.k();
            if (r < 1.0 || a >= 2.0) {
                out.H_tilde = 1.0;
            } else {
                const double e = std::min(k * t / std::pow(r, a), 2.0 * std::sqrt(k) * std::pow(r, 1.0 - a / 2.0));
                out.H_tilde = std::exp(-kRateH * std::pow(2.0 / 3.0, a) * e);
            }
            return out;
        }
        case PotentialKind::bounded_away:
        case PotentialKind::constant: {
            out.example = "bdd";
            const bool bdd = v.kind() == PotentialKind::bounded_away;
            const double kappa = bdd ? v.kappa() : v.c();
            const double r0 = bdd ? v.r0() : 0.0;
            if (r < 2.0 * r0) {
                out.H_tilde = 1.0;
            } else {
                out.H_tilde = std::exp(-kRateH * std::min(kappa * t, 2.0 * std::sqrt(kappa) * r));
            }
            return out;
        }
        default: break;
    }
    throw NotImplemented("example_envelopes: no closed-form envelope for " + to_string(v.kind()));
}

BoundEnvelope envelope(const BoundConstants& c, const Potential& v, double t, std::span<const double> x,
                       std::span<const double> y, BoundMode mode, const SamplingControl& s) {
    BoundEnvelope e;
    e.t = t;
    e.x.assign(x.begin(), x.end());
    e.y.assign(y.begin(), y.end());
    const LogValue up = upper_bound(c, v, t, x, y, s);
    e.log_upper = up.log_value;
    e.upper = up.value();
    e.exact_profiles = up.exact;
    if (mode == BoundMode::sandwich) {
        const LowerBound lo = lower_bound(c, v, t, x, y, s);
        e.log_lower = lo.bound.log_value;
        e.lower = lo.bound.value();
        e.regime = lo.regime;
        e.exact_profiles = e.exact_profiles && lo.bound.exact;
    } else {
        e.lower_enabled = false;
        e.log_lower = kNegInf;
        e.lower = 0.0;
        const double rho = std::max(rho_of(x), rho_of(y));
        e.regime = t >= 4.0 * threshold_t_rho(c, v, rho, s) ? Regime::part1 : Regime::part2;
    }
    e.constants_hash = c.hash();
    return e;
}

}  // namespace hkb
