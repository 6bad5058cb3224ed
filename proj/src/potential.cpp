#include "hkb/potential.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hkb {

namespace {

constexpr std::array<int, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                         41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double radical_inverse(std::uint64_t i, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

void check_dim(int d) {
    if (d < 1) throw UsageError("potential dimension must be >= 1");
    if (d > static_cast<int>(kPrimes.size()) / 2) throw UsageError("potential dimension too large for sampling");
}

void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(what) + " must be positive");
}

void check_nonneg(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError(std::string(what) + " must be nonnegative");
}

// k * r^alpha with cheap paths for the common exponents; r2 = r^2.
double power_of_r2(double r2, double alpha) {
    if (alpha == 2.0) return r2;
    if (alpha == 4.0) return r2 * r2;
    if (alpha == 1.0) return std::sqrt(r2);
    if (alpha == 3.0) return r2 * std::sqrt(r2);
    return std::pow(r2, 0.5 * alpha);
}

bool piece_valid(const HalfLinePiece& p) {
    if (!(p.coef >= 0.0) || !std::isfinite(p.coef)) return false;
    return p.kind == PieceKind::constant || (p.alpha > 0.0 && std::isfinite(p.alpha));
}

const char* piece_name(PieceKind k) {
    switch (k) {
        case PieceKind::power: return "power";
        case PieceKind::decaying: return "decaying";
        case PieceKind::constant: return "constant";
    }
    return "?";
}

// Extremum of V over the closed ball B(center, radius) by Halton sampling
// plus local refinement around the incumbent.
ProfileEstimate sample_extremum(const Potential& v, std::span<const double> center, double radius, bool minimize,
                                const SamplingControl& s) {
    const int d = v.dim();
    std::vector<double> p(d), best_pt(center.begin(), center.end());
    double best = v.eval_unchecked(center.data());
    std::size_t count = 1;

    auto consider = [&](const std::vector<double>& q) {
        const double val = v.eval_unchecked(q.data());
        ++count;
        if (minimize ? val < best : val > best) {
            best = val;
            best_pt = q;
        }
    };
    // Clamp q into the closed ball by radial projection.
    auto clamp_to_ball = [&](std::vector<double>& q) {
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) r2 += (q[j] - center[j]) * (q[j] - center[j]);
        if (r2 > radius * radius) {
            const double f = radius / std::sqrt(r2);
            for (int j = 0; j < d; ++j) q[j] = center[j] + (q[j] - center[j]) * f;
        }
    };

    if (radius > 0.0) {
        // interior: rejection of Halton points from the cube
        std::size_t accepted = 0;
        const std::uint64_t max_iter = 20'000'000;
        for (std::uint64_t i = 1; accepted < s.n_samples && i < max_iter; ++i) {
            double r2 = 0.0;
            for (int j = 0; j < d; ++j) {
                p[j] = 2.0 * radical_inverse(i, kPrimes[j]) - 1.0;
                r2 += p[j] * p[j];
            }
            if (r2 > 1.0) continue;
            ++accepted;
            std::vector<double> q(d);
            for (int j = 0; j < d; ++j) q[j] = center[j] + radius * p[j];
            consider(q);
        }
        // boundary sphere
        const std::size_t n_dir = std::max<std::size_t>(2, s.n_samples / 4);
        if (d == 1) {
            consider({center[0] - radius});
            consider({center[0] + radius});
        } else {
            std::size_t got = 0;
            for (std::uint64_t i = 1; got < n_dir && i < max_iter; ++i) {
                double r2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    p[j] = 2.0 * radical_inverse(i, kPrimes[d + j]) - 1.0;
                    r2 += p[j] * p[j];
                }
                if (r2 > 1.0 || r2 < 1e-6) continue;
                ++got;
                const double f = radius / std::sqrt(r2);
                std::vector<double> q(d);
                for (int j = 0; j < d; ++j) q[j] = center[j] + f * p[j];
                consider(q);
            }
        }
        // local refinement
        const std::size_t n_local = std::max<std::size_t>(8, s.n_samples / 4);
        double rho = radius;
        for (int round = 1; round <= s.refine_rounds; ++round) {
            rho *= 0.25;
            const std::vector<double> anchor = best_pt;
            std::size_t got = 0;
            for (std::uint64_t i = 1; got < n_local && i < max_iter; ++i) {
                double r2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    p[j] = 2.0 * radical_inverse(i, kPrimes[j]) - 1.0;
                    r2 += p[j] * p[j];
                }
                if (r2 > 1.0) continue;
                ++got;
                std::vector<double> q(d);
                for (int j = 0; j < d; ++j) q[j] = anchor[j] + rho * p[j];
                clamp_to_ball(q);
                consider(q);
            }
        }
    }
    ProfileEstimate out;
    out.value = best;
    out.rigor = minimize ? ProfileRigor::sampled_upper : ProfileRigor::sampled_lower;
    out.sample_count = count;
    out.refinement_depth = radius > 0.0 ? s.refine_rounds : 0;
    return out;
}

}  // namespace

double HalfLinePiece::at(double r) const {
    switch (kind) {
        case PieceKind::power: return coef * std::pow(r, alpha);
        case PieceKind::decaying: return coef * std::pow(std::max(1.0, r), -alpha);
        case PieceKind::constant: return coef;
    }
    return 0.0;
}

std::string to_string(ProfileRigor r) {
    switch (r) {
        case ProfileRigor::exact: return "exact";
        case ProfileRigor::sampled_lower: return "sampled-lower";
        case ProfileRigor::sampled_upper: return "sampled-upper";
    }
    return "?";
}

std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::polynomial: return "polynomial";
        case PotentialKind::logarithmic: return "logarithmic";
        case PotentialKind::decaying: return "decaying";
        case PotentialKind::constant: return "constant";
        case PotentialKind::bounded_away: return "bounded_away";
        case PotentialKind::mixture_1d: return "mixture";
        case PotentialKind::custom: return "custom";
    }
    return "?";
}

Potential Potential::polynomial(int d, double k, double alpha) {
    check_dim(d);
    check_positive(k, "k");
    check_positive(alpha, "alpha");
    Potential v;
    v.d_ = d;
    v.kind_ = PotentialKind::polynomial;
    v.k_ = k;
    v.alpha_ = alpha;
    v.confining_ = true;
    return v;
}

Potential Potential::logarithmic(int d, double k, double alpha) {
    check_dim(d);
    check_positive(k, "k");
    check_positive(alpha, "alpha");
    Potential v;
    v.d_ = d;
    v.kind_ = PotentialKind::logarithmic;
    v.k_ = k;
    v.alpha_ = alpha;
    v.confining_ = true;
    return v;
}

Potential Potential::decaying(int d, double k, double alpha) {
    check_dim(d);
    check_positive(k, "k");
    check_positive(alpha, "alpha");
    Potential v;
    v.d_ = d;
    v.kind_ = PotentialKind::decaying;
    v.k_ = k;
    v.alpha_ = alpha;
    return v;
}

Potential Potential::constant(int d, double c) {
    check_dim(d);
    check_nonneg(c, "c");
    Potential v;
    v.d_ = d;
    v.kind_ = PotentialKind::constant;
    v.c_ = c;
    return v;
}

Potential Potential::bounded_away(int d, double kappa, double r0) {
    check_dim(d);
    check_nonneg(kappa, "kappa");
    check_nonneg(r0, "r0");
    Potential v;
    v.d_ = d;
    v.kind_ = PotentialKind::bounded_away;
    v.kappa_ = kappa;
    v.r0_ = r0;
    return v;
}

Potential Potential::mixture_1d(HalfLinePiece left, HalfLinePiece right) {
    if (!piece_valid(left) || !piece_valid(right)) throw UsageError("mixture pieces need coef >= 0 and alpha > 0");
    Potential v;
    v.d_ = 1;
    v.kind_ = PotentialKind::mixture_1d;
    v.left_ = left;
    v.right_ = right;
    return v;
}

Potential Potential::custom(int d, Evaluator f, std::string name, bool confining) {
    check_dim(d);
    if (!f) throw UsageError("custom potential needs an evaluator");
    Potential v;
    v.d_ = d;
    v.kind_ = PotentialKind::custom;
    v.custom_ = std::move(f);
    v.name_ = std::move(name);
    v.confining_ = confining;
    return v;
}

double Potential::eval_unchecked(const double* x) const {
    if (kind_ == PotentialKind::custom) return custom_(std::span<const double>(x, d_));
    if (kind_ == PotentialKind::mixture_1d) return eval_1d(x[0]);
    double r2 = 0.0;
    for (int j = 0; j < d_; ++j) r2 += x[j] * x[j];
    switch (kind_) {
        case PotentialKind::polynomial: return k_ * power_of_r2(r2, alpha_);
        case PotentialKind::logarithmic: return power_of_r2(std::pow(std::log(2.0 + k_ * std::sqrt(r2)), 2.0), alpha_);
        case PotentialKind::decaying: return r2 <= 1.0 ? k_ : k_ * power_of_r2(1.0 / r2, alpha_);
        case PotentialKind::constant: return c_;
        case PotentialKind::bounded_away: return r2 >= r0_ * r0_ ? kappa_ : 0.0;
        default: break;
    }
    return 0.0;
}

double Potential::eval_1d(double x) const {
    if (kind_ == PotentialKind::mixture_1d) return x >= 0.0 ? right_.at(x) : left_.at(-x);
    return eval_unchecked(&x);
}

double Potential::operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != d_) throw UsageError("eval: point dimension does not match potential");
    const double v = eval_unchecked(x.data());
    if (kind_ == PotentialKind::custom && !(v >= 0.0 && std::isfinite(v)))
        throw UsageError("custom potential returned a negative or non-finite value");
    return v;
}

double Potential::radial(double r) const {
    if (!is_radial()) throw UsageError("radial: potential is not radial");
    std::vector<double> x(d_, 0.0);
    x[0] = r;
    return eval_unchecked(x.data());
}

bool Potential::is_radial() const {
    return kind_ != PotentialKind::custom && kind_ != PotentialKind::mixture_1d;
}

bool Potential::is_confining() const { return confining_; }

std::optional<double> Potential::constant_value() const {
    if (kind_ == PotentialKind::constant) return c_;
    if (kind_ == PotentialKind::bounded_away && r0_ == 0.0) return kappa_;
    if (kind_ == PotentialKind::bounded_away && kappa_ == 0.0) return 0.0;
    return std::nullopt;
}

bool Potential::is_zero() const {
    const auto c = constant_value();
    return c && *c == 0.0;
}

bool Potential::is_harmonic() const { return kind_ == PotentialKind::polynomial && alpha_ == 2.0; }

std::string Potential::describe() const {
    char buf[256];
    auto piece = [](const HalfLinePiece& p) {
        char b[96];
        std::snprintf(b, sizeof b, "%s:%.17g:%.17g", piece_name(p.kind), p.coef, p.alpha);
        return std::string(b);
    };
    switch (kind_) {
        case PotentialKind::polynomial:
        case PotentialKind::logarithmic:
        case PotentialKind::decaying:
            std::snprintf(buf, sizeof buf, "%s(d=%d;k=%.17g;alpha=%.17g)", to_string(kind_).c_str(), d_, k_, alpha_);
            return buf;
        case PotentialKind::constant:
            std::snprintf(buf, sizeof buf, "constant(d=%d;c=%.17g)", d_, c_);
            return buf;
        case PotentialKind::bounded_away:
            std::snprintf(buf, sizeof buf, "bounded_away(d=%d;kappa=%.17g;r0=%.17g)", d_, kappa_, r0_);
            return buf;
        case PotentialKind::mixture_1d:
            return "mixture(d=1;left=" + piece(left_) + ";right=" + piece(right_) + ")";
        case PotentialKind::custom:
            std::snprintf(buf, sizeof buf, "custom(d=%d;name=%s)", d_, name_.c_str());
            return buf;
    }
    return "?";
}

std::optional<double> Potential::exact_lower_profile(std::span<const double> x) const {
    const double r = norm(x);
    switch (kind_) {
        case PotentialKind::polynomial: return k_ * std::pow(0.5 * r, alpha_);
        case PotentialKind::logarithmic: return std::pow(std::log(2.0 + 0.5 * k_ * r), alpha_);
        case PotentialKind::decaying: return k_ * std::pow(std::max(1.0, 1.5 * r), -alpha_);
        case PotentialKind::constant: return c_;
        case PotentialKind::bounded_away:
            // ball spans radii [|x|/2, 3|x|/2]
            return (r == 0.0 ? 0.0 >= r0_ : 0.5 * r >= r0_) ? kappa_ : 0.0;
        case PotentialKind::mixture_1d: {
            if (r == 0.0) return eval_1d(0.0);
            const HalfLinePiece& p = x[0] > 0.0 ? right_ : left_;
            // each piece is monotone in |x|, so the extremum sits at an end of [r/2, 3r/2]
            return std::min(p.at(0.5 * r), p.at(1.5 * r));
        }
        case PotentialKind::custom: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<double> Potential::exact_upper_profile(double r) const {
    const double R = 2.0 * r;
    switch (kind_) {
        case PotentialKind::polynomial: return k_ * std::pow(R, alpha_);
        case PotentialKind::logarithmic: return std::pow(std::log(2.0 + k_ * R), alpha_);
        case PotentialKind::decaying: return k_;
        case PotentialKind::constant: return c_;
        case PotentialKind::bounded_away: return R >= r0_ ? kappa_ : 0.0;
        case PotentialKind::mixture_1d:
            if (r == 0.0) return eval_1d(0.0);
            return std::max({left_.at(0.0), left_.at(R), right_.at(0.0), right_.at(R)});
        case PotentialKind::custom: return std::nullopt;
    }
    return std::nullopt;
}

double eval(const Potential& v, std::span<const double> x) { return v(x); }

ProfileEstimate lower_profile(const Potential& v, std::span<const double> x, const SamplingControl& s) {
    if (static_cast<int>(x.size()) != v.dim()) throw UsageError("lower_profile: dimension mismatch");
    const double r = norm(x);
    if (r == 0.0) return {v.eval_unchecked(x.data()), ProfileRigor::exact, 1, 0};
    if (!s.force_sampling) {
        if (auto e = v.exact_lower_profile(x)) return {*e, ProfileRigor::exact, 0, 0};
    }
    return sample_extremum(v, x, 0.5 * r, true, s);
}

ProfileEstimate upper_profile(const Potential& v, double r, const SamplingControl& s) {
    if (!(r >= 0.0)) throw UsageError("upper_profile: radius must be nonnegative");
    const std::vector<double> origin(v.dim(), 0.0);
    if (r == 0.0) return {v.eval_unchecked(origin.data()), ProfileRigor::exact, 1, 0};
    if (!s.force_sampling) {
        if (auto e = v.exact_upper_profile(r)) return {*e, ProfileRigor::exact, 0, 0};
    }
    return sample_extremum(v, origin, 2.0 * r, false, s);
}

std::optional<double> doubling_constant(const Potential& v, std::span<const double> radii, const SamplingControl& s) {
    const int d = v.dim();
    std::vector<std::vector<double>> dirs;
    if (d == 1) {
        dirs = {{1.0}, {-1.0}};
    } else if (v.is_radial()) {
        std::vector<double> e(d, 0.0);
        e[0] = 1.0;
        dirs.push_back(e);
    } else {
        for (int j = 0; j < d; ++j) {
            for (double sgn : {1.0, -1.0}) {
                std::vector<double> e(d, 0.0);
                e[j] = sgn;
                dirs.push_back(e);
            }
        }
        for (std::uint64_t i = 1; dirs.size() < static_cast<std::size_t>(2 * d + 64); ++i) {
            std::vector<double> e(d);
            double n2 = 0.0;
            for (int j = 0; j < d; ++j) {
                e[j] = 2.0 * radical_inverse(i, kPrimes[j]) - 1.0;
                n2 += e[j] * e[j];
            }
            if (n2 < 1e-6 || n2 > 1.0) continue;
            for (double& c : e) c /= std::sqrt(n2);
            dirs.push_back(e);
        }
    }
    double m = 1.0;
    for (double r : radii) {
        if (!(r >= 1.0)) throw UsageError("doubling_constant: radii must be >= 1");
        const double up = upper_profile(v, r, s).value;
        for (const auto& e : dirs) {
            std::vector<double> x(e);
            for (double& c : x) c *= r;
            const double lo = lower_profile(v, x, s).value;
            if (lo == 0.0) {
                if (up > 0.0) return std::nullopt;
                continue;
            }
            m = std::max(m, up / lo);
        }
    }
    return m;
}

}  // namespace hkb
