#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gen {

// Small deterministic generator for property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    std::vector<double> point(int d, double max_norm) {
        std::vector<double> p(d);
        std::normal_distribution<double> n(0.0, 1.0);
        double s = 0.0;
        for (double& v : p) {
            v = n(eng_);
            s += v * v;
        }
        const double r = max_norm * std::pow(uniform(0.0, 1.0), 1.0 / d) / std::sqrt(s);
        for (double& v : p) v *= r;
        return p;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace gen
