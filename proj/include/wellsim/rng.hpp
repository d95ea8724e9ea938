#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace wellsim {

/// splitmix64 finalizer. Used to derive stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Child seed for stream `stream` under `master`. Independent of the order
/// in which streams are instantiated, so per-user / per-client generators can
/// be created (or run) in any order.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

/// Deterministic random source. std::mt19937_64 has a fully specified output
/// sequence, and every sampler below maps engine words to variates with
/// explicit arithmetic (no std::*_distribution, whose algorithms differ
/// between standard libraries). Identical seeds therefore reproduce identical
/// draw sequences everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) without modulo bias.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
        const std::uint64_t threshold = (-n) % n;  // 2^64 mod n
        std::uint64_t v = gen_();
        while (v < threshold) v = gen_();
        return v % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (no rejection, no cached spare).
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double truncated_normal(double mean, double sd, double lo, double hi) {
        if (!(lo < hi)) throw std::invalid_argument("truncated_normal: lo must be < hi");
        for (int i = 0; i < 100000; ++i) {
            const double x = normal(mean, sd);
            if (x >= lo && x <= hi) return x;
        }
        throw std::runtime_error("truncated_normal: acceptance region too small");
    }

    /// Log-normal parameterized by its median and the sd of log(X).
    double lognormal_median(double median, double log_sd) {
        return std::exp(std::log(median) + log_sd * normal());
    }

    /// Gamma(shape, scale), Marsaglia-Tsang squeeze method.
    double gamma(double shape, double scale) {
        if (shape <= 0.0 || scale <= 0.0)
            throw std::invalid_argument("gamma: shape and scale must be positive");
        if (shape < 1.0) {
            const double boost = std::pow(uniform_pos(), 1.0 / shape);
            return gamma(shape + 1.0, scale) * boost;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    /// Poisson(lambda). Knuth's product method for small lambda, Hormann's
    /// transformed-rejection (PTRS) for large.
    long poisson(double lambda) {
        if (lambda < 0.0) throw std::invalid_argument("poisson: lambda must be >= 0");
        if (lambda == 0.0) return 0;
        if (lambda < 10.0) {
            const double limit = std::exp(-lambda);
            long k = 0;
            double p = 1.0;
            do {
                ++k;
                p *= uniform_pos();
            } while (p > limit);
            return k - 1;
        }
        const double slam = std::sqrt(lambda);
        const double loglam = std::log(lambda);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            const double u = uniform() - 0.5;
            const double v = uniform_pos();
            const double us = 0.5 - std::fabs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<long>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
                -lambda + kf * loglam - std::lgamma(kf + 1.0))
                return static_cast<long>(kf);
        }
    }

    /// Negative binomial parameterized by mean and dispersion r
    /// (variance = mean + mean^2 / r), sampled as a gamma-Poisson mixture.
    long negative_binomial(double mean, double dispersion) {
        if (mean <= 0.0 || dispersion <= 0.0)
            throw std::invalid_argument("negative_binomial: mean and dispersion must be positive");
        return poisson(gamma(dispersion, mean / dispersion));
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

/// In-place Fisher-Yates shuffle driven by an explicit Rng (std::shuffle is
/// not reproducible across standard libraries).
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace wellsim
