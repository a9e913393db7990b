// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_RANDOM_HPP_
#define EQUIL_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace equil
{

/**
 * Seedable random stream with a fully specified output sequence.
 *
 * The engine is std::mt19937_64, whose output is fixed by the standard.
 * Uniform doubles take the top 53 bits of one engine word. Normal deviates
 * use the Marsaglia polar method on pairs of uniforms mapped to (-1, 1);
 * the second deviate of each accepted pair is cached and returned next.
 * std::uniform_real_distribution and std::normal_distribution are avoided
 * because their algorithms are implementation-defined.
 */
class RandomStream
{
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer on [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound)
    {
        // Rejection keeps the draw unbiased.
        const std::uint64_t limit = engine_.max() - engine_.max() % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    void fill_normal(std::span<double> out)
    {
        for (double& x : out)
            x = normal();
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Source of iid standard-normal probe vectors (zero mean, unit variance).
/// One instance per run; never share across threads.
class ProbeSource
{
public:
    explicit ProbeSource(std::uint64_t seed) : seed_(seed), stream_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Probe variance E u_j^2.
    static constexpr double variance() noexcept { return 1.0; }

    void draw(std::span<double> out) { stream_.fill_normal(out); }

private:
    std::uint64_t seed_;
    RandomStream stream_;
};

} // namespace equil

#endif // EQUIL_RANDOM_HPP_
