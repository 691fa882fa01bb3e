// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_RNG_HPP
#define ROMA_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace roma
{
    // Seed-splitting scheme
    // ---------------------
    // Every random draw in a run is keyed by (master_seed, stream, a, b, c),
    // mixed through a SplitMix64-style avalanche. This makes any single
    // trial reproducible in isolation and keeps channel draws identical
    // across architectures and sweep points (common random numbers):
    //
    //   stream  purpose                 a            b        c
    //   ------  ----------------------  -----------  -------  -----
    //   1       user placement          seed index   0        0
    //   2       optimization path batch seed index   user     trial
    //   3       held-out path batch     seed index   user     trial
    //   4       differential evolution  seed index   0        0
    //
    // Sweep parameters (region size, power) intentionally do not enter the
    // key, so paired-seed comparisons see the same channels.
    namespace seed_stream
    {
        inline constexpr std::uint64_t kUserPlacement = 1;
        inline constexpr std::uint64_t kOptimizationPaths = 2;
        inline constexpr std::uint64_t kHoldoutPaths = 3;
        inline constexpr std::uint64_t kDifferentialEvolution = 4;
    }

    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                     std::uint64_t a = 0, std::uint64_t b = 0, std::uint64_t c = 0)
    {
        std::uint64_t h = splitmix64(master);
        h = splitmix64(h ^ stream);
        h = splitmix64(h ^ a);
        h = splitmix64(h ^ b);
        h = splitmix64(h ^ c);
        return h;
    }

    // Deterministic random source. std::mt19937_64 has a standardized output
    // sequence; the distribution transforms below are hand-rolled because the
    // standard library ones are implementation-defined.
    class RandomSource
    {
    public:
        explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

        // Uniform on [0, 1).
        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        // Circularly-symmetric complex normal with unit variance, E{|z|^2} = 1.
        std::complex<double> complex_normal()
        {
            double u1 = uniform();
            while (u1 <= 0.0)
                u1 = uniform();
            double r = std::sqrt(-std::log(u1));
            double phase = 2.0 * M_PI * uniform();
            return {r * std::cos(phase), r * std::sin(phase)};
        }

        std::complex<double> unit_phasor()
        {
            double phase = 2.0 * M_PI * uniform();
            return {std::cos(phase), std::sin(phase)};
        }

        std::uint64_t raw() { return engine_(); }

    private:
        std::mt19937_64 engine_;
    };
}

#endif
