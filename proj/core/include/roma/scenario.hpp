// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_SCENARIO_HPP
#define ROMA_SCENARIO_HPP

#include "roma/channel.hpp"
#include "roma/geometry.hpp"
#include "roma/units.hpp"

#include <armadillo>
#include <cstdint>
#include <vector>

namespace roma
{
    // Full experiment description. Defaults: 4 users, 3x3 panels on both
    // ends, 2.1 GHz carrier, 30 dBm per-user power, -90 dBm noise, movable
    // region of 2.5 wavelengths, 15 paths.
    struct Scenario
    {
        arma::uword users = 4;
        arma::uword bs_grid_h = 3;
        arma::uword bs_grid_v = 3;
        arma::uword user_grid_h = 3;
        arma::uword user_grid_v = 3;
        double carrier_hz = 2.1e9;
        double sigma2_w = dbm_to_watts(-90.0);
        double per_user_power_w = dbm_to_watts(30.0);
        double region_a_wavelengths = 2.5;      // A, region spans [-A, A] wavelengths per axis
        double min_distance_wavelengths = 0.5;  // D
        arma::uword path_count = 15;            // L
        PathModel channel_model = PathModel::kStochastic;
        double user_radius_min_m = 20.0;
        double user_radius_max_m = 100.0;
        std::uint64_t master_seed = 1;
        arma::uword mc_trials = 100; // SE expectation draws (LoS uses 1)

        double lambda() const { return wavelength_m(carrier_hz); }
        arma::uword bs_count() const { return bs_grid_h * bs_grid_v; }
        arma::uword user_count() const { return user_grid_h * user_grid_v; }
        RegionSpec region() const { return {region_a_wavelengths, min_distance_wavelengths}; }
        arma::uword reporting_trials() const
        {
            return channel_model == PathModel::kLosGeometric ? 1 : mc_trials;
        }

        void validate() const; // throws std::invalid_argument
    };

    // Uniformly draws user panel centers around the BS: azimuth uniform in
    // [-pi, pi], elevation uniform in [-pi/6, pi/6], range uniform in
    // [radius_min, radius_max]. Deterministic per seed.
    std::vector<arma::vec3> place_users(const Scenario &scenario, std::uint64_t seed);

    // A scenario with its randomness frozen: user placement plus the
    // optimization and held-out path batches, all derived from
    // (master seed, seed index) through the documented stream scheme.
    struct SampledScenario
    {
        Scenario scenario;
        std::uint64_t seed_index = 0;
        std::vector<arma::vec3> user_centers;
        std::vector<std::vector<PathSet>> optimization_paths; // [user][trial]
        std::vector<std::vector<PathSet>> holdout_paths;      // [user][trial]

        static SampledScenario make(const Scenario &scenario, std::uint64_t seed_index,
                                    arma::uword optimization_trials);
    };
}

#endif
