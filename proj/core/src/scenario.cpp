// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma/scenario.hpp"

#include "roma/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace roma
{
    void Scenario::validate() const
    {
        if (users < 1)
            throw std::invalid_argument("Scenario: users must be >= 1");
        if (bs_grid_h < 1 || bs_grid_v < 1 || user_grid_h < 1 || user_grid_v < 1)
            throw std::invalid_argument("Scenario: grids must be at least 1x1");
        if (!(carrier_hz > 0.0))
            throw std::invalid_argument("Scenario: carrier frequency must be > 0");
        if (!(sigma2_w > 0.0))
            throw std::invalid_argument("Scenario: noise power must be > 0");
        if (!(per_user_power_w >= 0.0))
            throw std::invalid_argument("Scenario: per-user power must be >= 0");
        if (region_a_wavelengths < 0.0)
            throw std::invalid_argument("Scenario: region size must be >= 0");
        if (min_distance_wavelengths < 0.0)
            throw std::invalid_argument("Scenario: minimum distance must be >= 0");
        if (path_count < 1)
            throw std::invalid_argument("Scenario: path count must be >= 1");
        if (!(user_radius_min_m > 0.0) || !(user_radius_max_m > user_radius_min_m))
            throw std::invalid_argument("Scenario: need 0 < radius_min < radius_max");
        if (mc_trials < 1)
            throw std::invalid_argument("Scenario: mc_trials must be >= 1");
    }

    std::vector<arma::vec3> place_users(const Scenario &scenario, std::uint64_t seed)
    {
        scenario.validate();
        RandomSource rng(seed);
        std::vector<arma::vec3> centers;
        centers.reserve(scenario.users);
        for (arma::uword u = 0; u < scenario.users; ++u)
        {
            const double azimuth = rng.uniform(-M_PI, M_PI);
            const double elevation = rng.uniform(-M_PI / 6, M_PI / 6);
            const double range = rng.uniform(scenario.user_radius_min_m, scenario.user_radius_max_m);
            centers.push_back({range * std::cos(elevation) * std::cos(azimuth),
                               range * std::cos(elevation) * std::sin(azimuth),
                               range * std::sin(elevation)});
        }
        return centers;
    }

    SampledScenario SampledScenario::make(const Scenario &scenario, std::uint64_t seed_index,
                                          arma::uword optimization_trials)
    {
        scenario.validate();
        SampledScenario s;
        s.scenario = scenario;
        s.seed_index = seed_index;
        s.user_centers = place_users(
            scenario, derive_seed(scenario.master_seed, seed_stream::kUserPlacement, seed_index));

        const arma::uword opt_trials =
            scenario.channel_model == PathModel::kLosGeometric ? 1 : optimization_trials;
        const arma::uword rep_trials = scenario.reporting_trials();

        s.optimization_paths.resize(scenario.users);
        s.holdout_paths.resize(scenario.users);
        for (arma::uword u = 0; u < scenario.users; ++u)
        {
            s.optimization_paths[u].reserve(opt_trials);
            for (arma::uword t = 0; t < opt_trials; ++t)
                s.optimization_paths[u].push_back(sample_paths(
                    derive_seed(scenario.master_seed, seed_stream::kOptimizationPaths, seed_index, u, t),
                    scenario.path_count, scenario.channel_model, {0, 0, 0}, s.user_centers[u]));
            s.holdout_paths[u].reserve(rep_trials);
            for (arma::uword t = 0; t < rep_trials; ++t)
                s.holdout_paths[u].push_back(sample_paths(
                    derive_seed(scenario.master_seed, seed_stream::kHoldoutPaths, seed_index, u, t),
                    scenario.path_count, scenario.channel_model, {0, 0, 0}, s.user_centers[u]));
        }
        return s;
    }
}
