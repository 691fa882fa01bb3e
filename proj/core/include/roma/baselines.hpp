// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_BASELINES_HPP
#define ROMA_BASELINES_HPP

#include "roma/optimizer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace roma
{
    enum class ArchitectureKind
    {
        kRoma,             // positions and angles jointly optimized
        kMovable,          // positions only, panels fixed broadside
        kRotary,           // angles only, fixed half-wavelength grid
        kAntennaSelection, // 9 of 12 pool antennas per panel, fixed ports
        kFixed,            // conventional fixed grid, no optimization
    };

    struct ArchitectureSpec
    {
        ArchitectureKind kind = ArchitectureKind::kFixed;
        bool frozen_angles = true;
        bool frozen_positions = true;
        arma::uword as_pool = 12;  // total pool antennas per panel (AS only)
        arma::uword as_active = 9; // selected antennas (AS only)

        static ArchitectureSpec make(ArchitectureKind kind);
        static ArchitectureSpec from_name(const std::string &name);
        std::string name() const;
        void validate() const;
    };

    // One architecture run: held-out SE report plus the optimization-batch
    // trace (one entry per outer iteration / generation, entry 0 is the
    // shared initialization).
    struct ArchitectureRun
    {
        SEReport report;
        std::vector<double> se_trace;
        std::vector<std::vector<double>> per_user_trace;
        std::vector<long long> eval_trace;
        int iterations = 0;
        long long objective_evaluations = 0;
    };

    ArchitectureRun run_architecture(const ArchitectureSpec &spec, const Scenario &scenario,
                                     const SolverConfig &config, std::uint64_t seed_index);

    // Antenna-selection masks, one boolean per pool element and panel
    // (index 0 is the BS panel, then one per user).
    struct SelectionResult
    {
        std::vector<std::vector<bool>> masks;
        double optimization_se = 0.0;
        int cycles = 0;
        long long objective_evaluations = 0;
    };

    // Alternating per-panel exhaustive search over the C(pool, active) masks:
    // sweeps every mask of one panel holding the others fixed, keeps the
    // argmax, cycles through BS then each user until no mask changes (at most
    // max_cycles cycles). Ties keep the lexicographically smallest mask.
    SelectionResult antenna_selection(const Scenario &scenario, const SolverConfig &config,
                                      std::uint64_t seed_index, arma::uword pool_h, arma::uword pool_v,
                                      arma::uword active, int max_cycles = 10);

    // All combinations of `active` of `pool` indices as boolean masks, in
    // lexicographic order.
    std::vector<std::vector<bool>> enumerate_masks(arma::uword pool, arma::uword active);

    struct DEConfig
    {
        arma::uword population = 20;
        double mutation_factor = 0.5; // F
        double crossover_rate = 0.9;  // CR
        arma::uword generations = 500;

        void validate() const;
    };

    struct DETrace
    {
        std::vector<double> best_fitness;  // elitist, non-decreasing
        std::vector<long long> evals;      // cumulative evaluations per entry
    };

    // Generic DE/rand/1/bin maximizer over box bounds. The first population
    // member can be pinned to a known starting point; evolution stops after
    // `generations` or when max_evaluations (if nonzero) is exhausted.
    struct DEOutcome
    {
        arma::vec best;
        double best_fitness = 0.0;
        DETrace trace;
        long long evaluations = 0;
    };

    DEOutcome de_optimize(const std::function<double(const arma::vec &)> &fitness,
                          const arma::vec &lower, const arma::vec &upper, const DEConfig &config,
                          std::uint64_t seed, const arma::vec *initial_point = nullptr,
                          long long max_evaluations = 0);

    struct DEResult
    {
        GeometryVariables best;
        SEReport report; // held-out evaluation of the repaired best geometry
        DETrace trace;
        long long objective_evaluations = 0;
    };

    // DE over the concatenated decision vector (angles, BS offsets, user
    // offsets) with the minimum-distance constraint handled by the same
    // quadratic penalty form as the AO position subproblems; the final
    // geometry is repaired by the feasibility projection before reporting.
    DEResult de_solve(const Scenario &scenario, const DEConfig &de_config,
                      const SolverConfig &solver_config, std::uint64_t seed_index,
                      long long max_evaluations = 0);
}

#endif
