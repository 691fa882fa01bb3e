// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_EXPERIMENTS_HPP
#define ROMA_EXPERIMENTS_HPP

#include "roma/baselines.hpp"
#include "roma/optimizer.hpp"
#include "roma/scenario.hpp"

#include <functional>
#include <string>
#include <vector>

namespace roma
{
    // One result row. Channel draws are keyed by (master seed, seed index,
    // user, trial) only, so every architecture and sweep value sees the same
    // channels at the same seed (common random numbers).
    struct SweepRow
    {
        std::string scenario_id;
        std::string architecture; // ROMA/MA/RO/AS/FPA for sweeps, AO/DE for traces
        double a_over_lambda = 0.0;
        double p_dbm = 0.0;
        std::uint64_t seed = 0; // seed index
        int iteration = 0;
        double avg_se_bps_hz = 0.0;
        std::vector<double> per_user_se;
        long long wall_ms = 0; // measured; reported through the manifest
    };

    struct SweepResult
    {
        std::vector<SweepRow> rows;
    };

    // Canonical row order for reproducible output.
    void sort_rows(std::vector<SweepRow> &rows);

    // One work item of a sweep; a job expands to one or more rows.
    struct JobKey
    {
        std::string architecture;
        double a_over_lambda = 0.0;
        double p_dbm = 0.0;
        std::uint64_t seed = 0;
    };

    using JobFilter = std::function<bool(const JobKey &)>;          // true = skip
    using JobSink = std::function<void(const std::vector<SweepRow> &)>; // completed job rows

    struct SweepOptions
    {
        arma::uword seeds = 20;
        int jobs = 1;
        std::string scenario_id = "default";
        JobFilter skip;   // optional
        JobSink on_job;   // optional, serialized by the runner
    };

    // One full solve of the lead architecture; emits a single summary row.
    SweepResult single_run(const Scenario &scenario, const SolverConfig &config,
                           const SweepOptions &options);

    // Per-iteration average SE of the alternating optimizer against the
    // differential-evolution baseline at matched objective-evaluation
    // budgets, for each transmit power and seed.
    SweepResult convergence_trace(const Scenario &scenario, const SolverConfig &config,
                                  const DEConfig &de_config, const std::vector<double> &powers_dbm,
                                  const SweepOptions &options);

    // Held-out average SE of each architecture across normalized region
    // sizes, paired seeds.
    SweepResult region_sweep(const Scenario &scenario, const SolverConfig &config,
                             const std::vector<double> &a_values,
                             const std::vector<ArchitectureSpec> &architectures,
                             const SweepOptions &options);

    // Held-out average SE of each architecture across transmit powers,
    // paired seeds.
    SweepResult power_sweep(const Scenario &scenario, const SolverConfig &config,
                            const std::vector<double> &p_dbm_values,
                            const std::vector<ArchitectureSpec> &architectures,
                            const SweepOptions &options);
}

#endif
