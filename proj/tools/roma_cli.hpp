// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_CLI_HPP
#define ROMA_CLI_HPP

#include "roma/baselines.hpp"
#include "roma/experiments.hpp"
#include "roma/optimizer.hpp"
#include "roma/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace roma::cli
{
    // Fully resolved run configuration. Every key is optional in the file;
    // defaults are the library defaults. Unknown keys are rejected.
    struct RunConfig
    {
        std::string scenario_id = "default";
        Scenario scenario;
        SolverConfig solver;
        DEConfig de;
        std::vector<std::string> architectures = {"ROMA", "MA", "RO", "AS", "FPA"};
        std::vector<double> region_a_values = {0.5, 1.0, 1.5, 2.0, 2.5};
        std::vector<double> power_dbm_values = {10, 15, 20, 25, 30};
        std::vector<double> trace_powers_dbm = {20, 30};
        arma::uword seeds = 20;
        int jobs = 1;
    };

    // Strict JSON parse: unknown keys, wrong types and unit violations throw
    // config_error naming the offending key.
    RunConfig parse_config(const std::string &path);
    RunConfig parse_config_text(const std::string &text);

    // 12-significant-digit CSV cell formatting shared by every writer.
    std::string format_number(double v);

    std::string csv_header();
    std::string row_to_csv(const SweepRow &row);
    std::vector<SweepRow> read_rows_csv(const std::string &path); // empty if absent

    std::uint64_t fnv1a64(const std::string &bytes);

    inline constexpr int kExitOk = 0;
    inline constexpr int kExitRuntime = 1;
    inline constexpr int kExitConfig = 2;
    inline constexpr int kExitInfeasible = 3;

    // Executes one command (single, trace, region-sweep, power-sweep) and
    // writes results.csv, per-figure .dat files and manifest.json (written
    // last) into out_dir. Returns the process exit code. Completed jobs found
    // in out_dir/results.partial.csv are reused, which makes interrupted
    // sweeps restartable.
    int run(const std::string &command, const std::string &config_path, const std::string &out_dir,
            arma::uword seeds_override = 0, int jobs_override = 0);

    // Argument parsing + dispatch for the roma-sim binary.
    int main_impl(int argc, char **argv);
}

#endif
