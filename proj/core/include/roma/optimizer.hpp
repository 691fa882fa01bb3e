// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef ROMA_OPTIMIZER_HPP
#define ROMA_OPTIMIZER_HPP

#include "roma/evaluator.hpp"
#include "roma/metrics.hpp"
#include "roma/scenario.hpp"

#include <armadillo>
#include <functional>
#include <vector>

namespace roma
{
    struct ArmijoParams
    {
        double initial_step = 0.1;
        double shrink = 0.5;
        int max_backtracks = 20;
        double sufficient_decrease = 1e-4;
    };

    struct SolverConfig
    {
        double convergence_epsilon = 1e-5; // bits/s/Hz improvement threshold
        double rho_init = 0.1;
        double rho_growth = 2.0;
        double rho_max = 1e4;
        double fd_step_position_wl = 1e-4; // in wavelengths
        double fd_step_angle_rad = 1e-4;
        ArmijoParams armijo;
        int max_outer_iterations = 200;
        // Size of the frozen sample-average batch the optimizer sees; the
        // reported SE always comes from the held-out batch of the scenario.
        arma::uword optimization_trials = 10;

        void validate() const;
    };

    // Which variable groups an architecture optimizes.
    struct UpdateMask
    {
        bool positions = true;
        bool angles = true;
    };

    // All decision variables plus the auxiliary split variables, the penalty
    // factor and the per-iteration trace.
    struct OptimizerState
    {
        GeometryVariables vars;
        std::vector<PlanarOffset> aux_bs;
        std::vector<std::vector<PlanarOffset>> aux_users;
        double rho = 0.0;
        std::vector<double> se_trace; // average SE after each outer iteration
        std::vector<std::vector<double>> per_user_trace;
        std::vector<long long> eval_trace; // cumulative objective evaluations
        int iteration = 0;
        long long line_search_failures = 0;
    };

    struct SolveResult
    {
        OptimizerState state;
        SEReport report; // held-out evaluation of the final state
        long long objective_evaluations = 0;
    };

    // Central-difference gradient, (fn(x + h e_i) - fn(x - h e_i)) / (2 h).
    // Throws gradient_failure_error on non-finite objective values.
    arma::vec numerical_gradient(const std::function<double(const arma::vec &)> &fn,
                                 const arma::vec &x, const arma::vec &steps);

    // Alternating optimizer: ZF precoders are recomputed inside every
    // objective evaluation; positions are updated through the penalty split
    // against projected auxiliary variables; angles through projected
    // gradient ascent. Step acceptance requires the penalized objective to
    // decrease and the sample-average SE not to drop, which makes the SE
    // trace non-decreasing by construction.
    class AlternatingOptimizer
    {
    public:
        AlternatingOptimizer(const SampledScenario &sampled, const SolverConfig &config);

        OptimizerState initial_state() const;

        // Sample-average objective at arbitrary variables (commits them).
        double objective(const GeometryVariables &vars);

        bool update_positions_bs(OptimizerState &state);
        bool update_positions_user(OptimizerState &state, arma::uword user);
        void update_aux_bs(OptimizerState &state) const;
        void update_aux_user(OptimizerState &state, arma::uword user) const;
        void update_aux(OptimizerState &state) const;
        bool update_angles(OptimizerState &state);

        // Replaces offsets by their feasible projection (exact constraint
        // satisfaction at exit) and refreshes the auxiliary variables.
        void snap_to_feasible(OptimizerState &state);

        SolveResult solve(const UpdateMask &mask = {});

        Evaluator &evaluator() { return eval_; }
        long long evaluations() const { return eval_.evaluation_count(); }

    private:
        struct Probe
        {
            double f = 0.0;       // average SE
            EvalResult full;
        };

        void sync_current(const GeometryVariables &vars);
        double penalty_bs(const std::vector<PlanarOffset> &offsets,
                          const std::vector<PlanarOffset> &aux, double rho) const;
        bool position_step(OptimizerState &state, bool bs_side, arma::uword user);
        bool angle_pass(OptimizerState &state, bool alpha_pass);

        SampledScenario sampled_;
        SolverConfig config_;
        Evaluator eval_;
        double lambda_ = 0.0;
        double half_side_m_ = 0.0;
        double min_dist_m_ = 0.0;
        EvalResult current_;
    };

    // Builds the frozen batches for (scenario, seed index), runs the full
    // alternating loop and evaluates the result on the held-out batch.
    SolveResult solve(const Scenario &scenario, const SolverConfig &config,
                      std::uint64_t seed_index, const UpdateMask &mask = {});
}

#endif
