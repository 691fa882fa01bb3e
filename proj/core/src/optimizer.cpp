// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma/optimizer.hpp"

#include "roma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roma
{
    void SolverConfig::validate() const
    {
        if (!(convergence_epsilon > 0.0) || !(rho_init > 0.0) || !(rho_max >= rho_init))
            throw std::invalid_argument("SolverConfig: epsilon/rho settings must be positive");
        if (!(rho_growth > 1.0))
            throw std::invalid_argument("SolverConfig: rho_growth must be > 1");
        if (!(fd_step_position_wl > 0.0) || !(fd_step_angle_rad > 0.0))
            throw std::invalid_argument("SolverConfig: finite-difference steps must be > 0");
        if (!(armijo.initial_step > 0.0) || !(armijo.shrink > 0.0) || armijo.shrink >= 1.0 ||
            armijo.max_backtracks < 1 || !(armijo.sufficient_decrease > 0.0))
            throw std::invalid_argument("SolverConfig: invalid Armijo parameters");
        if (max_outer_iterations < 1)
            throw std::invalid_argument("SolverConfig: max_outer_iterations must be >= 1");
        if (optimization_trials < 1)
            throw std::invalid_argument("SolverConfig: optimization_trials must be >= 1");
    }

    arma::vec numerical_gradient(const std::function<double(const arma::vec &)> &fn,
                                 const arma::vec &x, const arma::vec &steps)
    {
        if (steps.n_elem != x.n_elem)
            throw std::invalid_argument("numerical_gradient: step count mismatch");
        arma::vec g(x.n_elem);
        arma::vec probe = x;
        for (arma::uword i = 0; i < x.n_elem; ++i)
        {
            const double h = steps(i);
            probe(i) = x(i) + h;
            const double fp = fn(probe);
            probe(i) = x(i) - h;
            const double fm = fn(probe);
            probe(i) = x(i);
            if (!std::isfinite(fp) || !std::isfinite(fm))
                throw gradient_failure_error("numerical_gradient: non-finite objective");
            g(i) = (fp - fm) / (2.0 * h);
        }
        return g;
    }

    AlternatingOptimizer::AlternatingOptimizer(const SampledScenario &sampled, const SolverConfig &config)
        : sampled_(sampled), config_(config), eval_(sampled, BatchKind::kOptimization)
    {
        config_.validate();
        lambda_ = sampled_.scenario.lambda();
        half_side_m_ = sampled_.scenario.region_a_wavelengths * lambda_;
        min_dist_m_ = sampled_.scenario.min_distance_wavelengths * lambda_;
    }

    OptimizerState AlternatingOptimizer::initial_state() const
    {
        const Scenario &sc = sampled_.scenario;
        const RegionSpec region = sc.region();
        if (!region.grid_fits(sc.bs_grid_h, sc.bs_grid_v) ||
            !region.grid_fits(sc.user_grid_h, sc.user_grid_v))
            throw infeasible_problem_error("initial_state: element grid cannot satisfy the minimum "
                                           "distance inside the region");

        auto init_panel = [&](arma::uword rows_h, arma::uword rows_v)
        {
            auto offsets = element_grid(rows_h, rows_v, lambda_ / 2, lambda_ / 2);
            bool clamped = false;
            for (auto &o : offsets)
            {
                const double x = std::clamp(o.x, -half_side_m_, half_side_m_);
                const double z = std::clamp(o.z, -half_side_m_, half_side_m_);
                clamped = clamped || x != o.x || z != o.z;
                o = {x, z};
            }
            if (clamped && min_pairwise_distance(offsets) < min_dist_m_ - 1e-9)
                offsets = project_min_distance(offsets, min_dist_m_, 2.0 * half_side_m_);
            return offsets;
        };

        OptimizerState state;
        state.vars.alphas = arma::vec(sc.users + 1, arma::fill::value(M_PI / 2));
        state.vars.betas = arma::vec(sc.users + 1, arma::fill::value(M_PI / 2));
        state.vars.bs_offsets = init_panel(sc.bs_grid_h, sc.bs_grid_v);
        state.vars.user_offsets.assign(sc.users, init_panel(sc.user_grid_h, sc.user_grid_v));
        state.aux_bs = project_min_distance(state.vars.bs_offsets, min_dist_m_, 2.0 * half_side_m_);
        state.aux_users.resize(sc.users);
        for (arma::uword u = 0; u < sc.users; ++u)
            state.aux_users[u] =
                project_min_distance(state.vars.user_offsets[u], min_dist_m_, 2.0 * half_side_m_);
        state.rho = config_.rho_init;
        return state;
    }

    void AlternatingOptimizer::sync_current(const GeometryVariables &vars)
    {
        eval_.commit(vars);
        current_ = eval_.eval_committed();
    }

    double AlternatingOptimizer::objective(const GeometryVariables &vars)
    {
        sync_current(vars);
        return current_.average_se;
    }

    double AlternatingOptimizer::penalty_bs(const std::vector<PlanarOffset> &offsets,
                                            const std::vector<PlanarOffset> &aux, double rho) const
    {
        double p = 0.0;
        for (std::size_t i = 0; i < offsets.size(); ++i)
        {
            const double dx = offsets[i].x - aux[i].x;
            const double dz = offsets[i].z - aux[i].z;
            p += dx * dx + dz * dz;
        }
        return rho * p;
    }

    bool AlternatingOptimizer::position_step(OptimizerState &state, bool bs_side, arma::uword user)
    {
        const std::vector<PlanarOffset> &offs =
            bs_side ? state.vars.bs_offsets : state.vars.user_offsets[user];
        const std::vector<PlanarOffset> &aux = bs_side ? state.aux_bs : state.aux_users[user];
        const double h = config_.fd_step_position_wl * lambda_;
        const double f0 = current_.average_se;
        const double pen0 = penalty_bs(offs, aux, state.rho);
        const double obj0 = -f0 + pen0;

        auto clampc = [&](double v) { return std::clamp(v, -half_side_m_, half_side_m_); };
        auto probe_coord = [&](arma::uword k, double x, double z)
        {
            return bs_side ? eval_.eval_bs_coord(k, x, z).average_se
                           : eval_.eval_user_coord(user, k, x, z).average_se;
        };

        // Gradient of the penalized objective; probe points clamped into the
        // region so the objective is never evaluated outside the feasible box.
        std::vector<double> gx(offs.size(), 0.0), gz(offs.size(), 0.0);
        double gnorm2 = 0.0;
        for (arma::uword k = 0; k < offs.size(); ++k)
        {
            const double xp = clampc(offs[k].x + h), xm = clampc(offs[k].x - h);
            if (xp > xm)
            {
                const double df = (probe_coord(k, xp, offs[k].z) - probe_coord(k, xm, offs[k].z)) / (xp - xm);
                gx[k] = -df + 2.0 * state.rho * (offs[k].x - aux[k].x);
            }
            const double zp = clampc(offs[k].z + h), zm = clampc(offs[k].z - h);
            if (zp > zm)
            {
                const double df = (probe_coord(k, offs[k].x, zp) - probe_coord(k, offs[k].x, zm)) / (zp - zm);
                gz[k] = -df + 2.0 * state.rho * (offs[k].z - aux[k].z);
            }
            gnorm2 += gx[k] * gx[k] + gz[k] * gz[k];
        }
        if (gnorm2 == 0.0)
            return false; // stationary point, nothing to do

        double t = config_.armijo.initial_step;
        std::vector<PlanarOffset> cand(offs.size());
        for (int bt = 0; bt < config_.armijo.max_backtracks; ++bt, t *= config_.armijo.shrink)
        {
            double moved2 = 0.0;
            for (arma::uword k = 0; k < offs.size(); ++k)
            {
                cand[k] = {clampc(offs[k].x - t * gx[k]), clampc(offs[k].z - t * gz[k])};
                const double dx = cand[k].x - offs[k].x, dz = cand[k].z - offs[k].z;
                moved2 += dx * dx + dz * dz;
            }
            if (moved2 == 0.0)
                continue;
            const EvalResult probe =
                bs_side ? eval_.eval_bs_offsets(cand) : eval_.eval_user_offsets(user, cand);
            const double obj_c = -probe.average_se + penalty_bs(cand, aux, state.rho);
            const bool sufficient =
                obj_c <= obj0 - config_.armijo.sufficient_decrease / t * moved2;
            if (sufficient && probe.average_se >= f0)
            {
                if (bs_side)
                    state.vars.bs_offsets = cand;
                else
                    state.vars.user_offsets[user] = cand;
                eval_.commit(state.vars);
                current_ = probe;
                return true;
            }
        }
        ++state.line_search_failures;
        return false;
    }

    bool AlternatingOptimizer::update_positions_bs(OptimizerState &state)
    {
        return position_step(state, true, 0);
    }

    bool AlternatingOptimizer::update_positions_user(OptimizerState &state, arma::uword user)
    {
        return position_step(state, false, user);
    }

    void AlternatingOptimizer::update_aux_bs(OptimizerState &state) const
    {
        state.aux_bs = project_min_distance(state.vars.bs_offsets, min_dist_m_, 2.0 * half_side_m_);
    }

    void AlternatingOptimizer::update_aux_user(OptimizerState &state, arma::uword user) const
    {
        state.aux_users[user] =
            project_min_distance(state.vars.user_offsets[user], min_dist_m_, 2.0 * half_side_m_);
    }

    void AlternatingOptimizer::update_aux(OptimizerState &state) const
    {
        update_aux_bs(state);
        for (arma::uword u = 0; u < sampled_.scenario.users; ++u)
            update_aux_user(state, u);
    }

    bool AlternatingOptimizer::angle_pass(OptimizerState &state, bool alpha_pass)
    {
        const double h = config_.fd_step_angle_rad;
        const double f0 = current_.average_se;
        arma::vec &angles = alpha_pass ? state.vars.alphas : state.vars.betas;
        auto clampa = [](double v) { return std::clamp(v, 0.0, M_PI); };

        arma::vec g(angles.n_elem, arma::fill::zeros);
        for (arma::uword p = 0; p < angles.n_elem; ++p)
        {
            const double ap = clampa(angles(p) + h), am = clampa(angles(p) - h);
            if (ap <= am)
                continue;
            const double fp = alpha_pass ? eval_.eval_alpha(p, ap).average_se
                                         : eval_.eval_beta(p, ap).average_se;
            const double fm = alpha_pass ? eval_.eval_alpha(p, am).average_se
                                         : eval_.eval_beta(p, am).average_se;
            g(p) = (fp - fm) / (ap - am);
        }
        if (arma::norm(g) == 0.0)
            return false;

        double t = config_.armijo.initial_step;
        for (int bt = 0; bt < config_.armijo.max_backtracks; ++bt, t *= config_.armijo.shrink)
        {
            arma::vec cand = angles + t * g;
            cand.transform(clampa);
            const double moved2 = arma::dot(cand - angles, cand - angles);
            if (moved2 == 0.0)
                continue;
            const EvalResult probe = alpha_pass ? eval_.eval_angles(cand, state.vars.betas)
                                                : eval_.eval_angles(state.vars.alphas, cand);
            if (probe.average_se >= f0 + config_.armijo.sufficient_decrease / t * moved2)
            {
                angles = cand;
                eval_.commit(state.vars);
                current_ = probe;
                return true;
            }
        }
        ++state.line_search_failures;
        return false;
    }

    bool AlternatingOptimizer::update_angles(OptimizerState &state)
    {
        const bool a = angle_pass(state, true);
        const bool b = angle_pass(state, false);
        return a || b;
    }

    void AlternatingOptimizer::snap_to_feasible(OptimizerState &state)
    {
        state.vars.bs_offsets =
            project_min_distance(state.vars.bs_offsets, min_dist_m_, 2.0 * half_side_m_);
        state.aux_bs = state.vars.bs_offsets;
        for (arma::uword u = 0; u < sampled_.scenario.users; ++u)
        {
            state.vars.user_offsets[u] =
                project_min_distance(state.vars.user_offsets[u], min_dist_m_, 2.0 * half_side_m_);
            state.aux_users[u] = state.vars.user_offsets[u];
        }
        sync_current(state.vars);
    }

    SolveResult AlternatingOptimizer::solve(const UpdateMask &mask)
    {
        OptimizerState state = initial_state();
        sync_current(state.vars);
        state.se_trace.push_back(current_.average_se);
        state.per_user_trace.push_back(current_.per_user_se);
        state.eval_trace.push_back(eval_.evaluation_count());

        double improvement = 0.0;
        do
        {
            ++state.iteration;
            if (mask.positions)
            {
                update_positions_bs(state);
                update_aux_bs(state);
                for (arma::uword u = 0; u < sampled_.scenario.users; ++u)
                {
                    update_positions_user(state, u);
                    update_aux_user(state, u);
                }
            }
            if (mask.angles)
            {
                angle_pass(state, true);
                angle_pass(state, false);
            }
            improvement = current_.average_se - state.se_trace.back();
            state.se_trace.push_back(current_.average_se);
            state.per_user_trace.push_back(current_.per_user_se);
            state.eval_trace.push_back(eval_.evaluation_count());
            state.rho = std::min(state.rho * config_.rho_growth, config_.rho_max);
        } while (improvement > config_.convergence_epsilon &&
                 state.iteration < config_.max_outer_iterations);

        if (mask.positions)
            snap_to_feasible(state);

        Evaluator holdout(sampled_, BatchKind::kHoldout);
        holdout.commit(state.vars);
        const EvalResult held = holdout.eval_committed();

        SolveResult result;
        result.state = std::move(state);
        result.report.per_user_se = held.per_user_se;
        result.report.average_se = held.average_se;
        result.report.average_se_std_error = held.average_se_std_error;
        result.objective_evaluations = eval_.evaluation_count();
        return result;
    }

    SolveResult solve(const Scenario &scenario, const SolverConfig &config,
                      std::uint64_t seed_index, const UpdateMask &mask)
    {
        const SampledScenario sampled =
            SampledScenario::make(scenario, seed_index, config.optimization_trials);
        AlternatingOptimizer opt(sampled, config);
        return opt.solve(mask);
    }
}
