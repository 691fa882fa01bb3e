// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma/baselines.hpp"

#include "roma/errors.hpp"
#include "roma/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roma
{
    ArchitectureSpec ArchitectureSpec::make(ArchitectureKind kind)
    {
        ArchitectureSpec s;
        s.kind = kind;
        switch (kind)
        {
        case ArchitectureKind::kRoma:
            s.frozen_angles = false;
            s.frozen_positions = false;
            break;
        case ArchitectureKind::kMovable:
            s.frozen_angles = true;
            s.frozen_positions = false;
            break;
        case ArchitectureKind::kRotary:
            s.frozen_angles = false;
            s.frozen_positions = true;
            break;
        case ArchitectureKind::kAntennaSelection:
        case ArchitectureKind::kFixed:
            s.frozen_angles = true;
            s.frozen_positions = true;
            break;
        }
        return s;
    }

    ArchitectureSpec ArchitectureSpec::from_name(const std::string &name)
    {
        if (name == "ROMA")
            return make(ArchitectureKind::kRoma);
        if (name == "MA")
            return make(ArchitectureKind::kMovable);
        if (name == "RO")
            return make(ArchitectureKind::kRotary);
        if (name == "AS")
            return make(ArchitectureKind::kAntennaSelection);
        if (name == "FPA")
            return make(ArchitectureKind::kFixed);
        throw std::invalid_argument("unknown architecture name: " + name);
    }

    std::string ArchitectureSpec::name() const
    {
        switch (kind)
        {
        case ArchitectureKind::kRoma:
            return "ROMA";
        case ArchitectureKind::kMovable:
            return "MA";
        case ArchitectureKind::kRotary:
            return "RO";
        case ArchitectureKind::kAntennaSelection:
            return "AS";
        case ArchitectureKind::kFixed:
            return "FPA";
        }
        return "?";
    }

    void ArchitectureSpec::validate() const
    {
        if (kind == ArchitectureKind::kMovable && !frozen_angles)
            throw std::invalid_argument("ArchitectureSpec: MA requires frozen angles");
        if (kind == ArchitectureKind::kRotary && !frozen_positions)
            throw std::invalid_argument("ArchitectureSpec: RO requires frozen positions");
        if ((kind == ArchitectureKind::kAntennaSelection || kind == ArchitectureKind::kFixed) &&
            (!frozen_angles || !frozen_positions))
            throw std::invalid_argument("ArchitectureSpec: AS/FPA require frozen angles and positions");
        if (kind == ArchitectureKind::kAntennaSelection && as_pool <= as_active)
            throw std::invalid_argument("ArchitectureSpec: AS pool must exceed active count");
    }

    std::vector<std::vector<bool>> enumerate_masks(arma::uword pool, arma::uword active)
    {
        std::vector<std::vector<bool>> masks;
        std::vector<arma::uword> idx(active);
        for (arma::uword i = 0; i < active; ++i)
            idx[i] = i;
        while (true)
        {
            std::vector<bool> mask(pool, false);
            for (arma::uword i : idx)
                mask[i] = true;
            masks.push_back(mask);
            // next combination in lexicographic order
            arma::sword k = static_cast<arma::sword>(active) - 1;
            while (k >= 0 && idx[k] == pool - active + static_cast<arma::uword>(k))
                --k;
            if (k < 0)
                break;
            ++idx[k];
            for (arma::uword j = static_cast<arma::uword>(k) + 1; j < active; ++j)
                idx[j] = idx[j - 1] + 1;
        }
        return masks;
    }

    namespace
    {
        std::vector<PlanarOffset> select_offsets(const std::vector<PlanarOffset> &pool,
                                                 const std::vector<bool> &mask)
        {
            std::vector<PlanarOffset> out;
            for (std::size_t i = 0; i < pool.size(); ++i)
                if (mask[i])
                    out.push_back(pool[i]);
            return out;
        }
    }

    SelectionResult antenna_selection(const Scenario &scenario, const SolverConfig &config,
                                      std::uint64_t seed_index, arma::uword pool_h, arma::uword pool_v,
                                      arma::uword active, int max_cycles)
    {
        if (pool_h * pool_v < active)
            throw std::invalid_argument("antenna_selection: pool smaller than active count");
        if (scenario.bs_count() != active || scenario.user_count() != active)
            throw std::invalid_argument("antenna_selection: scenario antenna counts must equal the "
                                        "active count");

        const double lambda = scenario.lambda();
        const auto pool = element_grid(pool_h, pool_v, lambda / 2, lambda / 2);
        const auto masks = enumerate_masks(pool_h * pool_v, active);
        const arma::uword panels = scenario.users + 1;

        const SampledScenario sampled =
            SampledScenario::make(scenario, seed_index, config.optimization_trials);
        Evaluator eval(sampled, BatchKind::kOptimization);

        SelectionResult result;
        result.masks.assign(panels, masks.front());

        GeometryVariables vars;
        vars.alphas = arma::vec(panels, arma::fill::value(M_PI / 2));
        vars.betas = arma::vec(panels, arma::fill::value(M_PI / 2));
        vars.bs_offsets = select_offsets(pool, result.masks[0]);
        vars.user_offsets.resize(scenario.users);
        for (arma::uword u = 0; u < scenario.users; ++u)
            vars.user_offsets[u] = select_offsets(pool, result.masks[u + 1]);
        eval.commit(vars);
        double best_se = eval.eval_committed().average_se;

        for (int cycle = 0; cycle < max_cycles; ++cycle)
        {
            bool changed = false;
            for (arma::uword panel = 0; panel < panels; ++panel)
            {
                arma::uword best_mask = 0;
                double panel_best = -1.0;
                for (arma::uword mi = 0; mi < masks.size(); ++mi)
                {
                    const auto offsets = select_offsets(pool, masks[mi]);
                    const double se = panel == 0
                                          ? eval.eval_bs_offsets(offsets).average_se
                                          : eval.eval_user_offsets(panel - 1, offsets).average_se;
                    if (se > panel_best)
                    {
                        panel_best = se;
                        best_mask = mi;
                    }
                }
                if (masks[best_mask] != result.masks[panel])
                {
                    result.masks[panel] = masks[best_mask];
                    changed = true;
                }
                if (panel == 0)
                    vars.bs_offsets = select_offsets(pool, result.masks[0]);
                else
                    vars.user_offsets[panel - 1] = select_offsets(pool, result.masks[panel]);
                eval.commit(vars);
                best_se = panel_best;
            }
            result.cycles = cycle + 1;
            if (!changed)
                break;
        }
        result.optimization_se = best_se;
        result.objective_evaluations = eval.evaluation_count();
        return result;
    }

    ArchitectureRun run_architecture(const ArchitectureSpec &spec, const Scenario &scenario,
                                     const SolverConfig &config, std::uint64_t seed_index)
    {
        spec.validate();
        ArchitectureRun run;
        switch (spec.kind)
        {
        case ArchitectureKind::kRoma:
        case ArchitectureKind::kMovable:
        case ArchitectureKind::kRotary:
        {
            UpdateMask mask;
            mask.positions = !spec.frozen_positions;
            mask.angles = !spec.frozen_angles;
            SolveResult r = solve(scenario, config, seed_index, mask);
            run.report = r.report;
            run.se_trace = r.state.se_trace;
            run.per_user_trace = r.state.per_user_trace;
            run.eval_trace = r.state.eval_trace;
            run.iterations = r.state.iteration;
            run.objective_evaluations = r.objective_evaluations;
            break;
        }
        case ArchitectureKind::kFixed:
        {
            const SampledScenario sampled =
                SampledScenario::make(scenario, seed_index, config.optimization_trials);
            AlternatingOptimizer opt(sampled, config);
            const OptimizerState state = opt.initial_state();
            const double opt_se = opt.objective(state.vars);
            Evaluator holdout(sampled, BatchKind::kHoldout);
            holdout.commit(state.vars);
            const EvalResult held = holdout.eval_committed();
            run.report.per_user_se = held.per_user_se;
            run.report.average_se = held.average_se;
            run.report.average_se_std_error = held.average_se_std_error;
            run.se_trace = {opt_se};
            run.per_user_trace = {held.per_user_se};
            run.eval_trace = {opt.evaluations()};
            run.objective_evaluations = opt.evaluations();
            break;
        }
        case ArchitectureKind::kAntennaSelection:
        {
            // 4x3 pool at half-wavelength spacing, 9 active elements.
            const SelectionResult sel =
                antenna_selection(scenario, config, seed_index, 4, 3, spec.as_active);
            const SampledScenario sampled =
                SampledScenario::make(scenario, seed_index, config.optimization_trials);
            const double lambda = scenario.lambda();
            const auto pool = element_grid(4, 3, lambda / 2, lambda / 2);
            GeometryVariables vars;
            vars.alphas = arma::vec(scenario.users + 1, arma::fill::value(M_PI / 2));
            vars.betas = arma::vec(scenario.users + 1, arma::fill::value(M_PI / 2));
            vars.bs_offsets = select_offsets(pool, sel.masks[0]);
            vars.user_offsets.resize(scenario.users);
            for (arma::uword u = 0; u < scenario.users; ++u)
                vars.user_offsets[u] = select_offsets(pool, sel.masks[u + 1]);
            Evaluator holdout(sampled, BatchKind::kHoldout);
            holdout.commit(vars);
            const EvalResult held = holdout.eval_committed();
            run.report.per_user_se = held.per_user_se;
            run.report.average_se = held.average_se;
            run.report.average_se_std_error = held.average_se_std_error;
            run.se_trace = {sel.optimization_se};
            run.per_user_trace = {held.per_user_se};
            run.eval_trace = {sel.objective_evaluations};
            run.iterations = sel.cycles;
            run.objective_evaluations = sel.objective_evaluations;
            break;
        }
        }
        return run;
    }

    void DEConfig::validate() const
    {
        if (population < 4)
            throw std::invalid_argument("DEConfig: population must be >= 4");
        if (!(mutation_factor > 0.0) || mutation_factor > 2.0)
            throw std::invalid_argument("DEConfig: mutation factor must be in (0, 2]");
        if (crossover_rate < 0.0 || crossover_rate > 1.0)
            throw std::invalid_argument("DEConfig: crossover rate must be in [0, 1]");
        if (generations < 1)
            throw std::invalid_argument("DEConfig: generations must be >= 1");
    }

    DEOutcome de_optimize(const std::function<double(const arma::vec &)> &fitness,
                          const arma::vec &lower, const arma::vec &upper, const DEConfig &config,
                          std::uint64_t seed, const arma::vec *initial_point, long long max_evaluations)
    {
        config.validate();
        if (lower.n_elem != upper.n_elem)
            throw std::invalid_argument("de_optimize: bound size mismatch");
        const arma::uword dim = lower.n_elem;
        const arma::uword pop = config.population;
        RandomSource rng(seed);

        auto clamp_vec = [&](arma::vec &v)
        {
            for (arma::uword i = 0; i < dim; ++i)
                v(i) = std::clamp(v(i), lower(i), upper(i));
        };

        std::vector<arma::vec> members(pop);
        std::vector<double> fit(pop);
        long long evals = 0;
        for (arma::uword i = 0; i < pop; ++i)
        {
            arma::vec x(dim);
            if (i == 0 && initial_point != nullptr)
                x = *initial_point;
            else
                for (arma::uword d = 0; d < dim; ++d)
                    x(d) = rng.uniform(lower(d), upper(d));
            clamp_vec(x);
            members[i] = x;
            fit[i] = fitness(x);
            ++evals;
        }

        arma::uword best_i = 0;
        for (arma::uword i = 1; i < pop; ++i)
            if (fit[i] > fit[best_i])
                best_i = i;

        DEOutcome out;
        out.trace.best_fitness.push_back(fit[best_i]);
        out.trace.evals.push_back(evals);

        for (arma::uword gen = 0; gen < config.generations; ++gen)
        {
            if (max_evaluations > 0 && evals >= max_evaluations)
                break;
            for (arma::uword i = 0; i < pop; ++i)
            {
                arma::uword r1, r2, r3;
                do
                    r1 = rng.raw() % pop;
                while (r1 == i);
                do
                    r2 = rng.raw() % pop;
                while (r2 == i || r2 == r1);
                do
                    r3 = rng.raw() % pop;
                while (r3 == i || r3 == r1 || r3 == r2);

                arma::vec trial = members[i];
                const arma::uword jrand = rng.raw() % dim;
                for (arma::uword d = 0; d < dim; ++d)
                    if (d == jrand || rng.uniform() < config.crossover_rate)
                        trial(d) = members[r1](d) +
                                   config.mutation_factor * (members[r2](d) - members[r3](d));
                clamp_vec(trial);
                const double f = fitness(trial);
                ++evals;
                if (f >= fit[i])
                {
                    members[i] = trial;
                    fit[i] = f;
                    if (f > fit[best_i])
                        best_i = i;
                }
                if (max_evaluations > 0 && evals >= max_evaluations)
                    break;
            }
            out.trace.best_fitness.push_back(fit[best_i]);
            out.trace.evals.push_back(evals);
        }
        out.best = members[best_i];
        out.best_fitness = fit[best_i];
        out.evaluations = evals;
        return out;
    }

    namespace
    {
        arma::vec encode(const GeometryVariables &vars)
        {
            const arma::uword panels = vars.alphas.n_elem;
            const arma::uword m = vars.bs_offsets.size();
            const arma::uword users = vars.user_offsets.size();
            const arma::uword n = users > 0 ? vars.user_offsets[0].size() : 0;
            arma::vec x(2 * panels + 2 * m + 2 * n * users);
            arma::uword k = 0;
            for (arma::uword p = 0; p < panels; ++p)
                x(k++) = vars.alphas(p);
            for (arma::uword p = 0; p < panels; ++p)
                x(k++) = vars.betas(p);
            for (const auto &o : vars.bs_offsets)
            {
                x(k++) = o.x;
                x(k++) = o.z;
            }
            for (const auto &panel : vars.user_offsets)
                for (const auto &o : panel)
                {
                    x(k++) = o.x;
                    x(k++) = o.z;
                }
            return x;
        }

        GeometryVariables decode(const arma::vec &x, arma::uword users, arma::uword m, arma::uword n)
        {
            GeometryVariables vars;
            const arma::uword panels = users + 1;
            vars.alphas.set_size(panels);
            vars.betas.set_size(panels);
            arma::uword k = 0;
            for (arma::uword p = 0; p < panels; ++p)
                vars.alphas(p) = x(k++);
            for (arma::uword p = 0; p < panels; ++p)
                vars.betas(p) = x(k++);
            vars.bs_offsets.resize(m);
            for (arma::uword i = 0; i < m; ++i)
            {
                vars.bs_offsets[i].x = x(k++);
                vars.bs_offsets[i].z = x(k++);
            }
            vars.user_offsets.assign(users, std::vector<PlanarOffset>(n));
            for (arma::uword u = 0; u < users; ++u)
                for (arma::uword i = 0; i < n; ++i)
                {
                    vars.user_offsets[u][i].x = x(k++);
                    vars.user_offsets[u][i].z = x(k++);
                }
            return vars;
        }
    }

    DEResult de_solve(const Scenario &scenario, const DEConfig &de_config,
                      const SolverConfig &solver_config, std::uint64_t seed_index,
                      long long max_evaluations)
    {
        const SampledScenario sampled =
            SampledScenario::make(scenario, seed_index, solver_config.optimization_trials);
        AlternatingOptimizer opt(sampled, solver_config);
        Evaluator &eval = opt.evaluator();

        const double lambda = scenario.lambda();
        const double half = scenario.region_a_wavelengths * lambda;
        const double min_dist = scenario.min_distance_wavelengths * lambda;
        const arma::uword users = scenario.users;
        const arma::uword m = scenario.bs_count();
        const arma::uword n = scenario.user_count();
        const arma::uword panels = users + 1;
        const arma::uword dim = 2 * panels + 2 * m + 2 * n * users;

        arma::vec lower(dim), upper(dim);
        for (arma::uword k = 0; k < 2 * panels; ++k)
        {
            lower(k) = 0.0;
            upper(k) = M_PI;
        }
        for (arma::uword k = 2 * panels; k < dim; ++k)
        {
            lower(k) = -half;
            upper(k) = half;
        }

        // Minimum-distance constraint as the quadratic split penalty against
        // the projected offsets, with the penalty factor pinned at the AO cap.
        const double rho = solver_config.rho_max;
        auto fitness = [&](const arma::vec &x)
        {
            const GeometryVariables vars = decode(x, users, m, n);
            const double f = opt.objective(vars);
            double pen = 0.0;
            auto add_pen = [&](const std::vector<PlanarOffset> &offs)
            {
                const auto proj = project_min_distance(offs, min_dist, 2.0 * half);
                for (std::size_t i = 0; i < offs.size(); ++i)
                {
                    const double dx = offs[i].x - proj[i].x, dz = offs[i].z - proj[i].z;
                    pen += dx * dx + dz * dz;
                }
            };
            add_pen(vars.bs_offsets);
            for (const auto &panel : vars.user_offsets)
                add_pen(panel);
            return f - rho * pen;
        };

        const arma::vec start = encode(opt.initial_state().vars);
        const DEOutcome outcome = de_optimize(
            fitness, lower, upper, de_config,
            derive_seed(scenario.master_seed, seed_stream::kDifferentialEvolution, seed_index), &start,
            max_evaluations);

        DEResult result;
        result.best = decode(outcome.best, users, m, n);
        result.best.bs_offsets = project_min_distance(result.best.bs_offsets, min_dist, 2.0 * half);
        for (auto &panel : result.best.user_offsets)
            panel = project_min_distance(panel, min_dist, 2.0 * half);
        result.trace = outcome.trace;
        result.objective_evaluations = eval.evaluation_count();

        Evaluator holdout(sampled, BatchKind::kHoldout);
        holdout.commit(result.best);
        const EvalResult held = holdout.eval_committed();
        result.report.per_user_se = held.per_user_se;
        result.report.average_se = held.average_se;
        result.report.average_se_std_error = held.average_se_std_error;
        return result;
    }
}
