// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma/experiments.hpp"

#include "roma/units.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>
#include <tuple>

namespace roma
{
    void sort_rows(std::vector<SweepRow> &rows)
    {
        std::sort(rows.begin(), rows.end(), [](const SweepRow &a, const SweepRow &b)
                  { return std::tie(a.scenario_id, a.architecture, a.a_over_lambda, a.p_dbm, a.seed,
                                    a.iteration) <
                           std::tie(b.scenario_id, b.architecture, b.a_over_lambda, b.p_dbm, b.seed,
                                    b.iteration); });
    }

    namespace
    {
        using Clock = std::chrono::steady_clock;

        long long ms_since(Clock::time_point start)
        {
            return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
        }

        struct Job
        {
            JobKey key;
            std::function<std::vector<SweepRow>()> work;
        };

        std::vector<SweepRow> run_jobs(std::vector<Job> jobs, const SweepOptions &options)
        {
            std::vector<Job> pending;
            for (auto &j : jobs)
            {
                if (options.skip && options.skip(j.key))
                    continue;
                pending.push_back(std::move(j));
            }

            std::vector<SweepRow> rows;
            std::mutex mtx;
            std::atomic<std::size_t> next{0};
            const int workers = std::max(1, options.jobs);

            auto worker = [&]()
            {
                while (true)
                {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= pending.size())
                        return;
                    std::vector<SweepRow> produced = pending[i].work();
                    std::lock_guard<std::mutex> lock(mtx);
                    if (options.on_job)
                        options.on_job(produced);
                    rows.insert(rows.end(), produced.begin(), produced.end());
                }
            };

            if (workers == 1)
                worker();
            else
            {
                std::vector<std::thread> pool;
                for (int w = 0; w < workers; ++w)
                    pool.emplace_back(worker);
                for (auto &t : pool)
                    t.join();
            }
            sort_rows(rows);
            return rows;
        }

        SweepRow base_row(const SweepOptions &options, const Scenario &sc, const std::string &arch,
                          std::uint64_t seed)
        {
            SweepRow row;
            row.scenario_id = options.scenario_id;
            row.architecture = arch;
            row.a_over_lambda = sc.region_a_wavelengths;
            row.p_dbm = watts_to_dbm(sc.per_user_power_w);
            row.seed = seed;
            return row;
        }

        std::vector<SweepRow> architecture_job(const SweepOptions &options, const Scenario &sc,
                                               const ArchitectureSpec &spec, const SolverConfig &config,
                                               std::uint64_t seed)
        {
            const auto start = Clock::now();
            const ArchitectureRun run = run_architecture(spec, sc, config, seed);
            SweepRow row = base_row(options, sc, spec.name(), seed);
            row.iteration = run.iterations;
            row.avg_se_bps_hz = run.report.average_se;
            row.per_user_se = run.report.per_user_se;
            row.wall_ms = ms_since(start);
            return {row};
        }
    }

    SweepResult single_run(const Scenario &scenario, const SolverConfig &config,
                           const SweepOptions &options)
    {
        std::vector<Job> jobs;
        for (std::uint64_t s = 0; s < options.seeds; ++s)
        {
            JobKey key{"ROMA", scenario.region_a_wavelengths, watts_to_dbm(scenario.per_user_power_w), s};
            jobs.push_back({key, [=]()
                            {
                                return architecture_job(options, scenario,
                                                        ArchitectureSpec::make(ArchitectureKind::kRoma),
                                                        config, s);
                            }});
        }
        return {run_jobs(std::move(jobs), options)};
    }

    SweepResult convergence_trace(const Scenario &scenario, const SolverConfig &config,
                                  const DEConfig &de_config, const std::vector<double> &powers_dbm,
                                  const SweepOptions &options)
    {
        std::vector<Job> jobs;
        for (double p : powers_dbm)
            for (std::uint64_t s = 0; s < options.seeds; ++s)
            {
                Scenario sc = scenario;
                sc.per_user_power_w = dbm_to_watts(p);
                JobKey key{"AO", sc.region_a_wavelengths, p, s};
                jobs.push_back({key, [=, this_options = options]()
                                {
                                    std::vector<SweepRow> rows;
                                    // AO first; its evaluation count fixes DE's budget.
                                    auto start = Clock::now();
                                    const SolveResult ao = solve(sc, config, s);
                                    const long long ao_ms = ms_since(start);
                                    for (std::size_t it = 0; it < ao.state.se_trace.size(); ++it)
                                    {
                                        SweepRow row = base_row(this_options, sc, "AO", s);
                                        row.iteration = static_cast<int>(it);
                                        row.avg_se_bps_hz = ao.state.se_trace[it];
                                        row.per_user_se = ao.state.per_user_trace[it];
                                        row.wall_ms = ao_ms;
                                        rows.push_back(row);
                                    }
                                    start = Clock::now();
                                    DEConfig de = de_config;
                                    de.generations = std::max<arma::uword>(
                                        de.generations,
                                        static_cast<arma::uword>(ao.objective_evaluations /
                                                                 std::max<arma::uword>(1, de.population)) +
                                            1);
                                    const DEResult der =
                                        de_solve(sc, de, config, s, ao.objective_evaluations);
                                    const long long de_ms = ms_since(start);
                                    for (std::size_t g = 0; g < der.trace.best_fitness.size(); ++g)
                                    {
                                        SweepRow row = base_row(this_options, sc, "DE", s);
                                        row.iteration = static_cast<int>(g);
                                        row.avg_se_bps_hz = der.trace.best_fitness[g];
                                        row.wall_ms = de_ms;
                                        rows.push_back(row);
                                    }
                                    return rows;
                                }});
            }
        return {run_jobs(std::move(jobs), options)};
    }

    SweepResult region_sweep(const Scenario &scenario, const SolverConfig &config,
                             const std::vector<double> &a_values,
                             const std::vector<ArchitectureSpec> &architectures,
                             const SweepOptions &options)
    {
        std::vector<Job> jobs;
        for (const auto &spec : architectures)
            for (double a : a_values)
                for (std::uint64_t s = 0; s < options.seeds; ++s)
                {
                    Scenario sc = scenario;
                    sc.region_a_wavelengths = a;
                    JobKey key{spec.name(), a, watts_to_dbm(sc.per_user_power_w), s};
                    jobs.push_back({key, [=, this_options = options]()
                                    { return architecture_job(this_options, sc, spec, config, s); }});
                }
        return {run_jobs(std::move(jobs), options)};
    }

    SweepResult power_sweep(const Scenario &scenario, const SolverConfig &config,
                            const std::vector<double> &p_dbm_values,
                            const std::vector<ArchitectureSpec> &architectures,
                            const SweepOptions &options)
    {
        std::vector<Job> jobs;
        for (const auto &spec : architectures)
            for (double p : p_dbm_values)
                for (std::uint64_t s = 0; s < options.seeds; ++s)
                {
                    Scenario sc = scenario;
                    sc.per_user_power_w = dbm_to_watts(p);
                    JobKey key{spec.name(), sc.region_a_wavelengths, p, s};
                    jobs.push_back({key, [=, this_options = options]()
                                    { return architecture_job(this_options, sc, spec, config, s); }});
                }
        return {run_jobs(std::move(jobs), options)};
    }
}
