// SPDX-License-Identifier: Apache-2.0
//
// roma-sim: rotary and movable antenna (ROMA) multi-user MIMO simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "roma_cli.hpp"

#include "roma/errors.hpp"
#include "roma/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace roma::cli
{
    namespace
    {
        PathModel model_from_name(const std::string &name)
        {
            if (name == "stochastic")
                return PathModel::kStochastic;
            if (name == "stochastic-isotropic")
                return PathModel::kStochasticIsotropic;
            if (name == "los-geometric")
                return PathModel::kLosGeometric;
            throw config_error("config key 'channel_model': unknown model '" + name + "'");
        }

        std::string model_name(PathModel m)
        {
            switch (m)
            {
            case PathModel::kStochastic:
                return "stochastic";
            case PathModel::kStochasticIsotropic:
                return "stochastic-isotropic";
            case PathModel::kLosGeometric:
                return "los-geometric";
            }
            return "?";
        }

        double as_number(const json &v, const std::string &key)
        {
            if (!v.is_number())
                throw config_error("config key '" + key + "': expected a number");
            return v.get<double>();
        }

        arma::uword as_count(const json &v, const std::string &key)
        {
            if (!v.is_number_integer() || v.get<long long>() < 0)
                throw config_error("config key '" + key + "': expected a non-negative integer");
            return static_cast<arma::uword>(v.get<long long>());
        }

        std::vector<double> as_number_list(const json &v, const std::string &key)
        {
            if (!v.is_array() || v.empty())
                throw config_error("config key '" + key + "': expected a non-empty array of numbers");
            std::vector<double> out;
            for (const auto &e : v)
                out.push_back(as_number(e, key));
            return out;
        }
    }

    RunConfig parse_config_text(const std::string &text)
    {
        json obj;
        try
        {
            obj = text.empty() ? json::object() : json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw config_error(std::string("config parse error: ") + e.what());
        }
        if (!obj.is_object())
            throw config_error("config must be a JSON object");

        RunConfig cfg;
        Scenario &sc = cfg.scenario;
        SolverConfig &so = cfg.solver;
        DEConfig &de = cfg.de;

        using Handler = std::function<void(const json &)>;
        const std::map<std::string, Handler> handlers = {
            {"scenario_id", [&](const json &v)
             {
                 if (!v.is_string())
                     throw config_error("config key 'scenario_id': expected a string");
                 cfg.scenario_id = v.get<std::string>();
                 if (cfg.scenario_id.find_first_of(",;\n\r") != std::string::npos)
                     throw config_error("config key 'scenario_id': must not contain ',' ';' or newlines");
             }},
            {"users", [&](const json &v) { sc.users = as_count(v, "users"); }},
            {"bs_grid_h", [&](const json &v) { sc.bs_grid_h = as_count(v, "bs_grid_h"); }},
            {"bs_grid_v", [&](const json &v) { sc.bs_grid_v = as_count(v, "bs_grid_v"); }},
            {"user_grid_h", [&](const json &v) { sc.user_grid_h = as_count(v, "user_grid_h"); }},
            {"user_grid_v", [&](const json &v) { sc.user_grid_v = as_count(v, "user_grid_v"); }},
            {"carrier_hz", [&](const json &v) { sc.carrier_hz = as_number(v, "carrier_hz"); }},
            {"sigma2_dbm", [&](const json &v) { sc.sigma2_w = dbm_to_watts(as_number(v, "sigma2_dbm")); }},
            {"p_dbm", [&](const json &v) { sc.per_user_power_w = dbm_to_watts(as_number(v, "p_dbm")); }},
            {"a_over_lambda", [&](const json &v) { sc.region_a_wavelengths = as_number(v, "a_over_lambda"); }},
            {"d_over_lambda", [&](const json &v) { sc.min_distance_wavelengths = as_number(v, "d_over_lambda"); }},
            {"paths_l", [&](const json &v) { sc.path_count = as_count(v, "paths_l"); }},
            {"channel_model", [&](const json &v)
             {
                 if (!v.is_string())
                     throw config_error("config key 'channel_model': expected a string");
                 sc.channel_model = model_from_name(v.get<std::string>());
             }},
            {"user_radius_min_m", [&](const json &v) { sc.user_radius_min_m = as_number(v, "user_radius_min_m"); }},
            {"user_radius_max_m", [&](const json &v) { sc.user_radius_max_m = as_number(v, "user_radius_max_m"); }},
            {"master_seed", [&](const json &v) { sc.master_seed = as_count(v, "master_seed"); }},
            {"mc_trials", [&](const json &v) { sc.mc_trials = as_count(v, "mc_trials"); }},
            {"seeds", [&](const json &v) { cfg.seeds = as_count(v, "seeds"); }},
            {"jobs", [&](const json &v) { cfg.jobs = static_cast<int>(as_count(v, "jobs")); }},
            {"convergence_epsilon", [&](const json &v) { so.convergence_epsilon = as_number(v, "convergence_epsilon"); }},
            {"rho_init", [&](const json &v) { so.rho_init = as_number(v, "rho_init"); }},
            {"rho_growth", [&](const json &v) { so.rho_growth = as_number(v, "rho_growth"); }},
            {"rho_max", [&](const json &v) { so.rho_max = as_number(v, "rho_max"); }},
            {"fd_step_position_wl", [&](const json &v) { so.fd_step_position_wl = as_number(v, "fd_step_position_wl"); }},
            {"fd_step_angle_rad", [&](const json &v) { so.fd_step_angle_rad = as_number(v, "fd_step_angle_rad"); }},
            {"armijo_initial_step", [&](const json &v) { so.armijo.initial_step = as_number(v, "armijo_initial_step"); }},
            {"armijo_shrink", [&](const json &v) { so.armijo.shrink = as_number(v, "armijo_shrink"); }},
            {"armijo_max_backtracks", [&](const json &v) { so.armijo.max_backtracks = static_cast<int>(as_count(v, "armijo_max_backtracks")); }},
            {"max_outer_iterations", [&](const json &v) { so.max_outer_iterations = static_cast<int>(as_count(v, "max_outer_iterations")); }},
            {"optimization_trials", [&](const json &v) { so.optimization_trials = as_count(v, "optimization_trials"); }},
            {"de_population", [&](const json &v) { de.population = as_count(v, "de_population"); }},
            {"de_mutation_factor", [&](const json &v) { de.mutation_factor = as_number(v, "de_mutation_factor"); }},
            {"de_crossover_rate", [&](const json &v) { de.crossover_rate = as_number(v, "de_crossover_rate"); }},
            {"de_generations", [&](const json &v) { de.generations = as_count(v, "de_generations"); }},
            {"architectures", [&](const json &v)
             {
                 if (!v.is_array() || v.empty())
                     throw config_error("config key 'architectures': expected a non-empty array");
                 cfg.architectures.clear();
                 for (const auto &e : v)
                 {
                     if (!e.is_string())
                         throw config_error("config key 'architectures': expected strings");
                     cfg.architectures.push_back(e.get<std::string>());
                 }
             }},
            {"region_a_values", [&](const json &v) { cfg.region_a_values = as_number_list(v, "region_a_values"); }},
            {"power_dbm_values", [&](const json &v) { cfg.power_dbm_values = as_number_list(v, "power_dbm_values"); }},
            {"trace_powers_dbm", [&](const json &v) { cfg.trace_powers_dbm = as_number_list(v, "trace_powers_dbm"); }},
        };

        for (const auto &[key, value] : obj.items())
        {
            const auto it = handlers.find(key);
            if (it == handlers.end())
                throw config_error("unknown config key '" + key + "'");
            it->second(value);
        }

        try
        {
            cfg.scenario.validate();
            cfg.solver.validate();
            cfg.de.validate();
            for (const auto &name : cfg.architectures)
                ArchitectureSpec::from_name(name).validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw config_error(std::string("invalid configuration: ") + e.what());
        }
        return cfg;
    }

    RunConfig parse_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw config_error("cannot open config file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config_text(ss.str());
    }

    std::string format_number(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return buf;
    }

    std::string csv_header()
    {
        return "scenario_id,architecture,a_over_lambda,p_dbm,seed,iteration,avg_se_bps_hz,"
               "per_user_se,wall_ms";
    }

    std::string row_to_csv(const SweepRow &row)
    {
        std::string per_user;
        for (std::size_t i = 0; i < row.per_user_se.size(); ++i)
        {
            if (i)
                per_user += ';';
            per_user += format_number(row.per_user_se[i]);
        }
        std::string out;
        out += row.scenario_id;
        out += ',';
        out += row.architecture;
        out += ',';
        out += format_number(row.a_over_lambda);
        out += ',';
        out += format_number(row.p_dbm);
        out += ',';
        out += std::to_string(row.seed);
        out += ',';
        out += std::to_string(row.iteration);
        out += ',';
        out += format_number(row.avg_se_bps_hz);
        out += ',';
        out += per_user;
        out += ',';
        out += std::to_string(row.wall_ms);
        return out;
    }

    std::vector<SweepRow> read_rows_csv(const std::string &path)
    {
        std::vector<SweepRow> rows;
        std::ifstream in(path);
        if (!in)
            return rows;
        std::string line;
        while (std::getline(in, line))
        {
            if (line.empty() || line[0] == '#' || line.rfind("scenario_id", 0) == 0)
                continue;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                cells.push_back(cell);
            if (cells.size() < 9)
                continue;
            SweepRow row;
            row.scenario_id = cells[0];
            row.architecture = cells[1];
            row.a_over_lambda = std::stod(cells[2]);
            row.p_dbm = std::stod(cells[3]);
            row.seed = std::stoull(cells[4]);
            row.iteration = std::stoi(cells[5]);
            row.avg_se_bps_hz = std::stod(cells[6]);
            if (!cells[7].empty())
            {
                std::stringstream ps(cells[7]);
                std::string v;
                while (std::getline(ps, v, ';'))
                    row.per_user_se.push_back(std::stod(v));
            }
            row.wall_ms = std::stoll(cells[8]);
            rows.push_back(row);
        }
        return rows;
    }

    std::uint64_t fnv1a64(const std::string &bytes)
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    namespace
    {
        std::string job_key_string(const std::string &arch, double a, double p, std::uint64_t seed)
        {
            return arch + "|" + format_number(a) + "|" + format_number(p) + "|" + std::to_string(seed);
        }

        std::string hash_hex(const std::string &bytes)
        {
            char buf[20];
            std::snprintf(buf, sizeof(buf), "%016llx",
                          static_cast<unsigned long long>(fnv1a64(bytes)));
            return buf;
        }

        void write_file(const fs::path &path, const std::string &content)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot write " + path.string());
            out << content;
        }

        std::string utc_timestamp()
        {
            const std::time_t now = std::time(nullptr);
            std::tm tm{};
            gmtime_r(&now, &tm);
            char buf[32];
            std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
            return buf;
        }

        // Mean of avg_se over seeds, grouped by an x coordinate.
        std::string curve_data(const std::vector<SweepRow> &rows,
                               const std::function<double(const SweepRow &)> &x_of)
        {
            std::map<double, std::pair<double, int>> acc;
            for (const auto &row : rows)
            {
                auto &slot = acc[x_of(row)];
                slot.first += row.avg_se_bps_hz;
                slot.second += 1;
            }
            std::string out;
            for (const auto &[x, slot] : acc)
                out += format_number(x) + " " + format_number(slot.first / slot.second) + "\n";
            return out;
        }

        // Mean trace over seeds; shorter traces are padded with their final value.
        std::string trace_data(const std::vector<SweepRow> &rows)
        {
            std::map<std::uint64_t, std::vector<double>> per_seed;
            for (const auto &row : rows)
            {
                auto &tr = per_seed[row.seed];
                if (tr.size() <= static_cast<std::size_t>(row.iteration))
                    tr.resize(row.iteration + 1, 0.0);
                tr[row.iteration] = row.avg_se_bps_hz;
            }
            std::size_t longest = 0;
            for (const auto &[seed, tr] : per_seed)
                longest = std::max(longest, tr.size());
            std::string out;
            for (std::size_t i = 0; i < longest; ++i)
            {
                double sum = 0.0;
                int count = 0;
                for (const auto &[seed, tr] : per_seed)
                {
                    sum += i < tr.size() ? tr[i] : tr.back();
                    ++count;
                }
                out += std::to_string(i) + " " + format_number(sum / count) + "\n";
            }
            return out;
        }
    }

    int run(const std::string &command, const std::string &config_path, const std::string &out_dir,
            arma::uword seeds_override, int jobs_override)
    {
        RunConfig cfg;
        try
        {
            cfg = parse_config(config_path);
        }
        catch (const config_error &e)
        {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        }
        if (seeds_override > 0)
            cfg.seeds = seeds_override;
        if (jobs_override > 0)
            cfg.jobs = jobs_override;

        try
        {
            fs::create_directories(out_dir);
            const fs::path partial_path = fs::path(out_dir) / "results.partial.csv";

            // Completed jobs from an interrupted run are reused.
            std::vector<SweepRow> loaded = read_rows_csv(partial_path.string());
            std::set<std::string> done;
            for (const auto &row : loaded)
                done.insert(job_key_string(row.architecture, row.a_over_lambda, row.p_dbm, row.seed));

            std::ofstream partial(partial_path, std::ios::app);
            if (loaded.empty())
                partial << "# roma-sim partial rows, config " << config_path << "\n";

            SweepOptions options;
            options.seeds = cfg.seeds;
            options.jobs = cfg.jobs;
            options.scenario_id = cfg.scenario_id;
            options.skip = [&done](const JobKey &key)
            {
                return done.count(
                           job_key_string(key.architecture, key.a_over_lambda, key.p_dbm, key.seed)) > 0;
            };
            options.on_job = [&partial](const std::vector<SweepRow> &rows)
            {
                for (const auto &row : rows)
                    partial << row_to_csv(row) << "\n";
                partial.flush();
            };

            std::vector<ArchitectureSpec> specs;
            for (const auto &name : cfg.architectures)
                specs.push_back(ArchitectureSpec::from_name(name));

            SweepResult computed;
            if (command == "single")
            {
                options.seeds = seeds_override > 0 ? seeds_override : 1;
                computed = single_run(cfg.scenario, cfg.solver, options);
            }
            else if (command == "trace")
            {
                computed = convergence_trace(cfg.scenario, cfg.solver, cfg.de, cfg.trace_powers_dbm,
                                             options);
            }
            else if (command == "region-sweep")
            {
                computed = region_sweep(cfg.scenario, cfg.solver, cfg.region_a_values, specs, options);
            }
            else if (command == "power-sweep")
            {
                computed = power_sweep(cfg.scenario, cfg.solver, cfg.power_dbm_values, specs, options);
            }
            else
            {
                std::cerr << "config error: unknown command '" << command << "'\n";
                return kExitConfig;
            }

            std::vector<SweepRow> rows = std::move(loaded);
            rows.insert(rows.end(), computed.rows.begin(), computed.rows.end());
            sort_rows(rows);

            // results.csv: deterministic content; per-row wall time is kept
            // out of it (it lives in the manifest) so identical configs give
            // byte-identical files.
            std::string csv = csv_header() + "\n";
            for (auto row : rows)
            {
                row.wall_ms = 0;
                csv += row_to_csv(row) + "\n";
            }

            std::map<std::string, std::string> artifacts;
            write_file(fs::path(out_dir) / "results.csv", csv);
            artifacts["results.csv"] = hash_hex(csv);

            auto emit_curve = [&](const std::string &name, const std::string &content)
            {
                write_file(fs::path(out_dir) / name, content);
                artifacts[name] = hash_hex(content);
            };

            if (command == "trace")
            {
                for (const std::string arch : {"AO", "DE"})
                    for (double p : cfg.trace_powers_dbm)
                    {
                        std::vector<SweepRow> group;
                        for (const auto &row : rows)
                            if (row.architecture == arch && row.p_dbm == p)
                                group.push_back(row);
                        if (!group.empty())
                            emit_curve("fig2_" + arch + "_p" + format_number(p) + ".dat",
                                       trace_data(group));
                    }
            }
            else if (command == "region-sweep")
            {
                for (const auto &spec : specs)
                {
                    std::vector<SweepRow> group;
                    for (const auto &row : rows)
                        if (row.architecture == spec.name())
                            group.push_back(row);
                    if (!group.empty())
                        emit_curve("fig3_" + spec.name() + ".dat",
                                   curve_data(group, [](const SweepRow &r) { return r.a_over_lambda; }));
                }
            }
            else if (command == "power-sweep")
            {
                for (const auto &spec : specs)
                {
                    std::vector<SweepRow> group;
                    for (const auto &row : rows)
                        if (row.architecture == spec.name())
                            group.push_back(row);
                    if (!group.empty())
                        emit_curve("fig4_" + spec.name() + ".dat",
                                   curve_data(group, [](const SweepRow &r) { return r.p_dbm; }));
                }
            }

            // Manifest written last: its presence marks a completed run.
            ordered_json manifest;
            manifest["command"] = command;
            manifest["config_path"] = config_path;
            manifest["out_dir"] = out_dir;
            manifest["timestamp_utc"] = utc_timestamp();
            ordered_json scenario_echo;
            const Scenario &sc = cfg.scenario;
            scenario_echo["scenario_id"] = cfg.scenario_id;
            scenario_echo["users"] = sc.users;
            scenario_echo["bs_grid"] = std::to_string(sc.bs_grid_h) + "x" + std::to_string(sc.bs_grid_v);
            scenario_echo["user_grid"] =
                std::to_string(sc.user_grid_h) + "x" + std::to_string(sc.user_grid_v);
            scenario_echo["carrier_hz"] = sc.carrier_hz;
            scenario_echo["lambda_m"] = sc.lambda();
            scenario_echo["sigma2_dbm"] = watts_to_dbm(sc.sigma2_w);
            scenario_echo["p_dbm"] = watts_to_dbm(sc.per_user_power_w);
            scenario_echo["a_over_lambda"] = sc.region_a_wavelengths;
            scenario_echo["d_over_lambda"] = sc.min_distance_wavelengths;
            scenario_echo["paths_l"] = sc.path_count;
            scenario_echo["channel_model"] = model_name(sc.channel_model);
            scenario_echo["user_radius_min_m"] = sc.user_radius_min_m;
            scenario_echo["user_radius_max_m"] = sc.user_radius_max_m;
            scenario_echo["master_seed"] = sc.master_seed;
            scenario_echo["mc_trials"] = sc.mc_trials;
            scenario_echo["optimization_trials"] = cfg.solver.optimization_trials;
            scenario_echo["seeds"] = cfg.seeds;
            manifest["scenario"] = scenario_echo;
            ordered_json artifact_obj;
            for (const auto &[name, hash] : artifacts)
                artifact_obj[name] = hash;
            manifest["artifacts"] = artifact_obj;
            ordered_json timings = ordered_json::array();
            std::set<std::string> seen;
            for (const auto &row : rows)
            {
                const std::string key =
                    job_key_string(row.architecture, row.a_over_lambda, row.p_dbm, row.seed);
                if (!seen.insert(key).second)
                    continue;
                ordered_json t;
                t["architecture"] = row.architecture;
                t["a_over_lambda"] = row.a_over_lambda;
                t["p_dbm"] = row.p_dbm;
                t["seed"] = row.seed;
                t["wall_ms"] = row.wall_ms;
                timings.push_back(t);
            }
            manifest["timings_ms"] = timings;
            write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
            return kExitOk;
        }
        catch (const infeasible_problem_error &e)
        {
            std::cerr << "infeasible problem: " << e.what() << "\n";
            return kExitInfeasible;
        }
        catch (const config_error &e)
        {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        }
        catch (const std::exception &e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return kExitRuntime;
        }
    }

    int main_impl(int argc, char **argv)
    {
        CLI::App app{"ROMA-aided multi-user MIMO downlink simulator"};
        app.require_subcommand(1);

        struct Args
        {
            std::string config;
            std::string out;
            arma::uword seeds = 0;
            int jobs = 0;
        };
        std::map<std::string, Args> args;
        const std::map<std::string, std::string> commands = {
            {"single", "one full solve of the lead architecture"},
            {"trace", "per-iteration SE of AO vs DE at matched budgets"},
            {"region-sweep", "architectures across normalized region sizes"},
            {"power-sweep", "architectures across transmit powers"},
        };
        for (const auto &[name, desc] : commands)
        {
            auto *sub = app.add_subcommand(name, desc);
            auto &a = args[name];
            sub->add_option("--config", a.config, "JSON configuration file")->required();
            sub->add_option("--out", a.out, "output directory")->required();
            sub->add_option("--seeds", a.seeds, "seeds per sweep point");
            sub->add_option("--jobs", a.jobs, "concurrent jobs");
        }

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e);
            return code == 0 ? kExitOk : kExitConfig;
        }

        const std::string command = app.get_subcommands().front()->get_name();
        Args a = args[command];
        if (const char *env = std::getenv("ROMA_SIM_JOBS"))
            a.jobs = std::atoi(env);
        return run(command, a.config, a.out, a.seeds, a.jobs);
    }
}
