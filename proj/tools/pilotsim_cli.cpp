// SPDX-License-Identifier: Apache-2.0
//
// pilotsim - pilot precoding and combining simulator for multiuser MIMO
// Copyright (C) 2026 The pilotsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// pilotsim command line front end.
//
//   pilotsim <nmse-sweep|tradeoff|scaling|contamination> [--config f.json]
//            [--out f.csv] [--seed n] [--workers n] [--override key=value]...
//   pilotsim pilot-table --K 2 --N 32 --M 128 --L 4 [--csv f.csv]
//
// Exit status: 0 success, 2 configuration error, 1 numerical failure.

#include "pilotsim/config.hpp"
#include "pilotsim/csv.hpp"
#include "pilotsim/errors.hpp"
#include "pilotsim/experiments.hpp"
#include "pilotsim/pilot.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

struct SweepArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::vector<std::string> overrides;
    bool quiet = false;
};

void add_sweep_options(CLI::App* sub, SweepArgs& args)
{
    sub->add_option("--config", args.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "CSV output path (default: config 'output', else stdout)");
    sub->add_option("--seed", args.seed, "master seed, overrides mc.seed");
    sub->add_option("--workers", args.workers, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--override", args.overrides, "dotted.key=value, repeatable")->take_all();
    sub->add_flag("--quiet", args.quiet, "no progress on stderr");
}

int run_sweep(const std::string& name, const SweepArgs& args)
{
    std::vector<std::string> overrides = args.overrides;
    overrides.push_back("experiment=\"" + name + "\"");
    if (args.seed)
        overrides.push_back("mc.seed=" + std::to_string(*args.seed));

    const pilotsim::ExperimentConfig cfg =
        args.config.empty() ? pilotsim::parse_config("{}", overrides) : pilotsim::load_config(args.config, overrides);

    pilotsim::RunOptions opt;
    opt.workers = args.workers;
    if (!args.quiet)
        opt.progress = [](std::size_t done, std::size_t total) {
            std::cerr << "\r" << done << "/" << total << " tasks" << std::flush;
        };

    const auto start = std::chrono::steady_clock::now();
    const auto rows = pilotsim::run_experiment(cfg, opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!args.quiet)
        std::cerr << "\n" << rows.size() << " rows in " << std::fixed << std::setprecision(2) << secs << " s\n";

    const std::string path = !args.out.empty() ? args.out : cfg.output;
    if (path.empty() || path == "-") {
        pilotsim::write_csv(std::cout, rows);
        return 0;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw pilotsim::ConfigError("cannot open output file '" + path + "'");
    pilotsim::write_csv(f, rows);
    return 0;
}

int run_pilot_table(Eigen::Index k, Eigen::Index n, Eigen::Index m, Eigen::Index l, const std::string& csv)
{
    using namespace pilotsim;
    const Scenario scenarios[] = {Scenario::NonPrecodedUncombined, Scenario::PrecodedUncombined,
                                  Scenario::PrecodedCombined};
    const LinkDirection dirs[] = {LinkDirection::Uplink, LinkDirection::Downlink};
    const AntennaRegime regimes[] = {AntennaRegime::Finite, AntennaRegime::UeInfinite, AntennaRegime::BsInfinite,
                                     AntennaRegime::BothInfinite};

    std::cout << "K=" << k << " N=" << n << " M=" << m << " L=" << l << "\n";
    std::cout << std::left << std::setw(4) << "dir" << std::setw(11) << "regime";
    for (auto s : scenarios)
        std::cout << std::right << std::setw(8) << to_string(s);
    std::cout << "\n";

    std::ostringstream rows;
    rows << "direction,regime,scenario,K,N,M,L,pilots\n";
    for (auto d : dirs) {
        for (auto r : regimes) {
            std::cout << std::left << std::setw(4) << to_string(d) << std::setw(11) << to_string(r);
            for (auto s : scenarios) {
                const auto count = min_pilot_count(s, d, r, k, n, m, l);
                std::cout << std::right << std::setw(8) << count;
                rows << to_string(d) << ',' << to_string(r) << ',' << to_string(s) << ',' << k << ',' << n << ','
                     << m << ',' << l << ',' << count << '\n';
            }
            std::cout << "\n";
        }
    }
    if (!csv.empty()) {
        std::ofstream f(csv, std::ios::binary);
        if (!f)
            throw ConfigError("cannot open output file '" + csv + "'");
        f << rows.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"pilotsim: pilot precoding and combining simulator for multiuser MIMO"};
    app.require_subcommand(1);

    SweepArgs sweep;
    const char* sweeps[][2] = {{"nmse-sweep", "NMSE (closed form, bounds, Monte Carlo) over a parameter grid"},
                               {"tradeoff", "spectral efficiency versus normalized pilot energy"},
                               {"scaling", "optimal pilot energy and maximum spectral efficiency versus M"},
                               {"contamination", "NMSE versus number of users for each pilot length"}};
    std::vector<CLI::App*> sweep_cmds;
    for (auto& s : sweeps) {
        CLI::App* sub = app.add_subcommand(s[0], s[1]);
        add_sweep_options(sub, sweep);
        sweep_cmds.push_back(sub);
    }

    Eigen::Index k = 1, n = 1, m = 1, l = 1;
    std::string table_csv;
    CLI::App* table = app.add_subcommand("pilot-table", "minimum number of unique pilots");
    table->add_option("--K", k, "users")->required()->check(CLI::PositiveNumber);
    table->add_option("--N", n, "UE antennas")->required()->check(CLI::PositiveNumber);
    table->add_option("--M", m, "BS antennas")->required()->check(CLI::PositiveNumber);
    table->add_option("--L", l, "paths")->required()->check(CLI::PositiveNumber);
    table->add_option("--csv", table_csv, "also write the table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (table->parsed())
            return run_pilot_table(k, n, m, l, table_csv);
        for (auto* sub : sweep_cmds)
            if (sub->parsed())
                return run_sweep(sub->get_name(), sweep);
    } catch (const pilotsim::ConfigError& e) {
        std::cerr << "pilotsim: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "pilotsim: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
