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

#include "pilotsim/experiments.hpp"

#include "pilotsim/errors.hpp"
#include "pilotsim/rate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace pilotsim {

namespace {

constexpr std::uint64_t kArrayStream = kAngleStream - 1;

// Mean over angle realizations; the standard error is taken across
// realizations, or from the single realization's Monte Carlo error.
struct RealizationSummary {
    double mean = 0.0;
    double std_error = 0.0;
};

RealizationSummary summarize(const std::vector<double>& values, const std::vector<double>& inner_se)
{
    RealizationSummary s;
    const double n = static_cast<double>(values.size());
    bool finite = true;
    for (double v : values) {
        s.mean += v;
        finite = finite && std::isfinite(v);
    }
    s.mean /= n;
    if (!finite) {
        s.std_error = std::nan("");
        return s;
    }
    if (values.size() == 1) {
        s.std_error = inner_se.empty() ? 0.0 : inner_se[0];
        return s;
    }
    double ss = 0.0;
    for (double v : values)
        ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0) / n);
    return s;
}

struct Point {
    Scenario scenario;
    Eigen::Index m;
    Eigen::Index n;
    Eigen::Index k;
    Eigen::Index t;
    double rho_tau;
    double rho_d;
    double rho_bar = 0.0;
};

ResultRow make_row(const ExperimentConfig& cfg, const Point& p, std::string metric, double value, double se,
                   std::int64_t trials)
{
    ResultRow r;
    r.experiment = std::string(to_string(cfg.experiment));
    r.scenario = std::string(to_string(p.scenario));
    r.M = p.m;
    r.N = p.n;
    r.L = cfg.paths;
    r.K = p.k;
    r.T_tau = p.t;
    r.rho_tau = p.rho_tau;
    r.rho_d = p.rho_d;
    r.metric = std::move(metric);
    r.value = value;
    r.std_error = se;
    r.trials = trials;
    r.seed = cfg.seed;
    return r;
}

// One metric of one (point, realization) task.
struct Sample {
    double value = 0.0;
    double se = 0.0;
};

std::vector<ResultRow> run_estimation(const ExperimentConfig& cfg, const RunOptions& opt, bool with_bounds)
{
    std::vector<Point> points;
    for (Scenario sc : cfg.scenarios)
        for (auto m : cfg.bs_antennas)
            for (auto n : cfg.ue_antennas)
                for (auto k : cfg.users)
                    for (auto t : cfg.pilot_lengths_for(sc, k, n))
                        for (double rho : cfg.rho_tau)
                            points.push_back({sc, m, n, k, t, rho, cfg.rho_d.value_or(0.0)});

    const auto reals = static_cast<std::size_t>(cfg.angle_realizations);
    // metrics: closed form, lower, upper, empirical
    std::vector<std::array<Sample, 4>> out(points.size() * reals);

    parallel_for(
        out.size(), opt.workers,
        [&](std::size_t task) {
            const Point& p = points[task / reals];
            const auto a = static_cast<std::uint64_t>(task % reals);
            const auto stats = draw_users(cfg, p.m, p.n, p.k, a);
            const PilotScheme scheme = build_scheme(p.scenario, p.t, p.rho_tau, stats);
            const double kd = static_cast<double>(p.k);
            auto& res = out[task];
            for (Eigen::Index u = 0; u < p.k; ++u) {
                const auto& s = stats[static_cast<std::size_t>(u)];
                res[0].value += nmse(error_cov_closed_form(scheme, stats, 1.0, u), s) / kd;
                if (with_bounds && p.scenario != Scenario::PrecodedCombined) {
                    const NmseBounds b = nmse_bounds(p.scenario, s, p.rho_tau, 1.0);
                    res[1].value += b.lower / kd;
                    res[2].value += b.upper / kd;
                }
            }
            if (cfg.empirical) {
                const auto emp = empirical_nmse(scheme, stats, 1.0, cfg.noise_realizations, cfg.seed, a);
                double var = 0.0;
                for (const auto& e : emp) {
                    res[3].value += e.mean / kd;
                    var += e.std_error * e.std_error;
                }
                res[3].se = std::sqrt(var) / kd;
            }
        },
        opt.progress);

    std::vector<ResultRow> rows;
    const auto angles = cfg.angle_realizations;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto metric = [&](int idx) {
            std::vector<double> v, se;
            for (std::size_t a = 0; a < reals; ++a) {
                v.push_back(out[i * reals + a][static_cast<std::size_t>(idx)].value);
                se.push_back(out[i * reals + a][static_cast<std::size_t>(idx)].se);
            }
            return summarize(v, se);
        };
        const Point& p = points[i];
        const auto closed = metric(0);
        rows.push_back(make_row(cfg, p, "nmse_closed_form", closed.mean, closed.std_error, angles));
        if (with_bounds && p.scenario != Scenario::PrecodedCombined) {
            const auto lo = metric(1);
            const auto hi = metric(2);
            rows.push_back(make_row(cfg, p, "nmse_lower_bound", lo.mean, lo.std_error, angles));
            rows.push_back(make_row(cfg, p, "nmse_upper_bound", hi.mean, hi.std_error, angles));
        }
        if (cfg.empirical) {
            const auto emp = metric(3);
            rows.push_back(
                make_row(cfg, p, "nmse_empirical", emp.mean, emp.std_error, angles * cfg.noise_realizations));
        }
    }
    return rows;
}

struct TradeoffSeries {
    std::vector<Point> points; // one per grid value, in grid order
    std::vector<RealizationSummary> values;
};

std::vector<TradeoffSeries> compute_tradeoff(const ExperimentConfig& cfg, const RunOptions& opt)
{
    if (!cfg.total_energy)
        throw ConfigError("tradeoff: energy.total is required");
    const double total = *cfg.total_energy;

    std::vector<TradeoffSeries> series;
    for (Scenario sc : cfg.scenarios)
        for (auto m : cfg.bs_antennas)
            for (auto n : cfg.ue_antennas)
                for (auto k : cfg.users)
                    for (auto t : cfg.pilot_lengths_for(sc, k, n)) {
                        TradeoffSeries s;
                        for (double g : cfg.normalized_grid)
                            s.points.push_back({sc, m, n, k, t, g * total, (1.0 - g) * total, g});
                        series.push_back(std::move(s));
                    }

    std::vector<const Point*> flat;
    for (const auto& s : series)
        for (const auto& p : s.points)
            flat.push_back(&p);

    const auto reals = static_cast<std::size_t>(cfg.angle_realizations);
    std::vector<Sample> out(flat.size() * reals);
    parallel_for(
        out.size(), opt.workers,
        [&](std::size_t task) {
            const Point& p = *flat[task / reals];
            const auto a = static_cast<std::uint64_t>(task % reals);
            const auto stats = draw_users(cfg, p.m, p.n, p.k, a);
            const PilotScheme scheme = build_scheme(p.scenario, p.t, p.rho_tau, stats);
            DataPhaseConfig data;
            data.rho_d = p.rho_d;
            data.coherence = cfg.coherence;
            data.pilot_length = p.t;
            data.sigma_z_sq = 1.0;
            const RateResult r = sum_rate_mc(scheme, stats, data, cfg.noise_realizations, cfg.seed, a);
            out[task] = {r.mean, r.std_error};
        },
        opt.progress);

    std::size_t idx = 0;
    for (auto& s : series) {
        for (std::size_t g = 0; g < s.points.size(); ++g, ++idx) {
            std::vector<double> v, se;
            for (std::size_t a = 0; a < reals; ++a) {
                v.push_back(out[idx * reals + a].value);
                se.push_back(out[idx * reals + a].se);
            }
            s.values.push_back(summarize(v, se));
        }
    }
    return series;
}

void append_maximum(const ExperimentConfig& cfg, const TradeoffSeries& s, std::vector<ResultRow>& rows)
{
    const std::int64_t trials = cfg.angle_realizations * cfg.noise_realizations;
    std::size_t best = 0;
    for (std::size_t g = 1; g < s.values.size(); ++g)
        if (s.values[g].mean > s.values[best].mean)
            best = g;
    const Point& p = s.points[best];
    rows.push_back(make_row(cfg, p, "argmax_rho_bar", p.rho_bar, 0.0, trials));
    rows.push_back(make_row(cfg, p, "max_spectral_efficiency", s.values[best].mean, s.values[best].std_error, trials));
}

} // namespace

std::vector<ChannelStats> draw_users(const ExperimentConfig& cfg, Eigen::Index bs_antennas, Eigen::Index ue_antennas,
                                     Eigen::Index users, std::uint64_t realization)
{
    RandomStream angle_rng = derive_stream(cfg.seed, kAngleStream, realization);
    std::vector<PathSet> paths;
    for (Eigen::Index k = 0; k < users; ++k)
        paths.push_back(sample_paths(angle_rng, cfg.paths, cfg.aoa_range, cfg.aod_range, cfg.sigma_sq(k)));

    RandomStream array_rng = derive_stream(cfg.seed, kArrayStream, realization);
    const bool random = cfg.geometry == ArrayGeometry::RandomPositions;
    const ArrayConfig bs = random ? ArrayConfig::random_positions(bs_antennas, array_rng, cfg.spacing)
                                  : ArrayConfig::uniform_linear(bs_antennas, cfg.spacing);
    const ArrayConfig ue = random ? ArrayConfig::random_positions(ue_antennas, array_rng, cfg.spacing)
                                  : ArrayConfig::uniform_linear(ue_antennas, cfg.spacing);

    std::vector<ChannelStats> out;
    for (const auto& p : paths)
        out.push_back(stats_from_paths(bs, ue, p));
    return out;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn,
                  const std::function<void(std::size_t, std::size_t)>& progress)
{
    if (count == 0)
        return;
    const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::size_t done = 0;
    std::mutex mu;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (;;) {
            if (stop.load())
                return;
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard lock(mu);
                if (!first_error)
                    first_error = std::current_exception();
                stop.store(true);
                return;
            }
            if (progress) {
                const std::lock_guard lock(mu);
                progress(++done, count);
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (first_error)
        std::rethrow_exception(first_error);
}

std::vector<ResultRow> run_nmse_sweep(const ExperimentConfig& cfg, const RunOptions& opt)
{
    return run_estimation(cfg, opt, true);
}

std::vector<ResultRow> run_contamination_sweep(const ExperimentConfig& cfg, const RunOptions& opt)
{
    return run_estimation(cfg, opt, false);
}

std::vector<ResultRow> run_tradeoff_sweep(const ExperimentConfig& cfg, const RunOptions& opt)
{
    const auto series = compute_tradeoff(cfg, opt);
    const std::int64_t trials = cfg.angle_realizations * cfg.noise_realizations;
    std::vector<ResultRow> rows;
    for (const auto& s : series) {
        for (std::size_t g = 0; g < s.points.size(); ++g)
            rows.push_back(make_row(cfg, s.points[g], "spectral_efficiency", s.values[g].mean,
                                    s.values[g].std_error, trials));
        append_maximum(cfg, s, rows);
    }
    return rows;
}

std::vector<ResultRow> run_scaling_sweep(const ExperimentConfig& cfg, const RunOptions& opt)
{
    const auto series = compute_tradeoff(cfg, opt);
    std::vector<ResultRow> rows;
    for (const auto& s : series)
        append_maximum(cfg, s, rows);
    return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& opt)
{
    switch (cfg.experiment) {
    case ExperimentKind::NmseSweep: return run_nmse_sweep(cfg, opt);
    case ExperimentKind::Tradeoff: return run_tradeoff_sweep(cfg, opt);
    case ExperimentKind::Scaling: return run_scaling_sweep(cfg, opt);
    case ExperimentKind::Contamination: return run_contamination_sweep(cfg, opt);
    }
    throw ConfigError("unknown experiment");
}

} // namespace pilotsim
