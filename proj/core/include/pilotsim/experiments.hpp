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

/**
 * @file experiments.hpp
 * @brief Seeded sweep runners.
 *
 * Work is split into (sweep point, angle realization) tasks. Angles of
 * realization a come from derive_stream(seed, kAngleStream, a) and are shared
 * by every sweep point; pilot trial t of realization a uses
 * derive_stream(seed, t, a). Task results are reduced in task order, so the
 * output does not depend on the worker count.
 */

#ifndef PILOTSIM_EXPERIMENTS_HPP
#define PILOTSIM_EXPERIMENTS_HPP

#include "pilotsim/config.hpp"
#include "pilotsim/estimation.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace pilotsim {

inline constexpr std::uint64_t kAngleStream = std::numeric_limits<std::uint64_t>::max();

struct ResultRow {
    std::string experiment;
    std::string scenario;
    Eigen::Index M = 0;
    Eigen::Index N = 0;
    Eigen::Index L = 0;
    Eigen::Index K = 0;
    Eigen::Index T_tau = 0;
    double rho_tau = 0.0;
    double rho_d = 0.0;
    std::string metric;
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

struct RunOptions {
    unsigned workers = 1;
    /// Called after each finished task with (done, total); may be empty.
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Per-user channel statistics of one angle realization.
std::vector<ChannelStats> draw_users(const ExperimentConfig& cfg, Eigen::Index bs_antennas, Eigen::Index ue_antennas,
                                     Eigen::Index users, std::uint64_t realization);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any task is rethrown after all threads stop.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn,
                  const std::function<void(std::size_t, std::size_t)>& progress = {});

/// Closed-form, bound and empirical NMSE per (scenario, M, N, K, T_tau, rho_tau).
std::vector<ResultRow> run_nmse_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Spectral efficiency over the normalized pilot energy grid, plus per
/// scenario "argmax_rho_bar" and "max_spectral_efficiency" rows.
std::vector<ResultRow> run_tradeoff_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Tradeoff maxima for each M in the config.
std::vector<ResultRow> run_scaling_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Empirical and closed-form NMSE versus K for each pilot length.
std::vector<ResultRow> run_contamination_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Dispatches on cfg.experiment.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

} // namespace pilotsim

#endif
