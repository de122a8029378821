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
 * @file config.hpp
 * @brief Experiment configuration loaded from JSON.
 *
 * Layout (all keys optional unless noted, scalars may be given where a list
 * is accepted):
 * @code
 * {
 *   "experiment": "nmse-sweep" | "tradeoff" | "scaling" | "contamination",
 *   "scenario":   "PC" | ["nPuC", "PuC", "PC"],
 *   "arrays":  {"M": 128, "N": [8, 32], "geometry": "ula" | "random", "spacing": 0.5},
 *   "paths":   {"L": 4, "aoa_range": [-60, 60], "aod_range": [-30, 30]},   // degrees
 *   "cell":    {"K": 2, "sigma_ratios": 1.0},                              // sigma_k^2 / sigma_z^2
 *   "energy":  {"rho_tau": 1.0, "rho_d": 1.0, "total": 0.5, "normalized_grid": [...]},
 *   "timing":  {"T_c": 128, "T_tau": 1 | [1, 4] | {"nPuC": 64, "PuC": 8, "PC": 1}},
 *   "mc":      {"angle_realizations": 10, "noise_realizations": 2000, "seed": 1, "empirical": true},
 *   "output":  "result.csv"
 * }
 * @endcode
 * Energies are linear; "rho_tau_db", "rho_d_db" and "total_db" are accepted
 * as dB alternatives. The noise variance is fixed to 1.
 */

#ifndef PILOTSIM_CONFIG_HPP
#define PILOTSIM_CONFIG_HPP

#include "pilotsim/channel.hpp"
#include "pilotsim/pilot.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pilotsim {

enum class ExperimentKind { NmseSweep, Tradeoff, Scaling, Contamination };

std::string_view to_string(ExperimentKind k) noexcept;
ExperimentKind parse_experiment(std::string_view name);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::NmseSweep;
    std::vector<Scenario> scenarios{Scenario::PrecodedCombined};

    std::vector<Eigen::Index> bs_antennas{128};  ///< M values
    std::vector<Eigen::Index> ue_antennas{32};   ///< N values
    ArrayGeometry geometry = ArrayGeometry::UniformLinear;
    double spacing = 0.5;

    Eigen::Index paths = 4;                      ///< L
    AngleRange aoa_range = kDefaultAoaRange;     ///< radians
    AngleRange aod_range = kDefaultAodRange;     ///< radians

    std::vector<Eigen::Index> users{1};          ///< K values
    std::vector<double> sigma_ratios{1.0};       ///< one value or one per user

    std::vector<double> rho_tau{1.0};
    std::optional<double> rho_d;
    std::optional<double> total_energy;
    std::vector<double> normalized_grid;

    Eigen::Index coherence = 128;                ///< T_c
    /// Explicit pilot lengths per scenario; absent means the scenario default.
    std::map<Scenario, std::vector<Eigen::Index>> pilot_lengths;

    std::int64_t angle_realizations = 10;
    std::int64_t noise_realizations = 2000;
    std::uint64_t seed = 1;
    bool empirical = true;

    std::string output;

    /// Pilot lengths to run for a scenario with K users and N UE antennas.
    std::vector<Eigen::Index> pilot_lengths_for(Scenario s, Eigen::Index k, Eigen::Index n) const;
    /// sigma_k^2 for user k.
    double sigma_sq(Eigen::Index k) const;
};

/// Default tradeoff grid: 0, 0.001, then 14 points up to 0.3 and 6 up to 1.
std::vector<double> default_normalized_grid();

/**
 * Parses and validates a configuration. Each override is "dotted.key=value";
 * the value is read as JSON when it parses, otherwise as a string. Throws
 * ConfigError listing every offending field.
 */
ExperimentConfig parse_config(std::string_view json_text, std::span<const std::string> overrides = {});

/// Reads the file and calls parse_config().
ExperimentConfig load_config(const std::string& path, std::span<const std::string> overrides = {});

} // namespace pilotsim

#endif
