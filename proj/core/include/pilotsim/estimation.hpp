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
 * @file estimation.hpp
 * @brief MMSE channel estimation from filtered pilots, error covariances and
 * NMSE bounds.
 *
 * All estimates live in the span of the user's own paths, so the estimator
 * works on the L path gains x_k (H_k = B_k diag(x_k) U_k^H) and never forms an
 * MN x MN matrix. Two equivalent solves are available:
 *  - path space: joint posterior of every user's path gains, dimension K L;
 *  - observation space: the filtered pilot block, dimension T_tau * rows(W_k^H).
 * The smaller one is used unless a route is forced.
 */

#ifndef PILOTSIM_ESTIMATION_HPP
#define PILOTSIM_ESTIMATION_HPP

#include "pilotsim/channel.hpp"
#include "pilotsim/pilot.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pilotsim {

/// Smallest admissible noise variance.
inline constexpr double kMinNoiseVariance = 1e-12;

/// Per-path pilot SNR rho_tau sigma^2 / (L sigma_z^2).
double per_path_snr(const ChannelStats& stats, double rho_tau, double sigma_z_sq);

class MmseEstimator {
public:
    enum class Route { PathSpace, ObservationSpace };

    MmseEstimator(const PilotScheme& scheme, std::span<const ChannelStats> stats, double sigma_z_sq, Eigen::Index k,
                  std::optional<Route> force = std::nullopt);

    /// Estimated scaled path gains of user k from its filtered pilot block.
    ComplexVector path_estimate(const ComplexMatrix& filtered) const;

    /// M x N channel estimate B_k diag(x) U_k^H.
    ComplexMatrix estimate(const ComplexMatrix& filtered) const;

    /// Covariance of the path-gain estimation error (L x L).
    const ComplexMatrix& error_core() const noexcept { return error_core_; }
    PathDomainCovariance error_covariance() const;

    Route route() const noexcept { return route_; }
    /// Dimension of the linear system that was factorised.
    Eigen::Index system_dimension() const noexcept { return system_dim_; }
    Eigen::Index user() const noexcept { return k_; }

private:
    Eigen::Index k_;
    Route route_;
    Eigen::Index system_dim_ = 0;
    Eigen::Index paths_ = 0;
    ComplexMatrix B_;
    ComplexMatrix U_;
    ComplexMatrix error_core_;

    // path space: per active user j, a_j = (V_j P_j)^T U_j^* and the
    // noise-whitened b_j; gain_map_ = Omega^{-1} E_k
    std::vector<ComplexMatrix> a_;
    std::vector<ComplexMatrix> b_white_;
    ComplexMatrix gain_map_;

    // observation space: x = scale_ * map_^H vec(Y)
    ComplexMatrix obs_map_;
    double obs_scale_ = 0.0;
};

/// One-shot estimate of H_k.
ComplexMatrix mmse_estimate(const PilotScheme& scheme, std::span<const ChannelStats> stats,
                            const ComplexMatrix& filtered, double sigma_z_sq, Eigen::Index k);

/// Dense covariances of the filtered pilot block of user k:
///   own = c_k G_k G_k^H + sigma_z^2 (I_T (x) W_k^H W_k),
///   interference = sum_{j != k} c_j G_j G_j^H,
/// where G_j is projected_paths(scheme, stats, k, j).
/// Throws ConfigError for schemes other than PC.
struct InterferenceCovariances {
    ComplexMatrix own;
    ComplexMatrix interference;
};

InterferenceCovariances interference_covariances(const PilotScheme& scheme, std::span<const ChannelStats> stats,
                                                 double sigma_z_sq, Eigen::Index k);

/// Closed-form error covariance of the orthogonal schemes:
///   nPuC: c (I + M zeta  R_U^T o R_B)^{-1}
///   PuC:  c (I + delta M zeta  (R_U^2)^T o R_B)^{-1}
PathDomainCovariance error_cov_closed_form(Scenario scenario, const ChannelStats& stats, double rho_tau,
                                           double sigma_z_sq);

/// Closed-form error covariance for any scheme; PC uses
///   c (I - c G_k^H (own + interference)^{-1} G_k).
PathDomainCovariance error_cov_closed_form(const PilotScheme& scheme, std::span<const ChannelStats> stats,
                                           double sigma_z_sq, Eigen::Index k);

/// tr(error) / tr(R)
double nmse(const PathDomainCovariance& error, const ChannelStats& stats);

struct NmseBounds {
    double lower;
    double upper; ///< +infinity when R_U is numerically singular (PuC)
};

/// Trace bounds on the NMSE for nPuC and PuC. Throws ConfigError for PC.
NmseBounds nmse_bounds(Scenario scenario, const ChannelStats& stats, double rho_tau, double sigma_z_sq);

/// Upper bound on the PuC / nPuC error ratio, (1 + M zeta) / (1 + delta M zeta).
double gain_ratio_puc_over_npuc(double bs_antennas, double zeta, double delta);
double gain_ratio_puc_over_npuc(const ChannelStats& stats, double rho_tau, double sigma_z_sq);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
};

/// Running sum of samples; mean and standard error of the mean.
class MeanAccumulator {
public:
    void add(double x) noexcept;
    void merge(const MeanAccumulator& other) noexcept;
    McEstimate result() const noexcept;

private:
    std::int64_t n_ = 0;
    double sum_ = 0.0;
    double sum_sq_ = 0.0;
};

/**
 * Pilot phase of one angle realization: precomputes every user's estimator
 * and draws (gains, estimates) pairs. Random draws per call: for each user its
 * L path gains, then the M x T_tau noise block.
 */
class PilotPhase {
public:
    PilotPhase(const PilotScheme& scheme, std::span<const ChannelStats> stats, double sigma_z_sq);

    struct Draw {
        std::vector<ComplexVector> gains;     ///< scaled path gains
        std::vector<ComplexVector> estimates; ///< estimated scaled path gains
    };

    Draw sample(RandomStream& rng) const;

    const MmseEstimator& estimator(Eigen::Index k) const { return estimators_[static_cast<std::size_t>(k)]; }
    Eigen::Index users() const noexcept { return static_cast<Eigen::Index>(estimators_.size()); }

private:
    PilotScheme scheme_;
    std::vector<ChannelStats> stats_;
    double sigma_z_sq_;
    std::vector<ComplexMatrix> path_pilots_; ///< U_j^H V_j P_j, L x T
    std::vector<MmseEstimator> estimators_;
};

/// Squared error ||B diag(e) U^H||_F^2 of a path-gain error e.
double path_error_energy(const ChannelStats& stats, const ComplexVector& e);

/**
 * Empirical NMSE of every user over `trials` pilot draws for fixed angles.
 * Trial t uses derive_stream(seed, t, realization).
 */
std::vector<McEstimate> empirical_nmse(const PilotScheme& scheme, std::span<const ChannelStats> stats,
                                       double sigma_z_sq, std::int64_t trials, std::uint64_t seed,
                                       std::uint64_t realization);

} // namespace pilotsim

#endif
