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
 * @file rate.hpp
 * @brief Uplink data phase: eigen-precoding on the channel estimate and the
 * sum-rate lower bound that treats estimation error as Gaussian noise.
 */

#ifndef PILOTSIM_RATE_HPP
#define PILOTSIM_RATE_HPP

#include "pilotsim/estimation.hpp"

#include <cstdint>
#include <span>

namespace pilotsim {

struct DataPhaseConfig {
    double rho_d = 0.0;              ///< data energy per UE over the whole data phase
    Eigen::Index coherence = 0;      ///< T_c
    Eigen::Index pilot_length = 0;   ///< T_tau
    double sigma_z_sq = 1.0;

    Eigen::Index data_length() const noexcept { return coherence - pilot_length; } ///< T_d
};

using RateResult = McEstimate;

/**
 * N x L precoder sqrt(1/L) E_L, E_L the top-L eigenvectors of Hhat^H Hhat.
 * Directions with eigenvalue below the rank tolerance are replaced by a
 * Gram-Schmidt completion over the standard basis, so F^H F = I / L always.
 */
ComplexMatrix data_precoder(const ComplexMatrix& estimate, Eigen::Index streams);

/// Same precoder for the estimate B diag(x) U^H, computed from an L x L
/// eigenproblem on an orthonormal basis of span(U).
ComplexMatrix data_precoder(const ChannelStats& stats, const ComplexVector& path_gains, Eigen::Index streams);

/// sigma_z^2 I + sum_k E[Ht_k Rx_k Ht_k^H] evaluated from dense MN x MN error
/// covariances by M x M block contraction.
ComplexMatrix zeff_covariance(std::span<const ComplexMatrix> error_covs, std::span<const ComplexMatrix> tx_covs,
                              double sigma_z_sq);

/// Same quantity from path-domain error covariances.
ComplexMatrix zeff_covariance(std::span<const PathDomainCovariance> error_covs,
                              std::span<const ComplexMatrix> tx_covs, double sigma_z_sq);

/// log2 det(I + Rz^{-1} S) for S = Phi Phi^H; exact zero when Phi = 0.
/// Throws NumericalError when Rz is not positive definite.
double log2_det_gain(const ComplexMatrix& rz, const ComplexMatrix& phi);

/// Same value for Rz = sigma_z^2 I + X C X^H (X is M x q, C is q x q PSD),
/// evaluated with q x q and p x p matrices only. `gram` is X^H X.
double log2_det_gain(const ComplexMatrix& basis, const ComplexMatrix& gram, const ComplexMatrix& core,
                     const ComplexMatrix& phi, double sigma_z_sq);

/**
 * Monte Carlo sum rate for one angle realization. Trial t draws the pilot
 * phase from derive_stream(seed, t, realization); the estimation error
 * covariance in the interference term is the scheme's closed form.
 */
RateResult sum_rate_mc(const PilotScheme& scheme, std::span<const ChannelStats> stats, const DataPhaseConfig& cfg,
                       std::int64_t trials, std::uint64_t seed, std::uint64_t realization);

/// (L T_d / T_c) log2(1 + (rho_d / T_d) sum sigma_k^2 / (L sigma_z^2))
double asymptotic_rate_bound(std::span<const double> sigma_sq, Eigen::Index paths, const DataPhaseConfig& cfg);

} // namespace pilotsim

#endif
