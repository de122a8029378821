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
 * @file pilot.hpp
 * @brief Uplink pilot schemes and pilot reception.
 *
 * Three schemes are supported:
 *  - nPuC: every UE antenna sends its own orthogonal sequence, no filters
 *    (T = K N).
 *  - PuC:  pilots are precoded with V_k = U_k, one orthogonal sequence per
 *    path (T = K L), no combining at the BS.
 *  - PC:   precoded with V_k = U_k and combined with W_k = B_k; all UEs reuse
 *    the same 1 <= T <= L symbols.
 *
 * The filtered block received for UE k is
 *   Y_k = W_k^H sum_j H_j V_j P_j + W_k^H Z,   Z i.i.d. CN(0, sigma_z^2).
 */

#ifndef PILOTSIM_PILOT_HPP
#define PILOTSIM_PILOT_HPP

#include "pilotsim/channel.hpp"
#include "pilotsim/linalg.hpp"
#include "pilotsim/random.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pilotsim {

enum class Scenario { NonPrecodedUncombined, PrecodedUncombined, PrecodedCombined };

/// "nPuC", "PuC" or "PC".
std::string_view to_string(Scenario s) noexcept;
/// Case-insensitive inverse of to_string(). Throws ConfigError.
Scenario parse_scenario(std::string_view name);

/// A spatial filter that is either an explicit matrix or an identity of a
/// given size (identity filters are never materialised on the hot path).
class SpatialFilter {
public:
    static SpatialFilter identity(Eigen::Index size);
    explicit SpatialFilter(ComplexMatrix matrix);

    bool is_identity() const noexcept { return !matrix_.has_value(); }
    Eigen::Index rows() const noexcept { return rows_; }
    Eigen::Index cols() const noexcept { return cols_; }

    ComplexMatrix matrix() const;
    /// F x
    ComplexMatrix apply(const ComplexMatrix& x) const;
    /// F^H x
    ComplexMatrix apply_adjoint(const ComplexMatrix& x) const;

private:
    SpatialFilter(Eigen::Index rows, Eigen::Index cols, std::optional<ComplexMatrix> m);

    Eigen::Index rows_;
    Eigen::Index cols_;
    std::optional<ComplexMatrix> matrix_;
};

struct PilotScheme {
    Scenario scenario = Scenario::NonPrecodedUncombined;
    Eigen::Index pilot_length = 0; ///< T_tau
    double rho_tau = 0.0;          ///< pilot energy per UE, tr(P P^H)
    std::vector<ComplexMatrix> pilots;     ///< per UE, (N or L) x T
    std::vector<SpatialFilter> precoders;  ///< V_k, N x (N or L)
    std::vector<SpatialFilter> combiners;  ///< W_k, M x (M or L)

    Eigen::Index users() const noexcept { return static_cast<Eigen::Index>(pilots.size()); }
};

/// Required pilot length for the orthogonal schemes, K N or K L. For PC
/// returns L (the longest length without intra-UE reuse).
Eigen::Index default_pilot_length(Scenario s, Eigen::Index users, Eigen::Index ue_antennas, Eigen::Index paths);

/**
 * Builds a pilot scheme for the given users.
 *
 * Orthogonal pilots are rows of the unitary DFT of size T, scaled by
 * sqrt(rho_tau / n) where n is the pilot row count (N or L). For PC, row l of
 * every UE's pilot is the unit row e_(l mod T) scaled by sqrt(rho_tau / L), so
 * all UEs share one pilot matrix (sqrt(rho_tau / L) I when T = L).
 *
 * Throws ConfigError when T is inconsistent with the scenario or the users do
 * not share M, N and L.
 */
PilotScheme build_scheme(Scenario scenario, Eigen::Index pilot_length, double rho_tau,
                         std::span<const ChannelStats> stats);

/// sum_j H_j V_j P_j (M x T), before combining and noise.
ComplexMatrix superimposed_pilots(const PilotScheme& scheme, std::span<const ComplexMatrix> channels);

/// W_k^H Y for every UE.
std::vector<ComplexMatrix> combine(const PilotScheme& scheme, const ComplexMatrix& received);

/// Draws noise and returns the filtered pilot block of every UE.
std::vector<ComplexMatrix> receive(const PilotScheme& scheme, std::span<const ComplexMatrix> channels,
                                   double sigma_z_sq, RandomStream& rng);

/// Same as receive() but with an explicit M x T noise matrix.
std::vector<ComplexMatrix> receive(const PilotScheme& scheme, std::span<const ComplexMatrix> channels,
                                   const ComplexMatrix& noise);

/// Dense effective pilot of UE j seen through the combiner of UE k:
/// returns Pk_j with Pk_j^H = (V_j P_j)^T (x) W_k^H, size MN x (T * rows(W_k^H)).
/// Intended for small instances and oracle checks.
ComplexMatrix effective_pilot(const PilotScheme& scheme, Eigen::Index k, Eigen::Index j,
                              Eigen::Index bs_antennas);

/// The same map restricted to UE j's paths, Pk_j^H (U_j^* kr B_j), computed as
/// ((V_j P_j)^T U_j^*) kr (W_k^H B_j) without forming any Kronecker product.
ComplexMatrix projected_paths(const PilotScheme& scheme, std::span<const ChannelStats> stats, Eigen::Index k,
                              Eigen::Index j);

enum class LinkDirection { Uplink, Downlink };
enum class AntennaRegime { Finite, UeInfinite, BsInfinite, BothInfinite };

LinkDirection parse_direction(std::string_view name);
AntennaRegime parse_regime(std::string_view name);
std::string_view to_string(LinkDirection d) noexcept;
std::string_view to_string(AntennaRegime r) noexcept;

/// Minimum number of unique pilots per scheme, direction and antenna regime.
Eigen::Index min_pilot_count(Scenario scenario, LinkDirection direction, AntennaRegime regime, Eigen::Index users,
                             Eigen::Index ue_antennas, Eigen::Index bs_antennas, Eigen::Index paths);

} // namespace pilotsim

#endif
