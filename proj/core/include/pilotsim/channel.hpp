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
 * @file channel.hpp
 * @brief Cluster channel model H = B G U^H between an M-antenna base station
 * and an N-antenna user, with L discrete paths.
 *
 * Given the angles, vec(H) is CN(0, R) with
 *   R = delta M sigma^2 (U^* kr B)(U^* kr B)^H,   delta = N / L,
 * so every covariance in this library is carried in "path domain" form
 * (U^* kr B) C (U^* kr B)^H with a small L x L core C.
 */

#ifndef PILOTSIM_CHANNEL_HPP
#define PILOTSIM_CHANNEL_HPP

#include "pilotsim/linalg.hpp"
#include "pilotsim/random.hpp"

#include <vector>

namespace pilotsim {

enum class ArrayGeometry { UniformLinear, RandomPositions };

/// Antenna array description. Element positions are in wavelengths along a line.
class ArrayConfig {
public:
    /// Uniform linear array with the given element spacing (wavelengths).
    static ArrayConfig uniform_linear(Eigen::Index elements, double spacing = 0.5);

    /// Elements dropped uniformly on [0, (elements - 1) * spacing]; first
    /// element pinned at the origin.
    static ArrayConfig random_positions(Eigen::Index elements, RandomStream& rng, double spacing = 0.5);

    Eigen::Index element_count() const noexcept { return static_cast<Eigen::Index>(positions_.size()); }
    ArrayGeometry geometry() const noexcept { return geometry_; }
    double spacing() const noexcept { return spacing_; }
    const std::vector<double>& positions() const noexcept { return positions_; }

private:
    ArrayConfig(ArrayGeometry g, double spacing, std::vector<double> positions);

    ArrayGeometry geometry_;
    double spacing_;
    std::vector<double> positions_;
};

/// Unit-norm array response; for a ULA entry m is exp(i 2 pi d m sin(angle)) / sqrt(M).
ComplexVector steering_vector(const ArrayConfig& cfg, double angle);

/// Columns are steering_vector(cfg, angles[l]).
ComplexMatrix steering_matrix(const ArrayConfig& cfg, const RealVector& angles);

struct AngleRange {
    double lo;
    double hi;
};

inline constexpr AngleRange kDefaultAoaRange{-1.0471975511965976, 1.0471975511965976}; // +-pi/3
inline constexpr AngleRange kDefaultAodRange{-0.5235987755982988, 0.5235987755982988}; // +-pi/6

struct PathSet {
    RealVector aoa;       ///< radians, length L
    RealVector aod;       ///< radians, length L
    ComplexVector gains;  ///< unscaled g_i ~ CN(0, sigma_sq)
    double sigma_sq = 1.0;

    Eigen::Index path_count() const noexcept { return aoa.size(); }
};

/// Draws L angle pairs uniformly in the given ranges and L i.i.d. gains.
/// A draw where two paths coincide in both angles is resampled.
PathSet sample_paths(RandomStream& rng, Eigen::Index paths, AngleRange aoa_range, AngleRange aod_range,
                     double sigma_sq);

/// Fresh small-scale fading for fixed angles: L i.i.d. CN(0, sigma_sq) draws.
ComplexVector sample_gains(RandomStream& rng, Eigen::Index paths, double sigma_sq);

struct ChannelRealization {
    ComplexMatrix B;            ///< M x L base station steering matrix
    ComplexMatrix U;            ///< N x L user steering matrix
    ComplexVector scaled_gains; ///< diagonal of G: g_i sqrt(M N / L)
    ComplexMatrix H;            ///< M x N

    ComplexMatrix G() const { return scaled_gains.asDiagonal(); }
};

ChannelRealization assemble(const ArrayConfig& bs, const ArrayConfig& ue, const PathSet& paths);

/// Assembly from precomputed steering matrices and unscaled gains.
ChannelRealization assemble(const ComplexMatrix& B, const ComplexMatrix& U, const ComplexVector& gains);

/**
 * Hermitian PSD covariance of vec(X) for X = B diag(x) U^H, x ~ CN(0, core):
 *   (U^* kr B) core (U^* kr B)^H  (dimension MN x MN, never formed unless asked).
 */
class PathDomainCovariance {
public:
    PathDomainCovariance(ComplexMatrix U, ComplexMatrix B, ComplexMatrix core);

    const ComplexMatrix& U() const noexcept { return U_; }
    const ComplexMatrix& B() const noexcept { return B_; }
    const ComplexMatrix& core() const noexcept { return core_; }

    double trace() const;
    ComplexMatrix khatri_rao_factor() const; ///< U^* kr B, MN x L
    ComplexMatrix dense() const;
    LowRankPsd low_rank() const;

    /// E[X A X^H] = B (core o (U^H A U)) B^H for an N x N weight A.
    ComplexMatrix weighted_second_moment(const ComplexMatrix& weight) const;

private:
    ComplexMatrix U_;
    ComplexMatrix B_;
    ComplexMatrix core_;
};

/// Second-order statistics of one user's channel, assumed known.
class ChannelStats {
public:
    ChannelStats(ComplexMatrix U, ComplexMatrix B, double sigma_sq);

    Eigen::Index bs_antennas() const noexcept { return B_.rows(); }
    Eigen::Index ue_antennas() const noexcept { return U_.rows(); }
    Eigen::Index path_count() const noexcept { return B_.cols(); }

    const ComplexMatrix& U() const noexcept { return U_; }
    const ComplexMatrix& B() const noexcept { return B_; }
    double sigma_sq() const noexcept { return sigma_sq_; }
    /// N / L
    double delta() const noexcept;
    /// delta M sigma^2: variance of each scaled path gain.
    double path_variance() const noexcept;

    /// U^H U
    const ComplexMatrix& ru() const noexcept { return ru_; }
    /// B^H B
    const ComplexMatrix& rb() const noexcept { return rb_; }

    PathDomainCovariance covariance() const;
    LowRankPsd covariance_factor() const;
    double covariance_trace() const;

private:
    ComplexMatrix U_;
    ComplexMatrix B_;
    double sigma_sq_;
    ComplexMatrix ru_;
    ComplexMatrix rb_;
};

ChannelStats stats_from_paths(const ArrayConfig& bs, const ArrayConfig& ue, const PathSet& paths);

} // namespace pilotsim

#endif
