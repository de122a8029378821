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

#include "pilotsim/channel.hpp"

#include "pilotsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

namespace pilotsim {

ArrayConfig::ArrayConfig(ArrayGeometry g, double spacing, std::vector<double> positions)
    : geometry_(g), spacing_(spacing), positions_(std::move(positions))
{
    if (positions_.empty())
        throw ConfigError("ArrayConfig: element count must be at least 1");
    if (!(spacing_ > 0.0))
        throw ConfigError("ArrayConfig: element spacing must be positive");
}

ArrayConfig ArrayConfig::uniform_linear(Eigen::Index elements, double spacing)
{
    if (elements < 1)
        throw ConfigError("ArrayConfig: element count must be at least 1");
    std::vector<double> pos(static_cast<std::size_t>(elements));
    for (std::size_t m = 0; m < pos.size(); ++m)
        pos[m] = spacing * static_cast<double>(m);
    return {ArrayGeometry::UniformLinear, spacing, std::move(pos)};
}

ArrayConfig ArrayConfig::random_positions(Eigen::Index elements, RandomStream& rng, double spacing)
{
    if (elements < 1)
        throw ConfigError("ArrayConfig: element count must be at least 1");
    const double aperture = spacing * static_cast<double>(elements - 1);
    std::vector<double> pos(static_cast<std::size_t>(elements), 0.0);
    for (std::size_t m = 1; m < pos.size(); ++m)
        pos[m] = rng.uniform(0.0, aperture);
    std::sort(pos.begin(), pos.end());
    return {ArrayGeometry::RandomPositions, spacing, std::move(pos)};
}

ComplexVector steering_vector(const ArrayConfig& cfg, double angle)
{
    const auto& pos = cfg.positions();
    const Eigen::Index m = cfg.element_count();
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    const double phase_step = 2.0 * std::numbers::pi * std::sin(angle);
    ComplexVector out(m);
    for (Eigen::Index i = 0; i < m; ++i)
        out(i) = std::polar(norm, phase_step * pos[static_cast<std::size_t>(i)]);
    return out;
}

ComplexMatrix steering_matrix(const ArrayConfig& cfg, const RealVector& angles)
{
    ComplexMatrix out(cfg.element_count(), angles.size());
    for (Eigen::Index l = 0; l < angles.size(); ++l)
        out.col(l) = steering_vector(cfg, angles(l));
    return out;
}

namespace {

bool has_coincident_paths(const PathSet& p)
{
    for (Eigen::Index i = 0; i < p.path_count(); ++i)
        for (Eigen::Index j = i + 1; j < p.path_count(); ++j)
            if (p.aoa(i) == p.aoa(j) && p.aod(i) == p.aod(j))
                return true;
    return false;
}

} // namespace

ComplexVector sample_gains(RandomStream& rng, Eigen::Index paths, double sigma_sq)
{
    ComplexVector g(paths);
    for (Eigen::Index l = 0; l < paths; ++l)
        g(l) = rng.complex_normal(sigma_sq);
    return g;
}

PathSet sample_paths(RandomStream& rng, Eigen::Index paths, AngleRange aoa_range, AngleRange aod_range,
                     double sigma_sq)
{
    if (paths < 1)
        throw ConfigError("sample_paths: path count must be at least 1");
    if (!(aoa_range.lo <= aoa_range.hi) || !(aod_range.lo <= aod_range.hi))
        throw ConfigError("sample_paths: angle range lower bound exceeds upper bound");
    if (!(sigma_sq >= 0.0))
        throw ConfigError("sample_paths: sigma_sq must be nonnegative");

    PathSet p;
    p.sigma_sq = sigma_sq;
    p.aoa.resize(paths);
    p.aod.resize(paths);
    for (;;) {
        for (Eigen::Index l = 0; l < paths; ++l) {
            p.aoa(l) = rng.uniform(aoa_range.lo, aoa_range.hi);
            p.aod(l) = rng.uniform(aod_range.lo, aod_range.hi);
        }
        if (!has_coincident_paths(p))
            break;
        std::clog << "pilotsim: coincident path angles drawn, resampling\n";
    }
    p.gains = sample_gains(rng, paths, sigma_sq);
    return p;
}

ChannelRealization assemble(const ComplexMatrix& B, const ComplexMatrix& U, const ComplexVector& gains)
{
    if (B.cols() != U.cols() || B.cols() != gains.size())
        throw DimensionError("assemble: inconsistent path count across steering matrices and gains");
    const double scale = std::sqrt(static_cast<double>(B.rows() * U.rows()) / static_cast<double>(B.cols()));
    ChannelRealization out;
    out.B = B;
    out.U = U;
    out.scaled_gains = scale * gains;
    out.H.noalias() = B * out.scaled_gains.asDiagonal() * U.adjoint();
    return out;
}

ChannelRealization assemble(const ArrayConfig& bs, const ArrayConfig& ue, const PathSet& paths)
{
    if (paths.aod.size() != paths.aoa.size() || paths.gains.size() != paths.aoa.size())
        throw DimensionError("assemble: path set fields have different lengths");
    return assemble(steering_matrix(bs, paths.aoa), steering_matrix(ue, paths.aod), paths.gains);
}

PathDomainCovariance::PathDomainCovariance(ComplexMatrix U, ComplexMatrix B, ComplexMatrix core)
    : U_(std::move(U)), B_(std::move(B)), core_(std::move(core))
{
    if (U_.cols() != B_.cols() || core_.rows() != B_.cols() || core_.cols() != B_.cols())
        throw DimensionError("PathDomainCovariance: core must be L x L with L = path count");
}

double PathDomainCovariance::trace() const
{
    // tr(A C A^H) = tr(C A^H A), A^H A = R_U^T o R_B
    const ComplexMatrix gram = (U_.adjoint() * U_).transpose().cwiseProduct(B_.adjoint() * B_);
    return (core_ * gram).trace().real();
}

ComplexMatrix PathDomainCovariance::khatri_rao_factor() const
{
    return khatri_rao(U_.conjugate(), B_);
}

ComplexMatrix PathDomainCovariance::dense() const
{
    const ComplexMatrix a = khatri_rao_factor();
    return a * core_ * a.adjoint();
}

LowRankPsd PathDomainCovariance::low_rank() const
{
    const HermitianEvd evd = hermitian_evd(core_);
    const RealVector root = evd.values.cwiseMax(0.0).cwiseSqrt();
    return {khatri_rao_factor() * evd.vectors * root.asDiagonal(), 1.0};
}

ComplexMatrix PathDomainCovariance::weighted_second_moment(const ComplexMatrix& weight) const
{
    if (weight.rows() != U_.rows() || weight.cols() != U_.rows())
        throw DimensionError("weighted_second_moment: weight must be N x N");
    const ComplexMatrix q = U_.adjoint() * weight * U_;
    return B_ * core_.cwiseProduct(q) * B_.adjoint();
}

ChannelStats::ChannelStats(ComplexMatrix U, ComplexMatrix B, double sigma_sq)
    : U_(std::move(U)), B_(std::move(B)), sigma_sq_(sigma_sq)
{
    if (U_.cols() != B_.cols() || U_.cols() < 1)
        throw DimensionError("ChannelStats: U and B must have the same positive number of columns");
    if (!(sigma_sq_ >= 0.0))
        throw ConfigError("ChannelStats: sigma_sq must be nonnegative");
    ru_ = U_.adjoint() * U_;
    rb_ = B_.adjoint() * B_;
}

double ChannelStats::delta() const noexcept
{
    return static_cast<double>(U_.rows()) / static_cast<double>(U_.cols());
}

double ChannelStats::path_variance() const noexcept
{
    return delta() * static_cast<double>(B_.rows()) * sigma_sq_;
}

PathDomainCovariance ChannelStats::covariance() const
{
    const Eigen::Index l = path_count();
    return {U_, B_, path_variance() * ComplexMatrix::Identity(l, l)};
}

LowRankPsd ChannelStats::covariance_factor() const
{
    return {khatri_rao(U_.conjugate(), B_), path_variance()};
}

double ChannelStats::covariance_trace() const
{
    return path_variance() * ru_.transpose().cwiseProduct(rb_).trace().real();
}

ChannelStats stats_from_paths(const ArrayConfig& bs, const ArrayConfig& ue, const PathSet& paths)
{
    if (paths.aod.size() != paths.aoa.size())
        throw DimensionError("stats_from_paths: AoA and AoD lists differ in length");
    return {steering_matrix(ue, paths.aod), steering_matrix(bs, paths.aoa), paths.sigma_sq};
}

} // namespace pilotsim
