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

#include "pilotsim/pilot.hpp"

#include "pilotsim/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace pilotsim {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Row r of the unitary T-point DFT.
ComplexVector dft_row(Eigen::Index r, Eigen::Index t)
{
    ComplexVector row(t);
    const double norm = 1.0 / std::sqrt(static_cast<double>(t));
    for (Eigen::Index c = 0; c < t; ++c) {
        // reduce the exponent first so large T keeps full phase accuracy
        const auto e = static_cast<double>((r * c) % t);
        row(c) = std::polar(norm, -2.0 * std::numbers::pi * e / static_cast<double>(t));
    }
    return row;
}

void check_user(const PilotScheme& s, Eigen::Index k, const char* what)
{
    if (k < 0 || k >= s.users())
        throw DimensionError(std::string(what) + ": user index out of range");
}

} // namespace

std::string_view to_string(Scenario s) noexcept
{
    switch (s) {
    case Scenario::NonPrecodedUncombined: return "nPuC";
    case Scenario::PrecodedUncombined: return "PuC";
    case Scenario::PrecodedCombined: return "PC";
    }
    return "?";
}

Scenario parse_scenario(std::string_view name)
{
    const std::string n = lower(name);
    if (n == "npuc")
        return Scenario::NonPrecodedUncombined;
    if (n == "puc")
        return Scenario::PrecodedUncombined;
    if (n == "pc")
        return Scenario::PrecodedCombined;
    throw ConfigError("unknown scenario '" + std::string(name) + "' (expected nPuC, PuC or PC)");
}

SpatialFilter::SpatialFilter(Eigen::Index rows, Eigen::Index cols, std::optional<ComplexMatrix> m)
    : rows_(rows), cols_(cols), matrix_(std::move(m))
{
}

SpatialFilter SpatialFilter::identity(Eigen::Index size)
{
    return {size, size, std::nullopt};
}

SpatialFilter::SpatialFilter(ComplexMatrix matrix)
    : rows_(matrix.rows()), cols_(matrix.cols()), matrix_(std::move(matrix))
{
}

ComplexMatrix SpatialFilter::matrix() const
{
    if (matrix_)
        return *matrix_;
    return ComplexMatrix::Identity(rows_, cols_);
}

ComplexMatrix SpatialFilter::apply(const ComplexMatrix& x) const
{
    if (x.rows() != cols_)
        throw DimensionError("SpatialFilter::apply: operand has wrong row count");
    if (!matrix_)
        return x;
    return *matrix_ * x;
}

ComplexMatrix SpatialFilter::apply_adjoint(const ComplexMatrix& x) const
{
    if (x.rows() != rows_)
        throw DimensionError("SpatialFilter::apply_adjoint: operand has wrong row count");
    if (!matrix_)
        return x;
    return matrix_->adjoint() * x;
}

Eigen::Index default_pilot_length(Scenario s, Eigen::Index users, Eigen::Index ue_antennas, Eigen::Index paths)
{
    switch (s) {
    case Scenario::NonPrecodedUncombined: return users * ue_antennas;
    case Scenario::PrecodedUncombined: return users * paths;
    case Scenario::PrecodedCombined: return paths;
    }
    return 0;
}

PilotScheme build_scheme(Scenario scenario, Eigen::Index pilot_length, double rho_tau,
                         std::span<const ChannelStats> stats)
{
    if (stats.empty())
        throw ConfigError("build_scheme: at least one user is required");
    if (!(rho_tau >= 0.0) || !std::isfinite(rho_tau))
        throw ConfigError("build_scheme: rho_tau must be finite and nonnegative");

    const Eigen::Index k_users = static_cast<Eigen::Index>(stats.size());
    const Eigen::Index m = stats[0].bs_antennas();
    const Eigen::Index n = stats[0].ue_antennas();
    const Eigen::Index l = stats[0].path_count();
    for (const auto& s : stats)
        if (s.bs_antennas() != m || s.ue_antennas() != n || s.path_count() != l)
            throw ConfigError("build_scheme: all users must share M, N and L");

    const Eigen::Index t = pilot_length;
    switch (scenario) {
    case Scenario::NonPrecodedUncombined:
        if (t != k_users * n)
            throw ConfigError("build_scheme: nPuC requires T_tau = K N = " + std::to_string(k_users * n) +
                              ", got " + std::to_string(t));
        break;
    case Scenario::PrecodedUncombined:
        if (t != k_users * l)
            throw ConfigError("build_scheme: PuC requires T_tau = K L = " + std::to_string(k_users * l) +
                              ", got " + std::to_string(t));
        break;
    case Scenario::PrecodedCombined:
        if (t < 1 || t > l)
            throw ConfigError("build_scheme: PC requires 1 <= T_tau <= L = " + std::to_string(l) + ", got " +
                              std::to_string(t));
        break;
    }

    PilotScheme out;
    out.scenario = scenario;
    out.pilot_length = t;
    out.rho_tau = rho_tau;

    if (scenario == Scenario::NonPrecodedUncombined) {
        const double scale = std::sqrt(rho_tau / static_cast<double>(n));
        for (Eigen::Index k = 0; k < k_users; ++k) {
            ComplexMatrix p(n, t);
            for (Eigen::Index r = 0; r < n; ++r)
                p.row(r) = scale * dft_row(k * n + r, t).transpose();
            out.pilots.push_back(std::move(p));
            out.precoders.push_back(SpatialFilter::identity(n));
            out.combiners.push_back(SpatialFilter::identity(m));
        }
        return out;
    }

    const double scale = std::sqrt(rho_tau / static_cast<double>(l));
    ComplexMatrix shared = ComplexMatrix::Zero(l, t);
    for (Eigen::Index r = 0; r < l; ++r)
        shared(r, r % t) = scale;

    for (Eigen::Index k = 0; k < k_users; ++k) {
        if (scenario == Scenario::PrecodedUncombined) {
            ComplexMatrix p(l, t);
            for (Eigen::Index r = 0; r < l; ++r)
                p.row(r) = scale * dft_row(k * l + r, t).transpose();
            out.pilots.push_back(std::move(p));
            out.combiners.push_back(SpatialFilter::identity(m));
        } else {
            out.pilots.push_back(shared);
            out.combiners.emplace_back(stats[static_cast<std::size_t>(k)].B());
        }
        out.precoders.emplace_back(stats[static_cast<std::size_t>(k)].U());
    }
    return out;
}

ComplexMatrix superimposed_pilots(const PilotScheme& scheme, std::span<const ComplexMatrix> channels)
{
    if (static_cast<Eigen::Index>(channels.size()) != scheme.users())
        throw DimensionError("superimposed_pilots: one channel per user is required");
    ComplexMatrix y = ComplexMatrix::Zero(channels[0].rows(), scheme.pilot_length);
    for (Eigen::Index j = 0; j < scheme.users(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const ComplexMatrix vp = scheme.precoders[ju].apply(scheme.pilots[ju]);
        if (channels[ju].cols() != vp.rows() || channels[ju].rows() != y.rows())
            throw DimensionError("superimposed_pilots: channel dimensions do not match the scheme");
        y.noalias() += channels[ju] * vp;
    }
    return y;
}

std::vector<ComplexMatrix> combine(const PilotScheme& scheme, const ComplexMatrix& received)
{
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(scheme.users()));
    for (const auto& w : scheme.combiners)
        out.push_back(w.apply_adjoint(received));
    return out;
}

std::vector<ComplexMatrix> receive(const PilotScheme& scheme, std::span<const ComplexMatrix> channels,
                                   double sigma_z_sq, RandomStream& rng)
{
    if (!(sigma_z_sq >= 0.0))
        throw ConfigError("receive: noise variance must be nonnegative");
    ComplexMatrix y = superimposed_pilots(scheme, channels);
    y += rng.complex_normal_matrix(y.rows(), y.cols(), sigma_z_sq);
    return combine(scheme, y);
}

std::vector<ComplexMatrix> receive(const PilotScheme& scheme, std::span<const ComplexMatrix> channels,
                                   const ComplexMatrix& noise)
{
    ComplexMatrix y = superimposed_pilots(scheme, channels);
    if (noise.rows() != y.rows() || noise.cols() != y.cols())
        throw DimensionError("receive: noise must be M x T_tau");
    y += noise;
    return combine(scheme, y);
}

ComplexMatrix effective_pilot(const PilotScheme& scheme, Eigen::Index k, Eigen::Index j, Eigen::Index bs_antennas)
{
    check_user(scheme, k, "effective_pilot");
    check_user(scheme, j, "effective_pilot");
    const auto& w = scheme.combiners[static_cast<std::size_t>(k)];
    if (w.rows() != bs_antennas)
        throw DimensionError("effective_pilot: combiner row count differs from M");
    const ComplexMatrix vp =
        scheme.precoders[static_cast<std::size_t>(j)].apply(scheme.pilots[static_cast<std::size_t>(j)]);
    // (A^T (x) W^H)^H = A^* (x) W
    return kronecker(vp.conjugate(), w.matrix());
}

ComplexMatrix projected_paths(const PilotScheme& scheme, std::span<const ChannelStats> stats, Eigen::Index k,
                              Eigen::Index j)
{
    check_user(scheme, k, "projected_paths");
    check_user(scheme, j, "projected_paths");
    if (static_cast<Eigen::Index>(stats.size()) != scheme.users())
        throw DimensionError("projected_paths: one ChannelStats per user is required");
    const auto ju = static_cast<std::size_t>(j);
    const ComplexMatrix vp = scheme.precoders[ju].apply(scheme.pilots[ju]);
    const ComplexMatrix a = vp.transpose() * stats[ju].U().conjugate();
    const ComplexMatrix b = scheme.combiners[static_cast<std::size_t>(k)].apply_adjoint(stats[ju].B());
    return khatri_rao(a, b);
}

LinkDirection parse_direction(std::string_view name)
{
    const std::string n = lower(name);
    if (n == "ul" || n == "uplink")
        return LinkDirection::Uplink;
    if (n == "dl" || n == "downlink")
        return LinkDirection::Downlink;
    throw ConfigError("unknown link direction '" + std::string(name) + "' (expected UL or DL)");
}

AntennaRegime parse_regime(std::string_view name)
{
    const std::string n = lower(name);
    if (n == "finite")
        return AntennaRegime::Finite;
    if (n == "n-inf" || n == "ue-inf")
        return AntennaRegime::UeInfinite;
    if (n == "m-inf" || n == "bs-inf")
        return AntennaRegime::BsInfinite;
    if (n == "both-inf")
        return AntennaRegime::BothInfinite;
    throw ConfigError("unknown antenna regime '" + std::string(name) +
                      "' (expected finite, n-inf, m-inf or both-inf)");
}

std::string_view to_string(LinkDirection d) noexcept
{
    return d == LinkDirection::Uplink ? "UL" : "DL";
}

std::string_view to_string(AntennaRegime r) noexcept
{
    switch (r) {
    case AntennaRegime::Finite: return "finite";
    case AntennaRegime::UeInfinite: return "N->inf";
    case AntennaRegime::BsInfinite: return "M->inf";
    case AntennaRegime::BothInfinite: return "both->inf";
    }
    return "?";
}

Eigen::Index min_pilot_count(Scenario scenario, LinkDirection direction, AntennaRegime regime, Eigen::Index users,
                             Eigen::Index ue_antennas, Eigen::Index bs_antennas, Eigen::Index paths)
{
    if (users < 1 || ue_antennas < 1 || bs_antennas < 1 || paths < 1)
        throw ConfigError("min_pilot_count: K, N, M and L must be positive");
    const Eigen::Index kl = users * paths;
    const bool n_inf = regime == AntennaRegime::UeInfinite || regime == AntennaRegime::BothInfinite;
    const bool m_inf = regime == AntennaRegime::BsInfinite || regime == AntennaRegime::BothInfinite;

    if (scenario == Scenario::NonPrecodedUncombined)
        return direction == LinkDirection::Uplink ? users * ue_antennas : bs_antennas;

    // Uplink: a large UE array separates the paths of one user, a large BS
    // array separates users. Downlink swaps the roles.
    const bool separates_paths = direction == LinkDirection::Uplink ? n_inf : m_inf;
    const bool separates_users = direction == LinkDirection::Uplink ? m_inf : n_inf;

    if (scenario == Scenario::PrecodedUncombined)
        return separates_paths ? users : kl;

    if (separates_paths && separates_users)
        return 1;
    if (separates_paths)
        return users;
    if (separates_users)
        return paths;
    return kl;
}

} // namespace pilotsim
