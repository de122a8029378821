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

#include "pilotsim/estimation.hpp"

#include "pilotsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pilotsim {

namespace {

void check_inputs(const PilotScheme& scheme, std::span<const ChannelStats> stats, double sigma_z_sq,
                  Eigen::Index k, const char* what)
{
    if (static_cast<Eigen::Index>(stats.size()) != scheme.users())
        throw DimensionError(std::string(what) + ": one ChannelStats per user is required");
    if (k < 0 || k >= scheme.users())
        throw DimensionError(std::string(what) + ": user index out of range");
    if (!(sigma_z_sq >= kMinNoiseVariance))
        throw ConfigError(std::string(what) + ": noise variance must be at least 1e-12");
}

ComplexMatrix hermitian_part(const ComplexMatrix& a)
{
    return 0.5 * (a + a.adjoint());
}

// (V_j P_j)^T U_j^*, T x L
ComplexMatrix pilot_side(const PilotScheme& scheme, const ChannelStats& s, Eigen::Index j)
{
    const auto ju = static_cast<std::size_t>(j);
    return scheme.precoders[ju].apply(scheme.pilots[ju]).transpose() * s.U().conjugate();
}

// Gram matrix of the Khatri-Rao factor, R_U^T o R_B.
ComplexMatrix path_gram(const ChannelStats& s)
{
    return s.ru().transpose().cwiseProduct(s.rb());
}

} // namespace

double per_path_snr(const ChannelStats& stats, double rho_tau, double sigma_z_sq)
{
    return rho_tau * stats.sigma_sq() / (static_cast<double>(stats.path_count()) * sigma_z_sq);
}

MmseEstimator::MmseEstimator(const PilotScheme& scheme, std::span<const ChannelStats> stats, double sigma_z_sq,
                             Eigen::Index k, std::optional<Route> force)
    : k_(k)
{
    check_inputs(scheme, stats, sigma_z_sq, k, "MmseEstimator");
    const auto ku = static_cast<std::size_t>(k);
    const ChannelStats& own = stats[ku];
    const SpatialFilter& w = scheme.combiners[ku];
    const Eigen::Index t = scheme.pilot_length;
    const Eigen::Index l = own.path_count();
    const Eigen::Index r = w.cols();

    paths_ = l;
    B_ = own.B();
    U_ = own.U();

    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < scheme.users(); ++j)
        if (stats[static_cast<std::size_t>(j)].path_variance() > 0.0)
            active.push_back(j);

    Eigen::Index path_dim = 0;
    for (Eigen::Index j : active)
        path_dim += stats[static_cast<std::size_t>(j)].path_count();
    const Eigen::Index obs_dim = t * r;
    route_ = force.value_or(obs_dim < path_dim ? Route::ObservationSpace : Route::PathSpace);

    const double ck = own.path_variance();
    if (!(ck > 0.0)) {
        error_core_ = ComplexMatrix::Zero(l, l);
        return;
    }

    // noise covariance of the filtered block is sigma_z^2 (I_T (x) W^H W)
    std::optional<ComplexMatrix> noise_gram;
    if (!w.is_identity()) {
        const ComplexMatrix wm = w.matrix();
        noise_gram = wm.adjoint() * wm;
    }

    if (route_ == Route::PathSpace) {
        system_dim_ = path_dim;
        ComplexMatrix omega = ComplexMatrix::Zero(path_dim, path_dim);
        Eigen::Index own_offset = 0;
        std::vector<Eigen::Index> offsets;
        Eigen::Index off = 0;
        for (Eigen::Index j : active) {
            const auto ju = static_cast<std::size_t>(j);
            a_.push_back(pilot_side(scheme, stats[ju], j));
            const ComplexMatrix b = w.apply_adjoint(stats[ju].B());
            b_white_.push_back(noise_gram ? solve_hermitian_pd(*noise_gram, b) : b);
            offsets.push_back(off);
            if (j == k)
                own_offset = off;
            off += stats[ju].path_count();
        }
        for (std::size_t i = 0; i < active.size(); ++i) {
            const ComplexMatrix bi = w.apply_adjoint(stats[static_cast<std::size_t>(active[i])].B());
            for (std::size_t j = 0; j < active.size(); ++j) {
                const ComplexMatrix block = (a_[i].adjoint() * a_[j]).cwiseProduct(bi.adjoint() * b_white_[j]);
                omega.block(offsets[i], offsets[j], block.rows(), block.cols()) = block;
            }
            const double ci = stats[static_cast<std::size_t>(active[i])].path_variance();
            const Eigen::Index li = a_[i].cols();
            omega.block(offsets[i], offsets[i], li, li).diagonal().array() += sigma_z_sq / ci;
        }
        omega = hermitian_part(omega);

        ComplexMatrix sel = ComplexMatrix::Zero(path_dim, l);
        sel.block(own_offset, 0, l, l).setIdentity();
        gain_map_ = solve_hermitian_pd(omega, sel);
        error_core_ = hermitian_part(sigma_z_sq * gain_map_.block(own_offset, 0, l, l));
        return;
    }

    system_dim_ = obs_dim;
    ComplexMatrix s = ComplexMatrix::Zero(obs_dim, obs_dim);
    if (noise_gram)
        s = sigma_z_sq * kronecker(ComplexMatrix::Identity(t, t), *noise_gram);
    else
        s.diagonal().setConstant(sigma_z_sq);
    ComplexMatrix gk;
    for (Eigen::Index j : active) {
        const auto ju = static_cast<std::size_t>(j);
        const ComplexMatrix g =
            khatri_rao(pilot_side(scheme, stats[ju], j), w.apply_adjoint(stats[ju].B()));
        s.noalias() += stats[ju].path_variance() * g * g.adjoint();
        if (j == k)
            gk = g;
    }
    s = hermitian_part(s);
    obs_map_ = solve_hermitian_pd(s, gk);
    obs_scale_ = ck;
    error_core_ = hermitian_part(ck * ComplexMatrix::Identity(l, l) - ck * ck * (gk.adjoint() * obs_map_));
}

ComplexVector MmseEstimator::path_estimate(const ComplexMatrix& filtered) const
{
    if (route_ == Route::PathSpace) {
        if (gain_map_.size() == 0)
            return ComplexVector::Zero(paths_);
        ComplexVector stacked(gain_map_.rows());
        Eigen::Index off = 0;
        for (std::size_t j = 0; j < a_.size(); ++j) {
            if (filtered.rows() != b_white_[j].rows() || filtered.cols() != a_[j].rows())
                throw DimensionError("MmseEstimator: filtered pilot block has the wrong shape");
            // entry l is b_l^H Y conj(a_l)
            const ComplexMatrix ya = filtered * a_[j].conjugate();
            for (Eigen::Index l = 0; l < a_[j].cols(); ++l)
                stacked(off + l) = b_white_[j].col(l).dot(ya.col(l));
            off += a_[j].cols();
        }
        return gain_map_.adjoint() * stacked;
    }
    if (obs_map_.size() == 0)
        return ComplexVector::Zero(paths_);
    if (filtered.size() != obs_map_.rows())
        throw DimensionError("MmseEstimator: filtered pilot block has the wrong shape");
    return obs_scale_ * (obs_map_.adjoint() * filtered.reshaped());
}

ComplexMatrix MmseEstimator::estimate(const ComplexMatrix& filtered) const
{
    return B_ * path_estimate(filtered).asDiagonal() * U_.adjoint();
}

PathDomainCovariance MmseEstimator::error_covariance() const
{
    return {U_, B_, error_core_};
}

ComplexMatrix mmse_estimate(const PilotScheme& scheme, std::span<const ChannelStats> stats,
                            const ComplexMatrix& filtered, double sigma_z_sq, Eigen::Index k)
{
    return MmseEstimator(scheme, stats, sigma_z_sq, k).estimate(filtered);
}

InterferenceCovariances interference_covariances(const PilotScheme& scheme, std::span<const ChannelStats> stats,
                                                 double sigma_z_sq, Eigen::Index k)
{
    check_inputs(scheme, stats, sigma_z_sq, k, "interference_covariances");
    if (scheme.scenario != Scenario::PrecodedCombined)
        throw ConfigError("interference_covariances: only defined for the PC scheme");
    const ComplexMatrix wm = scheme.combiners[static_cast<std::size_t>(k)].matrix();
    const Eigen::Index t = scheme.pilot_length;

    InterferenceCovariances out;
    out.own = sigma_z_sq * kronecker(ComplexMatrix::Identity(t, t), wm.adjoint() * wm);
    out.interference = ComplexMatrix::Zero(out.own.rows(), out.own.cols());
    for (Eigen::Index j = 0; j < scheme.users(); ++j) {
        const ComplexMatrix g = projected_paths(scheme, stats, k, j);
        const double cj = stats[static_cast<std::size_t>(j)].path_variance();
        if (j == k)
            out.own.noalias() += cj * g * g.adjoint();
        else
            out.interference.noalias() += cj * g * g.adjoint();
    }
    return out;
}

PathDomainCovariance error_cov_closed_form(Scenario scenario, const ChannelStats& stats, double rho_tau,
                                           double sigma_z_sq)
{
    if (scenario == Scenario::PrecodedCombined)
        throw ConfigError("error_cov_closed_form: PC needs the full pilot scheme");
    if (!(sigma_z_sq >= kMinNoiseVariance))
        throw ConfigError("error_cov_closed_form: noise variance must be at least 1e-12");
    if (!(rho_tau >= 0.0))
        throw ConfigError("error_cov_closed_form: rho_tau must be nonnegative");

    const Eigen::Index l = stats.path_count();
    const double m = static_cast<double>(stats.bs_antennas());
    const double zeta = per_path_snr(stats, rho_tau, sigma_z_sq);

    ComplexMatrix x;
    double gain = m * zeta;
    if (scenario == Scenario::NonPrecodedUncombined) {
        x = path_gram(stats);
    } else {
        x = (stats.ru() * stats.ru()).transpose().cwiseProduct(stats.rb());
        gain *= stats.delta();
    }
    const ComplexMatrix a = ComplexMatrix::Identity(l, l) + gain * hermitian_part(x);
    const ComplexMatrix core = stats.path_variance() * solve_hermitian_pd(a, ComplexMatrix::Identity(l, l));
    return {stats.U(), stats.B(), hermitian_part(core)};
}

PathDomainCovariance error_cov_closed_form(const PilotScheme& scheme, std::span<const ChannelStats> stats,
                                           double sigma_z_sq, Eigen::Index k)
{
    check_inputs(scheme, stats, sigma_z_sq, k, "error_cov_closed_form");
    const ChannelStats& own = stats[static_cast<std::size_t>(k)];
    if (scheme.scenario != Scenario::PrecodedCombined)
        return error_cov_closed_form(scheme.scenario, own, scheme.rho_tau, sigma_z_sq);

    const InterferenceCovariances q = interference_covariances(scheme, stats, sigma_z_sq, k);
    const ComplexMatrix g = projected_paths(scheme, stats, k, k);
    const double c = own.path_variance();
    const Eigen::Index l = own.path_count();
    const ComplexMatrix core =
        c * ComplexMatrix::Identity(l, l) - c * c * (g.adjoint() * solve_hermitian_pd(q.own + q.interference, g));
    return {own.U(), own.B(), hermitian_part(core)};
}

double nmse(const PathDomainCovariance& error, const ChannelStats& stats)
{
    const double total = stats.covariance_trace();
    if (!(total > 0.0))
        throw NumericalError("nmse: channel covariance has zero trace");
    return error.trace() / total;
}

NmseBounds nmse_bounds(Scenario scenario, const ChannelStats& stats, double rho_tau, double sigma_z_sq)
{
    if (scenario == Scenario::PrecodedCombined)
        throw ConfigError("nmse_bounds: no closed bound exists for PC");
    if (!(sigma_z_sq >= kMinNoiseVariance))
        throw ConfigError("nmse_bounds: noise variance must be at least 1e-12");

    const Eigen::Index l = stats.path_count();
    const double zeta = per_path_snr(stats, rho_tau, sigma_z_sq);
    double gain = static_cast<double>(stats.bs_antennas()) * zeta;
    ComplexMatrix x;
    if (scenario == Scenario::NonPrecodedUncombined) {
        x = path_gram(stats);
    } else {
        gain *= stats.delta();
        x = (stats.ru() * stats.ru()).transpose().cwiseProduct(stats.rb());
    }

    double lower = 1.0 / (1.0 + gain);
    double upper = lower;
    if (gain > 0.0) {
        const double kappa = condition_number(ComplexMatrix::Identity(l, l) + gain * hermitian_part(x));
        const double eps = (1.0 - kappa) * (1.0 - kappa) / (4.0 * kappa);
        lower *= std::max(0.0, 1.0 - eps / gain);
    }
    if (scenario == Scenario::PrecodedUncombined) {
        const HermitianEvd evd = hermitian_evd(stats.ru());
        const double lmax = evd.values(0);
        const double lmin = evd.values(evd.values.size() - 1);
        lower /= lmax;
        upper = lmin <= kRankTolerance * lmax ? std::numeric_limits<double>::infinity() : upper / lmin;
    }
    return {lower, upper};
}

double gain_ratio_puc_over_npuc(double bs_antennas, double zeta, double delta)
{
    return (1.0 + bs_antennas * zeta) / (1.0 + delta * bs_antennas * zeta);
}

double gain_ratio_puc_over_npuc(const ChannelStats& stats, double rho_tau, double sigma_z_sq)
{
    return gain_ratio_puc_over_npuc(static_cast<double>(stats.bs_antennas()),
                                    per_path_snr(stats, rho_tau, sigma_z_sq), stats.delta());
}

void MeanAccumulator::add(double x) noexcept
{
    ++n_;
    sum_ += x;
    sum_sq_ += x * x;
}

void MeanAccumulator::merge(const MeanAccumulator& other) noexcept
{
    n_ += other.n_;
    sum_ += other.sum_;
    sum_sq_ += other.sum_sq_;
}

McEstimate MeanAccumulator::result() const noexcept
{
    McEstimate out;
    out.trials = n_;
    if (n_ == 0)
        return out;
    const double n = static_cast<double>(n_);
    out.mean = sum_ / n;
    if (n_ > 1) {
        const double var = std::max(0.0, (sum_sq_ - n * out.mean * out.mean) / (n - 1.0));
        out.std_error = std::sqrt(var / n);
    }
    return out;
}

PilotPhase::PilotPhase(const PilotScheme& scheme, std::span<const ChannelStats> stats, double sigma_z_sq)
    : scheme_(scheme), stats_(stats.begin(), stats.end()), sigma_z_sq_(sigma_z_sq)
{
    if (static_cast<Eigen::Index>(stats.size()) != scheme.users())
        throw DimensionError("PilotPhase: one ChannelStats per user is required");
    for (Eigen::Index j = 0; j < scheme.users(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        path_pilots_.push_back(stats_[ju].U().adjoint() * scheme.precoders[ju].apply(scheme.pilots[ju]));
        estimators_.emplace_back(scheme_, stats_, sigma_z_sq, j);
    }
}

PilotPhase::Draw PilotPhase::sample(RandomStream& rng) const
{
    Draw d;
    const std::size_t k = stats_.size();
    d.gains.reserve(k);
    for (const auto& s : stats_) {
        const double scale = std::sqrt(static_cast<double>(s.bs_antennas() * s.ue_antennas()) /
                                       static_cast<double>(s.path_count()));
        d.gains.push_back(scale * sample_gains(rng, s.path_count(), s.sigma_sq()));
    }
    const Eigen::Index m = stats_[0].bs_antennas();
    ComplexMatrix y = rng.complex_normal_matrix(m, scheme_.pilot_length, sigma_z_sq_);
    for (std::size_t j = 0; j < k; ++j)
        y.noalias() += stats_[j].B() * d.gains[j].asDiagonal() * path_pilots_[j];

    d.estimates.reserve(k);
    for (std::size_t j = 0; j < k; ++j)
        d.estimates.push_back(estimators_[j].path_estimate(scheme_.combiners[j].apply_adjoint(y)));
    return d;
}

double path_error_energy(const ChannelStats& stats, const ComplexVector& e)
{
    return e.dot(path_gram(stats) * e).real();
}

std::vector<McEstimate> empirical_nmse(const PilotScheme& scheme, std::span<const ChannelStats> stats,
                                       double sigma_z_sq, std::int64_t trials, std::uint64_t seed,
                                       std::uint64_t realization)
{
    if (trials < 1)
        throw ConfigError("empirical_nmse: trial count must be at least 1");
    const PilotPhase phase(scheme, stats, sigma_z_sq);
    std::vector<MeanAccumulator> acc(stats.size());
    std::vector<double> norm(stats.size());
    for (std::size_t j = 0; j < stats.size(); ++j)
        norm[j] = stats[j].covariance_trace();

    for (std::int64_t t = 0; t < trials; ++t) {
        RandomStream rng = derive_stream(seed, static_cast<std::uint64_t>(t), realization);
        const PilotPhase::Draw d = phase.sample(rng);
        for (std::size_t j = 0; j < stats.size(); ++j)
            acc[j].add(path_error_energy(stats[j], d.gains[j] - d.estimates[j]) / norm[j]);
    }
    std::vector<McEstimate> out;
    for (const auto& a : acc)
        out.push_back(a.result());
    return out;
}

} // namespace pilotsim
