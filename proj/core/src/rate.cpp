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

#include "pilotsim/rate.hpp"

#include "pilotsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pilotsim {

namespace {

void check_data_phase(const DataPhaseConfig& cfg)
{
    if (cfg.coherence < 1 || cfg.pilot_length < 0 || cfg.data_length() < 1)
        throw ConfigError("data phase: need T_c >= 1 and T_d = T_c - T_tau >= 1");
    if (!(cfg.rho_d >= 0.0) || !std::isfinite(cfg.rho_d))
        throw ConfigError("data phase: rho_d must be finite and nonnegative");
    if (!(cfg.sigma_z_sq >= kMinNoiseVariance))
        throw ConfigError("data phase: noise variance must be at least 1e-12");
}

} // namespace

namespace {

// Leading eigenvectors (columns of `vectors`, descending `values`) scaled by
// sqrt(1/L), completed over the standard basis where the rank runs out.
ComplexMatrix precoder_from_evd(const RealVector& values, const ComplexMatrix& vectors, Eigen::Index n,
                                Eigen::Index streams)
{
    const double cutoff = kRankTolerance * std::max(values(0), 0.0);
    ComplexMatrix e(n, streams);
    Eigen::Index kept = 0;
    for (; kept < streams && kept < values.size(); ++kept) {
        if (!(values(kept) > cutoff && values(kept) > 0.0))
            break;
        e.col(kept) = vectors.col(kept);
    }
    // orthogonalised twice for accuracy
    for (Eigen::Index i = 0; kept < streams && i < n; ++i) {
        ComplexVector v = ComplexVector::Unit(n, i);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index c = 0; c < kept; ++c)
                v -= e.col(c).dot(v) * e.col(c);
        const double norm = v.norm();
        if (norm > 1e-8)
            e.col(kept++) = v / norm;
    }
    return e / std::sqrt(static_cast<double>(streams));
}

} // namespace

ComplexMatrix data_precoder(const ComplexMatrix& estimate, Eigen::Index streams)
{
    const Eigen::Index n = estimate.cols();
    if (streams < 1 || streams > n)
        throw DimensionError("data_precoder: need 1 <= L <= N");
    const HermitianEvd evd = hermitian_evd(estimate.adjoint() * estimate);
    return precoder_from_evd(evd.values, evd.vectors, n, streams);
}

ComplexMatrix data_precoder(const ChannelStats& stats, const ComplexVector& path_gains, Eigen::Index streams)
{
    const Eigen::Index n = stats.ue_antennas();
    if (streams < 1 || streams > n)
        throw DimensionError("data_precoder: need 1 <= L <= N");
    if (path_gains.size() != stats.path_count())
        throw DimensionError("data_precoder: one gain per path is required");

    // Hhat^H Hhat = U D U^H with D = diag(x)^H R_B diag(x); with U = Q R,
    // its nonzero spectrum is that of R D R^H.
    const Eigen::HouseholderQR<ComplexMatrix> qr(stats.U());
    const Eigen::Index l = stats.path_count();
    const Eigen::Index r = std::min(n, l);
    const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, r);
    const ComplexMatrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const ComplexMatrix d = path_gains.conjugate().asDiagonal() * stats.rb() * path_gains.asDiagonal();
    const HermitianEvd evd = hermitian_evd(rr * d * rr.adjoint());
    return precoder_from_evd(evd.values, q * evd.vectors, n, streams);
}

ComplexMatrix zeff_covariance(std::span<const ComplexMatrix> error_covs, std::span<const ComplexMatrix> tx_covs,
                              double sigma_z_sq)
{
    if (error_covs.size() != tx_covs.size() || error_covs.empty())
        throw DimensionError("zeff_covariance: one error covariance per transmit covariance is required");
    const Eigen::Index n = tx_covs[0].rows();
    const Eigen::Index mn = error_covs[0].rows();
    if (n < 1 || mn % n != 0)
        throw DimensionError("zeff_covariance: error covariance size is not a multiple of N");
    const Eigen::Index m = mn / n;

    ComplexMatrix out = sigma_z_sq * ComplexMatrix::Identity(m, m);
    for (std::size_t k = 0; k < error_covs.size(); ++k) {
        const ComplexMatrix& r = error_covs[k];
        const ComplexMatrix& a = tx_covs[k];
        if (r.rows() != m * a.rows() || r.cols() != r.rows() || a.rows() != a.cols())
            throw DimensionError("zeff_covariance: inconsistent dimensions");
        // E[Ht A Ht^H] = sum_{i,j} A(i, j) Block_{i,j}(R)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                out.noalias() += a(i, j) * r.block(i * m, j * m, m, m);
    }
    return out;
}

ComplexMatrix zeff_covariance(std::span<const PathDomainCovariance> error_covs,
                              std::span<const ComplexMatrix> tx_covs, double sigma_z_sq)
{
    if (error_covs.size() != tx_covs.size() || error_covs.empty())
        throw DimensionError("zeff_covariance: one error covariance per transmit covariance is required");
    const Eigen::Index m = error_covs[0].B().rows();
    ComplexMatrix out = sigma_z_sq * ComplexMatrix::Identity(m, m);
    for (std::size_t k = 0; k < error_covs.size(); ++k) {
        if (error_covs[k].B().rows() != m)
            throw DimensionError("zeff_covariance: users disagree on M");
        out += error_covs[k].weighted_second_moment(tx_covs[k]);
    }
    return out;
}

double log2_det_gain(const ComplexMatrix& rz, const ComplexMatrix& phi)
{
    if (rz.rows() != rz.cols() || phi.rows() != rz.rows())
        throw DimensionError("log2_det_gain: dimension mismatch");
    const Eigen::LLT<ComplexMatrix> llt(rz);
    if (llt.info() != Eigen::Success)
        throw NumericalError("log2_det_gain: interference-plus-noise covariance is not positive definite");
    const ComplexMatrix x = llt.matrixL().solve(phi);
    // det(I_M + L^-1 Phi Phi^H L^-H) = det(I_p + X^H X)
    ComplexMatrix g = x.adjoint() * x;
    g.diagonal().array() += 1.0;
    return log_det_hermitian_pd(g) / std::numbers::ln2;
}

double log2_det_gain(const ComplexMatrix& basis, const ComplexMatrix& gram, const ComplexMatrix& core,
                     const ComplexMatrix& phi, double sigma_z_sq)
{
    const Eigen::Index q = basis.cols();
    if (phi.rows() != basis.rows() || gram.rows() != q || gram.cols() != q || core.rows() != q ||
        core.cols() != q)
        throw DimensionError("log2_det_gain: dimension mismatch");
    if (!(sigma_z_sq > 0.0))
        throw NumericalError("log2_det_gain: noise variance must be positive");

    // Rz^{-1} = (I - X C (s I + X^H X C)^{-1} X^H) / s, valid for singular C
    const ComplexMatrix p = basis.adjoint() * phi;
    ComplexMatrix a = gram * core;
    a.diagonal().array() += sigma_z_sq;
    const Eigen::PartialPivLU<ComplexMatrix> lu(a);
    ComplexMatrix m = phi.adjoint() * phi - p.adjoint() * (core * lu.solve(p));
    m /= sigma_z_sq;
    m = 0.5 * (m + m.adjoint()).eval();
    m.diagonal().array() += 1.0;
    const Eigen::LLT<ComplexMatrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw NumericalError("log2_det_gain: interference-plus-noise covariance is not positive definite");
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        s += std::log(llt.matrixLLT()(i, i).real());
    return 2.0 * s / std::numbers::ln2;
}

RateResult sum_rate_mc(const PilotScheme& scheme, std::span<const ChannelStats> stats, const DataPhaseConfig& cfg,
                       std::int64_t trials, std::uint64_t seed, std::uint64_t realization)
{
    check_data_phase(cfg);
    if (trials < 1)
        throw ConfigError("sum_rate_mc: trial count must be at least 1");
    if (cfg.pilot_length != scheme.pilot_length)
        throw ConfigError("sum_rate_mc: data phase T_tau differs from the pilot scheme");

    const PilotPhase phase(scheme, stats, cfg.sigma_z_sq);
    std::vector<PathDomainCovariance> errors;
    for (Eigen::Index k = 0; k < scheme.users(); ++k)
        errors.push_back(error_cov_closed_form(scheme, stats, cfg.sigma_z_sq, k));

    const double td = static_cast<double>(cfg.data_length());
    const double prefactor = td / static_cast<double>(cfg.coherence);
    const double power = cfg.rho_d / td;
    const double amplitude = std::sqrt(power);

    // stacked steering matrices of all users; Rz = sigma_z^2 I + X C X^H
    Eigen::Index q = 0;
    for (const auto& s : stats)
        q += s.path_count();
    const Eigen::Index m = stats[0].bs_antennas();
    ComplexMatrix basis(m, q);
    for (Eigen::Index k = 0, off = 0; k < static_cast<Eigen::Index>(stats.size()); ++k) {
        const auto& b = stats[static_cast<std::size_t>(k)].B();
        basis.middleCols(off, b.cols()) = b;
        off += b.cols();
    }
    const ComplexMatrix gram = basis.adjoint() * basis;

    MeanAccumulator acc;
    ComplexMatrix core = ComplexMatrix::Zero(q, q);
    ComplexMatrix phi(m, q);
    for (std::int64_t t = 0; t < trials; ++t) {
        RandomStream rng = derive_stream(seed, static_cast<std::uint64_t>(t), realization);
        const PilotPhase::Draw d = phase.sample(rng);

        Eigen::Index off = 0;
        for (std::size_t k = 0; k < stats.size(); ++k) {
            const ChannelStats& s = stats[k];
            const Eigen::Index l = s.path_count();
            const ComplexMatrix f = data_precoder(s, d.estimates[k], l);
            // U^H Rx U = power (U^H F)(U^H F)^H
            const ComplexMatrix uf = s.U().adjoint() * f;
            core.block(off, off, l, l) = errors[k].core().cwiseProduct(power * uf * uf.adjoint());
            phi.middleCols(off, l) = amplitude * (s.B() * (d.estimates[k].asDiagonal() * uf));
            off += l;
        }
        acc.add(prefactor * log2_det_gain(basis, gram, core, phi, cfg.sigma_z_sq));
    }
    return acc.result();
}

double asymptotic_rate_bound(std::span<const double> sigma_sq, Eigen::Index paths, const DataPhaseConfig& cfg)
{
    check_data_phase(cfg);
    if (paths < 1)
        throw ConfigError("asymptotic_rate_bound: L must be positive");
    double total = 0.0;
    for (double s : sigma_sq)
        total += s;
    const double l = static_cast<double>(paths);
    const double td = static_cast<double>(cfg.data_length());
    return l * td / static_cast<double>(cfg.coherence) *
           std::log2(1.0 + cfg.rho_d / td * total / (l * cfg.sigma_z_sq));
}

} // namespace pilotsim
