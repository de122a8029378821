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

#include "pilotsim/linalg.hpp"

#include "pilotsim/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace pilotsim {

namespace {

std::string shape(const ComplexMatrix& m)
{
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

void require_square(const ComplexMatrix& a, const char* what)
{
    if (a.rows() != a.cols() || a.rows() == 0)
        throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " + shape(a));
}

void require_hermitian(const ComplexMatrix& a, const char* what)
{
    require_square(a, what);
    if (!is_hermitian(a))
        throw NumericalError(std::string(what) + ": input is not Hermitian");
}

// Index of the first component whose magnitude exceeds the threshold.
Eigen::Index leading_index(const ComplexVector& v)
{
    const double thr = 1e-12 * std::max(v.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > thr)
            return i;
    return 0;
}

} // namespace

ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("hadamard: shape mismatch " + shape(a) + " vs " + shape(b));
    return a.cwiseProduct(b);
}

ComplexMatrix kronecker(const ComplexMatrix& a, const ComplexMatrix& b)
{
    const Eigen::Index br = b.rows(), bc = b.cols();
    ComplexMatrix out(a.rows() * br, a.cols() * bc);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.block(i * br, j * bc, br, bc).noalias() = a(i, j) * b;
    return out;
}

ComplexMatrix khatri_rao(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.cols() != b.cols())
        throw DimensionError("khatri_rao: column count mismatch " + shape(a) + " vs " + shape(b));
    const Eigen::Index br = b.rows();
    ComplexMatrix out(a.rows() * br, a.cols());
    for (Eigen::Index l = 0; l < a.cols(); ++l)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.col(l).segment(i * br, br).noalias() = a(i, l) * b.col(l);
    return out;
}

ComplexVector vec(const ComplexMatrix& a)
{
    return a.reshaped();
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols)
{
    if (rows <= 0 || cols <= 0 || v.size() != rows * cols) {
        std::ostringstream os;
        os << "unvec: cannot reshape length " << v.size() << " into " << rows << "x" << cols;
        throw DimensionError(os.str());
    }
    return v.reshaped(rows, cols);
}

bool is_hermitian(const ComplexMatrix& a, double tol)
{
    if (a.rows() != a.cols())
        return false;
    const double norm = a.norm();
    return (a - a.adjoint()).norm() <= tol * std::max(norm, std::numeric_limits<double>::min());
}

double relative_error(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("relative_error: shape mismatch " + shape(a) + " vs " + shape(b));
    return (a - b).norm() / std::max(b.norm(), std::numeric_limits<double>::min());
}

HermitianEvd hermitian_evd(const ComplexMatrix& a)
{
    require_hermitian(a, "hermitian_evd");
    const ComplexMatrix herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian_evd: eigensolver did not converge");

    const Eigen::Index n = a.rows();
    const RealVector& ascending = solver.eigenvalues();
    ComplexMatrix vectors = solver.eigenvectors();

    for (Eigen::Index c = 0; c < n; ++c) {
        const Eigen::Index lead = leading_index(vectors.col(c));
        const cplx z = vectors(lead, c);
        if (std::abs(z) > 0.0)
            vectors.col(c) *= std::conj(z) / std::abs(z);
        vectors(lead, c) = cplx(vectors(lead, c).real(), 0.0);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::reverse(order.begin(), order.end());

    // Clusters of (relatively) equal eigenvalues are ordered by leading index.
    const double scale = std::max(std::abs(ascending(0)), std::abs(ascending(n - 1)));
    const double tie = 1e-12 * std::max(scale, std::numeric_limits<double>::min());
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t stop = start + 1;
        while (stop < order.size() && std::abs(ascending(order[start]) - ascending(order[stop])) <= tie)
            ++stop;
        if (stop - start > 1) {
            std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(stop),
                             [&](Eigen::Index x, Eigen::Index y) {
                                 return leading_index(vectors.col(x)) < leading_index(vectors.col(y));
                             });
        }
        start = stop;
    }

    HermitianEvd out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = ascending(order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

double condition_number(const ComplexMatrix& a)
{
    require_hermitian(a, "condition_number");
    const RealVector ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(0.5 * (a + a.adjoint()),
                                                                       Eigen::EigenvaluesOnly)
                              .eigenvalues();
    const double lmax = ev.maxCoeff();
    const double lmin = ev.minCoeff();
    if (!(lmax > 0.0))
        throw NumericalError("condition_number: matrix is zero or not positive semidefinite");
    if (lmin <= kRankTolerance * lmax)
        return std::numeric_limits<double>::infinity();
    return lmax / lmin;
}

TraceInverseBounds trace_inverse_bounds(const ComplexMatrix& a)
{
    require_hermitian(a, "trace_inverse_bounds");
    const RealVector ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(0.5 * (a + a.adjoint()),
                                                                       Eigen::EigenvaluesOnly)
                              .eigenvalues();
    const double lmax = ev.maxCoeff();
    const double lmin = ev.minCoeff();
    if (!(lmax > 0.0) || lmin <= kRankTolerance * lmax) {
        std::ostringstream os;
        os << "trace_inverse_bounds: matrix is not positive definite (lambda_min = " << lmin << ")";
        throw NumericalError(os.str());
    }
    const double kappa = lmax / lmin;
    double lower = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        lower += 1.0 / a(i, i).real();
    return {lower, lower * (1.0 + kappa) * (1.0 + kappa) / (4.0 * kappa)};
}

ComplexMatrix solve_hermitian_pd(const ComplexMatrix& a, const ComplexMatrix& b)
{
    require_hermitian(a, "solve_hermitian_pd");
    if (b.rows() != a.rows())
        throw DimensionError("solve_hermitian_pd: rhs " + shape(b) + " does not conform to " + shape(a));

    Eigen::LLT<ComplexMatrix> llt(0.5 * (a + a.adjoint()));
    const double dmax = a.diagonal().real().maxCoeff();
    if (llt.info() != Eigen::Success) {
        std::ostringstream os;
        os << "solve_hermitian_pd: matrix is not positive definite (largest diagonal " << dmax << ")";
        throw NumericalError(os.str());
    }
    const RealVector pivots = llt.matrixLLT().diagonal().real().cwiseAbs2();
    const double pmin = pivots.minCoeff();
    if (!(pmin > kRankTolerance * dmax)) {
        std::ostringstream os;
        os << "solve_hermitian_pd: singular system, smallest pivot " << pmin << " vs largest diagonal " << dmax;
        throw NumericalError(os.str());
    }
    return llt.solve(b);
}

double log_det_hermitian_pd(const ComplexMatrix& a)
{
    require_hermitian(a, "log_det_hermitian_pd");
    Eigen::LLT<ComplexMatrix> llt(0.5 * (a + a.adjoint()));
    if (llt.info() != Eigen::Success)
        throw NumericalError("log_det_hermitian_pd: matrix is not positive definite");
    return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

LowRankPsd::LowRankPsd(ComplexMatrix factor, double scale) : factor_(std::move(factor)), scale_(scale)
{
    if (!(scale >= 0.0) || !std::isfinite(scale))
        throw NumericalError("LowRankPsd: scale must be finite and nonnegative");
}

double LowRankPsd::trace() const
{
    return scale_ * factor_.squaredNorm();
}

ComplexMatrix LowRankPsd::dense() const
{
    return scale_ * (factor_ * factor_.adjoint());
}

} // namespace pilotsim
