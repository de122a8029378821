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
 * @file linalg.hpp
 * @brief Complex dense kernels: Hadamard, Kronecker and Khatri-Rao products,
 * column-stacking vectorization, Hermitian eigendecomposition and Hermitian
 * positive definite solves.
 *
 * Storage is Eigen's column-major MatrixXcd. All routines are pure functions;
 * none of them keeps global state, so values can be shared across threads.
 */

#ifndef PILOTSIM_LINALG_HPP
#define PILOTSIM_LINALG_HPP

#include <Eigen/Dense>

#include <complex>

namespace pilotsim {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigenvalues at or below kRankTolerance * lambda_max are treated as zero.
inline constexpr double kRankTolerance = 1e-12;
/// Relative tolerance used when checking that an input is Hermitian.
inline constexpr double kHermitianTolerance = 1e-10;

/// Entrywise product. Throws DimensionError unless shapes match.
ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b);

/// Block matrix whose block (i, j) is a(i, j) * b.
ComplexMatrix kronecker(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-wise Kronecker product: column l is a.col(l) (x) b.col(l).
/// Throws DimensionError when the column counts differ.
ComplexMatrix khatri_rao(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column stacking.
ComplexVector vec(const ComplexMatrix& a);

/// Inverse of vec(). Throws DimensionError if v.size() != rows * cols.
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols);

struct HermitianEvd {
    RealVector values;     ///< descending
    ComplexMatrix vectors; ///< orthonormal columns, one per eigenvalue
};

/**
 * Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
 *
 * Every eigenvector is phase-normalised so that its first component with
 * magnitude above 1e-12 is real and positive. Within a cluster of eigenvalues
 * equal to 1e-12 relative, vectors are ordered by the index of that leading
 * component. Two calls on the same input produce bit-identical output.
 *
 * Throws NumericalError if the input is not Hermitian to 1e-10 relative.
 */
HermitianEvd hermitian_evd(const ComplexMatrix& a);

/// Ratio of extreme eigenvalues of a Hermitian PSD matrix. Returns +infinity
/// when the smallest eigenvalue is at or below the rank tolerance. Throws
/// NumericalError for the zero matrix or a non-Hermitian input.
double condition_number(const ComplexMatrix& a);

struct TraceInverseBounds {
    double lower;
    double upper;
};

/// Diagonal-based sandwich for tr(A^-1) of a positive definite matrix:
/// lower = sum 1/a_ii, upper = lower * (1 + kappa)^2 / (4 kappa).
TraceInverseBounds trace_inverse_bounds(const ComplexMatrix& a);

/// Solves A X = B for Hermitian positive definite A via Cholesky. Throws
/// NumericalError naming the smallest pivot when A is singular within the
/// rank tolerance or not positive definite.
ComplexMatrix solve_hermitian_pd(const ComplexMatrix& a, const ComplexMatrix& b);

/// log(det(A)) for Hermitian positive definite A (natural log).
double log_det_hermitian_pd(const ComplexMatrix& a);

/// True when ||A - A^H||_F <= tol * ||A||_F.
bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTolerance);

/// ||a - b||_F / max(||b||_F, tiny). Shapes must match.
double relative_error(const ComplexMatrix& a, const ComplexMatrix& b);

/// Hermitian PSD matrix stored as scale * factor * factor^H.
class LowRankPsd {
public:
    LowRankPsd() = default;
    LowRankPsd(ComplexMatrix factor, double scale);

    const ComplexMatrix& factor() const noexcept { return factor_; }
    double scale() const noexcept { return scale_; }
    Eigen::Index dimension() const noexcept { return factor_.rows(); }
    Eigen::Index max_rank() const noexcept { return factor_.cols(); }

    double trace() const;
    ComplexMatrix dense() const;

private:
    ComplexMatrix factor_;
    double scale_ = 0.0;
};

} // namespace pilotsim

#endif
