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

#include "doctest.h"

#include "oracles.hpp"
#include "pilotsim/errors.hpp"
#include "pilotsim/linalg.hpp"
#include "pilotsim/random.hpp"

#include <cmath>
#include <limits>

using namespace pilotsim;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("hadamard - small integer example and identity mask")
{
    ComplexMatrix a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 5, 6, 7, 8;
    ComplexMatrix expect(2, 2);
    expect << 5, 12, 21, 32;
    CHECK(hadamard(a, b) == expect);

    RandomStream rng(3);
    const ComplexMatrix r = oracle::random_matrix(rng, 3, 3);
    const ComplexMatrix masked = hadamard(r, ComplexMatrix::Identity(3, 3));
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j)
            CHECK(masked(i, j) == (i == j ? r(i, j) : cplx(0.0)));

    CHECK_THROWS_AS(hadamard(a, ComplexMatrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("hadamard/kronecker/khatri_rao - match index-loop oracles")
{
    RandomStream rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = oracle::random_matrix(rng, 3, 3);
        const ComplexMatrix b = oracle::random_matrix(rng, 3, 3);
        CHECK(oracle::rel(hadamard(a, b), oracle::hadamard(a, b)) < 1e-15);

        const ComplexMatrix c = oracle::random_matrix(rng, 2, 3);
        const ComplexMatrix d = oracle::random_matrix(rng, 3, 2);
        CHECK(oracle::rel(kronecker(c, d), oracle::kronecker(c, d)) < 1e-15);

        const ComplexMatrix e = oracle::random_matrix(rng, 3, 2);
        const ComplexMatrix f = oracle::random_matrix(rng, 4, 2);
        CHECK(oracle::rel(khatri_rao(e, f), oracle::khatri_rao(e, f)) < 1e-15);
    }
}

TEST_CASE("kronecker - identity and scalar left factors")
{
    RandomStream rng(5);
    const ComplexMatrix b = oracle::random_matrix(rng, 2, 3);
    const ComplexMatrix k = kronecker(ComplexMatrix::Identity(2, 2), b);
    CHECK(k.rows() == 4);
    CHECK(k.cols() == 6);
    CHECK(k.block(0, 0, 2, 3) == b);
    CHECK(k.block(2, 3, 2, 3) == b);
    CHECK(k.block(0, 3, 2, 3).isZero());

    ComplexMatrix s(1, 1);
    s(0, 0) = cplx(2.0, -1.0);
    CHECK(oracle::rel(kronecker(s, b), s(0, 0) * b) < 1e-15);
}

TEST_CASE("khatri_rao - columnwise kronecker and column mismatch")
{
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix kr = khatri_rao(i2, i2);
    ComplexMatrix expect = ComplexMatrix::Zero(4, 2);
    expect(0, 0) = 1.0;
    expect(3, 1) = 1.0;
    CHECK(kr == expect);

    RandomStream rng(6);
    const ComplexMatrix a = oracle::random_matrix(rng, 3, 1);
    const ComplexMatrix b = oracle::random_matrix(rng, 4, 1);
    CHECK(oracle::rel(khatri_rao(a, b), oracle::kronecker(a, b)) < 1e-15);
    CHECK_THROWS_AS(khatri_rao(a, oracle::random_matrix(rng, 4, 2)), DimensionError);
}

TEST_CASE("vec/unvec - column stacking and round trip")
{
    ComplexMatrix a(2, 2);
    a << 1, 3, 2, 4;
    ComplexVector v(4);
    v << 1, 2, 3, 4;
    CHECK(vec(a) == v);

    RandomStream rng(8);
    const ComplexMatrix r = oracle::random_matrix(rng, 4, 5);
    CHECK(unvec(vec(r), 4, 5) == r);
    CHECK_THROWS_AS(unvec(vec(r), 3, 5), DimensionError);
}

TEST_CASE("vectorization identity vec(ABC) = (C^T kron A) vec(B)")
{
    RandomStream rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix a = oracle::random_matrix(rng, 2, 3);
        const ComplexMatrix b = oracle::random_matrix(rng, 3, 2);
        const ComplexMatrix c = oracle::random_matrix(rng, 2, 2);
        const ComplexVector lhs = oracle::vec(a * b * c);
        const ComplexVector rhs = oracle::kronecker(c.transpose(), a) * oracle::vec(b);
        CHECK(oracle::rel(vec(a * b * c), lhs) < 1e-15);
        CHECK(oracle::rel(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("mixed product identities for kronecker and khatri_rao")
{
    RandomStream rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix a = oracle::random_matrix(rng, 3, 4);
        const ComplexMatrix b = oracle::random_matrix(rng, 2, 5);
        const ComplexMatrix c = oracle::random_matrix(rng, 4, 3);
        const ComplexMatrix d = oracle::random_matrix(rng, 5, 3);
        const ComplexMatrix cd = khatri_rao(c, d);
        CHECK(oracle::rel(kronecker(a, b) * cd, oracle::khatri_rao(a * c, b * d)) < 1e-10);

        const ComplexMatrix a2 = oracle::random_matrix(rng, 4, 3);
        const ComplexMatrix b2 = oracle::random_matrix(rng, 5, 2);
        CHECK(oracle::rel(cd.adjoint() * kronecker(a2, b2),
                          oracle::khatri_rao(a2.adjoint() * c, b2.adjoint() * d).adjoint()) < 1e-10);

        CHECK(oracle::rel(cd.adjoint() * cd, oracle::hadamard(c.adjoint() * c, d.adjoint() * d)) < 1e-10);
    }
}

TEST_CASE("hermitian_evd - diagonal, rank one, reconstruction")
{
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    const HermitianEvd e = hermitian_evd(d);
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(1) == doctest::Approx(2.0));
    CHECK(e.values(2) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 2)) == doctest::Approx(1.0));

    RandomStream rng(31);
    ComplexVector v = oracle::random_matrix(rng, 5, 1);
    v.normalize();
    const HermitianEvd r1 = hermitian_evd(v * v.adjoint());
    CHECK(r1.values(0) == doctest::Approx(1.0));
    for (Eigen::Index i = 1; i < 5; ++i)
        CHECK(std::abs(r1.values(i)) < 1e-14);

    const ComplexMatrix x = oracle::random_matrix(rng, 6, 6);
    const ComplexMatrix h = x + x.adjoint();
    const HermitianEvd he = hermitian_evd(h);
    const ComplexMatrix recon = he.vectors * he.values.cast<cplx>().asDiagonal() * he.vectors.adjoint();
    CHECK((recon - h).norm() <= 1e-8 * h.norm());
    CHECK((he.vectors.adjoint() * he.vectors - ComplexMatrix::Identity(6, 6)).norm() < 1e-8);
    for (Eigen::Index i = 1; i < 6; ++i)
        CHECK(he.values(i - 1) >= he.values(i));
}

TEST_CASE("hermitian_evd - phase convention, bitwise repeatability, non-Hermitian input")
{
    RandomStream rng(32);
    const ComplexMatrix x = oracle::random_matrix(rng, 7, 7);
    const ComplexMatrix h = x * x.adjoint();
    const HermitianEvd a = hermitian_evd(h);
    const HermitianEvd b = hermitian_evd(h);
    CHECK(a.values == b.values);
    CHECK(a.vectors == b.vectors);
    for (Eigen::Index j = 0; j < 7; ++j) {
        Eigen::Index lead = 0;
        while (std::abs(a.vectors(lead, j)) <= 1e-12)
            ++lead;
        CHECK(a.vectors(lead, j).real() > 0.0);
        CHECK(a.vectors(lead, j).imag() == 0.0);
    }

    // repeated eigenvalue: identity plus a rank-one bump
    ComplexMatrix tied = ComplexMatrix::Identity(4, 4);
    tied(3, 3) = 5.0;
    const HermitianEvd t1 = hermitian_evd(tied);
    const HermitianEvd t2 = hermitian_evd(tied);
    CHECK(t1.vectors == t2.vectors);
    CHECK(std::abs(t1.vectors(3, 0)) == doctest::Approx(1.0));

    CHECK_THROWS_AS(hermitian_evd(x), NumericalError);
}

TEST_CASE("condition_number - identity, diagonal, sentinel, zero matrix")
{
    CHECK(condition_number(ComplexMatrix::Identity(3, 3)) == doctest::Approx(1.0));
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 1.0;
    CHECK(condition_number(d) == doctest::Approx(4.0));

    ComplexMatrix sing = ComplexMatrix::Zero(2, 2);
    sing(0, 0) = 1.0;
    CHECK(condition_number(sing) == std::numeric_limits<double>::infinity());
    CHECK_THROWS(condition_number(ComplexMatrix::Zero(3, 3)));

    RandomStream rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix u = oracle::random_matrix(rng, 6, 3);
        const ComplexMatrix b = oracle::random_matrix(rng, 5, 3);
        const ComplexMatrix x = ComplexMatrix::Identity(3, 3) +
                                0.7 * oracle::hadamard((u.adjoint() * u).transpose(), b.adjoint() * b);
        const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(x);
        const double expect = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
        const double kappa = condition_number(x);
        CHECK(kappa >= 1.0);
        CHECK(kappa == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("trace_inverse_bounds - identity, diagonal, random PD")
{
    const auto id = trace_inverse_bounds(ComplexMatrix::Identity(4, 4));
    CHECK(id.lower == doctest::Approx(4.0));
    CHECK(id.upper == doctest::Approx(4.0));

    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    d(2, 2) = 8.0;
    const auto db = trace_inverse_bounds(d);
    CHECK(db.lower == doctest::Approx(0.875));
    CHECK(db.upper >= db.lower);

    RandomStream rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix a = oracle::random_pd(rng, 5);
        const double tr = a.inverse().trace().real();
        const auto b = trace_inverse_bounds(a);
        CHECK(b.lower <= tr * (1.0 + 1e-12));
        CHECK(tr <= b.upper * (1.0 + 1e-12));
    }

    ComplexMatrix neg = ComplexMatrix::Identity(2, 2);
    neg(1, 1) = -1.0;
    CHECK_THROWS(trace_inverse_bounds(neg));
}

TEST_CASE("solve_hermitian_pd - trivial systems, residual, singular input")
{
    RandomStream rng(61);
    const ComplexMatrix b = oracle::random_matrix(rng, 4, 2);
    CHECK(oracle::rel(solve_hermitian_pd(ComplexMatrix::Identity(4, 4), b), b) < 1e-15);
    const ComplexMatrix half =
        solve_hermitian_pd(2.0 * ComplexMatrix::Identity(3, 3), ComplexMatrix::Identity(3, 3));
    CHECK(oracle::rel(half, 0.5 * ComplexMatrix::Identity(3, 3)) < 1e-15);

    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = oracle::random_pd(rng, 8, 0.01);
        const ComplexMatrix rhs = oracle::random_matrix(rng, 8, 3);
        const ComplexMatrix x = solve_hermitian_pd(a, rhs);
        CHECK((a * x - rhs).norm() <= 1e-8 * rhs.norm());
    }

    ComplexMatrix sing = ComplexMatrix::Zero(3, 3);
    sing(0, 0) = 1.0;
    CHECK_THROWS_AS(solve_hermitian_pd(sing, ComplexMatrix::Identity(3, 3)), NumericalError);
}

TEST_CASE("log_det_hermitian_pd and LowRankPsd")
{
    RandomStream rng(71);
    const ComplexMatrix a = oracle::random_pd(rng, 6);
    CHECK(log_det_hermitian_pd(a) == doctest::Approx(std::log(a.determinant().real())).epsilon(1e-10));

    const ComplexMatrix f = oracle::random_matrix(rng, 7, 2);
    const LowRankPsd lr(f, 1.5);
    CHECK(oracle::rel(lr.dense(), 1.5 * f * f.adjoint()) < 1e-15);
    CHECK(lr.trace() == doctest::Approx((1.5 * f * f.adjoint()).trace().real()));
    CHECK(lr.dimension() == 7);
    CHECK(lr.max_rank() == 2);
}

TEST_CASE("random streams - reproducible and distinct")
{
    RandomStream a = derive_stream(1, 2, 3);
    RandomStream b = derive_stream(1, 2, 3);
    RandomStream c = derive_stream(1, 3, 2);
    const std::uint64_t x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());

    RandomStream g(99);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const cplx z = g.complex_normal(2.0);
        sum += z.real();
        sum_sq += std::norm(z);
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(sum_sq / n == doctest::Approx(2.0).epsilon(0.03));
}

TEST_SUITE_END();
