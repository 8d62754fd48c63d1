// SPDX-License-Identifier: Apache-2.0
//
// gia-sim: grouping-based interference alignment for multi-cell MIMO uplinks
// Copyright (C) 2026 The gia-sim Authors
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

#include <gia/matrix.hpp>
#include <gia/random.hpp>

#include <gtest/gtest.h>

using namespace gia;
using namespace gia::linalg;

namespace {

Rng rng_for(std::uint64_t id)
{
    return make_stream({0xabcdu, id});
}

CMatrix random_unitary(Rng& rng, Eigen::Index n)
{
    return orthonormalize(complex_gaussian(rng, n, n)).basis();
}

} // namespace

TEST(Svd, IdentityHasUnitSingularValues)
{
    const SvdResult f = svd(CMatrix::Identity(3, 3));
    EXPECT_NEAR((f.singular_values - RVector::Ones(3)).norm(), 0.0, 1e-14);
}

TEST(Svd, DiagonalSingularValuesSorted)
{
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 3.0;
    const SvdResult f = svd(d);
    EXPECT_NEAR(f.singular_values(0), 3.0, 1e-14);
    EXPECT_NEAR(f.singular_values(1), 2.0, 1e-14);
}

TEST(Svd, ReconstructsRandomMatrix)
{
    Rng rng = rng_for(1);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix M = complex_gaussian(rng, 4, 2);
        const SvdResult f = svd(M);
        const CMatrix back = f.U * f.singular_values.asDiagonal() * f.Vh;
        EXPECT_LT((back - M).norm() / M.norm(), 1e-10);
        EXPECT_LT(orthonormality_error(f.U), 1e-10);
        EXPECT_LT(orthonormality_error(f.Vh.adjoint()), 1e-10);
    }
}

TEST(Svd, RejectsNonFinite)
{
    CMatrix m = CMatrix::Identity(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(svd(m), ContractViolation);
}

TEST(LeftNullSpace, AxisCase)
{
    CMatrix m(2, 1);
    m << 1.0, 0.0;
    const Subspace n = left_null_space(m);
    ASSERT_EQ(n.dim(), 1u);
    EXPECT_NEAR(std::abs(n.basis()(1, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(n.basis()(0, 0)), 0.0, 1e-14);
}

TEST(LeftNullSpace, FullRankIsEmpty)
{
    EXPECT_THROW(left_null_space(CMatrix::Identity(3, 3)), EmptySubspace);
}

TEST(LeftNullSpace, RankTwoConstruction)
{
    Rng rng = rng_for(2);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix a = complex_gaussian(rng, 4, 1), b = complex_gaussian(rng, 3, 1);
        const CMatrix c = complex_gaussian(rng, 4, 1), d = complex_gaussian(rng, 3, 1);
        const CMatrix M = a * b.adjoint() + c * d.adjoint();
        const Subspace n = left_null_space(M);
        EXPECT_EQ(n.dim(), 2u);
        EXPECT_LT((n.basis().adjoint() * M).norm(), 1e-9 * std::max(1.0, M.norm()));
    }
}

TEST(LeftNullSpace, PropertyAnnihilatesTallInputs)
{
    Rng rng = rng_for(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index rows = 3 + trial % 5, cols = 1 + trial % 2;
        const CMatrix M = 10.0 * complex_gaussian(rng, rows, cols);
        const Subspace n = left_null_space(M);
        EXPECT_EQ(static_cast<Eigen::Index>(n.dim()), rows - cols);
        EXPECT_LT((n.basis().adjoint() * M).norm(), 1e-9 * std::max(1.0, M.norm()));
    }
}

TEST(SmallestDirections, InfeasibleWhenNullSpaceTooSmall)
{
    Rng rng = rng_for(4);
    const CMatrix M = complex_gaussian(rng, 4, 3);
    EXPECT_NO_THROW(smallest_left_singular_directions(M, 1, "test"));
    EXPECT_THROW(smallest_left_singular_directions(M, 2, "test"), Infeasible);
}

TEST(SmallestDirections, EmptyMatrixGivesIdentityColumns)
{
    const CMatrix dirs = smallest_left_singular_directions(CMatrix(5, 0), 2, "test");
    EXPECT_LT((dirs - CMatrix::Identity(5, 5).leftCols(2)).norm(), 1e-15);
}

TEST(Projectors, AxisCase)
{
    CMatrix x(2, 1);
    x << 1.0, 0.0;
    const Projectors p = projectors(x);
    EXPECT_NEAR(p.P(0, 0).real(), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(p.P(1, 1)), 0.0, 1e-14);
    EXPECT_NEAR(p.P_perp(1, 1).real(), 1.0, 1e-14);
}

TEST(Projectors, SemiUnitaryInputGivesOuterProduct)
{
    Rng rng = rng_for(5);
    const Subspace q = random_subspace(rng, 5, 2);
    EXPECT_LT((projectors(q.basis()).P - q.basis() * q.basis().adjoint()).norm(), 1e-12);
}

TEST(Projectors, DefiningIdentities)
{
    Rng rng = rng_for(6);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix X = complex_gaussian(rng, 5, 2);
        const Projectors p = projectors(X);
        EXPECT_LT((p.P * X - X).norm(), 1e-10 * X.norm());
        EXPECT_LT((p.P * p.P - p.P).norm(), 1e-10);
        EXPECT_LT((p.P - p.P.adjoint()).norm(), 1e-10);
        EXPECT_LT((p.P + p.P_perp - CMatrix::Identity(5, 5)).norm(), 1e-15);
        // Independent oracle: X (X^H X)^{-1} X^H.
        const CMatrix direct = X * (X.adjoint() * X).inverse() * X.adjoint();
        EXPECT_LT((direct - p.P).norm(), 1e-10);
    }
}

TEST(Projectors, RankDeficientRejected)
{
    CMatrix x = CMatrix::Zero(3, 2);
    x(0, 0) = 1.0;
    x(0, 1) = 2.0;
    EXPECT_THROW(projectors(x), RankDeficiency);
}

TEST(HermEig, DiagonalDescending)
{
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 5.0;
    const HermEig e = herm_eig(d);
    EXPECT_NEAR(e.eigenvalues(0), 5.0, 1e-14);
    EXPECT_NEAR(e.eigenvalues(1), 2.0, 1e-14);
}

TEST(HermEig, RankOne)
{
    Rng rng = rng_for(7);
    CMatrix v = complex_gaussian(rng, 4, 1);
    v /= v.norm();
    const HermEig e = herm_eig(v * v.adjoint());
    EXPECT_NEAR(e.eigenvalues(0), 1.0, 1e-12);
    for (int i = 1; i < 4; ++i)
        EXPECT_NEAR(e.eigenvalues(i), 0.0, 1e-12);
}

TEST(HermEig, MatchesSquaredSingularValuesAndTrace)
{
    Rng rng = rng_for(8);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix A = complex_gaussian(rng, 6, 4);
        const CMatrix G = A.adjoint() * A;
        const HermEig e = herm_eig(G);
        const RVector s = svd(A).singular_values;
        for (int i = 0; i < 4; ++i)
            EXPECT_NEAR(e.eigenvalues(i), s(i) * s(i), 1e-9 * s(0) * s(0));
        EXPECT_NEAR(e.eigenvalues.sum(), G.trace().real(), 1e-9 * std::abs(G.trace().real()));
        EXPECT_LT((e.eigenvectors.adjoint() * e.eigenvectors - CMatrix::Identity(4, 4)).norm(), 1e-10);
    }
}

TEST(HermEig, NonHermitianRejected)
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(herm_eig(m), ContractViolation);
}

TEST(ChordalDistance, SelfIsZero)
{
    Rng rng = rng_for(9);
    const Subspace v = random_subspace(rng, 6, 2);
    EXPECT_NEAR(chordal_distance_sq(v, v), 0.0, 1e-12);
}

TEST(ChordalDistance, OrthogonalLinesInC2)
{
    const Subspace a(CMatrix::Identity(2, 2).col(0));
    const Subspace b(CMatrix::Identity(2, 2).col(1));
    EXPECT_NEAR(chordal_distance_sq(a, b), 1.0, 1e-15);
}

TEST(ChordalDistance, SymmetricAndRotationInvariant)
{
    Rng rng = rng_for(10);
    for (int trial = 0; trial < 20; ++trial) {
        const Subspace a = random_subspace(rng, 8, 2), b = random_subspace(rng, 8, 2);
        const CMatrix Q = random_unitary(rng, 2);
        const double d = chordal_distance_sq(a, b);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 2.0);
        EXPECT_NEAR(d, chordal_distance_sq(b, a), 1e-12);
        EXPECT_NEAR(d, chordal_distance_sq(Subspace(a.basis() * Q), b), 1e-10);
        EXPECT_NEAR(d, chordal_distance_sq(a, Subspace(b.basis() * Q)), 1e-10);
        EXPECT_NEAR(chordal_distance_sq(a, Subspace(a.basis() * Q)), 0.0, 1e-10);
        // Trace form oracle.
        const CMatrix Pa = a.basis() * a.basis().adjoint(), Pb = b.basis() * b.basis().adjoint();
        EXPECT_NEAR(d, 2.0 - (Pa * Pb).trace().real(), 1e-12);
    }
}

TEST(ChordalDistance, DimensionMismatchRejected)
{
    Rng rng = rng_for(11);
    EXPECT_THROW(chordal_distance_sq(random_subspace(rng, 4, 2), random_subspace(rng, 4, 1)), ContractViolation);
    EXPECT_THROW(chordal_distance_sq(random_subspace(rng, 4, 2), random_subspace(rng, 5, 2)), ContractViolation);
}

TEST(Orthonormalize, IdempotentOnSemiUnitary)
{
    Rng rng = rng_for(12);
    const Subspace q = random_subspace(rng, 6, 3);
    EXPECT_LT((orthonormalize(q.basis()).basis() - q.basis()).norm(), 1e-12);
}

TEST(Orthonormalize, RemovesScaling)
{
    CMatrix m = CMatrix::Zero(3, 1);
    m(0, 0) = 2.0;
    const Subspace q = orthonormalize(m);
    EXPECT_NEAR(q.basis()(0, 0).real(), 1.0, 1e-15);
}

TEST(Orthonormalize, SpanPreserving)
{
    Rng rng = rng_for(13);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix M = complex_gaussian(rng, 8, 2);
        const Subspace q = orthonormalize(M);
        EXPECT_LT(orthonormality_error(q.basis()), 1e-10);
        const CMatrix direct = M * (M.adjoint() * M).inverse() * M.adjoint();
        EXPECT_LT((q.projector() - direct).norm(), 1e-9);
    }
}

TEST(Orthonormalize, RankDeficientRejected)
{
    CMatrix m = CMatrix::Zero(4, 2);
    m(1, 0) = 1.0;
    m(1, 1) = 3.0;
    EXPECT_THROW(orthonormalize(m), RankDeficiency);
}

TEST(SubspaceType, RejectsNonOrthonormal)
{
    CMatrix m = CMatrix::Identity(3, 2);
    m(0, 1) = 0.1;
    EXPECT_THROW(Subspace{m}, ContractViolation);
}

TEST(LogDet, MatchesEigenvalues)
{
    Rng rng = rng_for(14);
    const CMatrix A = complex_gaussian(rng, 5, 3);
    const CMatrix X = A * A.adjoint();
    const RVector ev = herm_eig(X).eigenvalues;
    double expect = 0.0;
    for (int i = 0; i < ev.size(); ++i)
        expect += std::log1p(std::max(0.0, ev(i)));
    EXPECT_NEAR(log_det_identity_plus(X), expect, 1e-10);
}
