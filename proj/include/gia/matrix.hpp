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

#ifndef GIA_MATRIX_HPP
#define GIA_MATRIX_HPP

// Dense complex linear-algebra kernel: SVD, Hermitian eigendecomposition,
// null spaces, projectors, chordal distance and orthonormalization.
//
// Every routine is a pure function of its inputs. Bases returned from
// decompositions are deterministic for a given input matrix.

#include <gia/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>

namespace gia::linalg {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-10;
// Frobenius tolerance on B^H B - I for a basis to count as semi-unitary.
inline constexpr double kOrthonormalTolerance = 1e-10;

inline bool all_finite(const CMatrix& m)
{
    return m.allFinite();
}

inline double orthonormality_error(const CMatrix& basis)
{
    const auto n = basis.cols();
    return (basis.adjoint() * basis - CMatrix::Identity(n, n)).norm();
}

// An N-dimensional subspace of C^M held by a semi-unitary M x N basis.
class Subspace {
  public:
    Subspace() = default;

    // Validates B^H B = I; use orthonormalize() for arbitrary spanning sets.
    explicit Subspace(CMatrix basis) : basis_(std::move(basis))
    {
        if (basis_.cols() > basis_.rows())
            throw ContractViolation("subspace dimension exceeds ambient dimension: " +
                                    detail::dims(basis_.rows(), basis_.cols()));
        if (!all_finite(basis_))
            throw ContractViolation("subspace basis has non-finite entries");
        const double err = orthonormality_error(basis_);
        if (err > kOrthonormalTolerance)
            throw ContractViolation("subspace basis is not semi-unitary (error " + std::to_string(err) + ")");
    }

    const CMatrix& basis() const noexcept { return basis_; }
    std::size_t ambient_dim() const noexcept { return static_cast<std::size_t>(basis_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.cols()); }

    // Orthogonal projector onto the subspace.
    CMatrix projector() const { return basis_ * basis_.adjoint(); }

  private:
    CMatrix basis_;
};

struct SvdResult {
    CMatrix U;
    RVector singular_values; // non-negative, decreasing
    CMatrix Vh;
};

// Thin SVD by default; full_matrices=true returns square U and Vh.
inline SvdResult svd(const CMatrix& m, bool full_matrices = false)
{
    if (m.rows() == 0 || m.cols() == 0)
        throw ContractViolation("svd of an empty matrix " + detail::dims(m.rows(), m.cols()));
    if (!all_finite(m))
        throw ContractViolation("svd input has non-finite entries (" + detail::dims(m.rows(), m.cols()) + ")");

    const unsigned options =
        full_matrices ? (Eigen::ComputeFullU | Eigen::ComputeFullV) : (Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::JacobiSVD<CMatrix> solver(m, options);
    if (solver.info() != Eigen::Success || !solver.singularValues().allFinite())
        throw NumericalFailure("svd did not converge for a " + detail::dims(m.rows(), m.cols()) + " matrix");
    return {solver.matrixU(), solver.singularValues(), solver.matrixV().adjoint()};
}

// Number of singular values above rel_tol * sigma_max.
inline std::size_t numerical_rank(const RVector& singular_values, double rel_tol = kRankTolerance)
{
    if (singular_values.size() == 0)
        return 0;
    const double cut = rel_tol * singular_values(0);
    if (singular_values(0) == 0.0)
        return 0;
    return static_cast<std::size_t>((singular_values.array() > cut).count());
}

inline std::size_t numerical_rank(const CMatrix& m, double rel_tol = kRankTolerance)
{
    if (m.rows() == 0 || m.cols() == 0)
        return 0;
    return numerical_rank(svd(m).singular_values, rel_tol);
}

// Semi-unitary N with N^H M = 0 spanning the complement of the column space.
inline Subspace left_null_space(const CMatrix& m, double rel_tol = kRankTolerance)
{
    const auto rows = m.rows();
    if (rows == 0)
        throw ContractViolation("left null space of a matrix with no rows");
    if (m.cols() == 0)
        return Subspace(CMatrix::Identity(rows, rows));

    const SvdResult f = svd(m, true);
    const auto rank = static_cast<Eigen::Index>(numerical_rank(f.singular_values, rel_tol));
    if (rank >= rows)
        throw EmptySubspace("left null space is empty: " + detail::dims(m.rows(), m.cols()) + " matrix has full row rank");
    return Subspace(f.U.rightCols(rows - rank));
}

// The `count` left-singular directions belonging to the smallest singular
// values (columns past min(rows, cols) count as zero). Throws Infeasible when
// the numerical null space has fewer than `count` dimensions.
inline CMatrix smallest_left_singular_directions(const CMatrix& m, std::size_t count, const char* what,
                                                 double rel_tol = kRankTolerance)
{
    const auto rows = m.rows();
    const auto want = static_cast<Eigen::Index>(count);
    if (want > rows)
        throw Infeasible(std::string(what) + ": requested " + std::to_string(count) + " directions in C^" +
                         std::to_string(rows));
    if (m.cols() == 0)
        return CMatrix::Identity(rows, rows).leftCols(want);

    const SvdResult f = svd(m, true);
    const auto rank = static_cast<Eigen::Index>(numerical_rank(f.singular_values, rel_tol));
    const auto null_dim = rows - rank;
    if (null_dim < want)
        throw Infeasible(std::string(what) + ": null space has dimension " + std::to_string(null_dim) + ", need " +
                         std::to_string(count) + " (" + detail::dims(m.rows(), m.cols()) + " matrix)");
    return f.U.rightCols(want);
}

struct HermEig {
    RVector eigenvalues; // decreasing
    CMatrix eigenvectors;
};

inline bool is_hermitian(const CMatrix& m, double tol = 1e-9)
{
    if (m.rows() != m.cols())
        return false;
    return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

inline HermEig herm_eig(const CMatrix& m)
{
    if (!is_hermitian(m))
        throw ContractViolation("herm_eig: input " + detail::dims(m.rows(), m.cols()) + " is not Hermitian");
    const CMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("herm_eig did not converge for a " + detail::dims(m.rows(), m.cols()) + " matrix");
    // Eigen sorts ascending.
    return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

inline double largest_eigenvalue(const CMatrix& m)
{
    return herm_eig(m).eigenvalues(0);
}

// M (M^H M)^{-1/2}: the semi-unitary factor of the polar decomposition.
inline Subspace orthonormalize(const CMatrix& m)
{
    if (m.cols() == 0 || m.rows() < m.cols())
        throw RankDeficiency("orthonormalize: " + detail::dims(m.rows(), m.cols()) + " cannot have full column rank");
    if (!all_finite(m))
        throw ContractViolation("orthonormalize: non-finite entries");

    CMatrix q = m;
    for (int pass = 0; pass < 3; ++pass) {
        const HermEig g = herm_eig(q.adjoint() * q);
        const double top = g.eigenvalues(0);
        const double bottom = g.eigenvalues(g.eigenvalues.size() - 1);
        if (!(top > 0.0) || bottom <= kRankTolerance * kRankTolerance * top)
            throw RankDeficiency("orthonormalize: " + detail::dims(m.rows(), m.cols()) + " input is rank deficient");
        const RVector inv_sqrt = g.eigenvalues.cwiseSqrt().cwiseInverse();
        q = q * (g.eigenvectors * inv_sqrt.asDiagonal() * g.eigenvectors.adjoint());
        // A second pass only triggers for badly conditioned inputs.
        if (orthonormality_error(q) <= 1e-13 * static_cast<double>(q.cols()))
            break;
    }
    return Subspace(std::move(q));
}

struct Projectors {
    CMatrix P;
    CMatrix P_perp;
};

// Orthogonal projector X (X^H X)^{-1} X^H and its complement I - P.
inline Projectors projectors(const CMatrix& x)
{
    if (x.cols() == 0 || numerical_rank(x) < static_cast<std::size_t>(x.cols()))
        throw RankDeficiency("projectors: " + detail::dims(x.rows(), x.cols()) + " input is not full column rank");
    const Subspace q = orthonormalize(x);
    CMatrix p = q.projector();
    p = 0.5 * (p + p.adjoint());
    CMatrix perp = CMatrix::Identity(x.rows(), x.rows()) - p;
    return {std::move(p), std::move(perp)};
}

// d_c^2(V1, V2) = N - Tr(V1 V1^H V2 V2^H) = N - ||V1^H V2||_F^2.
inline double chordal_distance_sq(const Subspace& a, const Subspace& b)
{
    if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim())
        throw ContractViolation("chordal_distance_sq: dimension mismatch " +
                                detail::dims(static_cast<long>(a.ambient_dim()), static_cast<long>(a.dim())) + " vs " +
                                detail::dims(static_cast<long>(b.ambient_dim()), static_cast<long>(b.dim())));
    const double overlap = (a.basis().adjoint() * b.basis()).squaredNorm();
    return std::clamp(static_cast<double>(a.dim()) - overlap, 0.0, static_cast<double>(a.dim()));
}

// log det(I + X) for Hermitian positive semi-definite X, in nats.
inline double log_det_identity_plus(const CMatrix& x)
{
    const auto n = x.rows();
    const CMatrix a = CMatrix::Identity(n, n) + 0.5 * (x + x.adjoint());
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericalFailure("log_det_identity_plus: I + X is not positive definite (" + detail::dims(n, n) + ")");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        acc += std::log(llt.matrixL()(i, i).real());
    return 2.0 * acc;
}

// log det of a Hermitian positive definite matrix, in nats.
inline double log_det_hpd(const CMatrix& a)
{
    const auto n = a.rows();
    Eigen::LLT<CMatrix> llt(0.5 * (a + a.adjoint()));
    if (llt.info() != Eigen::Success)
        throw NumericalFailure("log_det_hpd: matrix is not positive definite (" + detail::dims(n, n) + ")");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        acc += std::log(llt.matrixL()(i, i).real());
    return 2.0 * acc;
}

} // namespace gia::linalg

#endif
