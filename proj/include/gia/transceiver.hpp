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

#ifndef GIA_TRANSCEIVER_HPP
#define GIA_TRANSCEIVER_HPP

// Closed-form transceivers for grouping-based interference alignment: the
// stacked alignment system, inner and per-user precoders, zero-forcing
// decoders and per-user rates.

#include <gia/cell_assignment.hpp>
#include <gia/errors.hpp>
#include <gia/matrix.hpp>
#include <gia/system.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gia {

using linalg::Subspace;

enum class LogBase { e, two };

inline double from_nats(double nats, LogBase base)
{
    return base == LogBase::two ? nats / std::log(2.0) : nats;
}

// Distance tolerance between user images of one aligned cell.
inline constexpr double kAlignmentTolerance = 1e-8;

inline int user_slot(int L, int i, int k)
{
    return k * L + i;
}

// (L-1) N_B x L N_U matrix A with A * V_in = 0 exactly when the images
// H_{1,p}^r T_1 V_in and H_{j,p}^r T_j V_in coincide for every user j > 1.
inline CMatrix stack_alignment_matrix(const ChannelRealization& ch, int provider, int receiver)
{
    if (provider == receiver)
        throw ContractViolation("stack_alignment_matrix: provider and receiver are both cell " + std::to_string(provider));
    const int L = ch.L(), NB = ch.N_B(), NU = ch.N_U();
    CMatrix A = CMatrix::Zero(static_cast<Eigen::Index>(L - 1) * NB, static_cast<Eigen::Index>(L) * NU);
    const CMatrix& first = ch.H(0, provider, receiver);
    for (int j = 1; j < L; ++j) {
        A.block((j - 1) * NB, 0, NB, NU) = first;
        A.block((j - 1) * NB, j * NU, NB, NU) = -ch.H(j, provider, receiver);
    }
    return A;
}

// d_s orthonormal columns of null(A), taken from the smallest singular directions.
inline CMatrix inner_precoder(const CMatrix& A, int d_s)
{
    if (d_s < 1)
        throw ContractViolation("inner_precoder: d_s must be positive");
    return linalg::smallest_left_singular_directions(A.adjoint(), static_cast<std::size_t>(d_s),
                                                     "inner precoder null space");
}

// Orthonormalized block T_i V_in.
inline Subspace user_pattern(const CMatrix& V_in, int i, int N_U)
{
    if (N_U < 1 || V_in.rows() % N_U != 0 || i < 0 || (i + 1) * N_U > V_in.rows())
        throw ContractViolation("user_pattern: user " + std::to_string(i) + " outside a " +
                                detail::dims(V_in.rows(), V_in.cols()) + " inner precoder with N_U=" + std::to_string(N_U));
    const CMatrix block = V_in.middleRows(static_cast<Eigen::Index>(i) * N_U, N_U);
    try {
        if (linalg::numerical_rank(block) < static_cast<std::size_t>(block.cols()))
            throw RankDeficiency("rank deficient");
        return linalg::orthonormalize(block);
    } catch (const RankDeficiency&) {
        throw DegenerateChannel("user_pattern: block of user " + std::to_string(i) + " is rank deficient");
    }
}

inline CMatrix full_precoder(const Subspace& pattern, double P, int d_s)
{
    return std::sqrt(P / d_s) * pattern.basis();
}

// Common span of every user image H_{i,p}^r T_i V_in at BS r.
inline Subspace aligned_interference_basis(const ChannelRealization& ch, int provider, int receiver, const CMatrix& V_in)
{
    const int NU = ch.N_U();
    auto image = [&](int i) -> Subspace {
        const CMatrix img = ch.H(i, provider, receiver) * V_in.middleRows(static_cast<Eigen::Index>(i) * NU, NU);
        try {
            return linalg::orthonormalize(img);
        } catch (const RankDeficiency&) {
            throw DegenerateChannel("aligned_interference_basis: image of user " + std::to_string(i) + " of cell " +
                                    std::to_string(provider) + " at BS " + std::to_string(receiver) + " is rank deficient");
        }
    };
    Subspace basis = image(0);
    for (int i = 1; i < ch.L(); ++i) {
        const double d = linalg::chordal_distance_sq(basis, image(i));
        if (!(d <= kAlignmentTolerance))
            throw AlignmentFailure("aligned_interference_basis: user " + std::to_string(i) + " of cell " +
                                   std::to_string(provider) + " misaligned at BS " + std::to_string(receiver) +
                                   " (chordal distance^2 " + std::to_string(d) + ")");
    }
    return basis;
}

// Everything cell p needs in order to align at cell r.
struct AlignmentLink {
    CMatrix V_in;
    std::vector<Subspace> patterns; // per user of p
    Subspace aligned;               // common image at BS r
};

inline AlignmentLink build_alignment_link(const ChannelRealization& ch, int provider, int receiver, int d_s)
{
    AlignmentLink link;
    link.V_in = inner_precoder(stack_alignment_matrix(ch, provider, receiver), d_s);
    link.patterns.reserve(static_cast<std::size_t>(ch.L()));
    for (int i = 0; i < ch.L(); ++i)
        link.patterns.push_back(user_pattern(link.V_in, i, ch.N_U()));
    link.aligned = aligned_interference_basis(ch, provider, receiver, link.V_in);
    return link;
}

// Alignment links for every ordered (provider, receiver) pair of one realization.
class PotentialPrecoders {
  public:
    PotentialPrecoders() = default;
    PotentialPrecoders(const ChannelRealization& ch, int d_s) : K_(ch.K())
    {
        links_.resize(static_cast<std::size_t>(K_) * K_);
        for (int p = 0; p < K_; ++p)
            for (int r = 0; r < K_; ++r)
                if (p != r)
                    links_[static_cast<std::size_t>(p) * K_ + r] = build_alignment_link(ch, p, r, d_s);
    }

    int K() const noexcept { return K_; }

    const AlignmentLink& at(int provider, int receiver) const
    {
        if (provider < 0 || provider >= K_ || receiver < 0 || receiver >= K_ || provider == receiver)
            throw ContractViolation("PotentialPrecoders: no link " + std::to_string(provider) + "->" +
                                    std::to_string(receiver));
        return *links_[static_cast<std::size_t>(provider) * K_ + receiver];
    }

  private:
    int K_ = 0;
    std::vector<std::optional<AlignmentLink>> links_;
};

struct TransceiverSet {
    Assignment assignment;
    double P = 1.0;
    double sigma2 = 1.0;
    int d_s = 1;
    int L = 1;
    std::vector<CMatrix> inner;        // per cell
    std::vector<Subspace> aligned;     // per receiver cell: its provider's common image
    std::vector<Subspace> patterns;    // per user slot k*L+i
    std::vector<CMatrix> precoders;    // per user slot
    std::vector<Subspace> decoders;    // per user slot
    int surplus_null_dims = 0;         // decoders picked from a null space larger than d_s

    const Subspace& pattern(int i, int k) const { return patterns[static_cast<std::size_t>(user_slot(L, i, k))]; }
    const CMatrix& precoder(int i, int k) const { return precoders[static_cast<std::size_t>(user_slot(L, i, k))]; }
    const Subspace& decoder(int i, int k) const { return decoders[static_cast<std::size_t>(user_slot(L, i, k))]; }
};

// N_B x (K-1) L d_s interference seen by user (i,k) once the provider's
// contribution is collapsed onto `aligned`: own-cell users j != i, every
// user of the cells outside {k, provider(k)}, then the aligned basis.
inline CMatrix interference_stack(const ChannelRealization& ch, const Assignment& assignment,
                                  const std::vector<Subspace>& patterns, const Subspace& aligned, int i, int k)
{
    const int K = ch.K(), L = ch.L();
    const int provider = assignment.provider_of[static_cast<std::size_t>(k)];
    const Eigen::Index ds = aligned.basis().cols();
    std::vector<CMatrix> blocks;
    for (int j = 0; j < L; ++j)
        if (j != i)
            blocks.push_back(ch.H(j, k, k) * patterns[static_cast<std::size_t>(user_slot(L, j, k))].basis());
    for (int l = 0; l < K; ++l) {
        if (l == k || l == provider)
            continue;
        for (int j = 0; j < L; ++j)
            blocks.push_back(ch.H(j, l, k) * patterns[static_cast<std::size_t>(user_slot(L, j, l))].basis());
    }
    blocks.push_back(aligned.basis());

    CMatrix F(ch.N_B(), static_cast<Eigen::Index>(blocks.size()) * ds);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        F.middleCols(static_cast<Eigen::Index>(b) * ds, ds) = blocks[b];
    return F;
}

// d_s-dimensional left null space of the interference stack. `surplus` is
// set when the null space is larger than d_s.
inline Subspace decoder_from_stack(const CMatrix& F, int d_s, bool* surplus = nullptr)
{
    const CMatrix U = linalg::smallest_left_singular_directions(F, static_cast<std::size_t>(d_s), "zf decoder null space");
    if (surplus) {
        const std::size_t rank = linalg::numerical_rank(F);
        *surplus = static_cast<std::size_t>(F.rows()) - rank > static_cast<std::size_t>(d_s);
    }
    return Subspace(U);
}

inline Subspace zf_decoder(const ChannelRealization& ch, const TransceiverSet& ts, int i, int k, bool* surplus = nullptr)
{
    const CMatrix F = interference_stack(ch, ts.assignment, ts.patterns, ts.aligned[static_cast<std::size_t>(k)], i, k);
    return decoder_from_stack(F, ts.d_s, surplus);
}

// Full transceiver for a strict assignment, reusing precomputed alignment links.
inline TransceiverSet build_transceivers(const ChannelRealization& ch, const SystemConfig& cfg, const Assignment& assignment,
                                         const PotentialPrecoders& potential)
{
    assignment.require_strict("build_transceivers");
    if (assignment.K() != ch.K())
        throw ContractViolation("build_transceivers: assignment covers " + std::to_string(assignment.K()) + " cells, channel " +
                                std::to_string(ch.K()));
    const int K = ch.K(), L = ch.L();
    TransceiverSet ts;
    ts.assignment = assignment;
    ts.P = cfg.P;
    ts.sigma2 = cfg.sigma2;
    ts.d_s = cfg.d_s;
    ts.L = L;
    ts.inner.resize(static_cast<std::size_t>(K));
    ts.aligned.resize(static_cast<std::size_t>(K));
    ts.patterns.resize(static_cast<std::size_t>(K * L));
    ts.precoders.resize(static_cast<std::size_t>(K * L));
    ts.decoders.resize(static_cast<std::size_t>(K * L));

    for (int p = 0; p < K; ++p) {
        const int r = assignment.receiver_of(p);
        const AlignmentLink& link = potential.at(p, r);
        ts.inner[static_cast<std::size_t>(p)] = link.V_in;
        ts.aligned[static_cast<std::size_t>(r)] = link.aligned;
        for (int i = 0; i < L; ++i) {
            const auto s = static_cast<std::size_t>(user_slot(L, i, p));
            ts.patterns[s] = link.patterns[static_cast<std::size_t>(i)];
            ts.precoders[s] = full_precoder(ts.patterns[s], cfg.P, cfg.d_s);
        }
    }
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i) {
            bool surplus = false;
            ts.decoders[static_cast<std::size_t>(user_slot(L, i, k))] = zf_decoder(ch, ts, i, k, &surplus);
            ts.surplus_null_dims += surplus ? 1 : 0;
        }
    return ts;
}

inline TransceiverSet build_transceivers(const ChannelRealization& ch, const SystemConfig& cfg, const Assignment& assignment)
{
    return build_transceivers(ch, cfg, assignment, PotentialPrecoders(ch, cfg.d_s));
}

struct UserRate {
    double rate = 0.0;
    CMatrix eff_channel; // U^H H T_i V_in, d_s x d_s
};

// Rate through the effective channel of the inner precoder and the outer
// scaling sqrt(P/d_s) (V_in^H T_i^H T_i V_in)^{-1/2}.
inline UserRate user_rate(const ChannelRealization& ch, const TransceiverSet& ts, int i, int k, LogBase base = LogBase::e)
{
    const int NU = ch.N_U();
    const CMatrix block = ts.inner[static_cast<std::size_t>(k)].middleRows(static_cast<Eigen::Index>(i) * NU, NU);
    const CMatrix& U = ts.decoder(i, k).basis();
    UserRate out;
    out.eff_channel = U.adjoint() * ch.H(i, k, k) * block;

    const linalg::HermEig g = linalg::herm_eig(block.adjoint() * block);
    const linalg::RVector inv_sqrt = g.eigenvalues.cwiseMax(0.0).cwiseSqrt().cwiseInverse();
    const CMatrix V_out = std::sqrt(ts.P / ts.d_s) * (g.eigenvectors * inv_sqrt.asDiagonal() * g.eigenvectors.adjoint());
    const CMatrix G = out.eff_channel * V_out;
    out.rate = from_nats(linalg::log_det_identity_plus((G * G.adjoint()) / ts.sigma2), base);
    return out;
}

// Rate from the decoder, the channel and the full precoder directly.
inline double user_rate_direct(const ChannelRealization& ch, const TransceiverSet& ts, int i, int k, LogBase base = LogBase::e)
{
    const CMatrix G = ts.decoder(i, k).basis().adjoint() * ch.H(i, k, k) * ts.precoder(i, k);
    return from_nats(linalg::log_det_identity_plus((G * G.adjoint()) / ts.sigma2), base);
}

struct RateSummary {
    std::vector<double> per_user; // slot k*L+i
    std::vector<double> per_cell;
    double sum = 0.0;
    double min_cell = 0.0;
};

inline RateSummary summarize_rates(std::vector<double> per_user, int K, int L)
{
    RateSummary s;
    s.per_user = std::move(per_user);
    s.per_cell.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i)
            s.per_cell[static_cast<std::size_t>(k)] += s.per_user[static_cast<std::size_t>(user_slot(L, i, k))];
    for (double r : s.per_user)
        s.sum += r;
    s.min_cell = *std::min_element(s.per_cell.begin(), s.per_cell.end());
    return s;
}

inline RateSummary evaluate_rates(const ChannelRealization& ch, const TransceiverSet& ts, LogBase base = LogBase::e)
{
    std::vector<double> per_user(static_cast<std::size_t>(ch.K() * ch.L()));
    for (int k = 0; k < ch.K(); ++k)
        for (int i = 0; i < ch.L(); ++i)
            per_user[static_cast<std::size_t>(user_slot(ch.L(), i, k))] = user_rate(ch, ts, i, k, base).rate;
    return summarize_rates(std::move(per_user), ch.K(), ch.L());
}

struct AlignmentReport {
    double max_interference_residual = 0.0; // max ||U^H H V||_F over interfering pairs
    double min_desired_singular = 0.0;      // min sigma_{d_s}(U^H H V) over users
    double min_desired_ratio = 0.0;         // min sigma_{d_s} / sigma_1 over users

    bool perfect(double P) const
    {
        return max_interference_residual < 1e-8 * std::sqrt(P) && min_desired_ratio > 1e-8;
    }
};

inline AlignmentReport verify_alignment(const ChannelRealization& ch, const TransceiverSet& ts)
{
    const int K = ch.K(), L = ch.L();
    AlignmentReport rep;
    rep.min_desired_singular = std::numeric_limits<double>::infinity();
    rep.min_desired_ratio = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i) {
            const CMatrix Uh = ts.decoder(i, k).basis().adjoint();
            for (int l = 0; l < K; ++l)
                for (int j = 0; j < L; ++j) {
                    const CMatrix G = Uh * ch.H(j, l, k) * ts.precoder(j, l);
                    if (l == k && j == i) {
                        const linalg::RVector s = linalg::svd(G).singular_values;
                        const double smin = s(s.size() - 1);
                        rep.min_desired_singular = std::min(rep.min_desired_singular, smin);
                        rep.min_desired_ratio = std::min(rep.min_desired_ratio, s(0) > 0.0 ? smin / s(0) : 0.0);
                    } else {
                        rep.max_interference_residual = std::max(rep.max_interference_residual, G.norm());
                    }
                }
        }
    return rep;
}

} // namespace gia

#endif
