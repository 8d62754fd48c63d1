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

#ifndef GIA_FEEDBACK_HPP
#define GIA_FEEDBACK_HPP

// Limited feedback of precoder patterns: random Grassmannian codebooks,
// nearest-codeword quantization, residual interference after zero forcing,
// its upper bounds and the split of a feedback-bit budget across users.

#include <gia/cell_assignment.hpp>
#include <gia/errors.hpp>
#include <gia/matrix.hpp>
#include <gia/random.hpp>
#include <gia/system.hpp>
#include <gia/transceiver.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

namespace gia {

inline constexpr int kMaxCodebookBits = 24;

// 2^B codewords of G(M, N), stored side by side as an M x (N 2^B) matrix.
class Codebook {
  public:
    Codebook(int M, int N, int B, CMatrix stacked) : M_(M), N_(N), B_(B), stacked_(std::move(stacked))
    {
        if (stacked_.rows() != M || stacked_.cols() != static_cast<Eigen::Index>(N) * size())
            throw ContractViolation("Codebook: stacked matrix is " + detail::dims(stacked_.rows(), stacked_.cols()));
    }

    int M() const noexcept { return M_; }
    int N() const noexcept { return N_; }
    int bits() const noexcept { return B_; }
    Eigen::Index size() const noexcept { return Eigen::Index{1} << B_; }
    const CMatrix& stacked() const noexcept { return stacked_; }

    linalg::Subspace codeword(Eigen::Index n) const
    {
        if (n < 0 || n >= size())
            throw ContractViolation("Codebook: codeword " + std::to_string(n) + " out of range");
        return linalg::Subspace(stacked_.middleCols(n * N_, N_));
    }

  private:
    int M_, N_, B_;
    CMatrix stacked_;
};

inline Codebook generate_codebook(int M, int N, int B, Rng& rng)
{
    if (N < 1 || N >= M)
        throw ContractViolation("generate_codebook: need 1 <= N < M, got M=" + std::to_string(M) + " N=" + std::to_string(N));
    if (B < 0 || B > kMaxCodebookBits)
        throw CapacityError("generate_codebook: B=" + std::to_string(B) + " outside [0, " +
                            std::to_string(kMaxCodebookBits) + "]");
    const Eigen::Index n = Eigen::Index{1} << B;
    CMatrix stacked(M, n * N);
    for (Eigen::Index c = 0; c < n; ++c)
        stacked.middleCols(c * N, N) = random_subspace(rng, M, N).basis();
    return Codebook(M, N, B, std::move(stacked));
}

struct QuantizeResult {
    Eigen::Index index = 0;
    linalg::Subspace V_hat;
    double dist_sq = 0.0;
};

inline QuantizeResult quantize(const linalg::Subspace& V, const Codebook& cb)
{
    if (static_cast<int>(V.ambient_dim()) != cb.M() || static_cast<int>(V.dim()) != cb.N())
        throw ContractViolation("quantize: subspace " +
                                detail::dims(static_cast<long>(V.ambient_dim()), static_cast<long>(V.dim())) +
                                " against a codebook of G(" + std::to_string(cb.M()) + "," + std::to_string(cb.N()) + ")");
    const CMatrix G = V.basis().adjoint() * cb.stacked();
    const int N = cb.N();
    Eigen::Index best = 0;
    double best_overlap = -1.0;
    for (Eigen::Index n = 0; n < cb.size(); ++n) {
        const double overlap = G.middleCols(n * N, N).squaredNorm();
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = n;
        }
    }
    QuantizeResult out{best, cb.codeword(best), 0.0};
    out.dist_sq = linalg::chordal_distance_sq(V, out.V_hat);
    return out;
}

// V_hat = (V R Gamma^{1/2} + Vperp S (I - Gamma)^{1/2}) G.
struct QuantizationDecomposition {
    linalg::RVector Gamma; // alpha_j in [0, 1]
    CMatrix R;             // N x N unitary
    CMatrix S;             // (M-N) x N
    CMatrix G;             // N x N unitary
    CMatrix V_perp;        // M x (M-N) complement used for S
    double dist_sq = 0.0;

    CMatrix reconstruct(const CMatrix& V) const
    {
        const linalg::RVector a = Gamma.cwiseMax(0.0).cwiseMin(1.0);
        const linalg::RVector c = a.cwiseSqrt();
        const linalg::RVector s = (linalg::RVector::Ones(a.size()) - a).cwiseSqrt();
        return (V * R * c.asDiagonal() + V_perp * S * s.asDiagonal()) * G;
    }
};

inline QuantizationDecomposition decompose_quantization(const linalg::Subspace& V, const linalg::Subspace& V_hat)
{
    if (V.ambient_dim() != V_hat.ambient_dim() || V.dim() != V_hat.dim())
        throw ContractViolation("decompose_quantization: dimension mismatch");
    const auto M = static_cast<Eigen::Index>(V.ambient_dim());
    const auto N = static_cast<Eigen::Index>(V.dim());
    if (N >= M)
        throw ContractViolation("decompose_quantization: subspace fills the ambient space");

    QuantizationDecomposition d;
    d.V_perp = linalg::left_null_space(V.basis()).basis();
    const CMatrix C1 = V.basis().adjoint() * V_hat.basis();
    const CMatrix C2 = d.V_perp.adjoint() * V_hat.basis();
    const linalg::SvdResult f = linalg::svd(C1, true);
    d.R = f.U;
    d.G = f.Vh;
    d.Gamma = f.singular_values.array().square().min(1.0).matrix();

    // Columns of C2 V_C are orthogonal with norms sqrt(1 - alpha_j).
    const CMatrix W = C2 * f.Vh.adjoint();
    // Near alpha_j = 1 the sine is the well-conditioned quantity.
    for (Eigen::Index j = 0; j < N; ++j)
        if (d.Gamma(j) > 0.5)
            d.Gamma(j) = std::max(0.0, 1.0 - W.col(j).squaredNorm());
    const Eigen::Index rest = M - N;
    d.S = CMatrix::Zero(rest, N);
    std::vector<Eigen::Index> missing;
    for (Eigen::Index j = 0; j < N; ++j) {
        const double norm = W.col(j).norm();
        if (norm > 1e-10)
            d.S.col(j) = W.col(j) / norm;
        else
            missing.push_back(j);
    }
    // alpha_j = 1 leaves S_j free; fill with directions orthogonal to the rest when room remains.
    for (Eigen::Index j : missing) {
        CMatrix taken(rest, 0);
        for (Eigen::Index c = 0; c < N; ++c)
            if (d.S.col(c).norm() > 0.5) {
                taken.conservativeResize(Eigen::NoChange, taken.cols() + 1);
                taken.col(taken.cols() - 1) = d.S.col(c);
            }
        if (taken.cols() >= rest)
            break;
        d.S.col(j) = linalg::smallest_left_singular_directions(taken, 1, "quantization completion").col(0);
    }
    d.dist_sq = linalg::chordal_distance_sq(V, V_hat);
    return d;
}

// Ball-volume coefficient of G(M, N): Prob(d_c^2 <= t) = c t^{N(M-N)} for t <= 1.
inline double grassmann_ball_coefficient(int M, int N)
{
    if (N < 1 || N >= M)
        throw ContractViolation("grassmann_ball_coefficient: need 1 <= N < M");
    const double T = static_cast<double>(N) * (M - N);
    double log_c = -std::lgamma(T + 1.0);
    for (int i = 1; i <= N; ++i)
        log_c += std::lgamma(static_cast<double>(M - i + 1)) - std::lgamma(static_cast<double>(N - i + 1));
    return std::exp(log_c);
}

inline double distortion_bound(int M, int N, double B, double c_coeff)
{
    if (!(c_coeff > 0.0))
        throw ContractViolation("distortion_bound: c_coeff must be positive");
    return c_coeff * std::exp2(-B / (static_cast<double>(N) * (M - N)));
}

struct OmegaResult {
    CMatrix Omega;
    double lambda1 = 0.0;
};

// Omega = Vperp^H H^H Pperp(H V) H Vperp for the pattern V; lambda1 its largest eigenvalue.
inline OmegaResult omega_matrix(const CMatrix& H, const linalg::Subspace& pattern)
{
    if (H.cols() != static_cast<Eigen::Index>(pattern.ambient_dim()))
        throw ContractViolation("omega_matrix: channel " + detail::dims(H.rows(), H.cols()) + " and pattern of C^" +
                                std::to_string(pattern.ambient_dim()));
    const CMatrix HV = H * pattern.basis();
    linalg::Projectors pr;
    try {
        pr = linalg::projectors(HV);
    } catch (const RankDeficiency&) {
        throw DegenerateChannel("omega_matrix: image of the pattern is rank deficient");
    }
    const CMatrix Vp = linalg::left_null_space(pattern.basis()).basis();
    const CMatrix HVp = H * Vp;
    OmegaResult out;
    out.Omega = HVp.adjoint() * pr.P_perp * HVp;
    out.Omega = 0.5 * (out.Omega + out.Omega.adjoint());
    out.lambda1 = linalg::largest_eigenvalue(out.Omega);
    return out;
}

// Decoder built from the quantized patterns of every interferer except the
// provider, whose users are replaced by their ideal common image.
inline linalg::Subspace quantized_decoder(const ChannelRealization& ch, const TransceiverSet& ideal,
                                          const std::vector<linalg::Subspace>& quantized, int i, int k,
                                          bool* surplus = nullptr)
{
    const CMatrix F = interference_stack(ch, ideal.assignment, quantized, ideal.aligned[static_cast<std::size_t>(k)], i, k);
    return decoder_from_stack(F, ideal.d_s, surplus);
}

struct RinrReport {
    std::vector<double> per_user; // slot k*L+i
    std::vector<double> per_cell;
    double total = 0.0;
};

// Residual interference-to-noise ratio left by the provider cell's quantization error.
inline RinrReport rinr(const ChannelRealization& ch, const TransceiverSet& ideal,
                       const std::vector<linalg::Subspace>& quantized, const std::vector<linalg::Subspace>& decoders)
{
    const int K = ch.K(), L = ch.L();
    const double scale = ideal.P / (ideal.d_s * ideal.sigma2);
    RinrReport out;
    out.per_user.assign(static_cast<std::size_t>(K * L), 0.0);
    out.per_cell.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        const int provider = ideal.assignment.provider_of[static_cast<std::size_t>(k)];
        for (int i = 0; i < L; ++i) {
            const CMatrix Uh = decoders[static_cast<std::size_t>(user_slot(L, i, k))].basis().adjoint();
            double acc = 0.0;
            for (int j = 0; j < L; ++j)
                acc += (Uh * ch.H(j, provider, k) * quantized[static_cast<std::size_t>(user_slot(L, j, provider))].basis())
                           .squaredNorm();
            out.per_user[static_cast<std::size_t>(user_slot(L, i, k))] = scale * acc;
            out.per_cell[static_cast<std::size_t>(k)] += scale * acc;
        }
        out.total += out.per_cell[static_cast<std::size_t>(k)];
    }
    return out;
}

// lambda1(Omega_{i,k}^{r}) of every user toward the BS r its cell aligns at.
inline std::vector<double> omega_lambda1(const ChannelRealization& ch, const TransceiverSet& ideal)
{
    const int K = ch.K(), L = ch.L();
    std::vector<double> out(static_cast<std::size_t>(K * L));
    for (int k = 0; k < K; ++k) {
        const int r = ideal.assignment.receiver_of(k);
        for (int i = 0; i < L; ++i)
            out[static_cast<std::size_t>(user_slot(L, i, k))] = omega_matrix(ch.H(i, k, r), ideal.pattern(i, k)).lambda1;
    }
    return out;
}

enum class BoundMode { deterministic, packing };

// Per-cell RINR bound. deterministic uses the realized chordal distances
// (needs `quantized`); packing replaces them with c 2^{-B/(d_s(N_U-d_s))}.
inline std::vector<double> rinr_upper_bound(const ChannelRealization& ch, const TransceiverSet& ideal,
                                            const std::vector<double>& lambda1, const std::vector<int>& bits,
                                            const std::vector<linalg::Subspace>& quantized, double c_coeff, BoundMode mode)
{
    const int K = ch.K(), L = ch.L();
    const double scale = ideal.P / (ideal.d_s * ideal.sigma2);
    const double T = static_cast<double>(ideal.d_s) * (ch.N_U() - ideal.d_s);
    std::vector<double> out(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        const int provider = ideal.assignment.provider_of[static_cast<std::size_t>(k)];
        double acc = 0.0;
        for (int j = 0; j < L; ++j) {
            const auto s = static_cast<std::size_t>(user_slot(L, j, provider));
            const double distortion = mode == BoundMode::deterministic
                                          ? linalg::chordal_distance_sq(quantized[s], ideal.patterns[s])
                                          : c_coeff * std::exp2(-bits[s] / T);
            acc += scale * lambda1[s] * distortion;
        }
        out[static_cast<std::size_t>(k)] = L * acc;
    }
    return out;
}

struct BitAllocation {
    std::vector<int> bits;
    int budget = 0;
    int active_count = 0;
    double water_level = 0.0; // log2 of the water level; 0 when not applicable
};

// sum_u lambda1_u 2^{-b_u/T}
inline double allocation_objective(const std::vector<double>& lambda1, const std::vector<int>& bits, double T)
{
    double s = 0.0;
    for (std::size_t u = 0; u < lambda1.size(); ++u)
        s += lambda1[u] * std::exp2(-bits[u] / T);
    return s;
}

inline BitAllocation eba_allocate(int B, int user_count)
{
    if (B < 0)
        throw ContractViolation("eba_allocate: negative budget");
    if (user_count < 1)
        throw ContractViolation("eba_allocate: no users");
    BitAllocation a;
    a.budget = B;
    a.active_count = B > 0 ? user_count : 0;
    a.bits.assign(static_cast<std::size_t>(user_count), B / user_count);
    for (int u = 0; u < B % user_count; ++u)
        ++a.bits[static_cast<std::size_t>(u)];
    return a;
}

// Water filling of log2 lambda1 with T = d_s (N_U - d_s) bits per halving,
// rounded to integers and repaired to spend exactly B.
inline BitAllocation dba_allocate(const std::vector<double>& lambda1, int B, int d_s, int N_U)
{
    if (B < 0)
        throw ContractViolation("dba_allocate: negative budget");
    if (lambda1.empty())
        throw ContractViolation("dba_allocate: no users");
    for (double l : lambda1)
        if (!(l > 0.0) || !std::isfinite(l))
            throw ContractViolation("dba_allocate: lambda1 must be positive and finite");
    if (d_s < 1 || N_U <= d_s)
        throw ContractViolation("dba_allocate: need 1 <= d_s < N_U");

    const std::size_t n = lambda1.size();
    const double T = static_cast<double>(d_s) * (N_U - d_s);
    BitAllocation out;
    out.budget = B;
    out.bits.assign(n, 0);
    if (B == 0)
        return out;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lambda1[x] > lambda1[y]; });
    std::vector<double> a(n);
    for (std::size_t m = 0; m < n; ++m)
        a[m] = std::log2(lambda1[order[m]]);

    // Largest N_a whose bracket lower edge sum a(n) - N_a a(N_a) stays below B/T.
    const double per = B / T;
    std::size_t Na = 1;
    double prefix = 0.0, prefix_at_Na = a[0];
    for (std::size_t m = 1; m <= n; ++m) {
        prefix += a[m - 1];
        if (prefix - static_cast<double>(m) * a[m - 1] <= per) {
            Na = m;
            prefix_at_Na = prefix;
        }
    }
    const double mean = prefix_at_Na / static_cast<double>(Na);
    out.active_count = static_cast<int>(Na);
    out.water_level = mean - per / static_cast<double>(Na);

    for (std::size_t m = 0; m < Na; ++m) {
        const double target = T * (a[m] - mean) + static_cast<double>(B) / static_cast<double>(Na);
        out.bits[order[m]] = std::max(0, static_cast<int>(std::lround(target)));
    }

    auto term = [&](std::size_t u, int b) { return lambda1[u] * std::exp2(-b / T); };
    int total = std::accumulate(out.bits.begin(), out.bits.end(), 0);
    while (total < B) {
        std::size_t pick = 0;
        for (std::size_t u = 1; u < n; ++u)
            if (term(u, out.bits[u]) > term(pick, out.bits[pick]))
                pick = u;
        ++out.bits[pick];
        ++total;
    }
    while (total > B) {
        std::size_t pick = n;
        for (std::size_t u = 0; u < n; ++u)
            if (out.bits[u] > 0 && (pick == n || term(u, out.bits[u]) < term(pick, out.bits[pick])))
                pick = u;
        --out.bits[pick];
        --total;
    }
    // Single-bit moves that still lower the objective (rounding can leave a few).
    for (;;) {
        std::size_t give = n, take = n;
        double gain = 1e-12 * allocation_objective(lambda1, out.bits, T);
        for (std::size_t g = 0; g < n; ++g) {
            if (out.bits[g] == 0)
                continue;
            const double loss = term(g, out.bits[g] - 1) - term(g, out.bits[g]);
            for (std::size_t t = 0; t < n; ++t) {
                if (t == g)
                    continue;
                const double win = term(t, out.bits[t]) - term(t, out.bits[t] + 1);
                if (win - loss > gain) {
                    gain = win - loss;
                    give = g;
                    take = t;
                }
            }
        }
        if (give == n)
            break;
        --out.bits[give];
        ++out.bits[take];
    }
    out.active_count = static_cast<int>(std::count_if(out.bits.begin(), out.bits.end(), [](int b) { return b > 0; }));
    return out;
}

// Nearest codeword of a random codebook with 2^bits entries. Small books are
// generated explicitly (and cached); beyond `explicit_max_bits` the nearest
// codeword of a fresh isotropic book is drawn directly from its distribution.
class PatternQuantizer {
  public:
    explicit PatternQuantizer(std::uint64_t codebook_seed = 0, int explicit_max_bits = 12)
        : seed_(codebook_seed), explicit_max_bits_(explicit_max_bits)
    {
        if (explicit_max_bits < 0 || explicit_max_bits > kMaxCodebookBits)
            throw ContractViolation("PatternQuantizer: explicit_max_bits outside [0, " + std::to_string(kMaxCodebookBits) +
                                    "]");
    }

    int explicit_max_bits() const noexcept { return explicit_max_bits_; }

    // Codebook of user `slot` on G(M, N) with B bits; built once per quantizer.
    std::shared_ptr<const Codebook> codebook(int M, int N, int B, int slot) const
    {
        const auto key = std::make_tuple(M, N, B, slot);
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
        // The B-bit book is the first 2^B draws of the slot's stream, so books are nested in B.
        Rng rng = make_stream({seed_, stream::codebook, static_cast<std::uint64_t>(M), static_cast<std::uint64_t>(N),
                               static_cast<std::uint64_t>(slot)});
        auto cb = std::make_shared<const Codebook>(generate_codebook(M, N, B, rng));
        cache_.emplace(key, cb);
        return cb;
    }

    struct Result {
        linalg::Subspace V_hat;
        double dist_sq = 0.0;
        long long index = -1; // codeword index, -1 when drawn from the distribution
    };

    Result quantize(const linalg::Subspace& V, int bits, int slot, Rng& rng) const
    {
        const int M = static_cast<int>(V.ambient_dim()), N = static_cast<int>(V.dim());
        if (bits < 0)
            throw ContractViolation("PatternQuantizer: negative bit count");
        if (bits <= explicit_max_bits_) {
            const QuantizeResult q = gia::quantize(V, *codebook(M, N, bits, slot));
            return {q.V_hat, q.dist_sq, static_cast<long long>(q.index)};
        }
        if (2 * N > M)
            throw ContractViolation("PatternQuantizer: sampling large codebooks needs 2N <= M");
        const double T = static_cast<double>(N) * (M - N);
        const double c = grassmann_ball_coefficient(M, N);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double u = uniform(rng);
        const double F = -std::expm1(std::log1p(-u) * std::exp2(-static_cast<double>(bits)));
        const double D = std::pow(F / c, 1.0 / T);
        if (!(D <= 1.0) || !std::isfinite(D)) {
            if (bits <= kMaxCodebookBits) {
                const QuantizeResult q = gia::quantize(V, *codebook(M, N, bits, slot));
                return {q.V_hat, q.dist_sq, static_cast<long long>(q.index)};
            }
            throw NumericalFailure("PatternQuantizer: sampled distortion " + std::to_string(D) + " outside the small-ball range");
        }
        // Orientation of the error: isotropic in the tangent coordinates around V.
        const CMatrix Z = complex_gaussian(rng, M - N, N);
        const linalg::SvdResult z = linalg::svd(Z);
        const double total = z.singular_values.squaredNorm();
        const CMatrix Vp = linalg::left_null_space(V.basis()).basis();
        linalg::RVector cosv(N), sinv(N);
        for (int j = 0; j < N; ++j) {
            const double s2 = std::clamp(D * z.singular_values(j) * z.singular_values(j) / total, 0.0, 1.0);
            sinv(j) = std::sqrt(s2);
            cosv(j) = std::sqrt(1.0 - s2);
        }
        const CMatrix R = z.Vh.adjoint();
        CMatrix V_hat = V.basis() * R * cosv.asDiagonal() + Vp * z.U * sinv.asDiagonal();
        linalg::Subspace sub = linalg::orthonormalize(V_hat);
        const double dist = linalg::chordal_distance_sq(V, sub);
        return {std::move(sub), dist, -1};
    }

  private:
    std::uint64_t seed_;
    int explicit_max_bits_;
    mutable std::mutex mutex_;
    mutable std::map<std::tuple<int, int, int, int>, std::shared_ptr<const Codebook>> cache_;
};

enum class BitAllocMode { none, dba, eba };

inline const char* to_string(BitAllocMode m)
{
    switch (m) {
    case BitAllocMode::none:
        return "none";
    case BitAllocMode::dba:
        return "dba";
    case BitAllocMode::eba:
        return "eba";
    }
    return "?";
}

struct FeedbackState {
    BitAllocation allocation;
    std::vector<double> lambda1;                // per user slot
    std::vector<linalg::Subspace> quantized;    // per user slot
    std::vector<double> dist_sq;                // per user slot
    std::vector<linalg::Subspace> decoders;     // per user slot
    RinrReport rinr;
    std::vector<double> bound_deterministic;    // per cell
    std::vector<double> bound_packing;          // per cell
};

// Allocates `budget` bits, quantizes every pattern and rebuilds the decoders.
// mode == none substitutes the ideal patterns (perfect feedback).
// `stream_key` seeds one quantizer stream per user, so a user's draws do not
// depend on how many bits the others received.
inline FeedbackState apply_feedback(const ChannelRealization& ch, const TransceiverSet& ideal, BitAllocMode mode, int budget,
                                    const PatternQuantizer& quantizer, std::uint64_t stream_key, double c_coeff = 1.0)
{
    const int K = ch.K(), L = ch.L();
    const auto users = static_cast<std::size_t>(K * L);
    FeedbackState st;
    st.lambda1 = omega_lambda1(ch, ideal);
    switch (mode) {
    case BitAllocMode::none:
        st.allocation.bits.assign(users, 0);
        break;
    case BitAllocMode::eba:
        st.allocation = eba_allocate(budget, K * L);
        break;
    case BitAllocMode::dba:
        st.allocation = dba_allocate(st.lambda1, budget, ideal.d_s, ch.N_U());
        break;
    }

    st.quantized.reserve(users);
    st.dist_sq.reserve(users);
    for (std::size_t s = 0; s < users; ++s) {
        if (mode == BitAllocMode::none) {
            st.quantized.push_back(ideal.patterns[s]);
            st.dist_sq.push_back(0.0);
            continue;
        }
        Rng rng = make_stream({stream_key, stream::quantizer, static_cast<std::uint64_t>(s)});
        PatternQuantizer::Result q = quantizer.quantize(ideal.patterns[s], st.allocation.bits[s], static_cast<int>(s), rng);
        st.dist_sq.push_back(q.dist_sq);
        st.quantized.push_back(std::move(q.V_hat));
    }

    st.decoders.resize(users);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i)
            st.decoders[static_cast<std::size_t>(user_slot(L, i, k))] = quantized_decoder(ch, ideal, st.quantized, i, k);

    st.rinr = rinr(ch, ideal, st.quantized, st.decoders);
    if (mode == BitAllocMode::none) {
        st.bound_deterministic.assign(static_cast<std::size_t>(K), 0.0);
        st.bound_packing.assign(static_cast<std::size_t>(K), 0.0);
        return st;
    }
    st.bound_deterministic =
        rinr_upper_bound(ch, ideal, st.lambda1, st.allocation.bits, st.quantized, c_coeff, BoundMode::deterministic);
    st.bound_packing = rinr_upper_bound(ch, ideal, st.lambda1, st.allocation.bits, st.quantized, c_coeff, BoundMode::packing);
    return st;
}

} // namespace gia

#endif
