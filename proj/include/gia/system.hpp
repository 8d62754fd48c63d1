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

#ifndef GIA_SYSTEM_HPP
#define GIA_SYSTEM_HPP

// System dimensions, feasibility of grouping-based alignment and Rayleigh
// channel draws for the interfering MIMO multiple-access network.

#include <gia/errors.hpp>
#include <gia/matrix.hpp>
#include <gia/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

namespace gia {

using linalg::CMatrix;

struct SystemConfig {
    int K = 4;   // cells
    int L = 2;   // users per cell
    int N_B = 14; // antennas per base station
    int N_U = 8; // antennas per user
    int d_s = 2; // streams per user
    double P = 1.0;      // per-user transmit power, linear
    double sigma2 = 1.0; // noise power, linear

    double snr_db() const { return 10.0 * std::log10(P / sigma2); }
    double snr_linear() const { return P / sigma2; }
    int users() const { return K * L; }

    // Copy with P chosen so that P / sigma2 equals the given SNR.
    SystemConfig with_snr_db(double db) const
    {
        SystemConfig c = *this;
        c.P = sigma2 * std::pow(10.0, db / 10.0);
        return c;
    }

    void validate() const
    {
        if (K < 3)
            throw ContractViolation("SystemConfig: K must be at least 3, got " + std::to_string(K));
        if (L < 1 || N_B < 1 || N_U < 1 || d_s < 1)
            throw ContractViolation("SystemConfig: L, N_B, N_U and d_s must be positive");
        if (d_s > N_U || d_s > N_B)
            throw ContractViolation("SystemConfig: d_s exceeds the antenna count");
        if (!(P > 0.0) || !(sigma2 > 0.0) || !std::isfinite(P) || !std::isfinite(sigma2))
            throw ContractViolation("SystemConfig: P and sigma2 must be positive and finite");
    }
};

struct FeasibilityReport {
    bool user_antennas_ok = false; // L N_U >= (L-1) N_B + d_s
    bool bs_antennas_ok = false;   // N_B >= ((K-1) L + 1) d_s
    bool feasible = false;
    bool worst_case = false;

    // Largest values admitted by the two inequalities with the other
    // parameters held fixed. max_L is -1 when the user-side inequality puts no cap on L.
    int max_d_s = 0;
    int min_N_U = 0;
    int max_L = 0;
    int max_K = 0;

    std::string describe() const
    {
        std::string s;
        s += "user-side L*N_U >= (L-1)*N_B + d_s: ";
        s += user_antennas_ok ? "ok" : "violated";
        s += "\nbs-side N_B >= ((K-1)*L+1)*d_s: ";
        s += bs_antennas_ok ? "ok" : "violated";
        s += "\nfeasible: ";
        s += feasible ? "yes" : "no";
        s += "\nworst case: ";
        s += worst_case ? "yes" : "no";
        s += "\nmax d_s: " + std::to_string(max_d_s);
        s += "\nmin N_U: " + std::to_string(min_N_U);
        s += "\nmax L: " + (max_L < 0 ? std::string("unbounded by N_U") : std::to_string(max_L));
        s += "\nmax K: " + std::to_string(max_K) + "\n";
        return s;
    }
};

namespace detail {

inline int floor_div(long a, long b)
{
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return static_cast<int>(q);
}

inline int ceil_div(long a, long b)
{
    return -floor_div(-a, b);
}

} // namespace detail

inline FeasibilityReport validate_feasibility(const SystemConfig& cfg)
{
    const long K = cfg.K, L = cfg.L, NB = cfg.N_B, NU = cfg.N_U, ds = cfg.d_s;
    FeasibilityReport r;
    r.user_antennas_ok = L * NU >= (L - 1) * NB + ds;
    r.bs_antennas_ok = NB >= ((K - 1) * L + 1) * ds;
    r.feasible = r.user_antennas_ok && r.bs_antennas_ok;

    r.max_d_s = std::max(0, std::min(static_cast<int>(L * NU - (L - 1) * NB), detail::floor_div(NB, (K - 1) * L + 1)));
    r.min_N_U = detail::ceil_div((L - 1) * NB + ds, L);

    const int max_L_bs = detail::floor_div(NB - ds, (K - 1) * ds);
    if (NB > NU)
        r.max_L = std::min(detail::floor_div(NB - ds, NB - NU), max_L_bs);
    else
        r.max_L = max_L_bs;
    r.max_K = detail::floor_div(NB - ds, L * ds) + 1;

    r.worst_case = r.feasible && NB == ((K - 1) * L + 1) * ds && NU == detail::ceil_div((L - 1) * NB + ds, L);
    return r;
}

// One realization of every user-to-BS channel. Users are indexed (i, k) with
// i in [0, L) the user within cell k in [0, K); BSs by cell index.
class ChannelRealization {
  public:
    ChannelRealization(int K, int L, int N_B, int N_U)
        : K_(K), L_(L), N_B_(N_B), N_U_(N_U),
          H_(static_cast<std::size_t>(K) * L * K, CMatrix::Zero(N_B, N_U)),
          eta_(static_cast<std::size_t>(K) * L * K, 1.0)
    {
    }

    int K() const noexcept { return K_; }
    int L() const noexcept { return L_; }
    int N_B() const noexcept { return N_B_; }
    int N_U() const noexcept { return N_U_; }

    // H_{i,k}^{bs}: from user i of cell k to base station `bs`.
    const CMatrix& H(int i, int k, int bs) const { return H_[index(i, k, bs)]; }
    CMatrix& H(int i, int k, int bs) { return H_[index(i, k, bs)]; }
    double eta(int i, int k, int bs) const { return eta_[index(i, k, bs)]; }
    double& eta(int i, int k, int bs) { return eta_[index(i, k, bs)]; }

  private:
    std::size_t index(int i, int k, int bs) const
    {
        if (i < 0 || i >= L_ || k < 0 || k >= K_ || bs < 0 || bs >= K_)
            throw ContractViolation("channel index (" + std::to_string(i) + "," + std::to_string(k) + ")->" +
                                    std::to_string(bs) + " out of range");
        return (static_cast<std::size_t>(k) * L_ + i) * K_ + bs;
    }

    int K_, L_, N_B_, N_U_;
    std::vector<CMatrix> H_;
    std::vector<double> eta_;
};

// H = sqrt(eta) * Hbar with Hbar i.i.d. CN(0,1); eta = 1 on direct links and
// an independent U[0,1] draw per (user, foreign BS).
inline ChannelRealization draw_channels(const SystemConfig& cfg, Rng& rng)
{
    cfg.validate();
    ChannelRealization ch(cfg.K, cfg.L, cfg.N_B, cfg.N_U);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int k = 0; k < cfg.K; ++k)
        for (int i = 0; i < cfg.L; ++i)
            for (int bs = 0; bs < cfg.K; ++bs) {
                const double eta = bs == k ? 1.0 : uniform(rng);
                ch.eta(i, k, bs) = eta;
                ch.H(i, k, bs) = std::sqrt(eta) * complex_gaussian(rng, cfg.N_B, cfg.N_U);
            }
    return ch;
}

} // namespace gia

#endif
