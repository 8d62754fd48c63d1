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

#ifndef GIA_ASSIGNMENT_HPP
#define GIA_ASSIGNMENT_HPP

// Choosing which cell aligns at which: preference lists, forward chaining
// (top trading cycles), the breaking step, Gale-Shapley deferred acceptance,
// brute-force search over derangements and stability oracles.

#include <gia/cell_assignment.hpp>
#include <gia/errors.hpp>
#include <gia/matrix.hpp>
#include <gia/system.hpp>
#include <gia/transceiver.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace gia {

// Candidates best first, with their utilities.
struct RankedList {
    std::vector<int> cells;
    std::vector<double> utility;

    std::size_t size() const noexcept { return cells.size(); }

    // Position of `cell` in the list, or size() when absent.
    std::size_t rank_of(int cell) const
    {
        const auto it = std::find(cells.begin(), cells.end(), cell);
        return static_cast<std::size_t>(it - cells.begin());
    }

    double utility_of(int cell) const
    {
        const std::size_t r = rank_of(cell);
        if (r == cells.size())
            throw ContractViolation("RankedList: cell " + std::to_string(cell) + " is not a candidate");
        return utility[r];
    }
};

// Sorts candidates by decreasing utility; equal utilities keep ascending cell order.
inline RankedList rank_candidates(std::vector<int> cells, const std::vector<double>& utility_by_cell)
{
    std::stable_sort(cells.begin(), cells.end(), [&](int a, int b) {
        const double ua = utility_by_cell[static_cast<std::size_t>(a)];
        const double ub = utility_by_cell[static_cast<std::size_t>(b)];
        if (ua != ub)
            return ua > ub;
        return a < b;
    });
    RankedList out;
    out.cells = std::move(cells);
    for (int c : out.cells)
        out.utility.push_back(utility_by_cell[static_cast<std::size_t>(c)]);
    return out;
}

inline std::vector<int> other_cells(int K, int k)
{
    std::vector<int> cells;
    for (int c = 0; c < K; ++c)
        if (c != k)
            cells.push_back(c);
    return cells;
}

struct PreferenceProfile {
    std::vector<RankedList> provider_pref; // cell k ranking the cells that could align at it
    std::vector<RankedList> receiver_pref; // cell k ranking the cells it could align at

    int K() const noexcept { return static_cast<int>(provider_pref.size()); }

    void validate() const
    {
        const int K = this->K();
        if (receiver_pref.size() != provider_pref.size())
            throw ContractViolation("PreferenceProfile: provider and receiver lists differ in size");
        auto check = [K](const RankedList& list, int k, const char* side) {
            std::vector<int> sorted = list.cells;
            std::sort(sorted.begin(), sorted.end());
            if (sorted != other_cells(K, k) || list.utility.size() != list.cells.size())
                throw ContractViolation(std::string("PreferenceProfile: ") + side + " list of cell " + std::to_string(k) +
                                        " is not a ranking of the other cells");
        };
        for (int k = 0; k < K; ++k) {
            check(provider_pref[static_cast<std::size_t>(k)], k, "provider");
            if (!receiver_pref[static_cast<std::size_t>(k)].cells.empty())
                check(receiver_pref[static_cast<std::size_t>(k)], k, "receiver");
        }
    }
};

inline double log2_det_identity_plus(const CMatrix& x)
{
    return linalg::log_det_identity_plus(x) / std::log(2.0);
}

// Cell k ranks candidate providers l by sum_i log2 det(I + H^H Pperp(F_l^k) H), H = H_{i,k}^k.
inline RankedList provider_preferences(const ChannelRealization& ch, int k, const PotentialPrecoders& potential)
{
    const int K = ch.K();
    std::vector<double> u(static_cast<std::size_t>(K), 0.0);
    for (int l = 0; l < K; ++l) {
        if (l == k)
            continue;
        const CMatrix& F = potential.at(l, k).aligned.basis();
        const CMatrix perp = CMatrix::Identity(ch.N_B(), ch.N_B()) - F * F.adjoint();
        double acc = 0.0;
        for (int i = 0; i < ch.L(); ++i) {
            const CMatrix& H = ch.H(i, k, k);
            acc += log2_det_identity_plus(H.adjoint() * perp * H);
        }
        u[static_cast<std::size_t>(l)] = acc;
    }
    return rank_candidates(other_cells(K, k), u);
}

// Cell k ranks candidate receivers l by sum_i log2 det(I + V^H H^H H V) with
// V = V_{i,k}(l) the precoder cell k would use to align at l.
inline RankedList receiver_preferences(const ChannelRealization& ch, const SystemConfig& cfg, int k,
                                       const PotentialPrecoders& potential)
{
    const int K = ch.K();
    std::vector<double> u(static_cast<std::size_t>(K), 0.0);
    for (int l = 0; l < K; ++l) {
        if (l == k)
            continue;
        const AlignmentLink& link = potential.at(k, l);
        double acc = 0.0;
        for (int i = 0; i < ch.L(); ++i) {
            const CMatrix HV = ch.H(i, k, k) * full_precoder(link.patterns[static_cast<std::size_t>(i)], cfg.P, cfg.d_s);
            acc += log2_det_identity_plus(HV.adjoint() * HV);
        }
        u[static_cast<std::size_t>(l)] = acc;
    }
    return rank_candidates(other_cells(K, k), u);
}

inline PreferenceProfile build_preferences(const ChannelRealization& ch, const SystemConfig& cfg,
                                           const PotentialPrecoders& potential, bool with_receiver_side = true)
{
    PreferenceProfile prefs;
    for (int k = 0; k < ch.K(); ++k) {
        prefs.provider_pref.push_back(provider_preferences(ch, k, potential));
        prefs.receiver_pref.push_back(with_receiver_side ? receiver_preferences(ch, cfg, k, potential) : RankedList{});
    }
    return prefs;
}

// Sum over receivers of the utility they assign to their provider; lone or
// unserved cells contribute 0.
inline double sum_provider_utility(const Assignment& a, const PreferenceProfile& prefs)
{
    double s = 0.0;
    for (int r = 0; r < a.K(); ++r) {
        const int p = a.provider_of[static_cast<std::size_t>(r)];
        if (p >= 0 && p != r)
            s += prefs.provider_pref[static_cast<std::size_t>(r)].utility_of(p);
    }
    return s;
}

struct FcaResult {
    Assignment assignment; // weak when a lone cell remains
    int cycles = 0;        // cycles removed, a final self-cycle included
};

// Forward chaining: every remaining cell points at its favourite remaining
// provider (itself once nobody else is left); pointer cycles are fixed and
// removed until no cell remains.
inline FcaResult fca_match(const PreferenceProfile& prefs)
{
    const int K = prefs.K();
    FcaResult out;
    out.assignment.provider_of.assign(static_cast<std::size_t>(K), -1);
    std::vector<bool> remaining(static_cast<std::size_t>(K), true);
    int left = K;

    while (left > 0) {
        std::vector<int> points(static_cast<std::size_t>(K), -1);
        for (int c = 0; c < K; ++c) {
            if (!remaining[static_cast<std::size_t>(c)])
                continue;
            points[static_cast<std::size_t>(c)] = c;
            for (int cand : prefs.provider_pref[static_cast<std::size_t>(c)].cells)
                if (remaining[static_cast<std::size_t>(cand)]) {
                    points[static_cast<std::size_t>(c)] = cand;
                    break;
                }
        }
        // Every node has out-degree one, so walking from any node ends in a cycle.
        std::vector<int> state(static_cast<std::size_t>(K), 0); // 0 unvisited, 1 on path, 2 done
        std::vector<std::vector<int>> cycles;
        for (int start = 0; start < K; ++start) {
            if (!remaining[static_cast<std::size_t>(start)] || state[static_cast<std::size_t>(start)] != 0)
                continue;
            std::vector<int> path;
            int c = start;
            while (state[static_cast<std::size_t>(c)] == 0) {
                state[static_cast<std::size_t>(c)] = 1;
                path.push_back(c);
                c = points[static_cast<std::size_t>(c)];
            }
            if (state[static_cast<std::size_t>(c)] == 1) {
                const auto from = std::find(path.begin(), path.end(), c);
                cycles.emplace_back(from, path.end());
            }
            for (int v : path)
                state[static_cast<std::size_t>(v)] = 2;
        }
        for (const auto& cyc : cycles) {
            ++out.cycles;
            for (int c : cyc) {
                const int p = points[static_cast<std::size_t>(c)];
                if (p == c)
                    out.assignment.lone = c;
                else
                    out.assignment.provider_of[static_cast<std::size_t>(c)] = p;
                remaining[static_cast<std::size_t>(c)] = false;
                --left;
            }
        }
    }
    return out;
}

// Inserts the lone cell u into the cycle of its favourite provider p: p now
// aligns at u and u aligns at the cell p used to serve.
inline Assignment breaking_step(const Assignment& weak, const PreferenceProfile& prefs)
{
    if (!weak.lone)
        return weak;
    const int u = *weak.lone;
    const int p = prefs.provider_pref[static_cast<std::size_t>(u)].cells.front();
    const int r = weak.receiver_of(p);
    if (r < 0)
        throw ContractViolation("breaking_step: provider " + std::to_string(p) + " of lone cell " + std::to_string(u) +
                                " serves nobody in " + weak.to_string());
    Assignment strict = weak;
    strict.lone.reset();
    strict.provider_of[static_cast<std::size_t>(u)] = p;
    strict.provider_of[static_cast<std::size_t>(r)] = u;
    if (!strict.is_derangement())
        throw ContractViolation("breaking_step: result " + strict.to_string() + " is not a derangement");
    return strict;
}

enum class Proposer { receivers, providers };

struct GaleShapleyResult {
    Assignment assignment;        // provider_of[r] = -1 for the unmatched cell, which is also `lone`
    std::optional<int> unmatched; // the cell left without partner on both sides
    int proposals = 0;
};

// Deferred acceptance with every cell unacceptable to itself.
inline GaleShapleyResult gale_shapley(const PreferenceProfile& prefs, Proposer proposer = Proposer::receivers)
{
    const int K = prefs.K();
    if (static_cast<int>(prefs.receiver_pref.size()) != K)
        throw ContractViolation("gale_shapley: receiver preferences missing");
    for (int k = 0; k < K; ++k)
        if (prefs.receiver_pref[static_cast<std::size_t>(k)].size() != static_cast<std::size_t>(K - 1))
            throw ContractViolation("gale_shapley: receiver preferences of cell " + std::to_string(k) + " incomplete");

    // Proposing side walks `propose_list`; the other side judges with `judge_list`.
    const auto& propose_list = proposer == Proposer::receivers ? prefs.provider_pref : prefs.receiver_pref;
    const auto& judge_list = proposer == Proposer::receivers ? prefs.receiver_pref : prefs.provider_pref;

    std::vector<std::size_t> next(static_cast<std::size_t>(K), 0);
    std::vector<int> held(static_cast<std::size_t>(K), -1); // judge -> proposer held
    std::vector<int> partner(static_cast<std::size_t>(K), -1); // proposer -> judge
    std::vector<int> free;
    for (int c = K - 1; c >= 0; --c)
        free.push_back(c);

    GaleShapleyResult out;
    while (!free.empty()) {
        const int a = free.back();
        auto& idx = next[static_cast<std::size_t>(a)];
        const RankedList& mine = propose_list[static_cast<std::size_t>(a)];
        if (idx >= mine.size()) {
            free.pop_back();
            continue;
        }
        const int b = mine.cells[idx++];
        ++out.proposals;
        const int current = held[static_cast<std::size_t>(b)];
        const RankedList& theirs = judge_list[static_cast<std::size_t>(b)];
        if (current < 0 || theirs.rank_of(a) < theirs.rank_of(current)) {
            free.pop_back();
            if (current >= 0) {
                partner[static_cast<std::size_t>(current)] = -1;
                free.push_back(current);
            }
            held[static_cast<std::size_t>(b)] = a;
            partner[static_cast<std::size_t>(a)] = b;
        }
    }

    out.assignment.provider_of.assign(static_cast<std::size_t>(K), -1);
    for (int a = 0; a < K; ++a) {
        const int b = partner[static_cast<std::size_t>(a)];
        if (b < 0)
            continue;
        if (proposer == Proposer::receivers)
            out.assignment.provider_of[static_cast<std::size_t>(a)] = b;
        else
            out.assignment.provider_of[static_cast<std::size_t>(b)] = a;
    }
    for (int r = 0; r < K; ++r)
        if (out.assignment.provider_of[static_cast<std::size_t>(r)] < 0) {
            if (out.unmatched)
                throw NumericalFailure("gale_shapley: more than one cell left unmatched");
            out.unmatched = r;
        }
    if (out.unmatched) {
        if (out.assignment.receiver_of(*out.unmatched) >= 0)
            throw NumericalFailure("gale_shapley: unmatched receiver " + std::to_string(*out.unmatched) +
                                   " still provides");
        out.assignment.lone = out.unmatched;
    }
    return out;
}

// Number of derangements of K elements.
inline std::uint64_t derangement_count(int K)
{
    if (K < 0 || K > 20)
        throw CapacityError("derangement_count: K=" + std::to_string(K) + " outside [0, 20]");
    std::uint64_t d0 = 1, d1 = 0; // D(0), D(1)
    if (K == 0)
        return d0;
    for (int n = 2; n <= K; ++n) {
        const std::uint64_t d2 = static_cast<std::uint64_t>(n - 1) * (d1 + d0);
        d0 = d1;
        d1 = d2;
    }
    return d1;
}

// K! sum_{k=0}^{K} (-1)^k / k! - 1, evaluated exactly as an integer.
inline std::int64_t strict_count_formula(int K)
{
    if (K < 1 || K > 20)
        throw ContractViolation("strict_count_formula: K=" + std::to_string(K) + " outside [1, 20]");
    // K!/k! = product (k+1)...K
    std::int64_t sum = 0;
    for (int k = 0; k <= K; ++k) {
        std::int64_t term = 1;
        for (int m = k + 1; m <= K; ++m)
            term *= m;
        sum += (k % 2 == 0) ? term : -term;
    }
    return sum - 1;
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 1000000;

// Visits every derangement once, in lexicographic order of provider_of.
inline void for_each_derangement(int K, const std::function<void(const Assignment&)>& visit,
                                 std::uint64_t cap = kDefaultEnumerationCap)
{
    if (K < 2)
        throw ContractViolation("for_each_derangement: K must be at least 2");
    if (K > 20 || derangement_count(K) > cap)
        throw CapacityError("for_each_derangement: K=" + std::to_string(K) + " exceeds the enumeration cap of " +
                            std::to_string(cap));
    Assignment a;
    a.provider_of.assign(static_cast<std::size_t>(K), -1);
    std::vector<bool> used(static_cast<std::size_t>(K), false);
    std::function<void(int)> place = [&](int pos) {
        if (pos == K) {
            visit(a);
            return;
        }
        for (int v = 0; v < K; ++v) {
            if (v == pos || used[static_cast<std::size_t>(v)])
                continue;
            used[static_cast<std::size_t>(v)] = true;
            a.provider_of[static_cast<std::size_t>(pos)] = v;
            place(pos + 1);
            used[static_cast<std::size_t>(v)] = false;
        }
        a.provider_of[static_cast<std::size_t>(pos)] = -1;
    };
    place(0);
}

inline std::vector<Assignment> enumerate_derangements(int K, std::uint64_t cap = kDefaultEnumerationCap)
{
    std::vector<Assignment> out;
    for_each_derangement(K, [&](const Assignment& a) { out.push_back(a); }, cap);
    return out;
}

enum class Objective { sum_rate, min_cell_rate };
enum class Sense { best, worst };

struct SearchResult {
    Assignment assignment;
    double value = 0.0;
    std::size_t evaluated = 0;
};

// Exact rates of every strict assignment; first in lexicographic order wins ties.
inline SearchResult centralized_search(const ChannelRealization& ch, const SystemConfig& cfg,
                                       const PotentialPrecoders& potential, Objective objective, Sense sense,
                                       std::uint64_t cap = kDefaultEnumerationCap)
{
    SearchResult best;
    bool have = false;
    for_each_derangement(
        ch.K(),
        [&](const Assignment& a) {
            const TransceiverSet ts = build_transceivers(ch, cfg, a, potential);
            const RateSummary r = evaluate_rates(ch, ts);
            const double v = objective == Objective::sum_rate ? r.sum : r.min_cell;
            ++best.evaluated;
            const bool better = !have || (sense == Sense::best ? v > best.value : v < best.value);
            if (better) {
                best.assignment = a;
                best.value = v;
                have = true;
            }
        },
        cap);
    return best;
}

enum class StabilityMode { one_sided, two_sided };

inline constexpr int kStabilityCap = 8;

namespace detail {

// Rank of provider p in r's list with r itself ranked last (lone).
inline std::size_t provider_rank(const PreferenceProfile& prefs, int r, int p)
{
    const RankedList& list = prefs.provider_pref[static_cast<std::size_t>(r)];
    return p == r || p < 0 ? list.size() : list.rank_of(p);
}

inline std::size_t receiver_rank(const PreferenceProfile& prefs, int p, int r)
{
    const RankedList& list = prefs.receiver_pref[static_cast<std::size_t>(p)];
    return r == p || r < 0 ? list.size() : list.rank_of(r);
}

} // namespace detail

// one_sided: no coalition can trade providers among its members so that none
// is worse off and someone is better off. two_sided: no provider/receiver pair
// prefers each other to their current partners.
inline bool is_stable(const Assignment& a, const PreferenceProfile& prefs, StabilityMode mode)
{
    const int K = prefs.K();
    if (a.K() != K)
        throw ContractViolation("is_stable: assignment and preferences disagree on K");
    auto current = [&](int r) {
        const int p = a.provider_of[static_cast<std::size_t>(r)];
        return p < 0 ? r : p;
    };

    if (mode == StabilityMode::two_sided) {
        for (int p = 0; p < K; ++p) {
            const int now_r = a.receiver_of(p);
            for (int r = 0; r < K; ++r) {
                if (r == p || a.provider_of[static_cast<std::size_t>(r)] == p)
                    continue;
                const bool r_wants = detail::provider_rank(prefs, r, p) < detail::provider_rank(prefs, r, current(r));
                const bool p_wants = detail::receiver_rank(prefs, p, r) < detail::receiver_rank(prefs, p, now_r);
                if (r_wants && p_wants)
                    return false;
            }
        }
        return true;
    }

    if (K > kStabilityCap)
        throw CapacityError("is_stable: exhaustive coalition check limited to K <= " + std::to_string(kStabilityCap));
    const std::vector<std::size_t> now = [&] {
        std::vector<std::size_t> v(static_cast<std::size_t>(K));
        for (int r = 0; r < K; ++r)
            v[static_cast<std::size_t>(r)] = detail::provider_rank(prefs, r, current(r));
        return v;
    }();
    for (std::uint32_t mask = 1; mask < (1u << K); ++mask) {
        std::vector<int> members;
        for (int c = 0; c < K; ++c)
            if (mask & (1u << c))
                members.push_back(c);
        std::vector<int> perm = members; // perm[t] provides to members[t]
        do {
            bool worse = false, better = false;
            for (std::size_t t = 0; t < members.size() && !worse; ++t) {
                const std::size_t rk = detail::provider_rank(prefs, members[t], perm[t]);
                const std::size_t cur = now[static_cast<std::size_t>(members[t])];
                worse = rk > cur;
                better = better || rk < cur;
            }
            if (better && !worse)
                return false;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return true;
}

} // namespace gia

#endif
