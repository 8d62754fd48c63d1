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

#ifndef GIA_CELL_ASSIGNMENT_HPP
#define GIA_CELL_ASSIGNMENT_HPP

#include <gia/errors.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gia {

// Which cell aligns its interference at which. provider_of[r] = p means all
// users of cell p align their interference at BS r. Cells without a provider
// hold -1. A strict assignment is a derangement; a weak one has one lone cell
// that neither provides nor receives.
struct Assignment {
    std::vector<int> provider_of;
    std::optional<int> lone;

    int K() const noexcept { return static_cast<int>(provider_of.size()); }

    // Receiver served by provider p, or -1.
    int receiver_of(int p) const
    {
        for (int r = 0; r < K(); ++r)
            if (provider_of[static_cast<std::size_t>(r)] == p)
                return r;
        return -1;
    }

    bool is_derangement() const
    {
        std::vector<bool> used(provider_of.size(), false);
        for (int r = 0; r < K(); ++r) {
            const int p = provider_of[static_cast<std::size_t>(r)];
            if (p < 0 || p >= K() || p == r || used[static_cast<std::size_t>(p)])
                return false;
            used[static_cast<std::size_t>(p)] = true;
        }
        return true;
    }

    bool is_strict() const { return !lone && is_derangement(); }

    void require_strict(const char* what) const
    {
        if (!is_strict())
            throw ContractViolation(std::string(what) + ": a strict assignment is required, got " + to_string());
    }

    // "p->r" edges in receiver order, 0-based.
    std::string to_string() const
    {
        std::string s = "[";
        for (int r = 0; r < K(); ++r) {
            if (r)
                s += ' ';
            const int p = provider_of[static_cast<std::size_t>(r)];
            s += (p < 0 ? std::string("_") : std::to_string(p)) + "->" + std::to_string(r);
        }
        if (lone)
            s += " lone=" + std::to_string(*lone);
        return s + "]";
    }

    friend bool operator==(const Assignment& a, const Assignment& b)
    {
        return a.provider_of == b.provider_of && a.lone == b.lone;
    }
};

// Cell k provides to cell k+1 (cyclically), i.e. provider_of[k] = k-1.
inline Assignment fixed_cyclic_assignment(int K)
{
    if (K < 2)
        throw ContractViolation("fixed_cyclic_assignment: K must be at least 2");
    Assignment a;
    a.provider_of.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        a.provider_of[static_cast<std::size_t>(k)] = (k - 1 + K) % K;
    return a;
}

// Number of disjoint cycles of a strict assignment.
inline int cycle_count(const Assignment& a)
{
    a.require_strict("cycle_count");
    std::vector<bool> seen(a.provider_of.size(), false);
    int cycles = 0;
    for (int start = 0; start < a.K(); ++start) {
        if (seen[static_cast<std::size_t>(start)])
            continue;
        ++cycles;
        for (int c = start; !seen[static_cast<std::size_t>(c)]; c = a.provider_of[static_cast<std::size_t>(c)])
            seen[static_cast<std::size_t>(c)] = true;
    }
    return cycles;
}

} // namespace gia

#endif
