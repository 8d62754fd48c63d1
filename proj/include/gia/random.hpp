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

#ifndef GIA_RANDOM_HPP
#define GIA_RANDOM_HPP

#include <gia/matrix.hpp>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gia {

using Rng = std::mt19937_64;

// Independent stream for a tuple of identifiers (master seed, trial, attempt, purpose ...).
// Streams with different tuples are statistically unrelated, so trials can be run
// in any order and still reproduce bit-for-bit.
inline Rng make_stream(std::initializer_list<std::uint64_t> ids)
{
    std::vector<std::uint32_t> words;
    words.reserve(2 * ids.size() + 1);
    words.push_back(0x9e3779b9u);
    for (std::uint64_t id : ids) {
        words.push_back(static_cast<std::uint32_t>(id & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(id >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

// Stream tags for the different consumers of randomness inside a trial.
namespace stream {
inline constexpr std::uint64_t channel = 1;
inline constexpr std::uint64_t codebook = 2;
inline constexpr std::uint64_t baseline = 3;
inline constexpr std::uint64_t quantizer = 4;
} // namespace stream

// rows x cols matrix of i.i.d. CN(0, 1) entries.
inline linalg::CMatrix complex_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    linalg::CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(r, c) = {re, im};
        }
    return m;
}

// Isotropically distributed point of the Grassmannian G(rows, cols).
inline linalg::Subspace random_subspace(Rng& rng, Eigen::Index rows, Eigen::Index cols)
{
    for (;;) {
        try {
            return linalg::orthonormalize(complex_gaussian(rng, rows, cols));
        } catch (const RankDeficiency&) {
            // probability zero; draw again
        }
    }
}

} // namespace gia

#endif
