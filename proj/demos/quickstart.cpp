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

// Builds the aligned transceivers of one channel draw, checks that interference
// vanishes, and compares the three IA-Cell assignment schemes on it.

#include <gia/gia.hpp>

#include <cstdio>

int main()
{
    const gia::SystemConfig cfg = gia::SystemConfig{}.with_snr_db(30.0);
    std::printf("config (K,L,N_B,N_U,d_s) = (%d,%d,%d,%d,%d)\n%s", cfg.K, cfg.L, cfg.N_B, cfg.N_U, cfg.d_s,
                gia::validate_feasibility(cfg).describe().c_str());

    gia::Rng rng = gia::make_stream({2026});
    const gia::ChannelRealization ch = gia::draw_channels(cfg, rng);
    const gia::PotentialPrecoders potential(ch, cfg.d_s);

    const gia::TransceiverSet fixed = gia::build_transceivers(ch, cfg, gia::fixed_cyclic_assignment(cfg.K), potential);
    const gia::AlignmentReport rep = gia::verify_alignment(ch, fixed);
    std::printf("fixed %s: residual %.2e, sum rate %.3f nats\n", fixed.assignment.to_string().c_str(),
                rep.max_interference_residual, gia::evaluate_rates(ch, fixed).sum);

    const gia::PreferenceProfile prefs = gia::build_preferences(ch, cfg, potential);
    const gia::Assignment one = gia::breaking_step(gia::fca_match(prefs).assignment, prefs);
    const gia::Assignment two = gia::breaking_step(gia::gale_shapley(prefs).assignment, prefs);
    const gia::SearchResult best =
        gia::centralized_search(ch, cfg, potential, gia::Objective::sum_rate, gia::Sense::best);
    for (const auto& [name, a] : {std::pair{"one-sided", one}, std::pair{"two-sided", two}, std::pair{"centralized", best.assignment}})
        std::printf("%-12s %s: sum rate %.3f nats\n", name, a.to_string().c_str(),
                    gia::evaluate_rates(ch, gia::build_transceivers(ch, cfg, a, potential)).sum);

    const gia::PatternQuantizer quantizer;
    for (gia::BitAllocMode mode : {gia::BitAllocMode::eba, gia::BitAllocMode::dba}) {
        const gia::FeedbackState fb = gia::apply_feedback(ch, fixed, mode, 200, quantizer, 1);
        std::printf("%s, 200 bits: RINR %.2f dB\n", gia::to_string(mode), 10.0 * std::log10(fb.rinr.total));
    }
    return 0;
}
