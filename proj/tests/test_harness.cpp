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

#include <gia/harness.hpp>

#include <gtest/gtest.h>

using namespace gia;
using linalg::CMatrix;
using linalg::Subspace;

namespace {

SystemConfig desk(double snr_db = 25.0)
{
    return SystemConfig{}.with_snr_db(snr_db);
}

ChannelRealization draw(const SystemConfig& cfg, std::uint64_t id)
{
    Rng rng = make_stream({0x4a7u, id});
    return draw_channels(cfg, rng);
}

SchemeSpec spec_of(Scheme s, BitAllocMode mode = BitAllocMode::none, int bits = 0)
{
    SchemeSpec spec;
    spec.scheme = s;
    spec.bit_alloc = mode;
    spec.bits = bits;
    return spec;
}

TrialResult synthetic(double sum, double min_cell, double rinr, double bound)
{
    TrialResult r;
    r.sum_rate = sum;
    r.min_cell_rate = min_cell;
    r.rinr_total = rinr;
    r.bound_packing = bound;
    return r;
}

} // namespace

TEST(Throughput, MatchesPerfectFeedbackRate)
{
    const SystemConfig cfg = desk(30.0);
    for (std::uint64_t t = 0; t < 10; ++t) {
        const ChannelRealization ch = draw(cfg, t);
        const TransceiverSet ts = build_transceivers(ch, cfg, enumerate_derangements(4)[t % 9]);
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 2; ++i) {
                const Throughput th = throughput(ch, ts.patterns, ts.decoders, cfg.snr_linear(), 2, i, k);
                const double ref = user_rate(ch, ts, i, k).rate;
                EXPECT_NEAR(th.rate, ref, 1e-9 * ref);
                EXPECT_LT(th.residual_trace, 1e-10);
                const double bits = throughput(ch, ts.patterns, ts.decoders, cfg.snr_linear(), 2, i, k, LogBase::two).rate;
                EXPECT_NEAR(bits, ref / std::log(2.0), 1e-9 * bits);
            }
    }
}

TEST(Throughput, ZeroChannelGivesZero)
{
    const SystemConfig cfg = desk();
    ChannelRealization ch(4, 2, 14, 8);
    const Subspace V(CMatrix::Identity(8, 8).leftCols(2));
    const Subspace U(CMatrix::Identity(14, 14).leftCols(2));
    const std::vector<Subspace> patterns(8, V), decoders(8, U);
    const Throughput th = throughput(ch, patterns, decoders, cfg.snr_linear(), 2, 0, 0);
    EXPECT_EQ(th.rate, 0.0);
    EXPECT_EQ(th.residual_trace, 0.0);
}

TEST(Throughput, InterferenceNeverHelps)
{
    // log det(I + C + S) - log det(I + C) <= log det(I + S) for PSD C, S.
    Rng rng = make_stream({1});
    for (int t = 0; t < 200; ++t) {
        const CMatrix G = complex_gaussian(rng, 2, 2);
        const CMatrix X = complex_gaussian(rng, 2, 1 + t % 3);
        const double w = 0.01 * (1 + t % 50);
        const CMatrix I = CMatrix::Identity(2, 2);
        const CMatrix S = 50.0 * G * G.adjoint();
        const CMatrix C = w * X * X.adjoint();
        const double with = linalg::log_det_hpd(I + C + S) - linalg::log_det_hpd(I + C);
        const double clean = linalg::log_det_hpd(I + S);
        EXPECT_LE(with, clean + 1e-12);
        const double more = linalg::log_det_hpd(I + 2.0 * C + S) - linalg::log_det_hpd(I + 2.0 * C);
        EXPECT_LE(more, with + 1e-12);
    }
}

TEST(Throughput, QuantizedPatternsLoseRateOnAverage)
{
    // V_hat = V, U_hat = U versus a coarse quantization of the same realizations.
    const SystemConfig cfg = desk();
    const PatternQuantizer q(3);
    double perfect = 0.0, coarse = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        const ChannelRealization ch = draw(cfg, 100 + t);
        const TransceiverSet ts = build_transceivers(ch, cfg, fixed_cyclic_assignment(4));
        const FeedbackState st = apply_feedback(ch, ts, BitAllocMode::eba, 16, q, t);
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 2; ++i) {
                perfect += throughput(ch, ts.patterns, ts.decoders, cfg.snr_linear(), 2, i, k).rate;
                coarse += throughput(ch, st.quantized, st.decoders, cfg.snr_linear(), 2, i, k).rate;
            }
    }
    EXPECT_LT(coarse, perfect);
}

TEST(RunTrial, FixedSchemeAlignsPerfectly)
{
    const SystemConfig cfg = desk();
    const PatternQuantizer q;
    for (std::uint64_t t = 0; t < 5; ++t) {
        const TrialResult r = run_trial(cfg, spec_of(Scheme::fixed), t, 7, q);
        EXPECT_LT(r.alignment_residual, 1e-8);
        EXPECT_EQ(r.assignment, fixed_cyclic_assignment(4));
        EXPECT_EQ(r.resamples, 0);
        double s = 0.0;
        for (double v : r.per_user)
            s += v;
        EXPECT_NEAR(r.sum_rate, s, 1e-9);
        EXPECT_LE(r.min_cell_rate, r.sum_rate);
        EXPECT_LT(r.rinr_total, 1e-10);
        EXPECT_EQ(r.bound_packing, 0.0);
    }
}

TEST(RunTrial, Deterministic)
{
    const SystemConfig cfg = desk();
    const PatternQuantizer q(5), q2(5);
    for (Scheme s : {Scheme::one_sided, Scheme::two_sided, Scheme::rb}) {
        const TrialResult a = run_trial(cfg, spec_of(s, BitAllocMode::dba, 120), 3, 11, q);
        const TrialResult b = run_trial(cfg, spec_of(s, BitAllocMode::dba, 120), 3, 11, q2);
        EXPECT_EQ(a.per_user, b.per_user);
        EXPECT_EQ(a.rinr_total, b.rinr_total);
        EXPECT_EQ(a.assignment, b.assignment);
        EXPECT_EQ(a.bits, b.bits);
    }
}

TEST(RunTrial, SchemeDominanceChain)
{
    const SystemConfig cfg = desk(30.0);
    const PatternQuantizer q;
    for (std::uint64_t t = 0; t < 5; ++t) {
        const double best = run_trial(cfg, spec_of(Scheme::centralized_sum), t, 1, q).sum_rate;
        const double worst = run_trial(cfg, spec_of(Scheme::worst_sum), t, 1, q).sum_rate;
        const double best_min = run_trial(cfg, spec_of(Scheme::centralized_min), t, 1, q).min_cell_rate;
        const double worst_min = run_trial(cfg, spec_of(Scheme::worst_min), t, 1, q).min_cell_rate;
        for (Scheme s : {Scheme::one_sided, Scheme::two_sided, Scheme::fixed}) {
            const TrialResult r = run_trial(cfg, spec_of(s), t, 1, q);
            EXPECT_GE(best, r.sum_rate - 1e-9);
            EXPECT_LE(worst, r.sum_rate + 1e-9);
            EXPECT_GE(best_min, r.min_cell_rate - 1e-9);
            EXPECT_LE(worst_min, r.min_cell_rate + 1e-9);
        }
    }
}

TEST(RunTrial, MatchingSchemesReportStability)
{
    const SystemConfig cfg = desk();
    const PatternQuantizer q;
    for (std::uint64_t t = 0; t < 10; ++t) {
        const TrialResult one = run_trial(cfg, spec_of(Scheme::one_sided), t, 2, q);
        ASSERT_TRUE(one.stable_one_sided.has_value());
        EXPECT_TRUE(one.assignment.is_strict());
        EXPECT_GE(one.cycles, 1);
        const TrialResult two = run_trial(cfg, spec_of(Scheme::two_sided), t, 2, q);
        ASSERT_TRUE(two.stable_two_sided.has_value());
        EXPECT_TRUE(two.assignment.is_strict());
        EXPECT_GE(two.proposals, 3);
        EXPECT_LE(two.proposals, 13);
    }
}

TEST(RunTrial, SecondFailureAborts)
{
    // Too few BS antennas: every draw fails, so the retry fails too.
    SystemConfig cfg = desk();
    cfg.N_B = 9;
    const PatternQuantizer q;
    EXPECT_THROW(run_trial(cfg, spec_of(Scheme::fixed), 0, 1, q), NumericalFailure);
}

TEST(Baselines, RandomBeamformingLeavesInterference)
{
    const SystemConfig cfg = desk(30.0);
    Rng rng = make_stream({2});
    for (std::uint64_t t = 0; t < 20; ++t) {
        const ChannelRealization ch = draw(cfg, 200 + t);
        const TrialResult r = baseline_rb(ch, cfg, rng);
        EXPECT_GT(r.rinr_total, 1.0);
        for (double v : r.rinr_per_cell)
            EXPECT_GT(v, 0.0);
        EXPECT_TRUE(std::isnan(r.bound_packing));
        EXPECT_GT(r.sum_rate, 0.0);
    }
}

TEST(Baselines, RandomBeamformingBelowAlignment)
{
    const SystemConfig cfg = desk(30.0);
    const PatternQuantizer q;
    double rb = 0.0, gia = 0.0;
    for (std::uint64_t t = 0; t < 30; ++t) {
        rb += run_trial(cfg, spec_of(Scheme::rb), t, 4, q).sum_rate;
        gia += run_trial(cfg, spec_of(Scheme::fixed), t, 4, q).sum_rate;
    }
    EXPECT_LT(rb, gia);
}

TEST(Baselines, FdmaSingleUserIsFullBandCapacity)
{
    SystemConfig cfg;
    cfg.K = 1;
    cfg.L = 1;
    cfg.N_B = 4;
    cfg.N_U = 3;
    cfg.d_s = 2;
    cfg = cfg.with_snr_db(20.0);
    ChannelRealization ch(1, 1, 4, 3);
    Rng rng = make_stream({3});
    ch.H(0, 0, 0) = complex_gaussian(rng, 4, 3);
    const TrialResult r = baseline_fdma(ch, cfg);
    const linalg::RVector s = linalg::svd(ch.H(0, 0, 0)).singular_values;
    const double expect = std::log1p(50.0 * s(0) * s(0)) + std::log1p(50.0 * s(1) * s(1));
    EXPECT_NEAR(r.sum_rate, expect, 1e-10 * expect);
    EXPECT_NEAR(baseline_fdma(ch, cfg, true).sum_rate, expect, 1e-10 * expect);
}

TEST(Baselines, FdmaPositiveAndPowerModes)
{
    const SystemConfig cfg = desk(30.0);
    const ChannelRealization ch = draw(cfg, 300);
    const TrialResult full = baseline_fdma(ch, cfg), psd = baseline_fdma(ch, cfg, true);
    for (std::size_t u = 0; u < full.per_user.size(); ++u) {
        EXPECT_GT(full.per_user[u], 0.0);
        EXPECT_GT(full.per_user[u], psd.per_user[u]);
    }
    EXPECT_EQ(full.rinr_total, 0.0);
}

TEST(Baselines, FdmaSlopeIsStreamsPerUser)
{
    // Each user holds d_s streams over 1/(KL) of the band: slope d_s in ln SNR overall.
    const PatternQuantizer q;
    double lo = 0.0, hi = 0.0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const ChannelRealization ch = draw(desk(), 400 + t);
        lo += baseline_fdma(ch, desk(40.0)).sum_rate;
        hi += baseline_fdma(ch, desk(60.0)).sum_rate;
    }
    const double slope = (hi - lo) / 50 / (2.0 * std::log(10.0));
    EXPECT_NEAR(slope, 2.0, 0.05);
}

TEST(Metrics, SingleAndIdenticalTrials)
{
    const Metrics one = aggregate_metrics({synthetic(10, 2, 0.5, 1.0)});
    EXPECT_EQ(one.R_sum, 10.0);
    EXPECT_EQ(one.R_sum_stderr, 0.0);
    EXPECT_EQ(one.trials, 1u);
    const Metrics two = aggregate_metrics({synthetic(4, 1, 2, 3), synthetic(4, 1, 2, 3)});
    EXPECT_EQ(two.R_sum_stderr, 0.0);
    EXPECT_EQ(two.R_min_stderr, 0.0);
    EXPECT_EQ(two.RINR_dB_stderr, 0.0);
    EXPECT_THROW(aggregate_metrics({}), ContractViolation);
}

TEST(Metrics, HandComputedMeans)
{
    const Metrics m = aggregate_metrics({synthetic(1, 0.5, 1, 10), synthetic(2, 1.0, 10, 10), synthetic(6, 0.0, 100, 10)});
    EXPECT_DOUBLE_EQ(m.R_sum, 3.0);
    // sample variance 7, over n = 3
    EXPECT_NEAR(m.R_sum_stderr, std::sqrt(7.0 / 3.0), 1e-12);
    EXPECT_DOUBLE_EQ(m.R_min, 0.5);
    EXPECT_NEAR(m.RINR_dB, 10.0 * std::log10(37.0), 1e-12);
    EXPECT_NEAR(m.bound_dB, 10.0, 1e-12);
    EXPECT_EQ(m.bound_dB_stderr, 0.0);
}

TEST(Metrics, PerfectFeedbackRinrIsMinusInfinity)
{
    const Metrics m = aggregate_metrics({synthetic(1, 1, 0, 0)});
    EXPECT_TRUE(std::isinf(m.RINR_dB) && m.RINR_dB < 0);
    EXPECT_EQ(detail::fmt(m.RINR_dB), "-inf");
}

TEST(Sweep, RowCountFollowsGrid)
{
    SweepSpec spec;
    spec.variable = SweepVariable::snr_db;
    for (int s = 0; s <= 40; s += 5)
        spec.grid.push_back(s);
    spec.trials = 1;
    spec.schemes = {spec_of(Scheme::fixed), spec_of(Scheme::fdma)};
    const auto rows = run_sweep(spec, SystemConfig{});
    ASSERT_EQ(rows.size(), 18u);
    EXPECT_EQ(rows[0].scheme, "fixed/none");
    EXPECT_EQ(rows[1].scheme, "fdma/none");
    EXPECT_EQ(rows[17].variable, 40.0);
}

TEST(Sweep, SpecValidation)
{
    SweepSpec spec;
    EXPECT_THROW(spec.validate(), ContractViolation);
    spec.grid = {1.0};
    EXPECT_THROW(spec.validate(), ContractViolation);
    spec.schemes = {spec_of(Scheme::fixed)};
    EXPECT_NO_THROW(spec.validate());
    spec.trials = 0;
    EXPECT_THROW(spec.validate(), ContractViolation);
    spec.trials = 1;
    spec.variable = SweepVariable::bits;
    spec.grid = {10.5};
    EXPECT_THROW(spec.validate(), ContractViolation);
}

TEST(Sweep, CsvByteIdenticalAcrossRunsAndThreads)
{
    SweepSpec spec;
    spec.variable = SweepVariable::bits;
    spec.grid = {40, 80};
    spec.trials = 6;
    spec.seed = 99;
    spec.schemes = {spec_of(Scheme::fixed, BitAllocMode::dba), spec_of(Scheme::one_sided, BitAllocMode::eba)};
    const std::string a = to_csv(run_sweep(spec, SystemConfig{}));
    const std::string b = to_csv(run_sweep(spec, SystemConfig{}));
    spec.threads = 3;
    const std::string c = to_csv(run_sweep(spec, SystemConfig{}));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_EQ(a.substr(0, a.find('\n')), kCsvHeader);
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 5);
    spec.seed = 100;
    EXPECT_NE(a, to_csv(run_sweep(spec, SystemConfig{})));
}

TEST(Sweep, CsvFileErrorsNamePath)
{
    try {
        write_csv_file("/nonexistent-dir/out.csv", {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.csv"), std::string::npos);
    }
}

TEST(Parsing, SchemeNames)
{
    for (Scheme s : {Scheme::one_sided, Scheme::two_sided, Scheme::centralized_sum, Scheme::centralized_min, Scheme::fixed,
                     Scheme::worst_sum, Scheme::worst_min, Scheme::rb, Scheme::fdma})
        EXPECT_EQ(parse_scheme(to_string(s)), s);
    EXPECT_THROW(parse_scheme("greedy"), ContractViolation);
    EXPECT_EQ(parse_bit_alloc("dba"), BitAllocMode::dba);
    EXPECT_THROW(parse_bit_alloc("water"), ContractViolation);
    EXPECT_THROW(parse_overhead_scheme("rb"), ContractViolation);
}

TEST(Overhead, ClosedFormsAtDeskScale)
{
    const SystemConfig cfg; // (K, L, N_U, N_B, d_s) = (4, 2, 8, 14, 2)
    const OverheadReport one = backhaul_overhead(OverheadScheme::one_sided, cfg, 300, 1);
    EXPECT_EQ(one.before_cc, 0);
    EXPECT_EQ(one.assignment_bits_min, 16);
    EXPECT_EQ(one.assignment_bits_max, 16);
    EXPECT_EQ(one.after_cc, 128);
    EXPECT_EQ(one.after_bits, 900);

    const OverheadReport two = backhaul_overhead(OverheadScheme::two_sided, cfg, 300, 1);
    EXPECT_EQ(two.before_cc, 384);
    EXPECT_EQ(two.assignment_bits_min, 16);
    EXPECT_EQ(two.assignment_bits_max, 52);
    EXPECT_EQ(two.after_cc, 0);
    EXPECT_EQ(two.after_bits, 900);

    const OverheadReport cen = backhaul_overhead(OverheadScheme::centralized, cfg, 300, 1);
    EXPECT_EQ(cen.before_cc, 960);
    EXPECT_EQ(cen.assignment_bits_max, 0);
    EXPECT_EQ(cen.after_cc, 96);
    EXPECT_EQ(cen.after_bits, 900);

    const OverheadReport fix = backhaul_overhead(OverheadScheme::fixed, cfg, 300, 1);
    EXPECT_EQ(fix.before_cc, 0);
    EXPECT_FALSE(fix.assignment_applicable);
    EXPECT_EQ(fix.after_cc, 128);
    EXPECT_EQ(fix.after_bits, 0);
}

TEST(Overhead, CycleCountEntersOneSidedOnly)
{
    const SystemConfig cfg;
    EXPECT_EQ(backhaul_overhead(OverheadScheme::one_sided, cfg, 300, 3).assignment_bits_max, 24);
    EXPECT_EQ(backhaul_overhead(OverheadScheme::two_sided, cfg, 300, 3).assignment_bits_max, 52);
}
