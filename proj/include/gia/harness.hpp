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

#ifndef GIA_HARNESS_HPP
#define GIA_HARNESS_HPP

// Monte-Carlo driver: one trial per channel realization, baselines, sweep
// aggregation, CSV output and backhaul accounting.

#include <gia/assignment.hpp>
#include <gia/cell_assignment.hpp>
#include <gia/errors.hpp>
#include <gia/feedback.hpp>
#include <gia/matrix.hpp>
#include <gia/random.hpp>
#include <gia/system.hpp>
#include <gia/transceiver.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace gia {

enum class Scheme { one_sided, two_sided, centralized_sum, centralized_min, fixed, worst_sum, worst_min, rb, fdma };

inline const char* to_string(Scheme s)
{
    switch (s) {
    case Scheme::one_sided:
        return "one_sided";
    case Scheme::two_sided:
        return "two_sided";
    case Scheme::centralized_sum:
        return "centralized_sum";
    case Scheme::centralized_min:
        return "centralized_min";
    case Scheme::fixed:
        return "fixed";
    case Scheme::worst_sum:
        return "worst_sum";
    case Scheme::worst_min:
        return "worst_min";
    case Scheme::rb:
        return "rb";
    case Scheme::fdma:
        return "fdma";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& name)
{
    for (Scheme s : {Scheme::one_sided, Scheme::two_sided, Scheme::centralized_sum, Scheme::centralized_min, Scheme::fixed,
                     Scheme::worst_sum, Scheme::worst_min, Scheme::rb, Scheme::fdma})
        if (name == to_string(s))
            return s;
    throw ContractViolation("unknown assignment scheme '" + name + "'");
}

inline BitAllocMode parse_bit_alloc(const std::string& name)
{
    for (BitAllocMode m : {BitAllocMode::none, BitAllocMode::dba, BitAllocMode::eba})
        if (name == to_string(m))
            return m;
    throw ContractViolation("unknown bit allocation '" + name + "'");
}

struct SchemeSpec {
    Scheme scheme = Scheme::fixed;
    BitAllocMode bit_alloc = BitAllocMode::none;
    int bits = 0; // total feedback budget over all users
    Proposer proposer = Proposer::receivers;
    LogBase log_base = LogBase::e;
    double c_coeff = 1.0;
    bool fdma_equal_psd = false;

    std::string label() const { return std::string(to_string(scheme)) + "/" + to_string(bit_alloc); }
};

struct TrialResult {
    std::vector<double> per_user; // slot k*L+i
    std::vector<double> per_cell;
    double sum_rate = 0.0;
    double min_cell_rate = 0.0;
    std::vector<double> rinr_per_cell;
    double rinr_total = 0.0;
    double bound_deterministic = 0.0; // summed over cells
    double bound_packing = 0.0;       // summed over cells
    Assignment assignment;
    std::vector<int> bits;
    std::optional<bool> stable_one_sided;
    std::optional<bool> stable_two_sided;
    int cycles = 0;    // forward-chaining cycles, one-sided scheme only
    int proposals = 0; // Gale-Shapley proposals, two-sided scheme only
    int resamples = 0;
    double alignment_residual = 0.0;
};

struct Throughput {
    double rate = 0.0;
    double residual_trace = 0.0; // Tr(C)
};

// log det(I + (SNR/d_s) G G^H (I + C)^{-1}) for user (i,k) treating all
// other streams as noise; patterns are unit-power, decoders semi-unitary.
inline Throughput throughput(const ChannelRealization& ch, const std::vector<linalg::Subspace>& patterns,
                             const std::vector<linalg::Subspace>& decoders, double snr, int d_s, int i, int k,
                             LogBase base = LogBase::e)
{
    const int K = ch.K(), L = ch.L();
    const CMatrix Uh = decoders[static_cast<std::size_t>(user_slot(L, i, k))].basis().adjoint();
    const double scale = snr / d_s;
    const CMatrix G = Uh * ch.H(i, k, k) * patterns[static_cast<std::size_t>(user_slot(L, i, k))].basis();
    CMatrix C = CMatrix::Zero(G.rows(), G.rows());
    for (int l = 0; l < K; ++l)
        for (int j = 0; j < L; ++j) {
            if (l == k && j == i)
                continue;
            const CMatrix X = Uh * ch.H(j, l, k) * patterns[static_cast<std::size_t>(user_slot(L, j, l))].basis();
            C += scale * X * X.adjoint();
        }
    Throughput t;
    t.residual_trace = C.trace().real();
    const CMatrix I = CMatrix::Identity(G.rows(), G.rows());
    const double with_signal = linalg::log_det_hpd(I + C + scale * G * G.adjoint());
    const double without = linalg::log_det_hpd(I + C);
    t.rate = from_nats(std::max(0.0, with_signal - without), base);
    return t;
}

inline void fill_rates(TrialResult& r, std::vector<double> per_user, int K, int L)
{
    RateSummary s = summarize_rates(std::move(per_user), K, L);
    r.per_user = std::move(s.per_user);
    r.per_cell = std::move(s.per_cell);
    r.sum_rate = s.sum;
    r.min_cell_rate = s.min_cell;
}

// Random isotropic patterns at full power, matched-filter decoders, all interference kept.
inline TrialResult baseline_rb(const ChannelRealization& ch, const SystemConfig& cfg, Rng& rng, LogBase base = LogBase::e)
{
    const int K = ch.K(), L = ch.L();
    std::vector<linalg::Subspace> patterns, decoders;
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i)
            patterns.push_back(random_subspace(rng, cfg.N_U, cfg.d_s));
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i) {
            try {
                decoders.push_back(
                    linalg::orthonormalize(ch.H(i, k, k) * patterns[static_cast<std::size_t>(user_slot(L, i, k))].basis()));
            } catch (const RankDeficiency&) {
                throw DegenerateChannel("baseline_rb: desired image of user (" + std::to_string(i) + "," +
                                        std::to_string(k) + ") is rank deficient");
            }
        }
    TrialResult r;
    std::vector<double> per_user(static_cast<std::size_t>(K * L));
    r.rinr_per_cell.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i) {
            const Throughput t = throughput(ch, patterns, decoders, cfg.snr_linear(), cfg.d_s, i, k, base);
            per_user[static_cast<std::size_t>(user_slot(L, i, k))] = t.rate;
            r.rinr_per_cell[static_cast<std::size_t>(k)] += t.residual_trace;
        }
    fill_rates(r, std::move(per_user), K, L);
    for (double v : r.rinr_per_cell)
        r.rinr_total += v;
    r.bound_deterministic = r.bound_packing = std::numeric_limits<double>::quiet_NaN();
    return r;
}

// Orthogonal bands of width 1/(KL): eigen-beamforming with uniform power over
// d_s streams. Default keeps the full power in the band (noise scales with
// the band); equal_psd spreads the power at the full-band density instead.
inline TrialResult baseline_fdma(const ChannelRealization& ch, const SystemConfig& cfg, bool equal_psd = false,
                                 LogBase base = LogBase::e)
{
    const int K = ch.K(), L = ch.L();
    const double share = 1.0 / (K * L);
    const double snr = equal_psd ? cfg.snr_linear() : cfg.snr_linear() * K * L;
    std::vector<double> per_user(static_cast<std::size_t>(K * L));
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i) {
            const CMatrix& H = ch.H(i, k, k);
            const linalg::RVector ev = linalg::herm_eig(H.adjoint() * H).eigenvalues;
            double acc = 0.0;
            for (int s = 0; s < cfg.d_s; ++s)
                acc += std::log1p(snr / cfg.d_s * std::max(0.0, ev(s)));
            per_user[static_cast<std::size_t>(user_slot(L, i, k))] = from_nats(share * acc, base);
        }
    TrialResult r;
    fill_rates(r, std::move(per_user), K, L);
    r.rinr_per_cell.assign(static_cast<std::size_t>(K), 0.0);
    r.bound_deterministic = r.bound_packing = 0.0;
    return r;
}

struct AssignmentChoice {
    Assignment assignment;
    std::optional<bool> stable_one_sided;
    std::optional<bool> stable_two_sided;
    int cycles = 0;
    int proposals = 0;
};

inline AssignmentChoice choose_assignment(const ChannelRealization& ch, const SystemConfig& cfg,
                                          const PotentialPrecoders& potential, const SchemeSpec& spec)
{
    AssignmentChoice c;
    switch (spec.scheme) {
    case Scheme::fixed:
        c.assignment = fixed_cyclic_assignment(cfg.K);
        break;
    case Scheme::one_sided: {
        const PreferenceProfile prefs = build_preferences(ch, cfg, potential, false);
        const FcaResult fca = fca_match(prefs);
        c.cycles = fca.cycles;
        c.assignment = breaking_step(fca.assignment, prefs);
        if (cfg.K <= kStabilityCap)
            c.stable_one_sided = is_stable(c.assignment, prefs, StabilityMode::one_sided);
        break;
    }
    case Scheme::two_sided: {
        const PreferenceProfile prefs = build_preferences(ch, cfg, potential, true);
        const GaleShapleyResult gs = gale_shapley(prefs, spec.proposer);
        c.proposals = gs.proposals;
        c.assignment = breaking_step(gs.assignment, prefs);
        c.stable_two_sided = is_stable(c.assignment, prefs, StabilityMode::two_sided);
        break;
    }
    case Scheme::centralized_sum:
        c.assignment = centralized_search(ch, cfg, potential, Objective::sum_rate, Sense::best).assignment;
        break;
    case Scheme::centralized_min:
        c.assignment = centralized_search(ch, cfg, potential, Objective::min_cell_rate, Sense::best).assignment;
        break;
    case Scheme::worst_sum:
        c.assignment = centralized_search(ch, cfg, potential, Objective::sum_rate, Sense::worst).assignment;
        break;
    case Scheme::worst_min:
        c.assignment = centralized_search(ch, cfg, potential, Objective::min_cell_rate, Sense::worst).assignment;
        break;
    case Scheme::rb:
    case Scheme::fdma:
        throw ContractViolation("choose_assignment: baseline schemes carry no assignment");
    }
    return c;
}

// Everything after the channel draw, for one realization.
inline TrialResult evaluate_realization(const ChannelRealization& ch, const SystemConfig& cfg, const SchemeSpec& spec,
                                        const PatternQuantizer& quantizer, Rng& aux_rng)
{
    if (spec.scheme == Scheme::rb)
        return baseline_rb(ch, cfg, aux_rng, spec.log_base);
    if (spec.scheme == Scheme::fdma)
        return baseline_fdma(ch, cfg, spec.fdma_equal_psd, spec.log_base);

    const PotentialPrecoders potential(ch, cfg.d_s);
    const AssignmentChoice choice = choose_assignment(ch, cfg, potential, spec);
    const TransceiverSet ts = build_transceivers(ch, cfg, choice.assignment, potential);
    const FeedbackState fb = apply_feedback(ch, ts, spec.bit_alloc, spec.bits, quantizer, aux_rng(), spec.c_coeff);

    const int K = ch.K(), L = ch.L();
    TrialResult r;
    std::vector<double> per_user(static_cast<std::size_t>(K * L));
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i)
            per_user[static_cast<std::size_t>(user_slot(L, i, k))] =
                throughput(ch, fb.quantized, fb.decoders, cfg.snr_linear(), cfg.d_s, i, k, spec.log_base).rate;
    fill_rates(r, std::move(per_user), K, L);
    r.rinr_per_cell = fb.rinr.per_cell;
    r.rinr_total = fb.rinr.total;
    for (double v : fb.bound_deterministic)
        r.bound_deterministic += v;
    for (double v : fb.bound_packing)
        r.bound_packing += v;
    r.assignment = choice.assignment;
    r.bits = fb.allocation.bits;
    r.stable_one_sided = choice.stable_one_sided;
    r.stable_two_sided = choice.stable_two_sided;
    r.cycles = choice.cycles;
    r.proposals = choice.proposals;
    r.alignment_residual = verify_alignment(ch, ts).max_interference_residual;
    return r;
}

// Realization for (seed, trial) before any resampling; shared by every scheme and SNR point.
inline ChannelRealization trial_channels(const SystemConfig& cfg, std::uint64_t seed, std::uint64_t trial, int attempt = 0)
{
    Rng rng = make_stream({seed, trial, static_cast<std::uint64_t>(attempt), stream::channel});
    return draw_channels(cfg, rng);
}

// One Monte-Carlo trial. A numerically degenerate draw is replaced once; a
// second failure aborts with diagnostics.
inline TrialResult run_trial(const SystemConfig& cfg, const SchemeSpec& spec, std::uint64_t trial_index, std::uint64_t seed,
                             const PatternQuantizer& quantizer)
{
    std::string first_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const ChannelRealization ch = trial_channels(cfg, seed, trial_index, attempt);
        Rng aux = make_stream({seed, trial_index, static_cast<std::uint64_t>(attempt),
                               spec.scheme == Scheme::rb ? stream::baseline : stream::quantizer});
        try {
            TrialResult r = evaluate_realization(ch, cfg, spec, quantizer, aux);
            r.resamples = attempt;
            return r;
        } catch (const NumericalFailure& e) {
            if (attempt == 1)
                throw NumericalFailure("trial " + std::to_string(trial_index) + " (" + spec.label() +
                                       ") failed twice: " + first_error + " / " + e.what());
            first_error = e.what();
        } catch (const Infeasible& e) {
            if (attempt == 1)
                throw NumericalFailure("trial " + std::to_string(trial_index) + " (" + spec.label() +
                                       ") failed twice: " + first_error + " / " + e.what());
            first_error = e.what();
        }
    }
    throw NumericalFailure("run_trial: unreachable");
}

struct Metrics {
    double R_sum = 0.0, R_sum_stderr = 0.0;
    double R_min = 0.0, R_min_stderr = 0.0;
    double RINR_dB = 0.0, RINR_dB_stderr = 0.0;
    double bound_dB = 0.0, bound_dB_stderr = 0.0;
    std::size_t trials = 0;
    int resamples = 0;
};

namespace detail {

inline std::pair<double, double> mean_stderr(const std::vector<double>& v)
{
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= n;
    if (v.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// 10 log10 of the mean with a delta-method standard error.
inline std::pair<double, double> db_of_mean(const std::vector<double>& v)
{
    const auto [m, se] = mean_stderr(v);
    if (!(m > 0.0))
        return {m == 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
    return {10.0 * std::log10(m), 10.0 / std::log(10.0) * se / m};
}

} // namespace detail

// Means and standard errors; RINR and bound are 10 log10 of the mean
// sum-cluster value.
inline Metrics aggregate_metrics(const std::vector<TrialResult>& results)
{
    if (results.empty())
        throw ContractViolation("aggregate_metrics: no results");
    std::vector<double> sum, mn, rinr_v, bound_v;
    Metrics m;
    for (const TrialResult& r : results) {
        sum.push_back(r.sum_rate);
        mn.push_back(r.min_cell_rate);
        rinr_v.push_back(r.rinr_total);
        bound_v.push_back(r.bound_packing);
        m.resamples += r.resamples;
    }
    m.trials = results.size();
    std::tie(m.R_sum, m.R_sum_stderr) = detail::mean_stderr(sum);
    std::tie(m.R_min, m.R_min_stderr) = detail::mean_stderr(mn);
    std::tie(m.RINR_dB, m.RINR_dB_stderr) = detail::db_of_mean(rinr_v);
    std::tie(m.bound_dB, m.bound_dB_stderr) = detail::db_of_mean(bound_v);
    return m;
}

enum class SweepVariable { snr_db, bits };

struct SweepSpec {
    SweepVariable variable = SweepVariable::snr_db;
    std::vector<double> grid;
    std::size_t trials = 1;
    std::vector<SchemeSpec> schemes;
    std::uint64_t seed = 1;
    double snr_db = 25.0;       // fixed SNR for a bit sweep
    int bits = 0;               // fixed budget for an SNR sweep
    std::uint64_t codebook_seed = 0;
    int explicit_codebook_max_bits = 12;
    unsigned threads = 1;

    void validate() const
    {
        if (grid.empty())
            throw ContractViolation("SweepSpec: empty grid");
        if (trials < 1)
            throw ContractViolation("SweepSpec: trials must be at least 1");
        if (schemes.empty())
            throw ContractViolation("SweepSpec: no schemes");
        if (variable == SweepVariable::bits)
            for (double b : grid)
                if (b < 0.0 || b != std::floor(b))
                    throw ContractViolation("SweepSpec: bit budgets must be nonnegative integers");
    }
};

struct SweepRow {
    double variable = 0.0;
    std::string scheme;
    Metrics metrics;
};

// Runs trials [0, n) for one grid point and scheme; results stay in trial order.
inline std::vector<TrialResult> run_trials(const SystemConfig& cfg, const SchemeSpec& spec, std::size_t n, std::uint64_t seed,
                                           const PatternQuantizer& quantizer, unsigned threads = 1)
{
    std::vector<TrialResult> out(n);
    if (threads <= 1 || n < 2) {
        for (std::size_t t = 0; t < n; ++t)
            out[t] = run_trial(cfg, spec, t, seed, quantizer);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t t = next++; t < n; t = next++)
                    out[t] = run_trial(cfg, spec, t, seed, quantizer);
            } catch (const std::exception& e) {
                errors[w] = e.what();
                next = n;
            }
        });
    for (auto& th : pool)
        th.join();
    for (const auto& e : errors)
        if (!e.empty())
            throw NumericalFailure(e);
    return out;
}

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SystemConfig& base)
{
    spec.validate();
    const PatternQuantizer quantizer(spec.codebook_seed, spec.explicit_codebook_max_bits);
    std::vector<SweepRow> rows;
    for (double x : spec.grid) {
        SystemConfig cfg = base.with_snr_db(spec.variable == SweepVariable::snr_db ? x : spec.snr_db);
        for (SchemeSpec scheme : spec.schemes) {
            scheme.bits = spec.variable == SweepVariable::bits ? static_cast<int>(x) : spec.bits;
            const auto results = run_trials(cfg, scheme, spec.trials, spec.seed, quantizer, spec.threads);
            rows.push_back({x, scheme.label(), aggregate_metrics(results)});
        }
    }
    return rows;
}

namespace detail {

inline std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace detail

inline const char* kCsvHeader =
    "variable,scheme,R_sum,R_min,RINR_dB,bound_dB,trials,resamples,R_sum_stderr,R_min_stderr,RINR_dB_stderr,bound_dB_stderr";

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << kCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        const Metrics& m = r.metrics;
        os << detail::fmt(r.variable) << ',' << r.scheme << ',' << detail::fmt(m.R_sum) << ',' << detail::fmt(m.R_min) << ','
           << detail::fmt(m.RINR_dB) << ',' << detail::fmt(m.bound_dB) << ',' << m.trials << ',' << m.resamples << ','
           << detail::fmt(m.R_sum_stderr) << ',' << detail::fmt(m.R_min_stderr) << ',' << detail::fmt(m.RINR_dB_stderr)
           << ',' << detail::fmt(m.bound_dB_stderr) << '\n';
    }
}

inline std::string to_csv(const std::vector<SweepRow>& rows)
{
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

inline void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open '" + path + "' for writing");
    write_csv(f, rows);
    f.flush();
    if (!f)
        throw Error("failed writing '" + path + "'");
}

enum class OverheadScheme { one_sided, two_sided, centralized, fixed };

inline OverheadScheme parse_overhead_scheme(const std::string& name)
{
    if (name == "one_sided")
        return OverheadScheme::one_sided;
    if (name == "two_sided")
        return OverheadScheme::two_sided;
    if (name == "centralized")
        return OverheadScheme::centralized;
    if (name == "fixed")
        return OverheadScheme::fixed;
    throw ContractViolation("backhaul_overhead: unknown scheme '" + name + "'");
}

// Complex coefficients (cc) and bits exchanged between BSs, per phase.
struct OverheadReport {
    long long before_cc = 0;
    long long before_bits = 0;
    bool assignment_applicable = true;
    long long assignment_bits_min = 0;
    long long assignment_bits_max = 0;
    long long after_cc = 0;
    long long after_bits = 0;
};

inline OverheadReport backhaul_overhead(OverheadScheme scheme, const SystemConfig& cfg, long long B, int N_C = 1)
{
    const long long K = cfg.K, L = cfg.L, NU = cfg.N_U, NB = cfg.N_B, ds = cfg.d_s;
    // Every matching step carries an action and its response, two bits each.
    constexpr long long kMessageBits = 4;
    OverheadReport r;
    switch (scheme) {
    case OverheadScheme::one_sided:
        r.assignment_bits_min = r.assignment_bits_max = kMessageBits * (K + (N_C - 1));
        r.after_cc = K * L * NU * ds;
        r.after_bits = (K - 1) * B;
        break;
    case OverheadScheme::two_sided:
        r.before_cc = K * (K - 1) * L * NU * ds;
        r.assignment_bits_min = kMessageBits * K;
        r.assignment_bits_max = kMessageBits * (K * K - K + 1);
        r.after_bits = (K - 1) * B;
        break;
    case OverheadScheme::centralized:
        r.before_cc = (K - 1) * (K - 1) * L * NU * ds + (K - 1) * L * NU * NB;
        r.after_cc = (K - 1) * L * NU * ds;
        r.after_bits = (K - 1) * B;
        break;
    case OverheadScheme::fixed:
        r.assignment_applicable = false;
        r.after_cc = K * L * NU * ds;
        break;
    }
    return r;
}

} // namespace gia

#endif
