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

// gia: command-line front end.
//
//   gia simulate --config demos/worst_case.yaml --assignment fixed,one_sided --bit-alloc dba --bits 100:100:500
//   gia feasibility --K 4 --L 2 --N_B 14 --N_U 8 --d_s 2
//   gia overhead --bits 300 --cycles 1
//   gia dump-codebook --M 8 --N 2 --B 6 --out book.bin
//
// Exit codes: 0 success, 1 usage or other error, 2 infeasible configuration, 3 numerical failure.

#include <gia/config_file.hpp>
#include <gia/gia.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;

struct SystemFlags {
    int K = 4, L = 2, N_B = 14, N_U = 8, d_s = 2;

    void add(CLI::App& app)
    {
        app.add_option("--K", K, "cells")->capture_default_str();
        app.add_option("--L", L, "users per cell")->capture_default_str();
        app.add_option("--N_B", N_B, "antennas per base station")->capture_default_str();
        app.add_option("--N_U", N_U, "antennas per user")->capture_default_str();
        app.add_option("--d_s", d_s, "streams per user")->capture_default_str();
    }

    gia::SystemConfig config() const
    {
        gia::SystemConfig c;
        c.K = K;
        c.L = L;
        c.N_B = N_B;
        c.N_U = N_U;
        c.d_s = d_s;
        return c;
    }
};

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, sep))
        if (!piece.empty())
            out.push_back(piece);
    return out;
}

void require_feasible(const gia::SystemConfig& cfg)
{
    cfg.validate();
    const gia::FeasibilityReport rep = gia::validate_feasibility(cfg);
    if (!rep.feasible)
        throw gia::Infeasible("configuration (K,L,N_B,N_U,d_s) = (" + std::to_string(cfg.K) + "," + std::to_string(cfg.L) +
                              "," + std::to_string(cfg.N_B) + "," + std::to_string(cfg.N_U) + "," +
                              std::to_string(cfg.d_s) + ") admits no alignment\n" + rep.describe());
}

struct SimulateFlags {
    std::string config;
    SystemFlags system;
    std::string assignment = "fixed";
    std::string bit_alloc = "none";
    std::string bits;
    std::string snr;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string log_base = "e";
    std::uint64_t codebook_seed = 0;
    double c_coeff = 1.0;
    std::string proposer = "receivers";
    std::string fdma_power = "full";
    int explicit_max_bits = 12;
    unsigned threads = 1;
};

// `given` lists the system flags present on the command line; they override the file.
int run_simulate(const SimulateFlags& f, bool trials_set, const std::vector<std::string>& given)
{
    gia::ExperimentFile exp;
    if (!f.config.empty())
        exp = gia::load_experiment(f.config);
    auto take = [&](const char* name, int& field, int value) {
        if (f.config.empty() || std::find(given.begin(), given.end(), name) != given.end())
            field = value;
    };
    take("--K", exp.system.K, f.system.K);
    take("--L", exp.system.L, f.system.L);
    take("--N_B", exp.system.N_B, f.system.N_B);
    take("--N_U", exp.system.N_U, f.system.N_U);
    take("--d_s", exp.system.d_s, f.system.d_s);
    if (!f.snr.empty())
        exp.snr_db = gia::parse_grid(f.snr);
    if (!f.bits.empty())
        exp.bits = gia::parse_grid(f.bits);
    if (trials_set)
        exp.trials = f.trials;
    if (f.seed_set)
        exp.seed = f.seed;
    require_feasible(exp.system);

    gia::SweepSpec spec;
    if (exp.bits.size() > 1 && exp.snr_db.size() > 1)
        throw gia::ContractViolation("sweep either --snr or --bits, not both");
    if (exp.bits.size() > 1) {
        spec.variable = gia::SweepVariable::bits;
        spec.grid = exp.bits;
        spec.snr_db = exp.snr_db.front();
    } else {
        spec.variable = gia::SweepVariable::snr_db;
        spec.grid = exp.snr_db;
        const double b = exp.bits.front();
        if (b < 0.0 || b != std::floor(b))
            throw gia::ContractViolation("--bits must be a nonnegative integer");
        spec.bits = static_cast<int>(b);
    }
    spec.trials = exp.trials;
    spec.seed = exp.seed;
    spec.codebook_seed = f.codebook_seed;
    spec.explicit_codebook_max_bits = f.explicit_max_bits;
    spec.threads = f.threads;

    const gia::BitAllocMode mode = gia::parse_bit_alloc(f.bit_alloc);
    for (const std::string& name : split(f.assignment, ',')) {
        gia::SchemeSpec s;
        s.scheme = gia::parse_scheme(name);
        s.bit_alloc = s.scheme == gia::Scheme::rb || s.scheme == gia::Scheme::fdma ? gia::BitAllocMode::none : mode;
        s.log_base = f.log_base == "2" ? gia::LogBase::two : gia::LogBase::e;
        s.c_coeff = f.c_coeff;
        s.proposer = f.proposer == "providers" ? gia::Proposer::providers : gia::Proposer::receivers;
        s.fdma_equal_psd = f.fdma_power == "equal-psd";
        spec.schemes.push_back(s);
    }
    if (mode != gia::BitAllocMode::none && spec.variable == gia::SweepVariable::snr_db && spec.bits == 0)
        std::cerr << "note: --bit-alloc " << f.bit_alloc << " with a zero budget quantizes to single-codeword books\n";

    const std::vector<gia::SweepRow> rows = gia::run_sweep(spec, exp.system);
    if (f.out.empty() || f.out == "-")
        gia::write_csv(std::cout, rows);
    else
        gia::write_csv_file(f.out, rows);
    return kExitOk;
}

int run_feasibility(const SystemFlags& s)
{
    const gia::SystemConfig cfg = s.config();
    cfg.validate();
    const gia::FeasibilityReport rep = gia::validate_feasibility(cfg);
    std::cout << rep.describe();
    return rep.feasible ? kExitOk : kExitInfeasible;
}

int run_overhead(const SystemFlags& s, const std::string& scheme, long long bits, int cycles)
{
    const gia::SystemConfig cfg = s.config();
    cfg.validate();
    std::vector<std::string> names = {"one_sided", "two_sided", "centralized", "fixed"};
    if (!scheme.empty())
        names = {scheme};
    std::cout << "scheme,before_cc,before_bits,assignment_bits_min,assignment_bits_max,after_cc,after_bits\n";
    for (const std::string& n : names) {
        const gia::OverheadReport r = gia::backhaul_overhead(gia::parse_overhead_scheme(n), cfg, bits, cycles);
        std::cout << n << ',' << r.before_cc << ',' << r.before_bits << ',';
        if (r.assignment_applicable)
            std::cout << r.assignment_bits_min << ',' << r.assignment_bits_max;
        else
            std::cout << "-,-";
        std::cout << ',' << r.after_cc << ',' << r.after_bits << '\n';
    }
    return kExitOk;
}

// Header: M, N, B as int32; then 2^B codewords, each M x N row-major with interleaved re/im doubles.
int run_dump_codebook(int M, int N, int B, std::uint64_t seed, int slot, const std::string& path)
{
    const gia::PatternQuantizer q(seed, gia::kMaxCodebookBits);
    const auto cb = q.codebook(M, N, B, slot);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw gia::Error("cannot open '" + path + "' for writing");
    const std::int32_t header[3] = {M, N, B};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    for (Eigen::Index n = 0; n < cb->size(); ++n) {
        const gia::linalg::CMatrix& C = cb->codeword(n).basis();
        for (Eigen::Index r = 0; r < C.rows(); ++r)
            for (Eigen::Index c = 0; c < C.cols(); ++c) {
                const double v[2] = {C(r, c).real(), C(r, c).imag()};
                out.write(reinterpret_cast<const char*>(v), sizeof v);
            }
    }
    out.flush();
    if (!out)
        throw gia::Error("failed writing '" + path + "'");
    std::cerr << "wrote " << cb->size() << " codewords of G(" << M << "," << N << ") to " << path << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Grouping-based interference alignment simulator"};
    app.require_subcommand(1);

    SimulateFlags sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo sweep, CSV output");
    simulate->add_option("--config", sim.config, "YAML experiment file")->check(CLI::ExistingFile);
    sim.system.add(*simulate);
    simulate->add_option("--assignment", sim.assignment,
                         "comma list of one_sided, two_sided, centralized_sum, centralized_min, fixed, worst_sum, "
                         "worst_min, rb, fdma")
        ->capture_default_str();
    simulate->add_option("--bit-alloc", sim.bit_alloc, "feedback bit allocation")
        ->check(CLI::IsMember({"none", "dba", "eba"}))
        ->capture_default_str();
    simulate->add_option("--bits", sim.bits, "total feedback bits: B or start:step:end");
    simulate->add_option("--snr", sim.snr, "SNR in dB: x or start:step:end");
    CLI::Option* trials_opt = simulate->add_option("--trials", sim.trials, "trials per grid point")->check(CLI::PositiveNumber);
    CLI::Option* seed_opt = simulate->add_option("--seed", sim.seed, "channel seed");
    simulate->add_option("--out", sim.out, "CSV path (stdout when omitted)");
    simulate->add_option("--log-base", sim.log_base, "rate unit")->check(CLI::IsMember({"e", "2"}))->capture_default_str();
    simulate->add_option("--codebook-seed", sim.codebook_seed, "seed of the random codebooks")->capture_default_str();
    simulate->add_option("--c-coeff", sim.c_coeff, "coefficient of the packing distortion bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--proposer", sim.proposer, "proposing side of the two-sided matching")
        ->check(CLI::IsMember({"receivers", "providers"}))
        ->capture_default_str();
    simulate->add_option("--fdma-power", sim.fdma_power, "FDMA power model")
        ->check(CLI::IsMember({"full", "equal-psd"}))
        ->capture_default_str();
    simulate->add_option("--explicit-codebook-max-bits", sim.explicit_max_bits,
                         "largest per-user bit count quantized against an explicit codebook")
        ->check(CLI::Range(0, gia::kMaxCodebookBits))
        ->capture_default_str();
    simulate->add_option("--threads", sim.threads, "worker threads per grid point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    SystemFlags feas;
    CLI::App* feasibility = app.add_subcommand("feasibility", "check the antenna inequalities");
    feas.add(*feasibility);

    SystemFlags over;
    std::string over_scheme;
    long long over_bits = 300;
    int over_cycles = 1;
    CLI::App* overhead = app.add_subcommand("overhead", "backhaul overhead per scheme");
    over.add(*overhead);
    overhead->add_option("--scheme", over_scheme, "one_sided, two_sided, centralized or fixed (all when omitted)");
    overhead->add_option("--bits", over_bits, "total feedback bits B")->check(CLI::NonNegativeNumber)->capture_default_str();
    overhead->add_option("--cycles", over_cycles, "forward-chaining cycles N_C")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    int dM = 8, dN = 2, dB = 6, dslot = 0;
    std::uint64_t dseed = 0;
    std::string dpath;
    CLI::App* dump = app.add_subcommand("dump-codebook", "write a codebook as binary");
    dump->add_option("--M", dM, "ambient dimension")->capture_default_str();
    dump->add_option("--N", dN, "subspace dimension")->capture_default_str();
    dump->add_option("--B", dB, "bits")->check(CLI::Range(0, gia::kMaxCodebookBits))->capture_default_str();
    dump->add_option("--seed", dseed, "codebook seed")->capture_default_str();
    dump->add_option("--slot", dslot, "user slot k*L+i")->capture_default_str();
    dump->add_option("--out", dpath, "output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*simulate) {
            sim.seed_set = seed_opt->count() > 0;
            std::vector<std::string> given;
            for (const char* name : {"--K", "--L", "--N_B", "--N_U", "--d_s"})
                if (simulate->get_option(name)->count() > 0)
                    given.emplace_back(name);
            return run_simulate(sim, trials_opt->count() > 0, given);
        }
        if (*feasibility)
            return run_feasibility(feas);
        if (*overhead)
            return run_overhead(over, over_scheme, over_bits, over_cycles);
        if (*dump)
            return run_dump_codebook(dM, dN, dB, dseed, dslot, dpath);
    } catch (const gia::Infeasible& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const gia::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
