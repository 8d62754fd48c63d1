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

#ifndef GIA_CONFIG_FILE_HPP
#define GIA_CONFIG_FILE_HPP

// YAML experiment files:
//
//   K: 4
//   L: 2
//   N_B: 14
//   N_U: 8
//   d_s: 2
//   snr_db: [0, 5, 40]   # or a scalar
//   seed: 7
//   trials: 200
//   noise_power: 1.0     # optional
//   bits: 300            # optional, scalar or [start, step, end]

#include <gia/errors.hpp>
#include <gia/system.hpp>

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace gia {

struct ExperimentFile {
    SystemConfig system;
    std::vector<double> snr_db{25.0};
    std::vector<double> bits{0.0};
    std::uint64_t seed = 1;
    std::size_t trials = 100;
};

// Grid start, start+step, ... up to end inclusive (with a small slack for rounding).
inline std::vector<double> expand_grid(double start, double step, double end)
{
    if (!std::isfinite(start) || !std::isfinite(step) || !std::isfinite(end))
        throw ContractViolation("grid bounds must be finite");
    if (step == 0.0) {
        if (start != end)
            throw ContractViolation("grid step is zero");
        return {start};
    }
    if ((end - start) / step < 0.0)
        throw ContractViolation("grid step points away from the end value");
    const auto n = static_cast<long>(std::floor((end - start) / step + 1e-9));
    if (n > 100000)
        throw CapacityError("grid has more than 100000 points");
    std::vector<double> g;
    for (long i = 0; i <= n; ++i)
        g.push_back(start + static_cast<double>(i) * step);
    return g;
}

// "x" or "start:step:end".
inline std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> parts;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t colon = text.find(':', pos);
        const std::string piece = text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(piece, &used);
        } catch (const std::exception&) {
            throw ContractViolation("cannot parse '" + text + "' as a value or start:step:end");
        }
        if (used != piece.size())
            throw ContractViolation("cannot parse '" + text + "' as a value or start:step:end");
        parts.push_back(v);
        if (colon == std::string::npos)
            break;
        pos = colon + 1;
    }
    if (parts.size() == 1)
        return parts;
    if (parts.size() == 3)
        return expand_grid(parts[0], parts[1], parts[2]);
    throw ContractViolation("grid '" + text + "' must be a value or start:step:end");
}

namespace detail {

inline std::vector<double> yaml_grid(const YAML::Node& n, const char* key)
{
    if (n.IsScalar())
        return {n.as<double>()};
    if (n.IsSequence() && n.size() == 3)
        return expand_grid(n[0].as<double>(), n[1].as<double>(), n[2].as<double>());
    throw ContractViolation(std::string("config key '") + key + "' must be a scalar or [start, step, end]");
}

template <typename T>
T yaml_required(const YAML::Node& root, const char* key)
{
    const YAML::Node n = root[key];
    if (!n)
        throw ContractViolation(std::string("config is missing key '") + key + "'");
    try {
        return n.as<T>();
    } catch (const YAML::Exception& e) {
        throw ContractViolation(std::string("config key '") + key + "': " + e.what());
    }
}

} // namespace detail

inline ExperimentFile parse_experiment(const YAML::Node& root)
{
    if (!root.IsMap())
        throw ContractViolation("config must be a mapping");
    ExperimentFile f;
    f.system.K = detail::yaml_required<int>(root, "K");
    f.system.L = detail::yaml_required<int>(root, "L");
    f.system.N_B = detail::yaml_required<int>(root, "N_B");
    f.system.N_U = detail::yaml_required<int>(root, "N_U");
    f.system.d_s = detail::yaml_required<int>(root, "d_s");
    if (root["noise_power"])
        f.system.sigma2 = detail::yaml_required<double>(root, "noise_power");
    if (root["snr_db"])
        f.snr_db = detail::yaml_grid(root["snr_db"], "snr_db");
    if (root["bits"])
        f.bits = detail::yaml_grid(root["bits"], "bits");
    if (root["seed"])
        f.seed = detail::yaml_required<std::uint64_t>(root, "seed");
    if (root["trials"])
        f.trials = detail::yaml_required<std::size_t>(root, "trials");
    f.system = f.system.with_snr_db(f.snr_db.front());
    f.system.validate();
    return f;
}

inline ExperimentFile load_experiment(const std::string& path)
{
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw Error("cannot read config file '" + path + "'");
    } catch (const YAML::Exception& e) {
        throw ContractViolation("config file '" + path + "': " + e.what());
    }
    return parse_experiment(root);
}

} // namespace gia

#endif
