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

#include <gia/config_file.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

using namespace gia;

TEST(Grid, ScalarAndRange)
{
    EXPECT_EQ(parse_grid("25"), std::vector<double>{25.0});
    EXPECT_EQ(parse_grid("0:5:40").size(), 9u);
    EXPECT_EQ(parse_grid("100:100:500"), (std::vector<double>{100, 200, 300, 400, 500}));
    const auto g = parse_grid("0:0.1:1");
    ASSERT_EQ(g.size(), 11u);
    EXPECT_NEAR(g.back(), 1.0, 1e-12);
    EXPECT_EQ(parse_grid("3:0:3"), std::vector<double>{3.0});
}

TEST(Grid, Rejects)
{
    EXPECT_THROW(parse_grid("abc"), ContractViolation);
    EXPECT_THROW(parse_grid("1:2"), ContractViolation);
    EXPECT_THROW(parse_grid("5:1:0"), ContractViolation);
    EXPECT_THROW(parse_grid("0:0:1"), ContractViolation);
    EXPECT_THROW(parse_grid("10x"), ContractViolation);
    EXPECT_THROW(parse_grid("0:1e-9:1"), CapacityError);
}

TEST(Experiment, FullFile)
{
    const ExperimentFile f = parse_experiment(YAML::Load(R"(
K: 4
L: 2
N_B: 14
N_U: 8
d_s: 2
snr_db: [0, 10, 40]
bits: 300
seed: 7
trials: 25
noise_power: 2.0
)"));
    EXPECT_EQ(f.system.K, 4);
    EXPECT_EQ(f.system.N_B, 14);
    EXPECT_EQ(f.snr_db, (std::vector<double>{0, 10, 20, 30, 40}));
    EXPECT_EQ(f.bits, std::vector<double>{300});
    EXPECT_EQ(f.seed, 7u);
    EXPECT_EQ(f.trials, 25u);
    EXPECT_DOUBLE_EQ(f.system.sigma2, 2.0);
    EXPECT_NEAR(f.system.snr_db(), 0.0, 1e-12);
}

TEST(Experiment, Defaults)
{
    const ExperimentFile f = parse_experiment(YAML::Load("{K: 3, L: 1, N_B: 5, N_U: 3, d_s: 1}"));
    EXPECT_EQ(f.snr_db, std::vector<double>{25.0});
    EXPECT_NEAR(f.system.snr_db(), 25.0, 1e-12);
    EXPECT_EQ(f.seed, 1u);
}

TEST(Experiment, Errors)
{
    EXPECT_THROW(parse_experiment(YAML::Load("[1, 2]")), ContractViolation);
    EXPECT_THROW(parse_experiment(YAML::Load("{K: 4, L: 2, N_B: 14, N_U: 8}")), ContractViolation);
    EXPECT_THROW(parse_experiment(YAML::Load("{K: four, L: 2, N_B: 14, N_U: 8, d_s: 2}")), ContractViolation);
    EXPECT_THROW(parse_experiment(YAML::Load("{K: 4, L: 2, N_B: 14, N_U: 8, d_s: 2, snr_db: [1, 2]}")), ContractViolation);
    EXPECT_THROW(parse_experiment(YAML::Load("{K: 4, L: 2, N_B: 14, N_U: 8, d_s: 0}")), ContractViolation);
}

TEST(Experiment, LoadFromDisk)
{
    const std::string path = testing::TempDir() + "gia_config_test.yaml";
    {
        std::ofstream out(path);
        out << "K: 4\nL: 2\nN_B: 14\nN_U: 8\nd_s: 2\nsnr_db: 30\n";
    }
    const ExperimentFile f = load_experiment(path);
    EXPECT_EQ(f.snr_db, std::vector<double>{30.0});
    std::remove(path.c_str());
    EXPECT_THROW(load_experiment(path), Error);
}
