// Copyright 2026 The oodr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "oodr/config.hpp"
#include "oodr/metrics.hpp"

#include <string>
#include <vector>

namespace oodr {

/// Gaussian blobs laid out on a rows x cols single-channel grid.
///
/// Class k's mean is base + h * u_k, where u_k is the unit vector spread
/// evenly over block k of the grid_rows x grid_cols split, so class means are
/// class_gap_sigma * sigma apart. The OoD mean lifts the first block no class
/// uses, placed ood_gap_sigma * sigma from every class mean.
struct SyntheticParams {
    int rows = 4;
    int cols = 8;
    int grid_rows = 2;
    int grid_cols = 2;
    int classes = 3;
    double sigma = 0.03;
    double base = 0.5;
    double class_gap_sigma = 6.0;
    double ood_gap_sigma = 8.0;
    int train_per_class = 100;
    int test_per_class = 50;
    int ood_count = 150;
};

struct SyntheticData {
    std::vector<SampleGrid> train;
    std::vector<SampleGrid> test_id;
    std::vector<SampleGrid> ood;
    std::vector<Vector> class_means;
    Vector ood_mean;
};

SyntheticData make_synthetic(const SyntheticParams& params, std::uint64_t seed);

enum class BenchArm { Full, NoIdTuplet, NoOodTuplet, NoCe, NoKReciprocal, MaxSoftmax };

std::string to_string(BenchArm arm);
BenchArm parse_bench_arm(const std::string& name);
const std::vector<BenchArm>& all_bench_arms();

struct ArmResult {
    BenchArm arm = BenchArm::Full;
    double tnr_at_tpr95 = 0.0;
    double auroc = 0.0;
    double detection_accuracy = 0.0;
    std::vector<double> id_scores;
    std::vector<double> ood_scores;
};

struct BenchResult {
    std::uint64_t seed = 0;
    std::vector<ArmResult> arms;
    double seconds = 0.0;
};

/// Training and scoring settings used by the synthetic benchmark.
RunConfig bench_config();

/// Generates data from `seed`, trains the models each arm needs (permutation
/// surrogates), scores test ID and OoD points against the training gallery,
/// and evaluates. The msp arm uses a cross-entropy-only model.
BenchResult run_bench(const RunConfig& cfg, std::uint64_t seed, const std::vector<BenchArm>& arms,
                      const SyntheticParams& params = {});

std::string format_bench_report(const BenchResult& result);

}  // namespace oodr
