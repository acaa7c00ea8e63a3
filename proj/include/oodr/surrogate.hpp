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

#include "oodr/encoder.hpp"
#include "oodr/rng.hpp"
#include "oodr/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oodr {

/// Splits a grid into grid_rows x grid_cols equal blocks. Output block i is
/// input block permutation[i] (blocks numbered row-major). An empty
/// permutation asks permute_parts to draw a random non-identity one.
struct PermutationSpec {
    int grid_rows = 2;
    int grid_cols = 2;
    std::vector<int> permutation;
};

/// Throws unless `permutation` is a non-identity bijection on [0, rows*cols).
void validate(const PermutationSpec& spec);

std::vector<int> inverse_permutation(const std::vector<int>& permutation);

/// Uniformly random permutation of [0,n) other than the identity (n >= 2).
std::vector<int> random_non_identity_permutation(int n, Rng& rng);

SampleGrid permute_parts(const SampleGrid& sample, const PermutationSpec& spec, Rng& rng);

struct SaliencyMap {
    Eigen::MatrixXd values;  // height x width, non-negative
    bool degenerate = false;  // all zero
};

/// |d logit_c / d pixel| summed over channels, c the predicted class
/// (lowest index on ties). Computed by backpropagation through the encoder.
SaliencyMap saliency_map(const EncoderModel& model, const SampleGrid& sample);

struct Window {
    int row = 0;
    int col = 0;
};

struct HideResult {
    SampleGrid sample;
    Window replaced;  // highest-saliency window, overwritten
    Window source;    // lowest-saliency window, copied from
};

/// Overwrites the patch_h x patch_w window with the highest summed saliency
/// by a copy of the window with the lowest summed saliency. Ties go to the
/// lexicographically smallest (row, col). Throws InputError when the map is
/// degenerate or every candidate window has the same sum; callers fall back
/// to permute_parts.
HideResult hide_salient(const SampleGrid& sample, const SaliencyMap& map, int patch_h, int patch_w);

enum class SurrogateMethod { Permute, Hide };

std::string to_string(SurrogateMethod method);
SurrogateMethod parse_surrogate_method(const std::string& name);

struct SurrogateOptions {
    SurrogateMethod method = SurrogateMethod::Permute;
    int count_per_sample = 1;
    int grid_rows = 2;
    int grid_cols = 2;
    int patch_h = 0;  // 0 means half the sample height
    int patch_w = 0;  // 0 means half the sample width
};

struct SurrogateBatch {
    std::vector<SampleGrid> samples;
    std::vector<std::string> warnings;
};

/// Surrogates are labeled kUnlabeled and carry source_id (sample index) and
/// origin (method name). Sample i draws from rng stream split(seed, i), so
/// output does not depend on evaluation order. For Hide, the k-th surrogate
/// of a sample hides the most salient window of the (k-1)-th, recomputing
/// saliency each time; `model` is required. Per-sample failures are skipped
/// with a warning.
SurrogateBatch generate_surrogates(const std::vector<SampleGrid>& samples, const EncoderModel* model,
                                   const SurrogateOptions& options, std::uint64_t seed);

/// Hide surrogates from externally supplied saliency maps (one per sample).
SurrogateBatch generate_surrogates_from_maps(const std::vector<SampleGrid>& samples,
                                             const std::vector<SaliencyMap>& maps, const SurrogateOptions& options);

}  // namespace oodr
