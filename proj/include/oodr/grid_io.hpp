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

#include "oodr/types.hpp"

#include <filesystem>

namespace oodr {

/// Dataset CSV grid format:
///
///     H,W,C
///     label,v_0,...,v_{H*W*C-1}[,source_id:method]
///
/// Values are row-major (HWC). The optional trailing provenance column is
/// written for surrogates. Zero sample rows are accepted by the reader.
std::vector<SampleGrid> read_grid_csv(const std::filesystem::path& path);

void write_grid_csv(const std::vector<SampleGrid>& samples, const std::filesystem::path& path);

/// Writes with an explicit shape so an empty sample list still yields a valid file.
void write_grid_csv(const std::vector<SampleGrid>& samples, const std::filesystem::path& path, int height, int width,
                    int channels);

/// Wraps labeled samples; class_count = max label + 1, inverse-frequency weights.
LabeledDataset make_dataset(std::vector<SampleGrid> samples);

}  // namespace oodr
