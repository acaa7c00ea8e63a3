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

#include "oodr/losses.hpp"
#include "oodr/rerank.hpp"
#include "oodr/surrogate.hpp"
#include "oodr/train.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace oodr {

/// Every tunable of a run. Serialized as flat `key=value` lines.
struct RunConfig {
    std::uint64_t seed = 0;
    std::vector<int> hidden_layers{64, 32};
    int embedding_dim = 16;
    LossConfig loss;
    TrainSchedule schedule;
    int pretrain_epochs = 0;
    ReRankConfig rerank;
    SurrogateOptions surrogate;
    int jobs = 1;

    /// Keys in serialization order.
    static const std::vector<std::string>& keys();

    std::string get(const std::string& key) const;
    /// Throws InputError for unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);

    std::string to_text() const;
    void write(const std::filesystem::path& path) const;

    /// Applies `key=value` lines from a file (blank lines and # comments ignored).
    void load(const std::filesystem::path& path);

    /// layer_sizes for an encoder reading `input_dim` values.
    std::vector<int> layer_sizes(int input_dim) const;
};

}  // namespace oodr
