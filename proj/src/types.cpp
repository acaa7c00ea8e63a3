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

#include "oodr/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace oodr {

EmbeddingSet make_embedding_set(Matrix vectors, std::vector<int> labels, bool normalized) {
    EmbeddingSet set;
    const auto n = static_cast<std::size_t>(vectors.rows());
    set.vectors = std::move(vectors);
    set.labels = labels.empty() ? std::vector<int>(n, kUnlabeled) : std::move(labels);
    set.normalized = normalized;
    set.ids.resize(n);
    std::iota(set.ids.begin(), set.ids.end(), std::uint64_t{0});
    return set;
}

void validate(const EmbeddingSet& set) {
    if (set.vectors.rows() < 1) throw InputError("embedding set is empty (N >= 1 required)");
    if (set.vectors.cols() < 1) throw InputError("embedding dimension is zero (D >= 1 required)");
    if (set.labels.size() != set.size())
        throw InputError("label count " + std::to_string(set.labels.size()) + " does not match N = " +
                         std::to_string(set.size()));
    if (set.ids.size() != set.size())
        throw InputError("id count " + std::to_string(set.ids.size()) + " does not match N = " +
                         std::to_string(set.size()));
    for (Eigen::Index r = 0; r < set.vectors.rows(); ++r) {
        if (!set.vectors.row(r).allFinite())
            throw InputError("row " + std::to_string(r) + " contains a non-finite value");
        if (set.normalized) {
            const double norm = set.vectors.row(r).norm();
            if (std::abs(norm - 1.0) > 1e-9) {
                std::ostringstream msg;
                msg << "row " << r << " has norm " << norm << " but the set is flagged normalized";
                throw InputError(msg.str());
            }
        }
    }
    std::unordered_set<std::uint64_t> seen;
    for (auto id : set.ids)
        if (!seen.insert(id).second) throw InputError("duplicate sample id " + std::to_string(id));
}

void validate(const SampleGrid& grid) {
    if (grid.height < 1 || grid.width < 1 || grid.channels < 1)
        throw InputError("sample grid dimensions must be positive");
    if (grid.data.size() != static_cast<Eigen::Index>(grid.height) * grid.width * grid.channels)
        throw InputError("sample grid payload size does not match H*W*C");
    for (Eigen::Index i = 0; i < grid.data.size(); ++i) {
        const double v = grid.data[i];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw InputError("sample grid value " + std::to_string(v) + " at offset " + std::to_string(i) +
                             " is outside [0,1]");
    }
}

std::vector<double> inverse_frequency_weights(const std::vector<int>& labels, int class_count) {
    std::vector<double> counts(static_cast<std::size_t>(class_count), 0.0);
    std::size_t total = 0;
    for (int label : labels) {
        if (label < 0 || label >= class_count) continue;
        counts[static_cast<std::size_t>(label)] += 1.0;
        ++total;
    }
    std::vector<double> weights(counts.size(), 1.0);
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] > 0) weights[c] = static_cast<double>(total) / (class_count * counts[c]);
    return weights;
}

void validate(const LabeledDataset& dataset) {
    if (dataset.class_count < 1) throw InputError("class_count must be positive");
    if (dataset.class_weights.size() != static_cast<std::size_t>(dataset.class_count))
        throw InputError("class_weights must have one entry per class");
    double sum = 0.0;
    for (double w : dataset.class_weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw InputError("class weights must be finite and positive");
        sum += w;
    }
    if (!std::isfinite(sum)) throw InputError("class weight sum is not finite");
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& s = dataset.samples[i];
        if (s.label < 0 || s.label >= dataset.class_count)
            throw InputError("sample " + std::to_string(i) + " has label " + std::to_string(s.label) +
                             " outside [0," + std::to_string(dataset.class_count) + ")");
        const auto& first = dataset.samples.front();
        if (s.height != first.height || s.width != first.width || s.channels != first.channels)
            throw InputError("sample " + std::to_string(i) + " shape differs from sample 0");
    }
}

Matrix flatten(const std::vector<SampleGrid>& samples) {
    if (samples.empty()) return Matrix(0, 0);
    Matrix out(static_cast<Eigen::Index>(samples.size()), samples.front().size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() != out.cols()) throw InputError("samples have differing sizes");
        out.row(static_cast<Eigen::Index>(i)) = samples[i].data.transpose();
    }
    return out;
}

}  // namespace oodr
