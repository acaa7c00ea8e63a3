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

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oodr {

/// Row-major dense matrix; one sample per row.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Matrix = RowMatrix<double>;
using Vector = Eigen::VectorXd;

inline constexpr int kUnlabeled = -1;

/// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, violated preconditions, bad arguments.
class InputError : public Error {
public:
    using Error::Error;
};

/// Non-finite values produced during computation (training divergence etc).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Feature vectors plus labels. Rows are samples.
struct EmbeddingSet {
    Matrix vectors;
    std::vector<int> labels;
    bool normalized = false;
    std::vector<std::uint64_t> ids;

    std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
};

/// Builds a set with ids 0..N-1; labels default to kUnlabeled.
EmbeddingSet make_embedding_set(Matrix vectors, std::vector<int> labels = {}, bool normalized = false);

/// Throws InputError describing the first violated invariant.
void validate(const EmbeddingSet& set);

/// height x width x channels scalars in [0,1], stored row-major (HWC).
struct SampleGrid {
    int height = 0;
    int width = 0;
    int channels = 0;
    Vector data;
    int label = kUnlabeled;
    // Provenance for surrogates: index of the source sample and the method name.
    std::int64_t source_id = -1;
    std::string origin;

    SampleGrid() = default;
    SampleGrid(int h, int w, int c, int label_ = kUnlabeled)
        : height(h), width(w), channels(c), data(Vector::Zero(static_cast<Eigen::Index>(h) * w * c)), label(label_) {}

    Eigen::Index index(int row, int col, int ch) const {
        return (static_cast<Eigen::Index>(row) * width + col) * channels + ch;
    }
    double& at(int row, int col, int ch = 0) { return data[index(row, col, ch)]; }
    double at(int row, int col, int ch = 0) const { return data[index(row, col, ch)]; }
    Eigen::Index size() const { return data.size(); }
};

void validate(const SampleGrid& grid);

struct LabeledDataset {
    std::vector<SampleGrid> samples;
    int class_count = 0;
    std::vector<double> class_weights;
};

/// Inverse-frequency weights N / (C * n_c); classes without samples get 1.
std::vector<double> inverse_frequency_weights(const std::vector<int>& labels, int class_count);

/// Labels in [0,C), weights positive, all samples share one shape.
void validate(const LabeledDataset& dataset);

/// Stacks flattened samples into an N x (H*W*C) matrix.
Matrix flatten(const std::vector<SampleGrid>& samples);

}  // namespace oodr
