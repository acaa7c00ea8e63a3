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

#include "oodr/rng.hpp"
#include "oodr/types.hpp"

#include <filesystem>
#include <vector>

namespace oodr {

enum class Activation : std::uint32_t { Tanh = 1 };

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;
};

/// Fully connected encoder f with a linear classifier head g.
///
/// Hidden layers apply tanh; the last layer is linear and its output is
/// L2-normalized to give the embedding. Logits are head_weights * e + head_bias.
struct EncoderModel {
    std::vector<int> layer_sizes;  // D0, hidden..., De
    std::vector<DenseLayer> layers;
    Matrix head_weights;  // C x De
    Vector head_bias;
    Activation activation = Activation::Tanh;

    int input_dim() const { return layer_sizes.front(); }
    int embedding_dim() const { return layer_sizes.back(); }
    int class_count() const { return static_cast<int>(head_weights.rows()); }
    Eigen::Index parameter_count() const;
};

/// Xavier-uniform weights, small uniform biases.
EncoderModel make_encoder(const std::vector<int>& layer_sizes, int class_count, Rng& rng);

/// Same shapes, all parameters zero.
EncoderModel zeros_like(const EncoderModel& model);
EncoderModel make_zero_encoder(const std::vector<int>& layer_sizes, int class_count);

/// Parameters flattened in checkpoint order: per layer W (row-major) then b, then head W, head b.
Vector pack_parameters(const EncoderModel& model);
void unpack_parameters(EncoderModel& model, const Vector& packed);

/// Intermediate values kept for backpropagation.
struct ForwardPass {
    std::vector<Matrix> inputs;  // input to each dense layer
    Matrix raw_embeddings;       // last layer output before normalization
    Vector norms;
    Matrix embeddings;
    Matrix logits;
};

ForwardPass forward_pass(const EncoderModel& model, const Matrix& batch);

struct Forward {
    Matrix embeddings;
    Matrix logits;
};

/// Embeddings (unit rows, N x De) and logits (N x C) for a batch of flattened inputs.
Forward forward(const EncoderModel& model, const Matrix& batch);

/// Logits from already computed embeddings.
Matrix head_logits(const EncoderModel& model, const Matrix& embeddings);

struct Backward {
    EncoderModel param_grads;
    Matrix input_grads;
};

/// Backpropagates upstream gradients w.r.t. embeddings and logits.
Backward backward(const EncoderModel& model, const ForwardPass& pass, const Matrix& d_embeddings,
                  const Matrix& d_logits);

inline constexpr std::uint32_t kEncmVersion = 1;

/// ENCM checkpoint: "ENCM" | u32 version | u32 activation | u32 L | L x u32 layer sizes
/// | u32 class_count | f64 parameters (pack_parameters order), little-endian.
void write_checkpoint(const EncoderModel& model, const std::filesystem::path& path);
EncoderModel read_checkpoint(const std::filesystem::path& path);

}  // namespace oodr
