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
#include "oodr/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace oodr {

enum class NegativeKind { Id, Surrogate };

/// Anchor, positive and negatives are row indices into an embedding matrix.
struct Tuplet {
    std::size_t anchor = 0;
    std::size_t positive = 0;
    std::vector<std::size_t> negatives;
    NegativeKind kind = NegativeKind::Id;
};

/// How each objective term combines its per-tuplet (per-sample) losses within a batch.
enum class TermReduction { Mean, Sum };

struct LossConfig {
    double scale_s = 64.0;
    double margin_deg = 5.73;
    int class_count = 2;
    // Weights of the ID tuplet, surrogate tuplet and cross-entropy terms.
    std::array<double, 3> lambda_terms{1.0, 1.0, 1.0};
    TermReduction reduction = TermReduction::Mean;

    double margin_rad() const;
};

void validate(const LossConfig& cfg);

struct LossGrad {
    double loss = 0.0;
    Matrix grads;
};

/// Tuplet margin loss
///
///     log(1 + sum_i exp(s * (cos(a, n_i) - cos(theta_ap - beta))))
///
/// evaluated in log-sum-exp form on unit-norm rows, where cos is the dot
/// product. `grads` has the shape of `embeddings`; only participating rows
/// are nonzero. With beta = 0 the positive term is cos(a, p) exactly.
LossGrad tuplet_loss(const Matrix& embeddings, const Tuplet& tuplet, const LossConfig& cfg);

/// Same as tuplet_loss but adds `scale * grad` into `grad_accum` and skips
/// the normalization check. Returns the loss.
double accumulate_tuplet_loss(const Matrix& embeddings, const Tuplet& tuplet, const LossConfig& cfg, double scale,
                              Matrix& grad_accum);

/// Weighted mean of -log softmax(logits)[label]; weights indexed by class.
/// Empty `class_weights` means unit weights.
LossGrad cross_entropy(const Matrix& logits, std::span<const int> labels, std::span<const double> class_weights = {});

struct TotalLoss {
    double loss = 0.0;
    std::array<double, 3> terms{};  // unweighted ID tuplet, surrogate tuplet, cross-entropy
    EncoderModel param_grads;
};

/// Combined objective over one batch: lambda_0 * ID tuplet term + lambda_1 *
/// surrogate tuplet term + lambda_2 * cross-entropy over labeled rows
/// (label >= 0). Tuplet indices refer to rows of `batch`.
TotalLoss total_loss(const EncoderModel& model, std::span<const Tuplet> id_tuplets,
                     std::span<const Tuplet> ood_tuplets, const Matrix& batch, std::span<const int> labels,
                     const LossConfig& cfg, std::span<const double> class_weights = {});

}  // namespace oodr
