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
#include "oodr/losses.hpp"
#include "oodr/rng.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace oodr {

struct TupletSet {
    std::vector<Tuplet> id;
    std::vector<Tuplet> ood;
    std::vector<std::string> warnings;
};

/// Samples tuplets over one batch.
///
/// Every labeled, non-surrogate row whose class has at least two members is
/// an anchor, `per_anchor` times. ID tuplets take one negative from every other
/// class present; surrogate tuplets take max(1, C-1) surrogate rows as
/// negatives, where C is the number of classes present.
TupletSet build_tuplets(std::span<const int> labels, const std::vector<bool>& surrogate_flags, Rng& rng,
                        int per_anchor = 1, bool want_ood = true);

struct TrainSchedule {
    double lr = 1e-3;
    double weight_decay = 1e-3;
    int epochs = 200;
    int batch_size = 32;
    std::uint64_t seed = 0;
    int tuplets_per_anchor = 1;
    // Surrogate rows mixed into each batch; 0 means batch_size.
    int surrogates_per_batch = 0;
};

/// Per-epoch means over batches.
struct EpochLoss {
    int epoch = 0;
    std::array<double, 3> terms{};
    double total = 0.0;
};

struct TrainResult {
    EncoderModel model;
    std::vector<EpochLoss> trace;
    std::vector<std::string> warnings;
};

/// Plain SGD with weight decay on the combined objective. Throws
/// NumericError naming epoch and batch if the loss or gradient goes non-finite.
TrainResult train(EncoderModel model, const LabeledDataset& dataset, const std::vector<SampleGrid>& surrogates,
                  const LossConfig& cfg, const TrainSchedule& schedule);

/// CSV: epoch,term1,term2,term3,total
void write_loss_trace(const std::vector<EpochLoss>& trace, const std::filesystem::path& path);

/// 1 - max softmax probability per row (higher means more likely OoD).
std::vector<double> max_softmax_from_logits(const Matrix& logits);
std::vector<double> max_softmax_score(const EncoderModel& model, const Matrix& batch);

}  // namespace oodr
