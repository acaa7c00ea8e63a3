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

#include "oodr/train.hpp"

#include "oodr/text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

namespace oodr {

TupletSet build_tuplets(std::span<const int> labels, const std::vector<bool>& surrogate_flags, Rng& rng,
                        int per_anchor, bool want_ood) {
    if (surrogate_flags.size() != labels.size()) throw InputError("build_tuplets: flag count does not match labels");
    TupletSet out;
    std::map<int, std::vector<std::size_t>> members;
    std::vector<std::size_t> surrogates;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (surrogate_flags[i])
            surrogates.push_back(i);
        else if (labels[i] >= 0)
            members[labels[i]].push_back(i);
    }
    for (const auto& [label, rows] : members)
        if (rows.size() < 2)
            out.warnings.push_back("class " + std::to_string(label) + " has a single sample and yields no anchors");
    if (want_ood && surrogates.empty()) out.warnings.push_back("no surrogate samples; surrogate tuplets skipped");

    const std::size_t classes = members.size();
    const std::size_t ood_negatives = std::max<std::size_t>(1, classes - 1);
    for (std::size_t anchor = 0; anchor < labels.size(); ++anchor) {
        if (surrogate_flags[anchor] || labels[anchor] < 0) continue;
        const auto& own = members.at(labels[anchor]);
        if (own.size() < 2) continue;
        for (int rep = 0; rep < per_anchor; ++rep) {
            std::size_t positive = anchor;
            while (positive == anchor) positive = own[rng.below(own.size())];
            if (classes >= 2) {
                Tuplet t{anchor, positive, {}, NegativeKind::Id};
                for (const auto& [label, rows] : members)
                    if (label != labels[anchor]) t.negatives.push_back(rows[rng.below(rows.size())]);
                out.id.push_back(std::move(t));
            }
            if (want_ood && !surrogates.empty()) {
                Tuplet t{anchor, positive, {}, NegativeKind::Surrogate};
                for (std::size_t i = 0; i < ood_negatives; ++i) t.negatives.push_back(surrogates[rng.below(surrogates.size())]);
                out.ood.push_back(std::move(t));
            }
        }
    }
    return out;
}

TrainResult train(EncoderModel model, const LabeledDataset& dataset, const std::vector<SampleGrid>& surrogates,
                  const LossConfig& cfg, const TrainSchedule& schedule) {
    validate(cfg);
    if (dataset.samples.empty()) throw InputError("train: dataset is empty");
    validate(dataset);
    if (!(schedule.lr > 0.0)) throw InputError("train: learning rate must be positive");
    if (schedule.batch_size < 2) throw InputError("train: batch size must be at least 2");
    if (schedule.epochs < 0) throw InputError("train: epochs must be non-negative");

    TrainResult result;
    const Matrix inputs = flatten(dataset.samples);
    const Matrix surrogate_inputs = flatten(surrogates);
    if (inputs.cols() != model.input_dim())
        throw InputError("train: samples have " + std::to_string(inputs.cols()) + " values but the encoder expects " +
                         std::to_string(model.input_dim()));
    if (surrogate_inputs.rows() > 0 && surrogate_inputs.cols() != inputs.cols())
        throw InputError("train: surrogates and samples differ in size");
    if (model.class_count() != dataset.class_count)
        throw InputError("train: encoder head has " + std::to_string(model.class_count()) + " classes, dataset has " +
                         std::to_string(dataset.class_count));

    const bool use_surrogates = cfg.lambda_terms[1] != 0.0;
    if (use_surrogates && surrogates.empty())
        result.warnings.push_back("surrogate term enabled but no surrogates supplied; the term is skipped");
    const int surrogate_rows = schedule.surrogates_per_batch > 0 ? schedule.surrogates_per_batch : schedule.batch_size;

    const Rng root(schedule.seed);
    std::vector<std::size_t> order(static_cast<std::size_t>(inputs.rows()));
    Vector params = pack_parameters(model);
    bool warned_id = false;

    for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
        Rng rng = root.split(static_cast<std::uint64_t>(epoch));
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        EpochLoss acc;
        acc.epoch = epoch + 1;
        int batches = 0;
        for (std::size_t start = 0, b = 0; start < order.size(); start += static_cast<std::size_t>(schedule.batch_size), ++b) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(schedule.batch_size));
            const std::size_t id_rows = stop - start;
            const std::size_t extra = use_surrogates && surrogate_inputs.rows() > 0 ? static_cast<std::size_t>(surrogate_rows) : 0;
            Matrix batch(static_cast<Eigen::Index>(id_rows + extra), inputs.cols());
            std::vector<int> labels(id_rows + extra, kUnlabeled);
            std::vector<bool> flags(id_rows + extra, false);
            for (std::size_t i = 0; i < id_rows; ++i) {
                batch.row(static_cast<Eigen::Index>(i)) = inputs.row(static_cast<Eigen::Index>(order[start + i]));
                labels[i] = dataset.samples[order[start + i]].label;
            }
            for (std::size_t i = 0; i < extra; ++i) {
                const auto pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(surrogate_inputs.rows())));
                batch.row(static_cast<Eigen::Index>(id_rows + i)) = surrogate_inputs.row(pick);
                flags[id_rows + i] = true;
            }
            const TupletSet tuplets = build_tuplets(labels, flags, rng, schedule.tuplets_per_anchor, extra > 0);

            LossConfig batch_cfg = cfg;
            if (tuplets.id.empty() && batch_cfg.lambda_terms[0] != 0.0) {
                batch_cfg.lambda_terms[0] = 0.0;
                if (!warned_id) result.warnings.push_back("some batches produced no ID tuplets; their ID term is skipped");
                warned_id = true;
            }
            if (tuplets.ood.empty()) batch_cfg.lambda_terms[1] = 0.0;

            const TotalLoss loss = total_loss(model, tuplets.id, tuplets.ood, batch, labels, batch_cfg, dataset.class_weights);
            const Vector grads = pack_parameters(loss.param_grads);
            if (!std::isfinite(loss.loss) || !grads.allFinite())
                throw NumericError("training diverged at epoch " + std::to_string(epoch + 1) + ", batch " +
                                   std::to_string(b + 1));
            params -= schedule.lr * (grads + schedule.weight_decay * params);
            unpack_parameters(model, params);

            for (int t = 0; t < 3; ++t) acc.terms[static_cast<std::size_t>(t)] += loss.terms[static_cast<std::size_t>(t)];
            acc.total += loss.loss;
            ++batches;
        }
        for (auto& t : acc.terms) t /= batches;
        acc.total /= batches;
        result.trace.push_back(acc);
    }
    result.model = std::move(model);
    return result;
}

void write_loss_trace(const std::vector<EpochLoss>& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << "epoch,term1,term2,term3,total\n";
    for (const auto& e : trace)
        out << e.epoch << ',' << format_double(e.terms[0]) << ',' << format_double(e.terms[1]) << ','
            << format_double(e.terms[2]) << ',' << format_double(e.total) << '\n';
}

std::vector<double> max_softmax_from_logits(const Matrix& logits) {
    std::vector<double> scores(static_cast<std::size_t>(logits.rows()));
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        const double z = (logits.row(r).array() - m).exp().sum();
        scores[static_cast<std::size_t>(r)] = 1.0 - 1.0 / z;  // max prob = exp(0) / z
    }
    return scores;
}

std::vector<double> max_softmax_score(const EncoderModel& model, const Matrix& batch) {
    return max_softmax_from_logits(forward(model, batch).logits);
}

}  // namespace oodr
