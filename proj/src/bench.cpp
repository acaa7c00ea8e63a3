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

#include "oodr/bench.hpp"

#include "oodr/embedding_io.hpp"
#include "oodr/grid_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

namespace oodr {
namespace {

Vector block_direction(const SyntheticParams& p, int block) {
    Vector u = Vector::Zero(p.rows * p.cols);
    const int bh = p.rows / p.grid_rows, bw = p.cols / p.grid_cols;
    const int r0 = (block / p.grid_cols) * bh, c0 = (block % p.grid_cols) * bw;
    const double v = 1.0 / std::sqrt(static_cast<double>(bh * bw));
    for (int r = 0; r < bh; ++r)
        for (int c = 0; c < bw; ++c) u[(r0 + r) * p.cols + c0 + c] = v;
    return u;
}

SampleGrid draw(const SyntheticParams& p, const Vector& mean, int label, Rng& rng) {
    SampleGrid g(p.rows, p.cols, 1, label);
    for (Eigen::Index i = 0; i < g.data.size(); ++i) g.data[i] = std::clamp(mean[i] + p.sigma * rng.normal(), 0.0, 1.0);
    return g;
}

Matrix embed(const EncoderModel& model, const std::vector<SampleGrid>& samples) {
    return forward(model, flatten(samples)).embeddings;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticParams& p, std::uint64_t seed) {
    if (p.rows % p.grid_rows != 0 || p.cols % p.grid_cols != 0) throw InputError("synthetic grid is not divisible");
    if (p.classes + 1 > p.grid_rows * p.grid_cols) throw InputError("need one spare grid block for the OoD mean");
    SyntheticData data;
    const Vector base = Vector::Constant(p.rows * p.cols, p.base);
    // Orthogonal unit offsets h*u_k are h*sqrt(2) apart.
    const double h = p.class_gap_sigma * p.sigma / std::sqrt(2.0);
    const double g = std::sqrt(std::max(0.0, p.ood_gap_sigma * p.ood_gap_sigma * p.sigma * p.sigma - h * h));
    for (int k = 0; k < p.classes; ++k) data.class_means.push_back(base + h * block_direction(p, k));
    data.ood_mean = base + g * block_direction(p, p.classes);

    Rng rng(seed);
    for (int k = 0; k < p.classes; ++k)
        for (int i = 0; i < p.train_per_class; ++i) data.train.push_back(draw(p, data.class_means[static_cast<std::size_t>(k)], k, rng));
    for (int k = 0; k < p.classes; ++k)
        for (int i = 0; i < p.test_per_class; ++i) data.test_id.push_back(draw(p, data.class_means[static_cast<std::size_t>(k)], k, rng));
    for (int i = 0; i < p.ood_count; ++i) data.ood.push_back(draw(p, data.ood_mean, kUnlabeled, rng));
    return data;
}

std::string to_string(BenchArm arm) {
    switch (arm) {
        case BenchArm::Full: return "full";
        case BenchArm::NoIdTuplet: return "no-id-tuplet";
        case BenchArm::NoOodTuplet: return "no-ood-tuplet";
        case BenchArm::NoCe: return "no-ce";
        case BenchArm::NoKReciprocal: return "no-krecip";
        case BenchArm::MaxSoftmax: return "msp";
    }
    return "?";
}

const std::vector<BenchArm>& all_bench_arms() {
    static const std::vector<BenchArm> arms{BenchArm::Full,  BenchArm::NoIdTuplet,    BenchArm::NoOodTuplet,
                                            BenchArm::NoCe,  BenchArm::NoKReciprocal, BenchArm::MaxSoftmax};
    return arms;
}

BenchArm parse_bench_arm(const std::string& name) {
    for (auto arm : all_bench_arms())
        if (to_string(arm) == name) return arm;
    throw InputError("unknown ablation '" + name + "'");
}

RunConfig bench_config() {
    RunConfig cfg;
    cfg.hidden_layers = {64, 32};
    cfg.embedding_dim = 16;
    cfg.schedule.epochs = 200;
    cfg.schedule.batch_size = 32;
    cfg.schedule.lr = 1e-3;
    cfg.surrogate.method = SurrogateMethod::Permute;
    cfg.surrogate.count_per_sample = 1;
    return cfg;
}

BenchResult run_bench(const RunConfig& cfg, std::uint64_t seed, const std::vector<BenchArm>& arms,
                      const SyntheticParams& params) {
    const auto start = std::chrono::steady_clock::now();
    BenchResult result;
    result.seed = seed;
    const SyntheticData data = make_synthetic(params, seed);
    const LabeledDataset dataset = make_dataset(data.train);

    SurrogateOptions sopt = cfg.surrogate;
    sopt.method = SurrogateMethod::Permute;
    sopt.grid_rows = params.grid_rows;
    sopt.grid_cols = params.grid_cols;
    const auto surrogates = generate_surrogates(data.train, nullptr, sopt, mix_seed(seed ^ 0x5u)).samples;

    // Models keyed by their loss-term weights; arms sharing weights share a model.
    std::map<std::array<double, 3>, EncoderModel> models;
    auto model_for = [&](std::array<double, 3> lambdas) -> const EncoderModel& {
        auto it = models.find(lambdas);
        if (it != models.end()) return it->second;
        Rng init(mix_seed(seed ^ 0x1u));
        EncoderModel model = make_encoder(cfg.layer_sizes(params.rows * params.cols), dataset.class_count, init);
        LossConfig loss = cfg.loss;
        loss.class_count = dataset.class_count;
        loss.lambda_terms = lambdas;
        TrainSchedule schedule = cfg.schedule;
        schedule.seed = mix_seed(seed ^ 0x2u);
        auto trained = train(std::move(model), dataset, surrogates, loss, schedule);
        return models.emplace(lambdas, std::move(trained.model)).first->second;
    };

    const auto& base = cfg.loss.lambda_terms;
    for (auto arm : arms) {
        std::array<double, 3> lambdas = base;
        if (arm == BenchArm::NoIdTuplet) lambdas[0] = 0.0;
        if (arm == BenchArm::NoOodTuplet) lambdas[1] = 0.0;
        if (arm == BenchArm::NoCe) lambdas[2] = 0.0;
        if (arm == BenchArm::MaxSoftmax) lambdas = {0.0, 0.0, 1.0};
        const EncoderModel& model = model_for(lambdas);

        ArmResult r;
        r.arm = arm;
        if (arm == BenchArm::MaxSoftmax) {
            r.id_scores = max_softmax_score(model, flatten(data.test_id));
            r.ood_scores = max_softmax_score(model, flatten(data.ood));
        } else {
            const Matrix gallery = embed(model, data.train);
            const Matrix id_q = embed(model, data.test_id);
            const Matrix ood_q = embed(model, data.ood);
            if (arm == BenchArm::NoKReciprocal) {
                r.id_scores = naive_knn_scores(gallery, id_q, cfg.rerank.n_median, cfg.jobs);
                r.ood_scores = naive_knn_scores(gallery, ood_q, cfg.rerank.n_median, cfg.jobs);
            } else {
                const ReRankIndex index(make_embedding_set(gallery, {}, true), cfg.rerank, cfg.jobs);
                for (const auto& s : index.score_batch(id_q, cfg.jobs)) r.id_scores.push_back(s.score);
                for (const auto& s : index.score_batch(ood_q, cfg.jobs)) r.ood_scores.push_back(s.score);
            }
        }
        r.tnr_at_tpr95 = tnr_at_tpr95(r.id_scores, r.ood_scores).tnr;
        r.auroc = auroc(r.id_scores, r.ood_scores);
        r.detection_accuracy = detection_accuracy(r.id_scores, r.ood_scores);
        result.arms.push_back(std::move(r));
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string format_bench_report(const BenchResult& result) {
    std::ostringstream out;
    out << "# Synthetic benchmark (seed " << result.seed << ")\n\n";
    out << "| arm | TNR@TPR95 | AUROC | detection accuracy |\n";
    out << "|---|---|---|---|\n";
    out.setf(std::ios::fixed);
    out.precision(2);
    for (const auto& a : result.arms)
        out << "| " << to_string(a.arm) << " | " << 100.0 * a.tnr_at_tpr95 << " | " << 100.0 * a.auroc << " | "
            << 100.0 * a.detection_accuracy << " |\n";
    out.precision(3);
    out << "\nruntime: " << result.seconds << " s\n";
    return out.str();
}

}  // namespace oodr
