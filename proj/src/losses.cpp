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

#include "oodr/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oodr {
namespace {

void check_index(std::size_t index, Eigen::Index rows) {
    if (index >= static_cast<std::size_t>(rows))
        throw InputError("tuplet index " + std::to_string(index) + " out of range for " + std::to_string(rows) + " rows");
}

void check_normalized(const Matrix& embeddings, const Tuplet& tuplet) {
    auto check = [&](std::size_t i) {
        const double norm = embeddings.row(static_cast<Eigen::Index>(i)).norm();
        if (std::abs(norm - 1.0) > 1e-6)
            throw InputError("embedding row " + std::to_string(i) + " is not unit norm (" + std::to_string(norm) + ")");
    };
    check(tuplet.anchor);
    check(tuplet.positive);
    for (auto n : tuplet.negatives) check(n);
}

}  // namespace

double LossConfig::margin_rad() const { return margin_deg * std::numbers::pi / 180.0; }

void validate(const LossConfig& cfg) {
    if (!(cfg.scale_s > 0.0)) throw InputError("scale_s must be positive");
    if (!(cfg.margin_deg >= 0.0 && cfg.margin_deg < 90.0)) throw InputError("margin must lie in [0, 90) degrees");
    if (cfg.class_count < 1) throw InputError("class_count must be positive");
    for (double l : cfg.lambda_terms)
        if (!(l >= 0.0) || !std::isfinite(l)) throw InputError("lambda terms must be finite and non-negative");
}

double accumulate_tuplet_loss(const Matrix& embeddings, const Tuplet& tuplet, const LossConfig& cfg, double scale,
                              Matrix& grad_accum) {
    const auto a = static_cast<Eigen::Index>(tuplet.anchor);
    const auto p = static_cast<Eigen::Index>(tuplet.positive);
    const double s = cfg.scale_s;
    const double beta = cfg.margin_rad();

    const double cos_ap = embeddings.row(a).dot(embeddings.row(p));
    double positive_term = cos_ap;
    double d_positive = 1.0;  // d positive_term / d cos_ap
    if (beta > 0.0) {
        const double c = std::clamp(cos_ap, -1.0, 1.0);
        const double theta = std::acos(c);
        positive_term = std::cos(theta - beta);
        // Guard the 1/sin(theta) singularity at theta = 0 or pi.
        const double sin_theta = std::max(std::sin(theta), 1e-12);
        d_positive = std::sin(theta - beta) / sin_theta;
    }

    const std::size_t k = tuplet.negatives.size();
    std::vector<double> exponents(k);
    double max_exp = 0.0;  // the implicit "1" inside the log contributes exponent 0
    for (std::size_t i = 0; i < k; ++i) {
        const auto n = static_cast<Eigen::Index>(tuplet.negatives[i]);
        exponents[i] = s * (embeddings.row(a).dot(embeddings.row(n)) - positive_term);
        max_exp = std::max(max_exp, exponents[i]);
    }
    double denom = std::exp(-max_exp);
    for (double e : exponents) denom += std::exp(e - max_exp);
    const double loss = max_exp + std::log(denom);

    double weight_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double w = std::exp(exponents[i] - max_exp) / denom;  // d loss / d exponent_i
        weight_sum += w;
        const auto n = static_cast<Eigen::Index>(tuplet.negatives[i]);
        const double g = scale * s * w;
        grad_accum.row(a) += g * embeddings.row(n);
        grad_accum.row(n) += g * embeddings.row(a);
    }
    const double g_pos = -scale * s * weight_sum * d_positive;
    grad_accum.row(a) += g_pos * embeddings.row(p);
    grad_accum.row(p) += g_pos * embeddings.row(a);
    return loss;
}

LossGrad tuplet_loss(const Matrix& embeddings, const Tuplet& tuplet, const LossConfig& cfg) {
    validate(cfg);
    check_index(tuplet.anchor, embeddings.rows());
    check_index(tuplet.positive, embeddings.rows());
    for (auto n : tuplet.negatives) check_index(n, embeddings.rows());
    check_normalized(embeddings, tuplet);
    LossGrad out{0.0, Matrix::Zero(embeddings.rows(), embeddings.cols())};
    out.loss = accumulate_tuplet_loss(embeddings, tuplet, cfg, 1.0, out.grads);
    return out;
}

LossGrad cross_entropy(const Matrix& logits, std::span<const int> labels, std::span<const double> class_weights) {
    if (static_cast<Eigen::Index>(labels.size()) != logits.rows())
        throw InputError("cross_entropy: label count does not match logit rows");
    const auto classes = logits.cols();
    if (!class_weights.empty() && static_cast<Eigen::Index>(class_weights.size()) != classes)
        throw InputError("cross_entropy: need one weight per class");
    LossGrad out{0.0, Matrix::Zero(logits.rows(), logits.cols())};
    double weight_total = 0.0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const int y = labels[static_cast<std::size_t>(r)];
        if (y < 0 || y >= classes)
            throw InputError("cross_entropy: label " + std::to_string(y) + " out of range [0," +
                             std::to_string(classes) + ")");
        const double w = class_weights.empty() ? 1.0 : class_weights[static_cast<std::size_t>(y)];
        if (!(w > 0.0)) throw InputError("cross_entropy: class weights must be positive");
        const double m = logits.row(r).maxCoeff();
        const Eigen::RowVectorXd shifted = (logits.row(r).array() - m).exp().matrix();
        const double z = shifted.sum();
        out.loss += w * (m + std::log(z) - logits(r, y));
        out.grads.row(r) = w * shifted / z;
        out.grads(r, y) -= w;
        weight_total += w;
    }
    if (weight_total > 0.0) {
        out.loss /= weight_total;
        out.grads /= weight_total;
    }
    return out;
}

TotalLoss total_loss(const EncoderModel& model, std::span<const Tuplet> id_tuplets,
                     std::span<const Tuplet> ood_tuplets, const Matrix& batch, std::span<const int> labels,
                     const LossConfig& cfg, std::span<const double> class_weights) {
    validate(cfg);
    if (static_cast<Eigen::Index>(labels.size()) != batch.rows())
        throw InputError("total_loss: label count does not match batch rows");
    const auto& lambda = cfg.lambda_terms;
    if (lambda[0] != 0.0 && id_tuplets.empty()) throw InputError("total_loss: no ID tuplets but the ID term is enabled");
    if (lambda[1] != 0.0 && ood_tuplets.empty())
        throw InputError("total_loss: no surrogate tuplets but the surrogate term is enabled");
    for (const auto& t : id_tuplets) {
        if (t.kind != NegativeKind::Id) throw InputError("total_loss: ID tuplet list holds a surrogate tuplet");
        check_index(t.anchor, batch.rows());
        check_index(t.positive, batch.rows());
        for (auto n : t.negatives) check_index(n, batch.rows());
    }
    for (const auto& t : ood_tuplets) {
        if (t.kind != NegativeKind::Surrogate) throw InputError("total_loss: surrogate tuplet list holds an ID tuplet");
        check_index(t.anchor, batch.rows());
        check_index(t.positive, batch.rows());
        for (auto n : t.negatives) check_index(n, batch.rows());
    }

    const ForwardPass pass = forward_pass(model, batch);
    Matrix d_emb = Matrix::Zero(pass.embeddings.rows(), pass.embeddings.cols());
    Matrix d_logits = Matrix::Zero(pass.logits.rows(), pass.logits.cols());
    TotalLoss out;

    auto tuplet_term = [&](std::span<const Tuplet> tuplets, double weight) {
        if (weight == 0.0 || tuplets.empty()) return 0.0;
        const double per = cfg.reduction == TermReduction::Mean ? 1.0 / static_cast<double>(tuplets.size()) : 1.0;
        double sum = 0.0;
        for (const auto& t : tuplets) sum += accumulate_tuplet_loss(pass.embeddings, t, cfg, weight * per, d_emb);
        return sum * per;
    };
    out.terms[0] = tuplet_term(id_tuplets, lambda[0]);
    out.terms[1] = tuplet_term(ood_tuplets, lambda[1]);

    if (lambda[2] != 0.0) {
        std::vector<Eigen::Index> rows;
        std::vector<int> row_labels;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] >= 0) {
                rows.push_back(static_cast<Eigen::Index>(i));
                row_labels.push_back(labels[i]);
            }
        if (!rows.empty()) {
            Matrix sub(static_cast<Eigen::Index>(rows.size()), pass.logits.cols());
            for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = pass.logits.row(rows[i]);
            const auto ce = cross_entropy(sub, row_labels, class_weights);
            const double per = cfg.reduction == TermReduction::Sum ? static_cast<double>(rows.size()) : 1.0;
            out.terms[2] = ce.loss * per;
            for (std::size_t i = 0; i < rows.size(); ++i)
                d_logits.row(rows[i]) += lambda[2] * per * ce.grads.row(static_cast<Eigen::Index>(i));
        }
    }
    out.loss = lambda[0] * out.terms[0] + lambda[1] * out.terms[1] + lambda[2] * out.terms[2];
    out.param_grads = backward(model, pass, d_emb, d_logits).param_grads;
    return out;
}

}  // namespace oodr
