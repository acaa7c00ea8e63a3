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

// Brute-force reference implementations used by the unit and acceptance
// tests. Written directly from the definitions, independently of src/.

#include "oodr/encoder.hpp"
#include "oodr/losses.hpp"
#include "oodr/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>
#include <vector>

namespace oracle {

using oodr::Matrix;

// ---- metrics -------------------------------------------------------------

struct Tnr {
    double tnr;
    double threshold;
};

// Smallest ID score t with at least 95% of ID scores <= t; OoD rejected when > t.
inline Tnr tnr_at_tpr95(const std::vector<double>& id, const std::vector<double>& ood) {
    double best = std::numeric_limits<double>::infinity();
    for (double t : id) {
        std::size_t below = 0;
        for (double v : id) below += v <= t;
        if (20 * below >= 19 * id.size() && t < best) best = t;
    }
    std::size_t rejected = 0;
    for (double v : ood) rejected += v > best;
    return {static_cast<double>(rejected) / static_cast<double>(ood.size()), best};
}

inline double auroc(const std::vector<double>& id, const std::vector<double>& ood) {
    double wins = 0.0;
    for (double o : ood)
        for (double i : id) wins += o > i ? 1.0 : (o == i ? 0.5 : 0.0);
    return wins / (static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

inline double detection_accuracy(const std::vector<double>& id, const std::vector<double>& ood, bool empirical = false) {
    std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
    candidates.insert(candidates.end(), id.begin(), id.end());
    candidates.insert(candidates.end(), ood.begin(), ood.end());
    double best = 0.0;
    for (double t : candidates) {
        double tp = 0, tn = 0;
        for (double v : id) tp += v <= t;
        for (double v : ood) tn += v > t;
        const double acc = empirical ? (tp + tn) / static_cast<double>(id.size() + ood.size())
                                     : 0.5 * (tp / static_cast<double>(id.size()) + tn / static_cast<double>(ood.size()));
        best = std::max(best, acc);
    }
    return best;
}

// ---- re-ranking ----------------------------------------------------------

// The whole scoring pipeline for one query, written as plain set algebra
// over an explicit graph with N gallery nodes plus the query as node N. The
// query carries the largest id, so distance ties rank it after gallery nodes.
struct ReRank {
    Matrix points;  // gallery rows then the query
    std::size_t n;  // gallery size
    oodr::ReRankConfig cfg;
    mutable std::map<std::tuple<std::size_t, int, bool>, std::set<std::size_t>> kn_cache;
    mutable std::map<std::size_t, std::set<std::size_t>> expanded_cache;

    ReRank(const Matrix& gallery, const Eigen::RowVectorXd& query, const oodr::ReRankConfig& c)
        : points(gallery.rows() + 1, gallery.cols()), n(static_cast<std::size_t>(gallery.rows())), cfg(c) {
        points.topRows(gallery.rows()) = gallery;
        points.row(gallery.rows()) = query;
    }

    double dist(std::size_t a, std::size_t b) const {
        double s = 0.0;
        for (Eigen::Index j = 0; j < points.cols(); ++j) {
            const double d = points(static_cast<Eigen::Index>(a), j) - points(static_cast<Eigen::Index>(b), j);
            s += d * d;
        }
        return std::sqrt(s);
    }

    // K nearest of x among the gallery plus (optionally) the query, x excluded.
    const std::set<std::size_t>& kn(std::size_t x, int K, bool include_query) const {
        const auto key = std::make_tuple(x, K, include_query);
        if (auto it = kn_cache.find(key); it != kn_cache.end()) return it->second;
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t y = 0; y < n + (include_query ? 1 : 0); ++y)
            if (y != x) all.push_back({dist(x, y), y});
        std::sort(all.begin(), all.end());
        std::set<std::size_t> out;
        for (std::size_t i = 0; i < all.size() && i < static_cast<std::size_t>(K); ++i) out.insert(all[i].second);
        return kn_cache[key] = out;
    }

    // R(x, K). Gallery nodes see only the gallery; the query's reciprocity
    // test lets the query compete for slots in its neighbors' lists.
    std::set<std::size_t> reciprocal(std::size_t x, int K) const {
        const bool is_query = x == n;
        std::set<std::size_t> out;
        for (std::size_t y : kn(x, K, false))
            if (kn(y, K, is_query).count(x)) out.insert(y);
        return out;
    }

    std::set<std::size_t> expanded(std::size_t x) const {
        if (auto it = expanded_cache.find(x); it != expanded_cache.end()) return it->second;
        const auto base = reciprocal(x, cfg.k_main);
        std::set<std::size_t> out = base;
        for (std::size_t y : base) {
            const auto inner = reciprocal(y, cfg.k_expand);
            if (cfg.overlap_filter) {
                std::size_t common = 0;
                for (auto v : inner) common += base.count(v);
                if (3 * common < 2 * inner.size()) continue;
            }
            out.insert(inner.begin(), inner.end());
        }
        return expanded_cache[x] = out;
    }

    static double jaccard(const std::set<std::size_t>& a, const std::set<std::size_t>& b) {
        if (a.empty() && b.empty()) return 1.0;
        std::size_t inter = 0;
        for (auto v : a) inter += b.count(v);
        const std::size_t uni = a.size() + b.size() - inter;
        return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
    }

    std::vector<double> dstar_row() const {
        const auto q = expanded(n);
        std::vector<double> row;
        for (std::size_t tr = 0; tr < n; ++tr)
            row.push_back((1.0 - cfg.lambda) * jaccard(q, expanded(tr)) + cfg.lambda * dist(n, tr));
        return row;
    }

    double score() const {
        auto row = dstar_row();
        std::sort(row.begin(), row.end());
        row.resize(static_cast<std::size_t>(cfg.n_median));
        const std::size_t m = row.size();
        return m % 2 ? row[m / 2] : 0.5 * (row[m / 2 - 1] + row[m / 2]);
    }
};

// ---- losses --------------------------------------------------------------

// log(1 + sum exp(s (a.n - cos(acos(a.p) - beta)))) in the direct form; log1p
// keeps full precision when the sum is tiny.
inline double tuplet(const Matrix& e, const oodr::Tuplet& t, double s, double beta) {
    const double ap = e.row(static_cast<Eigen::Index>(t.anchor)).dot(e.row(static_cast<Eigen::Index>(t.positive)));
    const double pos = beta == 0.0 ? ap : std::cos(std::acos(std::clamp(ap, -1.0, 1.0)) - beta);
    double sum = 0.0;
    for (auto n : t.negatives)
        sum += std::exp(s * (e.row(static_cast<Eigen::Index>(t.anchor)).dot(e.row(static_cast<Eigen::Index>(n))) - pos));
    return std::log1p(sum);
}

inline double cross_entropy(const Matrix& logits, const std::vector<int>& labels, const std::vector<double>& weights) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(y)];
        double z = 0.0;
        for (Eigen::Index c = 0; c < logits.cols(); ++c) z += std::exp(logits(i, c));
        num += w * (std::log(z) - logits(i, y));
        den += w;
    }
    return num / den;
}

// Encoder forward written out loop by loop: tanh hidden layers, linear last
// layer, unit normalization, linear head.
inline void forward(const oodr::EncoderModel& m, const Matrix& x, Matrix& emb, Matrix& logits) {
    emb.resize(x.rows(), m.embedding_dim());
    logits.resize(x.rows(), m.class_count());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        std::vector<double> h(x.row(r).data(), x.row(r).data() + x.cols());
        for (std::size_t l = 0; l < m.layers.size(); ++l) {
            const auto& W = m.layers[l].weights;
            std::vector<double> next(static_cast<std::size_t>(W.rows()));
            for (Eigen::Index o = 0; o < W.rows(); ++o) {
                double acc = m.layers[l].bias[o];
                for (Eigen::Index i = 0; i < W.cols(); ++i) acc += W(o, i) * h[static_cast<std::size_t>(i)];
                next[static_cast<std::size_t>(o)] = l + 1 < m.layers.size() ? std::tanh(acc) : acc;
            }
            h = std::move(next);
        }
        double norm = 0.0;
        for (double v : h) norm += v * v;
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < h.size(); ++j) emb(r, static_cast<Eigen::Index>(j)) = h[j] / norm;
        for (Eigen::Index c = 0; c < m.head_weights.rows(); ++c) {
            double acc = m.head_bias[c];
            for (Eigen::Index j = 0; j < m.head_weights.cols(); ++j) acc += m.head_weights(c, j) * emb(r, j);
            logits(r, c) = acc;
        }
    }
}

// lambda-weighted sum of per-term means (cross-entropy over labeled rows).
inline double total(const oodr::EncoderModel& m, const std::vector<oodr::Tuplet>& id,
                    const std::vector<oodr::Tuplet>& ood, const Matrix& batch, const std::vector<int>& labels,
                    const oodr::LossConfig& cfg, const std::vector<double>& weights) {
    Matrix emb, logits;
    forward(m, batch, emb, logits);
    const double beta = cfg.margin_deg * M_PI / 180.0;
    double out = 0.0;
    if (!id.empty()) {
        double s = 0.0;
        for (const auto& t : id) s += tuplet(emb, t, cfg.scale_s, beta);
        out += cfg.lambda_terms[0] * s / static_cast<double>(id.size());
    }
    if (!ood.empty()) {
        double s = 0.0;
        for (const auto& t : ood) s += tuplet(emb, t, cfg.scale_s, beta);
        out += cfg.lambda_terms[1] * s / static_cast<double>(ood.size());
    }
    std::vector<Eigen::Index> rows;
    std::vector<int> ys;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) {
            rows.push_back(static_cast<Eigen::Index>(i));
            ys.push_back(labels[i]);
        }
    if (!rows.empty() && cfg.lambda_terms[2] != 0.0) {
        Matrix sub(static_cast<Eigen::Index>(rows.size()), logits.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = logits.row(rows[i]);
        out += cfg.lambda_terms[2] * cross_entropy(sub, ys, weights);
    }
    return out;
}

// ---- finite differences --------------------------------------------------

// Central differences of f over every entry of x (modified in place and restored).
template <typename F>
Eigen::VectorXd central_difference(Eigen::VectorXd& x, F f, double h = 1e-6) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double up = f(x);
        x[i] = keep - h;
        const double down = f(x);
        x[i] = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

// ||a - b|| / max(||a||, ||b||, floor). The floor sits at the resolution of
// a central difference with h = 1e-6, so a gradient that underflows to ~1e-18
// is not compared against an FD result of exactly zero as a 100% error.
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-8) {
    return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

}  // namespace oracle
