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

#include "oodr/rerank.hpp"

#include "oodr/parallel.hpp"

#include <algorithm>

namespace oodr {
namespace {

NeighborList nearest(const Matrix& gallery, const Eigen::RowVectorXd& query, std::size_t k, std::ptrdiff_t skip) {
    NeighborList all;
    all.reserve(static_cast<std::size_t>(gallery.rows()));
    for (Eigen::Index j = 0; j < gallery.rows(); ++j) {
        if (j == skip) continue;
        all.push_back({static_cast<std::size_t>(j), euclidean(gallery.row(j), query)});
    }
    k = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), neighbor_less);
    all.resize(k);
    return all;
}

std::size_t intersection_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

void sort_unique(std::vector<std::size_t>& ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

}  // namespace

void validate(const ReRankConfig& cfg, std::size_t gallery_size) {
    const auto n = static_cast<long long>(gallery_size);
    if (cfg.k_expand < 1 || cfg.k_expand > cfg.k_main)
        throw InputError("need 1 <= k_expand <= k_main (got k_expand=" + std::to_string(cfg.k_expand) +
                         ", k_main=" + std::to_string(cfg.k_main) + ")");
    if (cfg.k_main > n)
        throw InputError("k_main=" + std::to_string(cfg.k_main) + " exceeds gallery size " + std::to_string(n));
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw InputError("lambda must lie in [0,1]");
    if (cfg.n_median < 1 || cfg.n_median > n)
        throw InputError("n_median=" + std::to_string(cfg.n_median) + " must lie in [1, gallery size " +
                         std::to_string(n) + "]");
}

NeighborList knn(const Matrix& gallery, const Eigen::RowVectorXd& query, int k) {
    if (query.size() != gallery.cols())
        throw InputError("query dimension " + std::to_string(query.size()) + " does not match gallery dimension " +
                         std::to_string(gallery.cols()));
    if (k < 0 || k > gallery.rows())
        throw InputError("k=" + std::to_string(k) + " exceeds gallery size " + std::to_string(gallery.rows()));
    return nearest(gallery, query, static_cast<std::size_t>(k), -1);
}

NeighborList knn(const EmbeddingSet& gallery, const Eigen::RowVectorXd& query, int k) {
    return knn(gallery.vectors, query, k);
}

double jaccard_distance(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.empty() && b.empty()) return 1.0;
    const std::size_t inter = intersection_size(a, b);
    const std::size_t uni = a.size() + b.size() - inter;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double median(std::vector<double> values) {
    if (values.empty()) throw InputError("median of an empty sequence");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

ReRankIndex::ReRankIndex(const EmbeddingSet& gallery, const ReRankConfig& cfg, int jobs)
    : gallery_(gallery.vectors), cfg_(cfg) {
    validate(gallery);
    validate(cfg, gallery.size());
    const std::size_t n = size();
    neighbors_.resize(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        neighbors_[i] = nearest(gallery_, gallery_.row(static_cast<Eigen::Index>(i)), static_cast<std::size_t>(cfg_.k_main),
                                static_cast<std::ptrdiff_t>(i));
    });
    reciprocal_expand_.resize(n);
    std::vector<std::vector<std::size_t>> reciprocal_main(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        reciprocal_main[i] = reciprocal(i, cfg_.k_main);
        reciprocal_expand_[i] = reciprocal(i, cfg_.k_expand);
    });
    expanded_.resize(n);
    parallel_for(n, jobs, [&](std::size_t i) { expanded_[i] = expand(reciprocal_main[i]); });
}

std::vector<std::size_t> ReRankIndex::reciprocal(std::size_t node, int K) const {
    if (K < 1 || K > cfg_.k_main)
        throw InputError("reciprocal set size K=" + std::to_string(K) + " must lie in [1, k_main]");
    const auto& list = neighbors(node);
    const std::size_t limit = std::min(list.size(), static_cast<std::size_t>(K));
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < limit; ++i) {
        const auto& theirs = neighbors_[list[i].id];
        const std::size_t their_limit = std::min(theirs.size(), static_cast<std::size_t>(K));
        for (std::size_t j = 0; j < their_limit; ++j)
            if (theirs[j].id == node) {
                out.push_back(list[i].id);
                break;
            }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> ReRankIndex::expand(const std::vector<std::size_t>& base) const {
    std::vector<std::size_t> out = base;
    for (std::size_t y : base) {
        const auto& inner = reciprocal_expand_[y];
        if (cfg_.overlap_filter && 3 * intersection_size(inner, base) < 2 * inner.size()) continue;
        out.insert(out.end(), inner.begin(), inner.end());
    }
    sort_unique(out);
    return out;
}

QueryNeighborhood ReRankIndex::neighborhood(const Eigen::RowVectorXd& query) const {
    QueryNeighborhood hood;
    hood.neighbors = knn(gallery_, query, cfg_.k_main);
    for (const auto& nb : hood.neighbors) {
        const auto& theirs = neighbors_[nb.id];
        const auto K = static_cast<std::size_t>(cfg_.k_main);
        // q joins KN(y, K) if y's list is short or q is strictly closer than its K-th entry.
        const bool mutual = theirs.size() < K || nb.distance < theirs[K - 1].distance;
        if (mutual) hood.reciprocal.push_back(nb.id);
    }
    std::sort(hood.reciprocal.begin(), hood.reciprocal.end());
    hood.expanded = expand(hood.reciprocal);
    return hood;
}

std::vector<double> ReRankIndex::blended_row(const Eigen::RowVectorXd& query) const {
    return blended_row(query, neighborhood(query));
}

std::vector<double> ReRankIndex::blended_row(const Eigen::RowVectorXd& query, const QueryNeighborhood& hood) const {
    const std::size_t n = size();
    std::vector<char> in_query(n, 0);
    for (auto id : hood.expanded) in_query[id] = 1;
    const std::size_t q_size = hood.expanded.size();
    std::vector<double> row(n);
    for (std::size_t tr = 0; tr < n; ++tr) {
        double jac = 1.0;
        if (q_size > 0) {
            std::size_t inter = 0;
            for (auto id : expanded_[tr]) inter += static_cast<std::size_t>(in_query[id]);
            const std::size_t uni = q_size + expanded_[tr].size() - inter;
            jac = 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
        }
        const double d = euclidean(gallery_.row(static_cast<Eigen::Index>(tr)), query);
        row[tr] = blended_distance(jac, d, cfg_.lambda);
    }
    return row;
}

QueryScore ReRankIndex::score(const Eigen::RowVectorXd& query) const {
    const auto row = blended_row(query);
    NeighborList all(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) all[i] = {i, row[i]};
    const auto n = static_cast<std::size_t>(cfg_.n_median);
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), neighbor_less);
    all.resize(n);
    std::vector<double> values;
    values.reserve(n);
    for (const auto& nb : all) values.push_back(nb.distance);
    return {median(std::move(values)), std::move(all)};
}

std::vector<QueryScore> ReRankIndex::score_batch(const Matrix& queries, int jobs) const {
    if (queries.rows() > 0 && queries.cols() != gallery_.cols())
        throw InputError("query dimension " + std::to_string(queries.cols()) + " does not match gallery dimension " +
                         std::to_string(gallery_.cols()));
    std::vector<QueryScore> out(static_cast<std::size_t>(queries.rows()));
    parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = score(queries.row(static_cast<Eigen::Index>(i))); });
    return out;
}

std::vector<std::size_t> k_reciprocal(const ReRankIndex& index, std::size_t node, int K) {
    return index.reciprocal(node, K);
}

double ood_score(const EmbeddingSet& gallery, const Eigen::RowVectorXd& query, const ReRankConfig& cfg) {
    return ReRankIndex(gallery, cfg).score(query).score;
}

std::vector<double> score_batch(const EmbeddingSet& gallery, const EmbeddingSet& queries, const ReRankConfig& cfg,
                                int jobs) {
    const ReRankIndex index(gallery, cfg, jobs);
    std::vector<double> out;
    for (const auto& s : index.score_batch(queries.vectors, jobs)) out.push_back(s.score);
    return out;
}

std::vector<double> naive_knn_scores(const Matrix& gallery, const Matrix& queries, int n_median, int jobs) {
    if (n_median < 1 || n_median > gallery.rows()) throw InputError("n_median must lie in [1, gallery size]");
    std::vector<double> out(static_cast<std::size_t>(queries.rows()));
    parallel_for(out.size(), jobs, [&](std::size_t i) {
        std::vector<double> d;
        for (const auto& nb : knn(gallery, queries.row(static_cast<Eigen::Index>(i)), n_median)) d.push_back(nb.distance);
        out[i] = median(std::move(d));
    });
    return out;
}

}  // namespace oodr
