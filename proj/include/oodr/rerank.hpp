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

#include "oodr/types.hpp"

#include <cmath>
#include <vector>

namespace oodr {

/// Re-ranking parameters. Defaults: 15 neighbors for reciprocal sets, 6 for
/// local expansion, lambda = 0.3, median over 15 neighbors.
struct ReRankConfig {
    int k_main = 15;
    int k_expand = 6;
    double lambda = 0.3;
    int n_median = 15;
    // Zhong-style refinement: only merge R(y, k_expand) when at least 2/3 of
    // it lies inside R(x, k_main). Off by default.
    bool overlap_filter = false;
};

void validate(const ReRankConfig& cfg, std::size_t gallery_size);

struct Neighbor {
    std::size_t id = 0;
    double distance = 0.0;
};

using NeighborList = std::vector<Neighbor>;

/// Ascending distance, then ascending id.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
}

template <typename A, typename B>
double euclidean(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
    return std::sqrt((x - y).squaredNorm());
}

/// Exact k nearest gallery rows of `query`.
NeighborList knn(const Matrix& gallery, const Eigen::RowVectorXd& query, int k);
NeighborList knn(const EmbeddingSet& gallery, const Eigen::RowVectorXd& query, int k);

/// 1 - |a ∩ b| / |a ∪ b| over sorted id sets; 1 when both are empty.
double jaccard_distance(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

/// (1 - lambda) * jaccard + lambda * euclidean
inline double blended_distance(double jaccard, double euclidean_distance, double lambda) {
    return (1.0 - lambda) * jaccard + lambda * euclidean_distance;
}

/// Median of the values; mean of the two central values for even counts.
double median(std::vector<double> values);

/// Neighborhood structure of a query inserted into the gallery graph.
struct QueryNeighborhood {
    NeighborList neighbors;               // KN(q, k_main) over the gallery
    std::vector<std::size_t> reciprocal;  // R(q, k_main), sorted
    std::vector<std::size_t> expanded;    // R*(q), sorted
};

struct QueryScore {
    double score = 0.0;
    NeighborList nearest;  // n_median closest gallery ids under d*, distance = d*
};

/// Gallery neighbor graph plus everything needed to score queries.
///
/// Gallery kNN lists are gallery-internal and exclude the node itself. A
/// query is a temporary node: its own kNN list runs over the gallery, and
/// "q in KN(y, K)" is decided by whether q would displace y's K-th gallery
/// neighbor (gallery wins distance ties). Gallery reciprocal and expanded
/// sets never contain the query, so they are built once and shared.
class ReRankIndex {
public:
    ReRankIndex(const EmbeddingSet& gallery, const ReRankConfig& cfg, int jobs = 1);

    std::size_t size() const { return static_cast<std::size_t>(gallery_.rows()); }
    const ReRankConfig& config() const { return cfg_; }
    const Matrix& gallery() const { return gallery_; }

    /// KN(node, k_main), gallery-internal.
    const NeighborList& neighbors(std::size_t node) const { return neighbors_.at(node); }

    /// R(node, K) for K <= k_main, sorted.
    std::vector<std::size_t> reciprocal(std::size_t node, int K) const;

    /// R*(node), sorted.
    const std::vector<std::size_t>& expanded(std::size_t node) const { return expanded_.at(node); }

    /// Jaccard distance between two gallery nodes.
    double jaccard(std::size_t a, std::size_t b) const { return jaccard_distance(expanded(a), expanded(b)); }

    QueryNeighborhood neighborhood(const Eigen::RowVectorXd& query) const;

    /// d*(query, tr) for every gallery node tr.
    std::vector<double> blended_row(const Eigen::RowVectorXd& query) const;
    std::vector<double> blended_row(const Eigen::RowVectorXd& query, const QueryNeighborhood& hood) const;

    QueryScore score(const Eigen::RowVectorXd& query) const;

    /// Per-row scores in input order; identical for any `jobs`.
    std::vector<QueryScore> score_batch(const Matrix& queries, int jobs = 1) const;

private:
    std::vector<std::size_t> expand(const std::vector<std::size_t>& base) const;

    Matrix gallery_;
    ReRankConfig cfg_;
    std::vector<NeighborList> neighbors_;
    std::vector<std::vector<std::size_t>> reciprocal_expand_;  // R(node, k_expand)
    std::vector<std::vector<std::size_t>> expanded_;
};

/// Reciprocal set of a gallery node (free-function form).
std::vector<std::size_t> k_reciprocal(const ReRankIndex& index, std::size_t node, int K);

/// One-shot score of a single query.
double ood_score(const EmbeddingSet& gallery, const Eigen::RowVectorXd& query, const ReRankConfig& cfg);

std::vector<double> score_batch(const EmbeddingSet& gallery, const EmbeddingSet& queries, const ReRankConfig& cfg,
                                int jobs = 1);

/// Median Euclidean distance to the n nearest gallery rows (no re-ranking).
std::vector<double> naive_knn_scores(const Matrix& gallery, const Matrix& queries, int n_median, int jobs = 1);

}  // namespace oodr
