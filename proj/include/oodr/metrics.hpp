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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace oodr {

// Scores are oriented so that higher means more OoD. ID is the positive
// class: a sample is accepted as ID when score <= t and rejected as OoD when
// score > t.

struct TnrAtTpr {
    double tnr = 0.0;
    double threshold = 0.0;
};

/// t is the smallest value with at least 95% of ID scores <= t; tnr is the
/// fraction of OoD scores strictly above t.
TnrAtTpr tnr_at_tpr95(std::span<const double> id_scores, std::span<const double> ood_scores);

/// P(ood > id) + 0.5 P(ood == id), by rank statistics.
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);

enum class Prior { Equal, Empirical };

/// Best accuracy over all thresholds. With equal priors this is
/// max_t 0.5 * (TPR(t) + TNR(t)); with empirical priors (TP + TN) / N.
double detection_accuracy(std::span<const double> id_scores, std::span<const double> ood_scores,
                          Prior prior = Prior::Equal);

struct Histogram {
    std::vector<double> edges;  // bins + 1 entries
    std::vector<std::size_t> id_counts;
    std::vector<std::size_t> ood_counts;
};

struct ScoreReport {
    std::vector<double> id_scores;
    std::vector<double> ood_scores;
    double tnr_at_tpr95 = 0.0;
    double auroc = 0.0;
    double detection_accuracy = 0.0;
    double threshold_used = 0.0;
    Histogram histogram;
    std::vector<std::string> warnings;
};

/// Metrics plus a histogram on shared edges spanning the pooled range. A
/// zero-width range collapses to one bin with a warning.
ScoreReport histogram_report(std::span<const double> id_scores, std::span<const double> ood_scores, int bins);

/// {"tnr_at_tpr95":..,"auroc":..,"detection_accuracy":..,"threshold":..,"id_count":..,"ood_count":..}
std::string report_json(const ScoreReport& report);
void write_report_json(const ScoreReport& report, const std::filesystem::path& path);
/// metric,value rows.
void write_report_csv(const ScoreReport& report, const std::filesystem::path& path);
/// bin_lo,bin_hi,id_count,ood_count rows.
void write_histogram_csv(const Histogram& histogram, const std::filesystem::path& path);

}  // namespace oodr
