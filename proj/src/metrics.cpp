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

#include "oodr/metrics.hpp"

#include "oodr/text_util.hpp"
#include "oodr/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace oodr {
namespace {

void require_nonempty(std::span<const double> id_scores, std::span<const double> ood_scores, const char* what) {
    if (id_scores.empty() || ood_scores.empty())
        throw InputError(std::string(what) + ": ID and OoD score sets must both be nonempty");
    for (double v : id_scores)
        if (std::isnan(v)) throw InputError(std::string(what) + ": NaN in ID scores");
    for (double v : ood_scores)
        if (std::isnan(v)) throw InputError(std::string(what) + ": NaN in OoD scores");
}

std::vector<double> sorted(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TnrAtTpr tnr_at_tpr95(std::span<const double> id_scores, std::span<const double> ood_scores) {
    require_nonempty(id_scores, ood_scores, "tnr_at_tpr95");
    const auto id = sorted(id_scores);
    const std::size_t n = id.size();
    // Smallest count m with m / n >= 0.95, in integers: 20 m >= 19 n.
    const std::size_t m = (19 * n + 19) / 20;
    const double t = id[m - 1];
    std::size_t rejected = 0;
    for (double v : ood_scores) rejected += v > t ? 1 : 0;
    return {static_cast<double>(rejected) / static_cast<double>(ood_scores.size()), t};
}

double auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
    require_nonempty(id_scores, ood_scores, "auroc");
    const auto id = sorted(id_scores);
    // Count pairs (ood > id) + 0.5 (ood == id) with binary searches over sorted ID scores.
    double wins = 0.0;
    for (double v : ood_scores) {
        const auto lo = std::lower_bound(id.begin(), id.end(), v);
        const auto hi = std::upper_bound(lo, id.end(), v);
        wins += static_cast<double>(lo - id.begin()) + 0.5 * static_cast<double>(hi - lo);
    }
    return wins / (static_cast<double>(id.size()) * static_cast<double>(ood_scores.size()));
}

double detection_accuracy(std::span<const double> id_scores, std::span<const double> ood_scores, Prior prior) {
    require_nonempty(id_scores, ood_scores, "detection_accuracy");
    const auto id = sorted(id_scores);
    const auto ood = sorted(ood_scores);
    const double n_id = static_cast<double>(id.size());
    const double n_ood = static_cast<double>(ood.size());

    auto accuracy = [&](std::size_t id_accepted, std::size_t ood_accepted) {
        const double tp = static_cast<double>(id_accepted);
        const double tn = n_ood - static_cast<double>(ood_accepted);
        return prior == Prior::Equal ? 0.5 * (tp / n_id + tn / n_ood) : (tp + tn) / (n_id + n_ood);
    };

    // t = -inf accepts nothing; then every distinct observed value in turn.
    double best = accuracy(0, 0);
    std::size_t i = 0, j = 0;
    while (i < id.size() || j < ood.size()) {
        const double t = j == ood.size() || (i < id.size() && id[i] <= ood[j]) ? id[i] : ood[j];
        while (i < id.size() && id[i] <= t) ++i;
        while (j < ood.size() && ood[j] <= t) ++j;
        best = std::max(best, accuracy(i, j));
    }
    return best;
}

ScoreReport histogram_report(std::span<const double> id_scores, std::span<const double> ood_scores, int bins) {
    if (bins < 1) throw InputError("histogram needs at least one bin");
    if (id_scores.empty() && ood_scores.empty()) throw InputError("histogram of an empty score set");
    ScoreReport report;
    report.id_scores.assign(id_scores.begin(), id_scores.end());
    report.ood_scores.assign(ood_scores.begin(), ood_scores.end());
    if (!id_scores.empty() && !ood_scores.empty()) {
        const auto tnr = tnr_at_tpr95(id_scores, ood_scores);
        report.tnr_at_tpr95 = tnr.tnr;
        report.threshold_used = tnr.threshold;
        report.auroc = auroc(id_scores, ood_scores);
        report.detection_accuracy = detection_accuracy(id_scores, ood_scores);
    }

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto set : {id_scores, ood_scores})
        for (double v : set) {
            if (!std::isfinite(v)) throw InputError("histogram: non-finite score");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!(hi > lo)) {
        if (bins > 1) report.warnings.push_back("pooled score range has zero width; using a single bin");
        bins = 1;
    }
    auto& h = report.histogram;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    h.edges.back() = hi;
    h.id_counts.assign(static_cast<std::size_t>(bins), 0);
    h.ood_counts.assign(static_cast<std::size_t>(bins), 0);
    auto bin_of = [&](double v) {
        if (!(hi > lo)) return std::size_t{0};
        const auto b = static_cast<long long>(std::floor((v - lo) / (hi - lo) * bins));
        return static_cast<std::size_t>(std::clamp<long long>(b, 0, bins - 1));
    };
    for (double v : id_scores) ++h.id_counts[bin_of(v)];
    for (double v : ood_scores) ++h.ood_counts[bin_of(v)];
    return report;
}

std::string report_json(const ScoreReport& report) {
    nlohmann::ordered_json j;
    j["tnr_at_tpr95"] = report.tnr_at_tpr95;
    j["auroc"] = report.auroc;
    j["detection_accuracy"] = report.detection_accuracy;
    j["threshold"] = report.threshold_used;
    j["id_count"] = report.id_scores.size();
    j["ood_count"] = report.ood_scores.size();
    return j.dump(2);
}

void write_report_json(const ScoreReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << report_json(report) << '\n';
}

void write_report_csv(const ScoreReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << "metric,value\n"
        << "tnr_at_tpr95," << format_double(report.tnr_at_tpr95) << '\n'
        << "auroc," << format_double(report.auroc) << '\n'
        << "detection_accuracy," << format_double(report.detection_accuracy) << '\n'
        << "threshold," << format_double(report.threshold_used) << '\n'
        << "id_count," << report.id_scores.size() << '\n'
        << "ood_count," << report.ood_scores.size() << '\n';
}

void write_histogram_csv(const Histogram& histogram, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << "bin_lo,bin_hi,id_count,ood_count\n";
    for (std::size_t b = 0; b < histogram.id_counts.size(); ++b)
        out << format_double(histogram.edges[b]) << ',' << format_double(histogram.edges[b + 1]) << ','
            << histogram.id_counts[b] << ',' << histogram.ood_counts[b] << '\n';
}

}  // namespace oodr
