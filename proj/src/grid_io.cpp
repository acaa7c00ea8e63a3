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

#include "oodr/grid_io.hpp"

#include "oodr/embedding_io.hpp"
#include "oodr/text_util.hpp"

#include <algorithm>
#include <fstream>

namespace oodr {

std::vector<SampleGrid> read_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    int h = 0, w = 0, c = 0;
    bool have_header = false;
    std::vector<SampleGrid> samples;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        const auto where = path.string() + " line " + std::to_string(line_no);
        if (!have_header) {
            if (fields.size() != 3) throw LoadError(where + ": expected header H,W,C", line_no);
            const auto hh = parse_int(fields[0]), ww = parse_int(fields[1]), cc = parse_int(fields[2]);
            if (!hh || !ww || !cc || *hh < 1 || *ww < 1 || *cc < 1)
                throw LoadError(where + ": header dimensions must be positive integers", line_no);
            h = static_cast<int>(*hh);
            w = static_cast<int>(*ww);
            c = static_cast<int>(*cc);
            have_header = true;
            continue;
        }
        const std::size_t values = static_cast<std::size_t>(h) * w * c;
        const bool has_provenance = fields.size() == values + 2;
        if (fields.size() != values + 1 && !has_provenance)
            throw LoadError(where + " (row " + std::to_string(samples.size()) + "): expected " +
                                std::to_string(values + 1) + " fields, found " + std::to_string(fields.size()),
                            line_no);
        const auto label = parse_int(fields[0]);
        if (!label) throw LoadError(where + " (row " + std::to_string(samples.size()) + "): bad label", line_no);
        SampleGrid grid(h, w, c, static_cast<int>(*label));
        for (std::size_t i = 0; i < values; ++i) {
            const auto v = parse_double(fields[i + 1]);
            if (!v || !(*v >= 0.0 && *v <= 1.0))
                throw LoadError(where + " (row " + std::to_string(samples.size()) + "): value #" +
                                    std::to_string(i) + " '" + fields[i + 1] + "' is not a number in [0,1]",
                                line_no);
            grid.data[static_cast<Eigen::Index>(i)] = *v;
        }
        if (has_provenance) {
            const auto parts = split(fields.back(), ':');
            const auto src = parts.size() == 2 ? parse_int(parts[0]) : std::nullopt;
            if (!src) throw LoadError(where + ": provenance must be source_id:method", line_no);
            grid.source_id = *src;
            grid.origin = parts[1];
        }
        samples.push_back(std::move(grid));
    }
    if (!have_header) throw LoadError(path.string() + ": missing H,W,C header", line_no);
    return samples;
}

void write_grid_csv(const std::vector<SampleGrid>& samples, const std::filesystem::path& path) {
    if (samples.empty()) throw InputError("cannot infer a grid shape without samples: " + path.string());
    const auto& first = samples.front();
    write_grid_csv(samples, path, first.height, first.width, first.channels);
}

void write_grid_csv(const std::vector<SampleGrid>& samples, const std::filesystem::path& path, int height, int width,
                    int channels) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << height << ',' << width << ',' << channels << '\n';
    for (const auto& s : samples) {
        if (s.height != height || s.width != width || s.channels != channels)
            throw InputError("grid samples must share one shape");
        out << s.label;
        for (Eigen::Index i = 0; i < s.data.size(); ++i) out << ',' << format_double(s.data[i]);
        if (!s.origin.empty()) out << ',' << s.source_id << ':' << s.origin;
        out << '\n';
    }
    if (!out) throw InputError("write failed for " + path.string());
}

LabeledDataset make_dataset(std::vector<SampleGrid> samples) {
    LabeledDataset ds;
    int max_label = -1;
    std::vector<int> labels;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].label < 0)
            throw InputError("sample " + std::to_string(i) + " is unlabeled; training data needs labels >= 0");
        max_label = std::max(max_label, samples[i].label);
        labels.push_back(samples[i].label);
    }
    ds.class_count = max_label + 1;
    ds.class_weights = inverse_frequency_weights(labels, ds.class_count);
    ds.samples = std::move(samples);
    if (!ds.samples.empty()) validate(ds);
    return ds;
}

}  // namespace oodr
