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

#include "oodr/surrogate.hpp"

#include <algorithm>
#include <numeric>

namespace oodr {

void validate(const PermutationSpec& spec) {
    if (spec.grid_rows < 1 || spec.grid_cols < 1) throw InputError("grid split must be positive");
    const auto n = static_cast<std::size_t>(spec.grid_rows) * static_cast<std::size_t>(spec.grid_cols);
    if (spec.permutation.size() != n)
        throw InputError("permutation has " + std::to_string(spec.permutation.size()) + " entries, expected " +
                         std::to_string(n));
    std::vector<bool> seen(n, false);
    bool identity = true;
    for (std::size_t i = 0; i < n; ++i) {
        const int p = spec.permutation[i];
        if (p < 0 || static_cast<std::size_t>(p) >= n || seen[static_cast<std::size_t>(p)])
            throw InputError("permutation is not a bijection");
        seen[static_cast<std::size_t>(p)] = true;
        identity = identity && static_cast<std::size_t>(p) == i;
    }
    if (identity) throw InputError("identity permutation would produce an unchanged sample");
}

std::vector<int> inverse_permutation(const std::vector<int>& permutation) {
    std::vector<int> inv(permutation.size());
    for (std::size_t i = 0; i < permutation.size(); ++i) inv[static_cast<std::size_t>(permutation[i])] = static_cast<int>(i);
    return inv;
}

std::vector<int> random_non_identity_permutation(int n, Rng& rng) {
    if (n < 2) throw InputError("a non-identity permutation needs at least two blocks");
    std::vector<int> perm(static_cast<std::size_t>(n));
    while (true) {
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        for (int i = 0; i < n; ++i)
            if (perm[static_cast<std::size_t>(i)] != i) return perm;
    }
}

SampleGrid permute_parts(const SampleGrid& sample, const PermutationSpec& spec, Rng& rng) {
    if (spec.grid_rows < 1 || spec.grid_cols < 1) throw InputError("grid split must be positive");
    if (sample.height % spec.grid_rows != 0 || sample.width % spec.grid_cols != 0)
        throw InputError(std::to_string(sample.height) + "x" + std::to_string(sample.width) +
                         " sample is not divisible into a " + std::to_string(spec.grid_rows) + "x" +
                         std::to_string(spec.grid_cols) + " grid");
    PermutationSpec resolved = spec;
    if (resolved.permutation.empty())
        resolved.permutation = random_non_identity_permutation(spec.grid_rows * spec.grid_cols, rng);
    validate(resolved);

    const int bh = sample.height / spec.grid_rows;
    const int bw = sample.width / spec.grid_cols;
    SampleGrid out = sample;
    for (int block = 0; block < spec.grid_rows * spec.grid_cols; ++block) {
        const int src = resolved.permutation[static_cast<std::size_t>(block)];
        const int dst_r0 = (block / spec.grid_cols) * bh, dst_c0 = (block % spec.grid_cols) * bw;
        const int src_r0 = (src / spec.grid_cols) * bh, src_c0 = (src % spec.grid_cols) * bw;
        for (int r = 0; r < bh; ++r)
            for (int c = 0; c < bw; ++c)
                for (int ch = 0; ch < sample.channels; ++ch)
                    out.at(dst_r0 + r, dst_c0 + c, ch) = sample.at(src_r0 + r, src_c0 + c, ch);
    }
    return out;
}

SaliencyMap saliency_map(const EncoderModel& model, const SampleGrid& sample) {
    const Matrix input = sample.data.transpose();
    const ForwardPass pass = forward_pass(model, input);
    Eigen::Index predicted = 0;
    pass.logits.row(0).maxCoeff(&predicted);  // first maximum on ties

    Matrix d_logits = Matrix::Zero(1, pass.logits.cols());
    d_logits(0, predicted) = 1.0;
    const Matrix d_emb = Matrix::Zero(1, pass.embeddings.cols());
    const Matrix grad = backward(model, pass, d_emb, d_logits).input_grads;

    SaliencyMap map;
    map.values = Eigen::MatrixXd::Zero(sample.height, sample.width);
    for (int r = 0; r < sample.height; ++r)
        for (int c = 0; c < sample.width; ++c)
            for (int ch = 0; ch < sample.channels; ++ch) map.values(r, c) += std::abs(grad(0, sample.index(r, c, ch)));
    map.degenerate = !(map.values.maxCoeff() > 0.0);
    return map;
}

HideResult hide_salient(const SampleGrid& sample, const SaliencyMap& map, int patch_h, int patch_w) {
    if (patch_h < 1 || patch_w < 1 || patch_h > sample.height || patch_w > sample.width)
        throw InputError("patch " + std::to_string(patch_h) + "x" + std::to_string(patch_w) + " does not fit a " +
                         std::to_string(sample.height) + "x" + std::to_string(sample.width) + " sample");
    if (map.values.rows() != sample.height || map.values.cols() != sample.width)
        throw InputError("saliency map shape does not match the sample");
    if (map.degenerate || !(map.values.maxCoeff() > 0.0))
        throw InputError("saliency map is degenerate; fall back to permute_parts");
    if ((map.values.array() < 0.0).any() || !map.values.allFinite())
        throw InputError("saliency values must be finite and non-negative");

    Window best, worst;
    double best_sum = -1.0, worst_sum = 0.0;
    bool first = true;
    for (int r = 0; r + patch_h <= sample.height; ++r) {
        for (int c = 0; c + patch_w <= sample.width; ++c) {
            const double sum = map.values.block(r, c, patch_h, patch_w).sum();
            if (first || sum > best_sum) {
                best_sum = sum;
                best = {r, c};
            }
            if (first || sum < worst_sum) {
                worst_sum = sum;
                worst = {r, c};
            }
            first = false;
        }
    }
    const bool single_window = patch_h == sample.height && patch_w == sample.width;
    if (!single_window && best_sum == worst_sum)
        throw InputError("saliency is flat over all windows; fall back to permute_parts");

    HideResult out{sample, best, worst};
    for (int r = 0; r < patch_h; ++r)
        for (int c = 0; c < patch_w; ++c)
            for (int ch = 0; ch < sample.channels; ++ch)
                out.sample.at(best.row + r, best.col + c, ch) = sample.at(worst.row + r, worst.col + c, ch);
    return out;
}

std::string to_string(SurrogateMethod method) { return method == SurrogateMethod::Permute ? "permute" : "hide"; }

SurrogateMethod parse_surrogate_method(const std::string& name) {
    if (name == "permute") return SurrogateMethod::Permute;
    if (name == "hide") return SurrogateMethod::Hide;
    throw InputError("unknown surrogate method '" + name + "' (expected permute or hide)");
}

namespace {

int resolve_patch(int requested, int extent) { return requested > 0 ? requested : std::max(1, extent / 2); }

SampleGrid tag(SampleGrid grid, std::size_t source, SurrogateMethod method) {
    grid.label = kUnlabeled;
    grid.source_id = static_cast<std::int64_t>(source);
    grid.origin = to_string(method);
    return grid;
}

}  // namespace

SurrogateBatch generate_surrogates(const std::vector<SampleGrid>& samples, const EncoderModel* model,
                                   const SurrogateOptions& options, std::uint64_t seed) {
    if (options.count_per_sample < 0) throw InputError("count_per_sample must be non-negative");
    if (options.method == SurrogateMethod::Hide && model == nullptr)
        throw InputError("hide surrogates need an encoder model for saliency");
    SurrogateBatch out;
    if (options.count_per_sample == 0) return out;
    const Rng root(seed);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        Rng rng = root.split(i);
        const auto& sample = samples[i];
        try {
            if (options.method == SurrogateMethod::Permute) {
                const PermutationSpec spec{options.grid_rows, options.grid_cols, {}};
                for (int k = 0; k < options.count_per_sample; ++k)
                    out.samples.push_back(tag(permute_parts(sample, spec, rng), i, options.method));
            } else {
                const int ph = resolve_patch(options.patch_h, sample.height);
                const int pw = resolve_patch(options.patch_w, sample.width);
                SampleGrid current = sample;
                for (int k = 0; k < options.count_per_sample; ++k) {
                    current = hide_salient(current, saliency_map(*model, current), ph, pw).sample;
                    out.samples.push_back(tag(current, i, options.method));
                }
            }
        } catch (const InputError& e) {
            out.warnings.push_back("sample " + std::to_string(i) + " skipped: " + e.what());
        }
    }
    return out;
}

SurrogateBatch generate_surrogates_from_maps(const std::vector<SampleGrid>& samples,
                                             const std::vector<SaliencyMap>& maps, const SurrogateOptions& options) {
    if (maps.size() != samples.size()) throw InputError("need exactly one saliency map per sample");
    SurrogateBatch out;
    if (options.count_per_sample == 0) return out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        try {
            const int ph = resolve_patch(options.patch_h, samples[i].height);
            const int pw = resolve_patch(options.patch_w, samples[i].width);
            out.samples.push_back(tag(hide_salient(samples[i], maps[i], ph, pw).sample, i, SurrogateMethod::Hide));
        } catch (const InputError& e) {
            out.warnings.push_back("sample " + std::to_string(i) + " skipped: " + e.what());
        }
    }
    return out;
}

}  // namespace oodr
