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

#include "doctest.h"

#include "oodr/surrogate.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <algorithm>

using namespace oodr;

namespace {

SampleGrid counting_grid(int h, int w, int c = 1) {
    SampleGrid g(h, w, c, 0);
    for (Eigen::Index i = 0; i < g.data.size(); ++i) g.data[i] = static_cast<double>(i) / static_cast<double>(g.data.size());
    return g;
}

SaliencyMap map_from(Eigen::MatrixXd values) {
    SaliencyMap m;
    m.values = std::move(values);
    m.degenerate = (m.values.array() == 0.0).all();
    return m;
}

std::vector<double> sorted_values(const SampleGrid& g) {
    std::vector<double> v(g.data.data(), g.data.data() + g.data.size());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("permutation [1,0,3,2] swaps blocks within each row of blocks") {
    // Values 0..15 laid out row-major, so each 2x2 block is easy to track by hand.
    SampleGrid g(4, 4, 1, 0);
    for (int i = 0; i < 16; ++i) g.data[i] = i / 16.0;
    Rng rng(0);
    const auto out = permute_parts(g, {2, 2, {1, 0, 3, 2}}, rng);
    const int expected[16] = {2, 3, 0, 1, 6, 7, 4, 5, 10, 11, 8, 9, 14, 15, 12, 13};
    for (int i = 0; i < 16; ++i) CHECK(out.data[i] == expected[i] / 16.0);
}

TEST_CASE("inverse permutation restores the sample") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const int gr = 1 + static_cast<int>(rng.below(3)), gc = 1 + static_cast<int>(rng.below(3));
        if (gr * gc < 2) continue;
        SampleGrid g(gr * 2, gc * 3, 2, 0);
        for (Eigen::Index i = 0; i < g.data.size(); ++i) g.data[i] = rng.uniform();
        const auto perm = random_non_identity_permutation(gr * gc, rng);
        const auto there = permute_parts(g, {gr, gc, perm}, rng);
        const auto inv = inverse_permutation(perm);
        bool identity = true;
        for (std::size_t i = 0; i < inv.size(); ++i) identity = identity && inv[i] == static_cast<int>(i);
        if (identity) {
            CHECK(there.data == g.data);
            continue;
        }
        CHECK(permute_parts(there, {gr, gc, inv}, rng).data == g.data);
        CHECK(sorted_values(there) == sorted_values(g));
    }
}

TEST_CASE("permutation preconditions") {
    Rng rng(1);
    CHECK_THROWS_AS(permute_parts(counting_grid(5, 5), {2, 2, {}}, rng), InputError);
    CHECK_THROWS_AS(validate(PermutationSpec{2, 2, {0, 1, 2, 3}}), InputError);
    CHECK_THROWS_AS(validate(PermutationSpec{2, 2, {0, 0, 1, 2}}), InputError);
    CHECK_THROWS_AS(validate(PermutationSpec{2, 2, {1, 0}}), InputError);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_non_identity_permutation(2, rng);
        CHECK(p == std::vector<int>{1, 0});
    }
}

TEST_CASE("saliency of a zero model is degenerate") {
    EncoderModel m = make_zero_encoder({4, 2}, 2);
    m.layers[0].bias << 1.0, 0.0;
    const auto map = saliency_map(m, counting_grid(2, 2));
    CHECK(map.degenerate);
    CHECK(map.values.isZero(0.0));
}

TEST_CASE("saliency follows the single pixel the model reads") {
    EncoderModel m = make_zero_encoder({4, 2}, 2);
    m.layers[0].weights(0, 2) = 1.0;  // pixel (1,0)
    m.layers[0].bias << 0.0, 1.0;
    m.head_weights(0, 0) = 1.0;
    const auto map = saliency_map(m, counting_grid(2, 2));
    CHECK_FALSE(map.degenerate);
    CHECK(map.values(1, 0) > 0.0);
    CHECK(map.values(0, 0) == 0.0);
    CHECK(map.values(0, 1) == 0.0);
    CHECK(map.values(1, 1) == 0.0);
}

TEST_CASE("saliency equals finite differences of the predicted logit") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        Rng init = rng.split(static_cast<std::uint64_t>(trial));
        const EncoderModel m = make_encoder({12, 6, 4}, 3, init);
        SampleGrid g(2, 3, 2, 0);
        for (Eigen::Index i = 0; i < g.data.size(); ++i) g.data[i] = rng.uniform();
        const auto map = saliency_map(m, g);

        Matrix emb, logits;
        oracle::forward(m, g.data.transpose(), emb, logits);
        Eigen::Index c = 0;
        logits.row(0).maxCoeff(&c);
        Eigen::VectorXd x = g.data;
        const auto fd = oracle::central_difference(x, [&](const Eigen::VectorXd& v) {
            Matrix e, l;
            oracle::forward(m, v.transpose(), e, l);
            return l(0, c);
        });
        for (int r = 0; r < 2; ++r)
            for (int col = 0; col < 3; ++col) {
                const double expect = std::abs(fd[g.index(r, col, 0)]) + std::abs(fd[g.index(r, col, 1)]);
                CHECK(map.values(r, col) == doctest::Approx(expect).epsilon(1e-3));
            }
    }
}

TEST_CASE("hide_salient on a hand-authored 4x4 map") {
    // Window sums over the 9 candidate 2x2 windows: top-left is the largest,
    // bottom-right the smallest.
    Eigen::MatrixXd s(4, 4);
    s << 9, 8, 3, 3,
         8, 9, 3, 3,
         3, 3, 2, 1,
         3, 3, 1, 0.5;
    SampleGrid g(4, 4, 1, 0);
    for (int i = 0; i < 16; ++i) g.data[i] = i / 16.0;
    const auto res = hide_salient(g, map_from(s), 2, 2);
    CHECK(res.replaced.row == 0);
    CHECK(res.replaced.col == 0);
    CHECK(res.source.row == 2);
    CHECK(res.source.col == 2);
    CHECK(res.sample.at(0, 0) == g.at(2, 2));
    CHECK(res.sample.at(0, 1) == g.at(2, 3));
    CHECK(res.sample.at(1, 0) == g.at(3, 2));
    CHECK(res.sample.at(1, 1) == g.at(3, 3));
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if (r >= 2 || c >= 2) CHECK(res.sample.at(r, c) == g.at(r, c));
}

TEST_CASE("hide_salient replaces only the salient window") {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(6, 6);
    s.block(3, 2, 2, 2).setConstant(1.0);
    const SampleGrid g = counting_grid(6, 6, 3);
    const auto res = hide_salient(g, map_from(s), 2, 2);
    CHECK(res.replaced.row == 3);
    CHECK(res.replaced.col == 2);
    CHECK(res.source.row == 0);  // first zero-sum window
    CHECK(res.source.col == 0);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            for (int ch = 0; ch < 3; ++ch) {
                const bool inside = r >= 3 && r < 5 && c >= 2 && c < 4;
                CHECK(res.sample.at(r, c, ch) == (inside ? g.at(r - 3, c - 2, ch) : g.at(r, c, ch)));
            }
}

TEST_CASE("hide_salient degenerate cases") {
    SampleGrid one(1, 1, 1, 0);
    one.data[0] = 0.4;
    Eigen::MatrixXd s1(1, 1);
    s1 << 2.0;
    CHECK(hide_salient(one, map_from(s1), 1, 1).sample.data == one.data);

    CHECK_THROWS_AS(hide_salient(counting_grid(4, 4), map_from(Eigen::MatrixXd::Zero(4, 4)), 2, 2), InputError);
    CHECK_THROWS_AS(hide_salient(counting_grid(4, 4), map_from(Eigen::MatrixXd::Ones(4, 4)), 2, 2), InputError);
    CHECK_THROWS_AS(hide_salient(counting_grid(4, 4), map_from(Eigen::MatrixXd::Ones(4, 4)), 5, 2), InputError);
}

TEST_CASE("generate_surrogates") {
    std::vector<SampleGrid> samples;
    Rng rng(2);
    for (int i = 0; i < 5; ++i) {
        SampleGrid g(4, 4, 1, i % 2);
        for (Eigen::Index j = 0; j < 16; ++j) g.data[j] = rng.uniform();
        samples.push_back(g);
    }
    SurrogateOptions opt;
    SUBCASE("count zero is empty") {
        opt.count_per_sample = 0;
        CHECK(generate_surrogates(samples, nullptr, opt, 1).samples.empty());
    }
    SUBCASE("permute conserves pixels and tags provenance") {
        opt.count_per_sample = 2;
        const auto out = generate_surrogates(samples, nullptr, opt, 1);
        REQUIRE(out.samples.size() == 10);
        for (std::size_t i = 0; i < out.samples.size(); ++i) {
            const auto& s = out.samples[i];
            CHECK(s.label == kUnlabeled);
            CHECK(s.origin == "permute");
            CHECK(s.source_id == static_cast<std::int64_t>(i / 2));
            CHECK(sorted_values(s) == sorted_values(samples[i / 2]));
            CHECK(s.data != samples[i / 2].data);
        }
    }
    SUBCASE("fixed seed repeats") {
        opt.count_per_sample = 3;
        const auto a = generate_surrogates(samples, nullptr, opt, 99);
        const auto b = generate_surrogates(samples, nullptr, opt, 99);
        REQUIRE(a.samples.size() == b.samples.size());
        for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].data == b.samples[i].data);
    }
    SUBCASE("hide needs a model and skips flat saliency") {
        opt.method = SurrogateMethod::Hide;
        CHECK_THROWS_AS(generate_surrogates(samples, nullptr, opt, 1), InputError);
        EncoderModel flat = make_zero_encoder({16, 2}, 2);
        flat.layers[0].bias << 1.0, 0.0;
        const auto out = generate_surrogates(samples, &flat, opt, 1);
        CHECK(out.samples.empty());
        CHECK(out.warnings.size() == samples.size());

        Rng init(4);
        const EncoderModel m = make_encoder({16, 8, 4}, 2, init);
        opt.count_per_sample = 2;
        const auto hidden = generate_surrogates(samples, &m, opt, 1);
        CHECK(hidden.samples.size() == 10);
        for (const auto& s : hidden.samples) CHECK(s.origin == "hide");
    }
    SUBCASE("hide from supplied maps") {
        std::vector<SaliencyMap> maps;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 4);
            if (i != 2) s(static_cast<Eigen::Index>(i % 4), 1) = 1.0;
            maps.push_back(map_from(s));
        }
        const auto out = generate_surrogates_from_maps(samples, maps, opt);
        CHECK(out.samples.size() == 4);
        CHECK(out.warnings.size() == 1);
    }
}
