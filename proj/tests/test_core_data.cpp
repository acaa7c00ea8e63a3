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

#include "oodr/embedding_io.hpp"
#include "oodr/grid_io.hpp"
#include "oodr/rng.hpp"
#include "oodr/text_util.hpp"
#include "test_util.hpp"

#include <cstring>

using namespace oodr;
using testutil::TempDir;

namespace {

// Hand-assembled EMBD bytes, independent of write_embeddings.
std::string embd_bytes(std::uint32_t version, std::uint32_t n, std::uint32_t d, std::uint8_t normalized,
                       const std::vector<float>& values, const std::vector<std::int32_t>& labels) {
    std::string out = "EMBD";
    auto put = [&](const void* p, std::size_t size) { out.append(static_cast<const char*>(p), size); };
    put(&version, 4);
    put(&n, 4);
    put(&d, 4);
    put(&normalized, 1);
    out.append(3, '\0');
    for (float v : values) put(&v, 4);
    for (std::int32_t l : labels) put(&l, 4);
    return out;
}

}  // namespace

TEST_CASE("binary embeddings with two rows load as written") {
    TempDir dir("embd");
    testutil::write_text(dir / "a.embd", embd_bytes(1, 2, 3, 0, {1, 0, 0, 0, 1, 0}, {4, -1}));
    const auto set = read_embeddings(dir / "a.embd");
    CHECK(set.vectors.rows() == 2);
    CHECK(set.vectors.cols() == 3);
    CHECK(set.vectors(1, 1) == 1.0);
    CHECK(set.labels == std::vector<int>{4, -1});
    CHECK_FALSE(set.normalized);
    CHECK(set.ids == std::vector<std::uint64_t>{0, 1});

    write_embeddings(set, dir / "b.embd");
    CHECK(testutil::read_text(dir / "b.embd") == testutil::read_text(dir / "a.embd"));
}

TEST_CASE("csv embeddings") {
    TempDir dir("csv");
    SUBCASE("plain rows") {
        testutil::write_text(dir / "a.csv", "0,1.0,0.0\n1,0.0,1.0");
        const auto set = read_embeddings(dir / "a.csv");
        CHECK(set.vectors.rows() == 2);
        CHECK(set.vectors.cols() == 2);
        CHECK(set.labels == std::vector<int>{0, 1});
    }
    SUBCASE("header row is skipped") {
        testutil::write_text(dir / "a.csv", "label,x,y\n0,1.0,0.0\n");
        CHECK(read_embeddings(dir / "a.csv").vectors.rows() == 1);
    }
    SUBCASE("NaN names the row") {
        testutil::write_text(dir / "a.csv", "0,1.0,0.0\n1,nan,1.0\n");
        try {
            read_embeddings(dir / "a.csv");
            FAIL("expected a load error");
        } catch (const LoadError& e) {
            CHECK(std::string(e.what()).find("row 1") != std::string::npos);
            CHECK(e.offset() == 2);
        }
    }
    SUBCASE("ragged rows") {
        testutil::write_text(dir / "a.csv", "0,1.0,0.0\n1,0.0\n");
        CHECK_THROWS_AS(read_embeddings(dir / "a.csv"), LoadError);
    }
    SUBCASE("a second non-numeric line is an error, not a header") {
        testutil::write_text(dir / "a.csv", "label,x\nlabel,y\n0,1\n");
        CHECK_THROWS_AS(read_embeddings(dir / "a.csv"), LoadError);
    }
}

TEST_CASE("binary load errors carry byte offsets") {
    TempDir dir("embd_err");
    auto offset_of = [&](const std::string& bytes) -> std::size_t {
        testutil::write_text(dir / "x.embd", bytes);
        try {
            read_embeddings(dir / "x.embd");
        } catch (const LoadError& e) {
            return e.offset();
        }
        return static_cast<std::size_t>(-1);
    };
    CHECK(offset_of(embd_bytes(2, 1, 1, 0, {1}, {0})) == 4);
    CHECK(offset_of(embd_bytes(1, 0, 1, 0, {}, {})) == 8);
    CHECK(offset_of(embd_bytes(1, 1, 0, 0, {}, {0})) == 12);
    CHECK(offset_of(embd_bytes(1, 1, 1, 2, {1}, {0})) == 16);
    // Row 1, value 0 sits at 20 + 2*4 bytes.
    const float nan = std::numeric_limits<float>::quiet_NaN();
    CHECK(offset_of(embd_bytes(1, 2, 2, 0, {1, 2, nan, 3}, {0, 0})) == 28);
    // Header promises two rows, payload holds one.
    std::string short_payload = embd_bytes(1, 2, 1, 0, {1}, {0});
    CHECK(offset_of(short_payload) != static_cast<std::size_t>(-1));
    std::string reserved = embd_bytes(1, 1, 1, 0, {1}, {0});
    reserved[18] = 1;
    CHECK(offset_of(reserved) == 18);
}

TEST_CASE("EMBD round trip holds for random sets") {
    TempDir dir("roundtrip");
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + rng.below(20));
        const auto d = static_cast<Eigen::Index>(1 + rng.below(12));
        Matrix m(n, d);
        // f32-representable values so the narrowing write is lossless.
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j) m(i, j) = static_cast<float>(rng.uniform(-100, 100));
        std::vector<int> labels;
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng.below(5)) - 1);
        const auto set = make_embedding_set(m, labels);
        write_embeddings(set, dir / "r.embd");
        const auto back = read_embeddings(dir / "r.embd");
        CHECK(back.vectors == set.vectors);
        CHECK(back.labels == set.labels);
        CHECK(back.normalized == set.normalized);

        write_embeddings_csv(set, dir / "r.csv");
        const auto csv = read_embeddings(dir / "r.csv");
        CHECK(csv.vectors == set.vectors);
        CHECK(csv.labels == set.labels);
    }
}

TEST_CASE("normalized sets stay unit norm through f32 storage") {
    TempDir dir("unit");
    Rng rng(3);
    const auto set = make_embedding_set(testutil::random_unit_rows(rng, 30, 7), {}, true);
    write_embeddings(set, dir / "u.embd");
    const auto back = read_embeddings(dir / "u.embd");
    CHECK(back.normalized);
    for (Eigen::Index r = 0; r < back.vectors.rows(); ++r) CHECK(std::abs(back.vectors.row(r).norm() - 1.0) <= 1e-9);
    CHECK((back.vectors - set.vectors).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("embedding set invariants") {
    CHECK_NOTHROW(validate(make_embedding_set(Matrix::Identity(3, 3), {}, true)));
    Matrix half = Matrix::Identity(2, 2);
    half(1, 1) = 0.5;
    CHECK_THROWS_AS(validate(make_embedding_set(half, {}, true)), InputError);
    CHECK_THROWS_AS(validate(make_embedding_set(Matrix(0, 3))), InputError);
    auto dup = make_embedding_set(Matrix::Identity(2, 2));
    dup.ids = {5, 5};
    CHECK_THROWS_AS(validate(dup), InputError);
    TempDir dir("write_bad");
    CHECK_THROWS_AS(write_embeddings(make_embedding_set(half, {}, true), dir / "x.embd"), InputError);
}

TEST_CASE("l2 normalization") {
    Matrix m(2, 2);
    m << 3, 4, 1, 0;
    const Matrix n = l2_normalize_rows(m);
    CHECK(n(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(n(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(n(1, 0) == 1.0);
    CHECK(n(1, 1) == 0.0);
    Matrix zero = Matrix::Zero(1, 2);
    CHECK_THROWS_AS(l2_normalize_rows(zero), InputError);

    Rng rng(5);
    const Matrix once = l2_normalize_rows(testutil::random_matrix(rng, 40, 6));
    const Matrix twice = l2_normalize_rows(once);
    CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-15);
    const auto set = l2_normalize(make_embedding_set(testutil::random_matrix(rng, 5, 3)));
    CHECK(set.normalized);
    CHECK_NOTHROW(validate(set));
}

TEST_CASE("grid CSV round trip with provenance") {
    TempDir dir("grid");
    std::vector<SampleGrid> samples;
    Rng rng(9);
    for (int i = 0; i < 6; ++i) {
        SampleGrid g(2, 3, 2, i % 3 - 1);
        for (Eigen::Index j = 0; j < g.data.size(); ++j) g.data[j] = rng.uniform();
        if (g.label < 0) {
            g.source_id = i;
            g.origin = "permute";
        }
        samples.push_back(g);
    }
    write_grid_csv(samples, dir / "g.csv");
    const auto back = read_grid_csv(dir / "g.csv");
    REQUIRE(back.size() == samples.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].height == 2);
        CHECK(back[i].width == 3);
        CHECK(back[i].channels == 2);
        CHECK(back[i].label == samples[i].label);
        CHECK(back[i].data == samples[i].data);
        CHECK(back[i].source_id == samples[i].source_id);
        CHECK(back[i].origin == samples[i].origin);
    }
}

TEST_CASE("grid CSV errors") {
    TempDir dir("grid_err");
    testutil::write_text(dir / "a.csv", "2,2,1\n0,0.1,0.2,0.3\n");
    CHECK_THROWS_AS(read_grid_csv(dir / "a.csv"), LoadError);
    testutil::write_text(dir / "b.csv", "2,2\n0,0.1,0.2,0.3,0.4\n");
    CHECK_THROWS_AS(read_grid_csv(dir / "b.csv"), LoadError);
    testutil::write_text(dir / "c.csv", "1,1,1\n0,1.5\n");
    CHECK_THROWS_AS(read_grid_csv(dir / "c.csv"), InputError);
    testutil::write_text(dir / "d.csv", "1,1,1\n");
    CHECK(read_grid_csv(dir / "d.csv").empty());
    CHECK_THROWS_AS(read_grid_csv(dir / "missing.csv"), InputError);
}

TEST_CASE("dataset weights are inverse class frequency") {
    std::vector<SampleGrid> samples;
    for (int label : {0, 0, 0, 1}) samples.emplace_back(1, 1, 1, label);
    const auto ds = make_dataset(samples);
    CHECK(ds.class_count == 2);
    CHECK(ds.class_weights[0] == doctest::Approx(4.0 / 6.0));
    CHECK(ds.class_weights[1] == doctest::Approx(2.0));
    CHECK(inverse_frequency_weights({0, 2}, 3)[1] == 1.0);
    samples.emplace_back(1, 1, 1, kUnlabeled);
    CHECK_THROWS_AS(make_dataset(samples), InputError);
}

TEST_CASE("rng streams are reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    const auto s1 = Rng(7).split(3), s2 = Rng(7).split(3);
    CHECK(Rng(s1).next_u64() == Rng(s2).next_u64());
    CHECK(Rng(7).split(3).next_u64() != Rng(7).split(4).next_u64());
    Rng c(1);
    for (int i = 0; i < 1000; ++i) {
        const auto v = c.below(7);
        CHECK(v < 7);
        const double u = c.uniform();
        CHECK((u >= 0.0 && u < 1.0));
    }
}

TEST_CASE("number formatting round-trips") {
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.normal() * std::pow(10.0, static_cast<int>(rng.below(20)) - 10);
        CHECK(*parse_double(format_double(v)) == v);
    }
    CHECK_FALSE(parse_double("1.0x"));
    CHECK_FALSE(parse_int("3.5"));
    CHECK(*parse_int(" 12 ") == 12);
}
