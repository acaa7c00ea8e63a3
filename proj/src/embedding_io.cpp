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

#include "oodr/embedding_io.hpp"

#include "oodr/text_util.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace oodr {
namespace {

static_assert(std::endian::native == std::endian::little, "EMBD I/O assumes a little-endian host");

constexpr std::array<char, 4> kMagic{'E', 'M', 'B', 'D'};
constexpr std::size_t kHeaderSize = 20;

class ByteReader {
public:
    explicit ByteReader(const std::vector<char>& bytes) : bytes_(bytes) {}

    template <typename T>
    T read(const char* field) {
        if (pos_ + sizeof(T) > bytes_.size())
            throw LoadError(std::string("truncated file while reading ") + field + " at byte offset " +
                                std::to_string(pos_),
                            pos_);
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::size_t pos() const { return pos_; }

private:
    const std::vector<char>& bytes_;
    std::size_t pos_ = 0;
};

std::vector<char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void renormalize_flagged_rows(EmbeddingSet& set) {
    for (Eigen::Index r = 0; r < set.vectors.rows(); ++r) {
        const double norm = set.vectors.row(r).norm();
        // f32 storage perturbs unit norms by ~1e-7.
        if (std::abs(norm - 1.0) > 1e-6) {
            const auto offset = kHeaderSize + static_cast<std::size_t>(r * set.vectors.cols()) * sizeof(float);
            throw LoadError("row " + std::to_string(r) + " at byte offset " + std::to_string(offset) + " has norm " +
                                std::to_string(norm) + " but the header declares normalized rows",
                            offset);
        }
        if (std::abs(norm - 1.0) > 1e-9) set.vectors.row(r) /= norm;
    }
}

EmbeddingSet read_embd(const std::vector<char>& bytes) {
    ByteReader reader(bytes);
    for (char expected : kMagic)
        if (reader.read<char>("magic") != expected) throw LoadError("bad EMBD magic", 0);
    const auto version = reader.read<std::uint32_t>("version");
    if (version != kEmbdVersion)
        throw LoadError("unsupported EMBD version " + std::to_string(version) + " at byte offset 4", 4);
    const auto n = reader.read<std::uint32_t>("N");
    const auto d = reader.read<std::uint32_t>("D");
    const auto flag = reader.read<std::uint8_t>("normalized flag");
    if (flag > 1) throw LoadError("normalized flag must be 0 or 1 at byte offset 16", 16);
    for (int i = 0; i < 3; ++i)
        if (reader.read<std::uint8_t>("reserved") != 0)
            throw LoadError("reserved header bytes must be zero at byte offset " + std::to_string(17 + i),
                            static_cast<std::size_t>(17 + i));
    if (n == 0) throw LoadError("header declares N = 0 at byte offset 8", 8);
    if (d == 0) throw LoadError("header declares D = 0 at byte offset 12", 12);

    const std::size_t expected = kHeaderSize + std::size_t{n} * d * sizeof(float) + std::size_t{n} * sizeof(std::int32_t);
    if (bytes.size() != expected)
        throw LoadError("payload size mismatch: header implies " + std::to_string(expected) + " bytes, file has " +
                            std::to_string(bytes.size()),
                        std::min(bytes.size(), expected));

    EmbeddingSet set = make_embedding_set(Matrix(n, d));
    for (std::uint32_t r = 0; r < n; ++r) {
        for (std::uint32_t c = 0; c < d; ++c) {
            const std::size_t offset = reader.pos();
            const float v = reader.read<float>("payload");
            if (!std::isfinite(v))
                throw LoadError("non-finite value in row " + std::to_string(r) + " at byte offset " +
                                    std::to_string(offset),
                                offset);
            set.vectors(r, c) = static_cast<double>(v);
        }
    }
    for (std::uint32_t r = 0; r < n; ++r) set.labels[r] = reader.read<std::int32_t>("labels");
    set.normalized = flag == 1;
    if (set.normalized) renormalize_flagged_rows(set);
    return set;
}

EmbeddingSet read_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        const bool header = first && !parse_double(fields.front());
        first = false;
        if (header) continue;
        if (fields.size() < 2)
            throw LoadError("line " + std::to_string(line_no) + ": expected label and at least one value", line_no);
        const auto label = parse_int(fields[0]);
        if (!label) throw LoadError("line " + std::to_string(line_no) + ": label is not an integer", line_no);
        std::vector<double> values;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const auto v = parse_double(fields[i]);
            if (!v) throw LoadError("line " + std::to_string(line_no) + ": unparsable value '" + fields[i] + "'", line_no);
            if (!std::isfinite(*v))
                throw LoadError("line " + std::to_string(line_no) + " (row " + std::to_string(rows.size()) +
                                    "): non-finite value",
                                line_no);
            values.push_back(*v);
        }
        if (dim == 0) dim = values.size();
        if (values.size() != dim)
            throw LoadError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) + " values, found " +
                                std::to_string(values.size()),
                            line_no);
        rows.push_back(std::move(values));
        labels.push_back(*label);
    }
    if (rows.empty()) throw LoadError("CSV file contains no samples", line_no);
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return make_embedding_set(std::move(m), std::move(labels));
}

template <typename T>
void put(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

}  // namespace

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    EmbeddingSet set;
    if (bytes.size() >= 4 && std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        set = read_embd(bytes);
    else
        set = read_csv(std::string(bytes.begin(), bytes.end()));
    validate(set);
    return set;
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
    validate(set);
    std::string out;
    out.reserve(kHeaderSize + set.size() * (set.dim() * 4 + 4));
    out.append(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kEmbdVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(set.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
    put<std::uint8_t>(out, set.normalized ? 1 : 0);
    out.append(3, '\0');
    for (Eigen::Index r = 0; r < set.vectors.rows(); ++r)
        for (Eigen::Index c = 0; c < set.vectors.cols(); ++c) put<float>(out, static_cast<float>(set.vectors(r, c)));
    for (int label : set.labels) put<std::int32_t>(out, label);

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw InputError("cannot write " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw InputError("write failed for " + path.string());
}

void write_embeddings_csv(const EmbeddingSet& set, const std::filesystem::path& path) {
    validate(set);
    std::ofstream file(path, std::ios::trunc);
    if (!file) throw InputError("cannot write " + path.string());
    file << "label";
    for (std::size_t c = 0; c < set.dim(); ++c) file << ",v" << c;
    file << '\n';
    for (std::size_t r = 0; r < set.size(); ++r) {
        file << set.labels[r];
        for (std::size_t c = 0; c < set.dim(); ++c)
            file << ',' << format_double(set.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        file << '\n';
    }
}

EmbeddingSet l2_normalize(const EmbeddingSet& set) {
    EmbeddingSet out = set;
    out.vectors = l2_normalize_rows(set.vectors);
    out.normalized = true;
    return out;
}

}  // namespace oodr
