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

#include <filesystem>
#include <string>

namespace oodr {

/// Load failure with the position that triggered it. `offset` is a byte
/// offset for EMBD files and a 1-based line number for CSV files.
class LoadError : public InputError {
public:
    LoadError(const std::string& what, std::size_t offset) : InputError(what), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

inline constexpr std::uint32_t kEmbdVersion = 1;

/// Reads an EMBD binary file, or a CSV file (label,v1,...,vD per line,
/// optional header) when the file does not start with the EMBD magic.
///
/// EMBD layout, little-endian:
///   "EMBD" | u32 version=1 | u32 N | u32 D | u8 normalized | 3 zero bytes
///   | N*D f32 row-major | N i32 labels
/// Rows of a file flagged normalized are re-normalized in double precision
/// after widening, so the in-memory set meets the 1e-9 unit-norm invariant.
EmbeddingSet read_embeddings(const std::filesystem::path& path);

/// Writes the EMBD binary format. Values are narrowed to f32.
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);

/// Writes the CSV layout accepted by read_embeddings (with a header row).
void write_embeddings_csv(const EmbeddingSet& set, const std::filesystem::path& path);

/// Divides each row by its Euclidean norm. Throws InputError naming a zero row.
template <typename Derived>
Matrix l2_normalize_rows(const Eigen::MatrixBase<Derived>& rows) {
    Matrix out = rows;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        const double norm = out.row(r).norm();
        if (!(norm > 0.0)) throw InputError("cannot normalize zero-norm row " + std::to_string(r));
        out.row(r) /= norm;
    }
    return out;
}

EmbeddingSet l2_normalize(const EmbeddingSet& set);

}  // namespace oodr
