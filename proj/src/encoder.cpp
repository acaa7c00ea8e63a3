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

#include "oodr/encoder.hpp"

#include "oodr/embedding_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace oodr {
namespace {

void check_sizes(const std::vector<int>& layer_sizes, int class_count) {
    if (layer_sizes.size() < 2) throw InputError("encoder needs at least an input and an embedding size");
    for (int s : layer_sizes)
        if (s < 1) throw InputError("layer sizes must be positive");
    if (class_count < 1) throw InputError("class count must be positive");
}

template <typename T>
void put(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

}  // namespace

Eigen::Index EncoderModel::parameter_count() const {
    Eigen::Index n = head_weights.size() + head_bias.size();
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

EncoderModel make_zero_encoder(const std::vector<int>& layer_sizes, int class_count) {
    check_sizes(layer_sizes, class_count);
    EncoderModel model;
    model.layer_sizes = layer_sizes;
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i)
        model.layers.push_back({Matrix::Zero(layer_sizes[i + 1], layer_sizes[i]), Vector::Zero(layer_sizes[i + 1])});
    model.head_weights = Matrix::Zero(class_count, layer_sizes.back());
    model.head_bias = Vector::Zero(class_count);
    return model;
}

EncoderModel zeros_like(const EncoderModel& model) {
    return make_zero_encoder(model.layer_sizes, model.class_count());
}

EncoderModel make_encoder(const std::vector<int>& layer_sizes, int class_count, Rng& rng) {
    EncoderModel model = make_zero_encoder(layer_sizes, class_count);
    auto fill = [&rng](Matrix& m) {
        const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-limit, limit);
    };
    for (auto& layer : model.layers) {
        fill(layer.weights);
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = rng.uniform(-0.1, 0.1);
    }
    fill(model.head_weights);
    return model;
}

Vector pack_parameters(const EncoderModel& model) {
    Vector out(model.parameter_count());
    Eigen::Index pos = 0;
    auto append = [&](const auto& block) {
        for (Eigen::Index r = 0; r < block.rows(); ++r)
            for (Eigen::Index c = 0; c < block.cols(); ++c) out[pos++] = block(r, c);
    };
    for (const auto& l : model.layers) {
        append(l.weights);
        append(l.bias);
    }
    append(model.head_weights);
    append(model.head_bias);
    return out;
}

void unpack_parameters(EncoderModel& model, const Vector& packed) {
    if (packed.size() != model.parameter_count()) throw InputError("parameter vector has the wrong length");
    Eigen::Index pos = 0;
    auto take = [&](auto& block) {
        for (Eigen::Index r = 0; r < block.rows(); ++r)
            for (Eigen::Index c = 0; c < block.cols(); ++c) block(r, c) = packed[pos++];
    };
    for (auto& l : model.layers) {
        take(l.weights);
        take(l.bias);
    }
    take(model.head_weights);
    take(model.head_bias);
}

ForwardPass forward_pass(const EncoderModel& model, const Matrix& batch) {
    if (batch.cols() != model.input_dim())
        throw InputError("batch has " + std::to_string(batch.cols()) + " columns but the encoder expects " +
                         std::to_string(model.input_dim()));
    ForwardPass pass;
    Matrix current = batch;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const auto& layer = model.layers[i];
        pass.inputs.push_back(current);
        Matrix z = current * layer.weights.transpose();
        z.rowwise() += layer.bias.transpose();
        if (i + 1 < model.layers.size()) z = z.array().tanh().matrix();
        current = std::move(z);
    }
    pass.raw_embeddings = current;
    pass.norms = current.rowwise().norm();
    pass.embeddings = current;
    for (Eigen::Index r = 0; r < current.rows(); ++r) {
        if (!(pass.norms[r] > 0.0) || !std::isfinite(pass.norms[r]))
            throw NumericError("embedding of row " + std::to_string(r) + " has zero or non-finite norm");
        pass.embeddings.row(r) /= pass.norms[r];
    }
    pass.logits = head_logits(model, pass.embeddings);
    return pass;
}

Forward forward(const EncoderModel& model, const Matrix& batch) {
    auto pass = forward_pass(model, batch);
    return {std::move(pass.embeddings), std::move(pass.logits)};
}

Matrix head_logits(const EncoderModel& model, const Matrix& embeddings) {
    if (embeddings.cols() != model.embedding_dim())
        throw InputError("embedding dimension " + std::to_string(embeddings.cols()) + " does not match the head (" +
                         std::to_string(model.embedding_dim()) + ")");
    Matrix logits = embeddings * model.head_weights.transpose();
    logits.rowwise() += model.head_bias.transpose();
    return logits;
}

Backward backward(const EncoderModel& model, const ForwardPass& pass, const Matrix& d_embeddings,
                  const Matrix& d_logits) {
    Backward out{zeros_like(model), Matrix()};
    auto& grads = out.param_grads;

    grads.head_weights = d_logits.transpose() * pass.embeddings;
    grads.head_bias = d_logits.colwise().sum().transpose();
    Matrix d_emb = d_embeddings + d_logits * model.head_weights;

    // e = u / |u|  =>  du = (de - e (e . de)) / |u|
    Matrix d_current(d_emb.rows(), d_emb.cols());
    for (Eigen::Index r = 0; r < d_emb.rows(); ++r) {
        const double proj = pass.embeddings.row(r).dot(d_emb.row(r));
        d_current.row(r) = (d_emb.row(r) - proj * pass.embeddings.row(r)) / pass.norms[r];
    }

    for (std::size_t i = model.layers.size(); i-- > 0;) {
        const auto& layer = model.layers[i];
        grads.layers[i].weights = d_current.transpose() * pass.inputs[i];
        grads.layers[i].bias = d_current.colwise().sum().transpose();
        Matrix d_input = d_current * layer.weights;
        if (i > 0) {
            // inputs[i] = tanh(z_{i-1})
            d_input.array() *= 1.0 - pass.inputs[i].array().square();
        }
        d_current = std::move(d_input);
    }
    out.input_grads = std::move(d_current);
    return out;
}

void write_checkpoint(const EncoderModel& model, const std::filesystem::path& path) {
    std::string out = "ENCM";
    put<std::uint32_t>(out, kEncmVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.activation));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.layer_sizes.size()));
    for (int s : model.layer_sizes) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.class_count()));
    const Vector params = pack_parameters(model);
    for (Eigen::Index i = 0; i < params.size(); ++i) put<double>(out, params[i]);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw InputError("cannot write " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw InputError("write failed for " + path.string());
}

EncoderModel read_checkpoint(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot open " + path.string());
    const std::vector<char> bytes{std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
    std::size_t pos = 0;
    auto get = [&]<typename T>(T, const char* field) {
        if (pos + sizeof(T) > bytes.size())
            throw LoadError(path.string() + ": truncated checkpoint while reading " + field, pos);
        T v;
        std::memcpy(&v, bytes.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    };
    if (bytes.size() < 4 || std::string(bytes.data(), 4) != "ENCM") throw LoadError(path.string() + ": bad ENCM magic", 0);
    pos = 4;
    const auto version = get(std::uint32_t{}, "version");
    if (version != kEncmVersion) throw LoadError(path.string() + ": unsupported ENCM version " + std::to_string(version), 4);
    const auto activation = get(std::uint32_t{}, "activation");
    if (activation != static_cast<std::uint32_t>(Activation::Tanh))
        throw LoadError(path.string() + ": unknown activation id " + std::to_string(activation), 8);
    const auto count = get(std::uint32_t{}, "layer count");
    if (count < 2 || count > 64) throw LoadError(path.string() + ": implausible layer count", 12);
    std::vector<int> sizes;
    for (std::uint32_t i = 0; i < count; ++i) sizes.push_back(static_cast<int>(get(std::uint32_t{}, "layer size")));
    const auto classes = static_cast<int>(get(std::uint32_t{}, "class count"));
    EncoderModel model = make_zero_encoder(sizes, classes);
    const auto expected = pos + static_cast<std::size_t>(model.parameter_count()) * sizeof(double);
    if (bytes.size() != expected)
        throw LoadError(path.string() + ": parameter payload size mismatch", std::min(bytes.size(), expected));
    Vector params(model.parameter_count());
    for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = get(double{}, "parameters");
    if (!params.allFinite()) throw LoadError(path.string() + ": non-finite parameter", pos);
    unpack_parameters(model, params);
    return model;
}

}  // namespace oodr
