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

#include "oodr/config.hpp"

#include "oodr/text_util.hpp"

#include <fstream>
#include <functional>

namespace oodr {
namespace {

struct Field {
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& v) {
    const auto d = parse_double(v);
    if (!d) throw InputError("config key '" + key + "': '" + v + "' is not a number");
    return *d;
}

long long to_int(const std::string& key, const std::string& v) {
    const auto i = parse_int(v);
    if (!i) throw InputError("config key '" + key + "': '" + v + "' is not an integer");
    return *i;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw InputError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::string join(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
    return out;
}

template <typename Get>
Field real_at(Get access, const char* key) {
    return {[access](const RunConfig& c) { return format_double(access(const_cast<RunConfig&>(c))); },
            [access, key](RunConfig& c, const std::string& v) { access(c) = to_double(key, v); }};
}

template <typename Get>
Field integer_at(Get access, const char* key) {
    return {[access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); },
            [access, key](RunConfig& c, const std::string& v) {
                using T = std::remove_reference_t<decltype(access(c))>;
                access(c) = static_cast<T>(to_int(key, v));
            }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["seed"] = {[](const RunConfig& c) { return std::to_string(c.seed); },
                     [](RunConfig& c, const std::string& v) {
                         const auto i = to_int("seed", v);
                         if (i < 0) throw InputError("config key 'seed' must be non-negative");
                         c.seed = static_cast<std::uint64_t>(i);
                     }};
        t["hidden_layers"] = {[](const RunConfig& c) { return join(c.hidden_layers); },
                              [](RunConfig& c, const std::string& v) {
                                  c.hidden_layers.clear();
                                  if (trim(v).empty()) return;
                                  for (const auto& part : split(v, ',')) {
                                      const auto i = to_int("hidden_layers", part);
                                      if (i < 1) throw InputError("hidden layer sizes must be positive");
                                      c.hidden_layers.push_back(static_cast<int>(i));
                                  }
                              }};
        t["embedding_dim"] = integer_at([](RunConfig& c) -> int& { return c.embedding_dim; }, "embedding_dim");
        t["scale_s"] = real_at([](RunConfig& c) -> double& { return c.loss.scale_s; }, "scale_s");
        t["margin_deg"] = real_at([](RunConfig& c) -> double& { return c.loss.margin_deg; }, "margin_deg");
        t["lambda_id"] = real_at([](RunConfig& c) -> double& { return c.loss.lambda_terms[0]; }, "lambda_id");
        t["lambda_ood"] = real_at([](RunConfig& c) -> double& { return c.loss.lambda_terms[1]; }, "lambda_ood");
        t["lambda_ce"] = real_at([](RunConfig& c) -> double& { return c.loss.lambda_terms[2]; }, "lambda_ce");
        t["term_reduction"] = {[](const RunConfig& c) {
                                   return std::string(c.loss.reduction == TermReduction::Mean ? "mean" : "sum");
                               },
                               [](RunConfig& c, const std::string& v) {
                                   if (v == "mean")
                                       c.loss.reduction = TermReduction::Mean;
                                   else if (v == "sum")
                                       c.loss.reduction = TermReduction::Sum;
                                   else
                                       throw InputError("term_reduction must be mean or sum");
                               }};
        t["lr"] = real_at([](RunConfig& c) -> double& { return c.schedule.lr; }, "lr");
        t["weight_decay"] = real_at([](RunConfig& c) -> double& { return c.schedule.weight_decay; }, "weight_decay");
        t["epochs"] = integer_at([](RunConfig& c) -> int& { return c.schedule.epochs; }, "epochs");
        t["pretrain_epochs"] = integer_at([](RunConfig& c) -> int& { return c.pretrain_epochs; }, "pretrain_epochs");
        t["batch_size"] = integer_at([](RunConfig& c) -> int& { return c.schedule.batch_size; }, "batch_size");
        t["tuplets_per_anchor"] =
            integer_at([](RunConfig& c) -> int& { return c.schedule.tuplets_per_anchor; }, "tuplets_per_anchor");
        t["surrogates_per_batch"] =
            integer_at([](RunConfig& c) -> int& { return c.schedule.surrogates_per_batch; }, "surrogates_per_batch");
        t["k_main"] = integer_at([](RunConfig& c) -> int& { return c.rerank.k_main; }, "k_main");
        t["k_expand"] = integer_at([](RunConfig& c) -> int& { return c.rerank.k_expand; }, "k_expand");
        t["lambda"] = real_at([](RunConfig& c) -> double& { return c.rerank.lambda; }, "lambda");
        t["n_median"] = integer_at([](RunConfig& c) -> int& { return c.rerank.n_median; }, "n_median");
        t["overlap_filter"] = {[](const RunConfig& c) { return std::string(c.rerank.overlap_filter ? "true" : "false"); },
                               [](RunConfig& c, const std::string& v) { c.rerank.overlap_filter = to_bool("overlap_filter", v); }};
        t["surrogate_method"] = {[](const RunConfig& c) { return to_string(c.surrogate.method); },
                                 [](RunConfig& c, const std::string& v) { c.surrogate.method = parse_surrogate_method(v); }};
        t["surrogate_count"] =
            integer_at([](RunConfig& c) -> int& { return c.surrogate.count_per_sample; }, "surrogate_count");
        t["grid_rows"] = integer_at([](RunConfig& c) -> int& { return c.surrogate.grid_rows; }, "grid_rows");
        t["grid_cols"] = integer_at([](RunConfig& c) -> int& { return c.surrogate.grid_cols; }, "grid_cols");
        t["patch_h"] = integer_at([](RunConfig& c) -> int& { return c.surrogate.patch_h; }, "patch_h");
        t["patch_w"] = integer_at([](RunConfig& c) -> int& { return c.surrogate.patch_w; }, "patch_w");
        t["jobs"] = integer_at([](RunConfig& c) -> int& { return c.jobs; }, "jobs");
        return t;
    }();
    return table;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> order{
        "seed",         "hidden_layers",   "embedding_dim",  "scale_s",        "margin_deg",         "lambda_id",
        "lambda_ood",   "lambda_ce",       "term_reduction", "lr",             "weight_decay",       "epochs",
        "pretrain_epochs", "batch_size",   "tuplets_per_anchor", "surrogates_per_batch", "k_main", "k_expand",
        "lambda",       "n_median",        "overlap_filter", "surrogate_method", "surrogate_count",  "grid_rows",
        "grid_cols",    "patch_h",         "patch_w",        "jobs"};
    return order;
}

std::string RunConfig::get(const std::string& key) const {
    const auto it = fields().find(key);
    if (it == fields().end()) throw InputError("unknown config key '" + key + "'");
    return it->second.get(*this);
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw InputError("unknown config key '" + key + "'");
    it->second.set(*this, trim(value));
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& key : keys()) out += key + "=" + get(key) + "\n";
    return out;
}

void RunConfig::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << to_text();
}

void RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw InputError(path.string() + " line " + std::to_string(line_no) + ": expected key=value");
        set(trim(text.substr(0, eq)), text.substr(eq + 1));
    }
}

std::vector<int> RunConfig::layer_sizes(int input_dim) const {
    std::vector<int> sizes{input_dim};
    sizes.insert(sizes.end(), hidden_layers.begin(), hidden_layers.end());
    sizes.push_back(embedding_dim);
    return sizes;
}

}  // namespace oodr
