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

#include "commands.hpp"

#include "oodr/bench.hpp"
#include "oodr/config.hpp"
#include "oodr/embedding_io.hpp"
#include "oodr/encoder.hpp"
#include "oodr/grid_io.hpp"
#include "oodr/metrics.hpp"
#include "oodr/rerank.hpp"
#include "oodr/surrogate.hpp"
#include "oodr/text_util.hpp"
#include "oodr/train.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

namespace oodr::cli {
namespace {

namespace fs = std::filesystem;

// Options shared by every subcommand.
struct Common {
    std::string config_file;
    std::vector<std::string> overrides;
    std::optional<long long> seed;
    std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_file, "key=value configuration file");
    cmd->add_option("--set", c.overrides, "override a config key (key=value), repeatable");
    cmd->add_option("--seed", c.seed, "random seed (falls back to OODR_SEED)");
    cmd->add_option("--jobs", c.jobs, "worker threads; results do not depend on it");
}

// defaults < OODR_SEED < config file < --set < dedicated flags
RunConfig resolve(RunConfig cfg, const Common& c) {
    if (const char* env = std::getenv("OODR_SEED"); env && *env) cfg.set("seed", env);
    if (!c.config_file.empty()) cfg.load(c.config_file);
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + kv + "'");
        cfg.set(trim(kv.substr(0, eq)), kv.substr(eq + 1));
    }
    if (c.seed) cfg.set("seed", std::to_string(*c.seed));
    if (c.jobs) cfg.set("jobs", std::to_string(*c.jobs));
    if (cfg.jobs < 1) throw InputError("jobs must be at least 1");
    return cfg;
}

fs::path sidecar(const std::string& out, const char* suffix) { return fs::path(out + suffix); }

void require_file(const std::string& path) {
    if (!fs::is_regular_file(path)) throw InputError("cannot open " + path + ": no such file");
}

std::pair<int, int> parse_pair(const std::string& text, const char* what) {
    const auto parts = split(text, 'x');
    if (parts.size() == 2) {
        const auto a = parse_int(parts[0]), b = parse_int(parts[1]);
        if (a && b && *a > 0 && *b > 0) return {static_cast<int>(*a), static_cast<int>(*b)};
    }
    throw InputError(std::string(what) + " must look like RxC with positive integers, got '" + text + "'");
}

void warn_all(std::ostream& err, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) err << "oodr: warning: " << w << '\n';
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
    Common common;
    std::string data, out, trace, init, surrogates = "auto-permute";
    std::optional<int> epochs, pretrain_epochs, batch_size;
    std::optional<double> lr;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = resolve(RunConfig{}, a.common);
    if (a.epochs) cfg.set("epochs", std::to_string(*a.epochs));
    if (a.pretrain_epochs) cfg.set("pretrain_epochs", std::to_string(*a.pretrain_epochs));
    if (a.batch_size) cfg.set("batch_size", std::to_string(*a.batch_size));
    if (a.lr) cfg.set("lr", format_double(*a.lr));

    require_file(a.data);
    auto samples = read_grid_csv(a.data);
    if (samples.empty()) throw InputError(a.data + ": dataset has no samples");
    const int h = samples.front().height, w = samples.front().width, ch = samples.front().channels;
    const LabeledDataset dataset = make_dataset(std::move(samples));

    EncoderModel model;
    if (a.init.empty()) {
        Rng init(mix_seed(cfg.seed ^ 0x1u));
        model = make_encoder(cfg.layer_sizes(h * w * ch), dataset.class_count, init);
    } else {
        require_file(a.init);
        model = read_checkpoint(a.init);
        if (model.input_dim() != h * w * ch || model.class_count() != dataset.class_count)
            throw InputError(a.init + ": checkpoint shape does not match " + a.data);
    }
    LossConfig loss = cfg.loss;
    loss.class_count = dataset.class_count;

    std::vector<EpochLoss> trace;
    if (cfg.pretrain_epochs > 0) {
        LossConfig ce_only = loss;
        ce_only.lambda_terms = {0.0, 0.0, 1.0};
        TrainSchedule pre = cfg.schedule;
        pre.epochs = cfg.pretrain_epochs;
        pre.seed = mix_seed(cfg.seed ^ 0x3u);
        auto r = train(std::move(model), dataset, {}, ce_only, pre);
        warn_all(err, r.warnings);
        model = std::move(r.model);
        trace = std::move(r.trace);
    }

    std::vector<SampleGrid> surrogates;
    if (a.surrogates == "auto-permute" || a.surrogates == "auto-hide") {
        SurrogateOptions opt = cfg.surrogate;
        opt.method = a.surrogates == "auto-hide" ? SurrogateMethod::Hide : SurrogateMethod::Permute;
        auto batch = generate_surrogates(dataset.samples, &model, opt, mix_seed(cfg.seed ^ 0x5u));
        warn_all(err, batch.warnings);
        surrogates = std::move(batch.samples);
        cfg.surrogate.method = opt.method;
    } else if (a.surrogates != "none") {
        require_file(a.surrogates);
        surrogates = read_grid_csv(a.surrogates);
        for (const auto& s : surrogates)
            if (s.height != h || s.width != w || s.channels != ch)
                throw InputError(a.surrogates + ": surrogate shape does not match the dataset");
    }
    if (surrogates.empty() && loss.lambda_terms[1] != 0.0) {
        err << "oodr: warning: no surrogates; the OoD tuplet term is disabled\n";
        loss.lambda_terms[1] = 0.0;
        cfg.loss.lambda_terms[1] = 0.0;
    }

    TrainSchedule schedule = cfg.schedule;
    schedule.seed = mix_seed(cfg.seed ^ 0x2u);
    auto result = train(std::move(model), dataset, surrogates, loss, schedule);
    warn_all(err, result.warnings);
    const int offset = static_cast<int>(trace.size());
    for (auto e : result.trace) {
        e.epoch += offset;
        trace.push_back(e);
    }

    write_checkpoint(result.model, a.out);
    const fs::path trace_path = a.trace.empty() ? sidecar(a.out, ".trace.csv") : fs::path(a.trace);
    write_loss_trace(trace, trace_path);
    cfg.write(sidecar(a.out, ".config"));
    out << "trained " << dataset.samples.size() << " samples, " << surrogates.size() << " surrogates, "
        << trace.size() << " epochs";
    if (!trace.empty()) out << ", final loss " << format_double(trace.back().total);
    out << "\ncheckpoint " << a.out << "\ntrace " << trace_path.string() << '\n';
    return kExitOk;
}

// ---- surrogate -----------------------------------------------------------

struct SurrogateArgs {
    Common common;
    std::string data, method, model, saliency, out, grid, patch;
    std::optional<int> count;
};

SaliencyMap to_map(const SampleGrid& g) {
    SaliencyMap m;
    m.values.resize(g.height, g.width);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c) m.values(r, c) = g.at(r, c, 0);
    m.degenerate = (m.values.array() == 0.0).all();
    return m;
}

int cmd_surrogate(const SurrogateArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = resolve(RunConfig{}, a.common);
    if (!a.method.empty()) cfg.set("surrogate_method", a.method);
    if (a.count) cfg.set("surrogate_count", std::to_string(*a.count));
    if (!a.grid.empty()) {
        const auto [r, c] = parse_pair(a.grid, "--grid");
        cfg.surrogate.grid_rows = r;
        cfg.surrogate.grid_cols = c;
    }
    if (!a.patch.empty()) {
        const auto [ph, pw] = parse_pair(a.patch, "--patch");
        cfg.surrogate.patch_h = ph;
        cfg.surrogate.patch_w = pw;
    }

    require_file(a.data);
    const auto samples = read_grid_csv(a.data);
    SurrogateBatch batch;
    if (cfg.surrogate.method == SurrogateMethod::Hide && !a.saliency.empty()) {
        require_file(a.saliency);
        std::vector<SaliencyMap> maps;
        for (const auto& g : read_grid_csv(a.saliency)) maps.push_back(to_map(g));
        batch = generate_surrogates_from_maps(samples, maps, cfg.surrogate);
    } else {
        std::optional<EncoderModel> model;
        if (!a.model.empty()) {
            require_file(a.model);
            model = read_checkpoint(a.model);
        }
        if (cfg.surrogate.method == SurrogateMethod::Hide && !model)
            throw InputError("--method hide needs --model or --saliency");
        batch = generate_surrogates(samples, model ? &*model : nullptr, cfg.surrogate, mix_seed(cfg.seed ^ 0x5u));
    }
    warn_all(err, batch.warnings);
    if (!samples.empty() && batch.samples.empty())
        throw InputError("no surrogates were produced from " + std::to_string(samples.size()) + " samples");

    if (samples.empty()) {
        // Shape comes from the input header; re-read it cheaply.
        std::ifstream in(a.data);
        std::string header;
        std::getline(in, header);
        const auto dims = split(trim(header), ',');
        write_grid_csv({}, a.out, static_cast<int>(*parse_int(dims.at(0))), static_cast<int>(*parse_int(dims.at(1))),
                       static_cast<int>(*parse_int(dims.at(2))));
    } else {
        write_grid_csv(batch.samples, a.out);
    }
    cfg.write(sidecar(a.out, ".config"));
    out << "wrote " << batch.samples.size() << " " << to_string(cfg.surrogate.method) << " surrogates to " << a.out
        << '\n';
    return kExitOk;
}

// ---- embed ---------------------------------------------------------------

struct EmbedArgs {
    Common common;
    std::string model, data, out;
    bool csv = false;
};

int cmd_embed(const EmbedArgs& a, std::ostream& out, std::ostream&) {
    RunConfig cfg = resolve(RunConfig{}, a.common);
    require_file(a.model);
    require_file(a.data);
    const EncoderModel model = read_checkpoint(a.model);
    const auto samples = read_grid_csv(a.data);
    if (samples.empty()) throw InputError(a.data + ": dataset has no samples");
    const int dim = static_cast<int>(samples.front().data.size());
    if (dim != model.input_dim())
        throw InputError("dimension mismatch: checkpoint expects " + std::to_string(model.input_dim()) +
                         " inputs, " + a.data + " has " + std::to_string(dim));
    std::vector<int> labels;
    for (const auto& s : samples) labels.push_back(s.label);
    const EmbeddingSet set = make_embedding_set(forward(model, flatten(samples)).embeddings, labels, true);
    if (a.csv)
        write_embeddings_csv(set, a.out);
    else
        write_embeddings(set, a.out);
    cfg.write(sidecar(a.out, ".config"));
    out << "embedded " << set.vectors.rows() << " samples into " << set.vectors.cols() << " dimensions\n";
    return kExitOk;
}

// ---- score ---------------------------------------------------------------

struct ScoreArgs {
    Common common;
    std::string gallery, queries, out, explain, baseline, model;
    std::optional<int> k, k_expand, n_median;
    std::optional<double> lambda;
    bool overlap_filter = false;
};

std::string join_ids(const std::vector<std::size_t>& ids, const EmbeddingSet& set) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ";" : "") + std::to_string(set.ids[ids[i]]);
    return s;
}

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream&) {
    RunConfig cfg = resolve(RunConfig{}, a.common);
    if (a.k) cfg.set("k_main", std::to_string(*a.k));
    if (a.k_expand) cfg.set("k_expand", std::to_string(*a.k_expand));
    if (a.n_median) cfg.set("n_median", std::to_string(*a.n_median));
    if (a.lambda) cfg.set("lambda", format_double(*a.lambda));
    if (a.overlap_filter) cfg.rerank.overlap_filter = true;
    if (!a.baseline.empty() && a.baseline != "msp") throw InputError("unknown baseline '" + a.baseline + "'");
    if (!a.baseline.empty() && a.model.empty()) throw InputError("--baseline msp needs --model");

    require_file(a.gallery);
    require_file(a.queries);
    const EmbeddingSet gallery = read_embeddings(a.gallery);
    const EmbeddingSet queries = read_embeddings(a.queries);
    if (gallery.vectors.cols() != queries.vectors.cols())
        throw InputError("gallery has dimension " + std::to_string(gallery.vectors.cols()) + ", queries " +
                         std::to_string(queries.vectors.cols()));
    if (gallery.normalized != queries.normalized)
        throw InputError("gallery and queries disagree on normalization");

    std::vector<double> msp;
    if (!a.baseline.empty()) {
        require_file(a.model);
        const EncoderModel model = read_checkpoint(a.model);
        if (model.embedding_dim() != queries.vectors.cols())
            throw InputError("checkpoint embedding dimension does not match the queries");
        msp = max_softmax_from_logits(head_logits(model, queries.vectors));
    }

    const ReRankIndex index(gallery, cfg.rerank, cfg.jobs);
    const auto scores = index.score_batch(queries.vectors, cfg.jobs);

    std::ofstream csv(a.out, std::ios::trunc);
    if (!csv) throw InputError("cannot write " + a.out);
    csv << "id,score,neighbors,dstar" << (msp.empty() ? "" : ",msp") << '\n';
    for (std::size_t i = 0; i < scores.size(); ++i) {
        std::string ids, dstar;
        for (std::size_t j = 0; j < scores[i].nearest.size(); ++j) {
            ids += (j ? ";" : "") + std::to_string(gallery.ids[scores[i].nearest[j].id]);
            dstar += (j ? ";" : "") + format_double(scores[i].nearest[j].distance);
        }
        csv << queries.ids[i] << ',' << format_double(scores[i].score) << ',' << ids << ',' << dstar;
        if (!msp.empty()) csv << ',' << format_double(msp[i]);
        csv << '\n';
    }
    if (!csv) throw InputError("failed writing " + a.out);

    if (!a.explain.empty()) {
        nlohmann::ordered_json dump = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < queries.vectors.rows(); ++i) {
            const auto hood = index.neighborhood(queries.vectors.row(i));
            nlohmann::ordered_json q;
            q["id"] = queries.ids[static_cast<std::size_t>(i)];
            std::vector<std::size_t> knn_ids;
            for (const auto& n : hood.neighbors) knn_ids.push_back(n.id);
            q["knn"] = join_ids(knn_ids, gallery);
            q["reciprocal"] = join_ids(hood.reciprocal, gallery);
            q["expanded"] = join_ids(hood.expanded, gallery);
            nlohmann::ordered_json near = nlohmann::ordered_json::array();
            for (const auto& n : scores[static_cast<std::size_t>(i)].nearest)
                near.push_back({{"id", gallery.ids[n.id]},
                                {"dstar", n.distance},
                                {"reciprocal", join_ids(index.reciprocal(n.id, cfg.rerank.k_main), gallery)},
                                {"expanded", join_ids(index.expanded(n.id), gallery)}});
            q["nearest"] = std::move(near);
            dump.push_back(std::move(q));
        }
        std::ofstream ex(a.explain, std::ios::trunc);
        if (!ex) throw InputError("cannot write " + a.explain);
        ex << dump.dump(2) << '\n';
    }
    cfg.write(sidecar(a.out, ".config"));
    out << "scored " << scores.size() << " queries against " << gallery.vectors.rows() << " gallery samples\n";
    return kExitOk;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
    Common common;
    std::string id, ood, out, csv, hist, column = "score", prior = "equal";
    int bins = 20;
};

// Reads one numeric column. With a header the column is chosen by name;
// without one the first column is used.
std::vector<double> read_scores(const std::string& path, const std::string& column) {
    require_file(path);
    std::ifstream in(path);
    std::string line;
    std::size_t line_no = 0, col = 0;
    bool first = true;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto fields = split(text, ',');
        if (first) {
            first = false;
            if (!parse_double(trim(fields.front()))) {
                const auto it = std::find_if(fields.begin(), fields.end(),
                                             [&](const std::string& f) { return trim(f) == column; });
                if (it == fields.end()) throw LoadError(path + ": no column named '" + column + "'", line_no);
                col = static_cast<std::size_t>(it - fields.begin());
                continue;
            }
        }
        if (col >= fields.size())
            throw LoadError(path + " line " + std::to_string(line_no) + ": missing score column", line_no);
        const auto v = parse_double(trim(fields[col]));
        if (!v || !std::isfinite(*v))
            throw LoadError(path + " line " + std::to_string(line_no) + ": '" + fields[col] + "' is not a finite number",
                            line_no);
        values.push_back(*v);
    }
    if (values.empty()) throw InputError(path + ": no scores");
    return values;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = resolve(RunConfig{}, a.common);
    if (a.bins < 1) throw InputError("--bins must be at least 1");
    if (a.prior != "equal" && a.prior != "empirical") throw InputError("--prior must be equal or empirical");
    const auto id = read_scores(a.id, a.column);
    const auto ood = read_scores(a.ood, a.column);
    ScoreReport report = histogram_report(id, ood, a.bins);
    if (a.prior == "empirical") report.detection_accuracy = detection_accuracy(id, ood, Prior::Empirical);
    warn_all(err, report.warnings);
    write_report_json(report, a.out);
    if (!a.csv.empty()) write_report_csv(report, a.csv);
    if (!a.hist.empty()) write_histogram_csv(report.histogram, a.hist);
    cfg.write(sidecar(a.out, ".config"));
    out << std::fixed << std::setprecision(2) << "TNR@TPR95 " << 100.0 * report.tnr_at_tpr95 << "  AUROC "
        << 100.0 * report.auroc << "  DetAcc " << 100.0 * report.detection_accuracy << '\n';
    return kExitOk;
}

// ---- bench ---------------------------------------------------------------

struct BenchArgs {
    Common common;
    std::vector<std::string> ablate;
    std::string out;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream&) {
    RunConfig cfg = resolve(bench_config(), a.common);
    std::vector<BenchArm> arms;
    if (a.ablate.empty()) {
        arms = all_bench_arms();
    } else {
        arms.push_back(BenchArm::Full);
        for (const auto& name : a.ablate) {
            const BenchArm arm = parse_bench_arm(name);
            if (std::find(arms.begin(), arms.end(), arm) == arms.end()) arms.push_back(arm);
        }
    }
    const BenchResult result = run_bench(cfg, cfg.seed, arms);
    const std::string report = format_bench_report(result);
    out << report;
    if (!a.out.empty()) {
        std::ofstream f(a.out, std::ios::trunc);
        if (!f) throw InputError("cannot write " + a.out);
        f << report;
        cfg.write(sidecar(a.out, ".config"));
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Out-of-distribution detection toolkit: tuplet-loss encoder, surrogates, re-ranked kNN scoring",
                 "oodr"};
    app.require_subcommand(1);

    TrainArgs ta;
    auto* train_cmd = app.add_subcommand("train", "train an encoder on a grid dataset");
    add_common(train_cmd, ta.common);
    train_cmd->add_option("--data", ta.data, "grid CSV dataset")->required();
    train_cmd->add_option("--out", ta.out, "ENCM checkpoint to write")->required();
    train_cmd->add_option("--trace", ta.trace, "loss trace CSV (default <out>.trace.csv)");
    train_cmd->add_option("--init", ta.init, "start from this checkpoint instead of a random encoder");
    train_cmd->add_option("--surrogates", ta.surrogates, "auto-permute, auto-hide, none, or a grid CSV file");
    train_cmd->add_option("--epochs", ta.epochs);
    train_cmd->add_option("--pretrain-epochs", ta.pretrain_epochs, "cross-entropy-only epochs before the full loss");
    train_cmd->add_option("--batch-size", ta.batch_size);
    train_cmd->add_option("--lr", ta.lr);

    SurrogateArgs sa;
    auto* sur_cmd = app.add_subcommand("surrogate", "generate OoD surrogates from a grid dataset");
    add_common(sur_cmd, sa.common);
    sur_cmd->add_option("--data", sa.data, "grid CSV dataset")->required();
    sur_cmd->add_option("--method", sa.method, "permute or hide");
    sur_cmd->add_option("--model", sa.model, "ENCM checkpoint used for saliency (hide)");
    sur_cmd->add_option("--saliency", sa.saliency, "precomputed saliency maps as a one-channel grid CSV (hide)");
    sur_cmd->add_option("--count", sa.count, "surrogates per sample");
    sur_cmd->add_option("--grid", sa.grid, "permutation split, RxC");
    sur_cmd->add_option("--patch", sa.patch, "hide window, HxW");
    sur_cmd->add_option("--out", sa.out, "grid CSV to write")->required();

    EmbedArgs ea;
    auto* embed_cmd = app.add_subcommand("embed", "embed a grid dataset with a trained encoder");
    add_common(embed_cmd, ea.common);
    embed_cmd->add_option("--model", ea.model, "ENCM checkpoint")->required();
    embed_cmd->add_option("--data", ea.data, "grid CSV dataset")->required();
    embed_cmd->add_option("--out", ea.out, "EMBD file to write")->required();
    embed_cmd->add_flag("--csv", ea.csv, "write CSV instead of EMBD");

    ScoreArgs sc;
    auto* score_cmd = app.add_subcommand("score", "score queries against a gallery");
    add_common(score_cmd, sc.common);
    score_cmd->add_option("--gallery", sc.gallery, "gallery embeddings")->required();
    score_cmd->add_option("--queries", sc.queries, "query embeddings")->required();
    score_cmd->add_option("--out", sc.out, "scores CSV to write")->required();
    score_cmd->add_option("--k", sc.k, "neighbors for reciprocal sets (default 15)");
    score_cmd->add_option("--k-expand", sc.k_expand, "neighbors for local expansion (default 6)");
    score_cmd->add_option("--lambda", sc.lambda, "weight of the Euclidean term (default 0.3)");
    score_cmd->add_option("--n-median", sc.n_median, "neighbors in the median (default 15)");
    score_cmd->add_flag("--overlap-filter", sc.overlap_filter, "only expand with mostly overlapping sets");
    score_cmd->add_option("--explain", sc.explain, "JSON dump of neighbor sets per query");
    score_cmd->add_option("--baseline", sc.baseline, "also emit a baseline score (msp)");
    score_cmd->add_option("--model", sc.model, "ENCM checkpoint for the baseline");

    EvalArgs va;
    auto* eval_cmd = app.add_subcommand("eval", "compute detection metrics from ID and OoD scores");
    add_common(eval_cmd, va.common);
    eval_cmd->add_option("--id", va.id, "ID scores CSV")->required();
    eval_cmd->add_option("--ood", va.ood, "OoD scores CSV")->required();
    eval_cmd->add_option("--out", va.out, "JSON report to write")->required();
    eval_cmd->add_option("--csv", va.csv, "CSV report to write");
    eval_cmd->add_option("--hist", va.hist, "histogram CSV to write");
    eval_cmd->add_option("--bins", va.bins, "histogram bins (default 20)");
    eval_cmd->add_option("--column", va.column, "score column name (default score)");
    eval_cmd->add_option("--prior", va.prior, "detection accuracy prior: equal or empirical");

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "run the synthetic benchmark with ablations");
    add_common(bench_cmd, ba.common);
    bench_cmd->add_option("--ablate", ba.ablate, "arms to run next to full (default: all)");
    bench_cmd->add_option("--out", ba.out, "markdown report to write");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(ta, out, err);
        if (sur_cmd->parsed()) return cmd_surrogate(sa, out, err);
        if (embed_cmd->parsed()) return cmd_embed(ea, out, err);
        if (score_cmd->parsed()) return cmd_score(sc, out, err);
        if (eval_cmd->parsed()) return cmd_eval(va, out, err);
        if (bench_cmd->parsed()) return cmd_bench(ba, out, err);
    } catch (const NumericError& e) {
        err << "oodr: numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const InputError& e) {
        err << "oodr: error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "oodr: error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace oodr::cli
