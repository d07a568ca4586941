#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "probekit/probekit.hpp"

namespace probekit::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUnexpected = 1, kValidation = 2, kPartialFailure = 3 };

inline constexpr const char* kSeedEnv = "PROBEHARNESS_SEED";

/// Parses "a..b" (inclusive), "n", or comma-separated mixes of both.
inline std::vector<std::size_t> parse_layers(const std::string& spec) {
    std::vector<std::size_t> out;
    std::stringstream ss(spec);
    std::string part;
    auto number = [&](const std::string& s) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
            throw ValidationError("invalid layer range '" + spec + "'");
        }
        return v;
    };
    while (std::getline(ss, part, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(number(part));
            continue;
        }
        const auto lo = number(part.substr(0, dots));
        const auto hi = number(part.substr(dots + 2));
        if (hi < lo) {
            throw ValidationError("invalid layer range '" + spec + "': end before start");
        }
        for (auto l = lo; l <= hi; ++l) out.push_back(l);
    }
    if (out.empty()) {
        throw ValidationError("empty layer range");
    }
    return out;
}

inline std::vector<std::optional<std::size_t>> parse_max_features(const std::vector<std::string>& items) {
    std::vector<std::optional<std::size_t>> grid;
    for (const auto& s : items) {
        if (s == "all") {
            grid.emplace_back(std::nullopt);
            continue;
        }
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
            throw ValidationError("invalid --max-features value '" + s + "'");
        }
        grid.emplace_back(v);
    }
    return grid;
}

/// Values shared by every subcommand; CLI11 binds directly into these fields.
struct Args {
    std::string config;
    std::string store;
    std::string dataset;
    std::string ratings;
    std::string task;
    std::string matrix;
    std::string kind = "cls";
    std::vector<std::string> kinds{"cls"};
    std::string layers;
    std::size_t layer = 0;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::size_t jobs = 0;

    // Probe and protocol.
    std::size_t folds = 10;
    std::size_t runs = 10;
    std::size_t hidden = 100;
    double lr = 1e-3;
    std::size_t patience = 1;
    double val_frac = 0.1;
    std::size_t max_epochs = 200;
    std::size_t batch_size = 0;
    bool restore_best = false;
    std::string ci_over = "runs";
    bool unstratified = false;

    // Baseline.
    std::vector<std::string> max_features{"50", "all"};
    std::size_t coefficients = 0;

    // Projection.
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    std::size_t cluster_size = 0;
    double threshold = 0.25;
    double margin = 0.1;

    // Heatmap.
    std::vector<std::string> results;
};

struct SeedInfo {
    std::uint64_t value = 0;
    std::string source;
};

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(std::vector<std::string> args) {
        CLI::App app{"Layer-wise probing, baselines and projection audits for sentence embeddings", "probekit"};
        app.require_subcommand(1);
        build(app);
        try {
            merge_config(app, args);
            std::reverse(args.begin(), args.end());
            app.parse(args);
        } catch (const CLI::CallForHelp&) {
            out_ << app.help();
            return kOk;
        } catch (const CLI::CallForAllHelp&) {
            out_ << app.help("", CLI::AppFormatMode::All);
            return kOk;
        } catch (const CLI::ParseError& e) {
            err_ << "error: " << e.what() << "\n";
            return kValidation;
        } catch (const ValidationError& e) {
            err_ << "error: " << e.what() << "\n";
            return kValidation;
        }
        try {
            return dispatch(app);
        } catch (const ValidationError& e) {
            err_ << "error: " << e.what() << "\n";
            return kValidation;
        } catch (const TrainingError& e) {
            err_ << "error: " << e.what() << "\n";
            return kPartialFailure;
        } catch (const std::exception& e) {
            err_ << "error: " << e.what() << "\n";
            return kUnexpected;
        }
    }

private:
    std::ostream& out_;
    std::ostream& err_;
    Args a_;
    std::set<std::string> from_config_;

    // -- option wiring ------------------------------------------------------

    void add_common(CLI::App* sub) {
        sub->add_option("--config", a_.config, "JSON file whose keys mirror the long flags");
        sub->add_option("--out", a_.out, "Output directory");
    }
    void add_seed(CLI::App* sub) { sub->add_option("--seed", a_.seed, "Master seed (or " + std::string(kSeedEnv) + ")"); }
    void add_dataset(CLI::App* sub) {
        sub->add_option("--dataset", a_.dataset, "Labeled TSV (sentence<TAB>label)");
        sub->add_option("--ratings", a_.ratings, "Rating TSV, binarized at the mean");
        sub->add_option("--task", a_.task, "Task name (default: file stem)");
    }
    void add_features(CLI::App* sub) {
        sub->add_option("--store", a_.store, "Embedding store directory");
        sub->add_option("--kind", a_.kind, "Representation: cls, pooled, mean, product");
        sub->add_option("--layer", a_.layer, "Layer index");
        sub->add_option("--matrix", a_.matrix, "EMB1 feature matrix, instead of --store");
    }
    void add_protocol(CLI::App* sub) {
        sub->add_option("--folds", a_.folds, "Cross-validation folds");
        sub->add_option("--runs", a_.runs, "Repeated runs with fresh probe seeds");
        sub->add_option("--hidden", a_.hidden, "MLP hidden width");
        sub->add_option("--lr", a_.lr, "Adam learning rate");
        sub->add_option("--patience", a_.patience, "Early-stopping patience (epochs)");
        sub->add_option("--val-frac", a_.val_frac, "Validation fraction for early stopping");
        sub->add_option("--max-epochs", a_.max_epochs, "Epoch cap");
        sub->add_option("--batch-size", a_.batch_size, "Mini-batch size (0 = min(200, n))");
        sub->add_flag("--restore-best", a_.restore_best, "Return best-epoch instead of last-epoch weights");
        sub->add_option("--ci-over", a_.ci_over, "CI basis: runs or cells")->check(CLI::IsMember({"runs", "cells"}));
        sub->add_flag("--unstratified", a_.unstratified, "Plain instead of stratified folds");
        sub->add_option("--jobs", a_.jobs, "Worker threads (0 = all cores)");
    }
    void add_tsne(CLI::App* sub) {
        sub->add_option("--perplexity", a_.perplexity, "t-SNE perplexity");
        sub->add_option("--iterations", a_.iterations, "t-SNE iterations");
    }

    void build(CLI::App& app) {
        auto* sweep = app.add_subcommand("probe-sweep", "MLP probe accuracy per representation kind and layer");
        add_common(sweep);
        add_seed(sweep);
        add_dataset(sweep);
        sweep->add_option("--store", a_.store, "Embedding store directory");
        sweep->add_option("--kinds", a_.kinds, "Representation kinds, comma separated")->delimiter(',');
        sweep->add_option("--layers", a_.layers, "Layer range a..b (inclusive); default all");
        add_protocol(sweep);

        auto* baseline = app.add_subcommand("baseline", "TF-IDF + MLP baseline");
        add_common(baseline);
        add_seed(baseline);
        add_dataset(baseline);
        baseline->add_option("--max-features", a_.max_features, "Vocabulary caps, comma separated; 'all' = no cap")
            ->delimiter(',');
        baseline->add_option("--coefficients", a_.coefficients, "Also write the top-K logistic TF-IDF weights");
        add_protocol(baseline);

        auto* tsne_cmd = app.add_subcommand("tsne", "2-D t-SNE projection of one representation");
        add_common(tsne_cmd);
        add_seed(tsne_cmd);
        add_dataset(tsne_cmd);
        add_features(tsne_cmd);
        add_tsne(tsne_cmd);

        auto* forced = app.add_subcommand("force-tsne", "t-SNE before and after forced-cluster subsampling");
        add_common(forced);
        add_seed(forced);
        add_dataset(forced);
        add_features(forced);
        add_tsne(forced);
        forced->add_option("--cluster-size", a_.cluster_size, "Requested cluster size c' (even)")->required();

        auto* audit_cmd = app.add_subcommand("audit", "Probe accuracy versus projection separability");
        add_common(audit_cmd);
        add_seed(audit_cmd);
        add_dataset(audit_cmd);
        add_features(audit_cmd);
        add_tsne(audit_cmd);
        add_protocol(audit_cmd);
        audit_cmd->add_option("--threshold", a_.threshold, "Silhouette threshold for 'clusters'");
        audit_cmd->add_option("--margin", a_.margin, "Accuracy margin above chance for 'high'");

        auto* validate = app.add_subcommand("validate", "Check store, dataset and matrix integrity");
        add_common(validate);
        add_dataset(validate);
        validate->add_option("--store", a_.store, "Embedding store directory");
        validate->add_option("--matrix", a_.matrix, "EMB1 feature matrix");

        auto* heatmap = app.add_subcommand("heatmap", "Best accuracy per task and model across result files");
        add_common(heatmap);
        heatmap->add_option("--results", a_.results, "results.json files")->required()->delimiter(',');

        auto* norms = app.add_subcommand("norms", "Mean representation norm per layer");
        add_common(norms);
        norms->add_option("--store", a_.store, "Embedding store directory")->required();
        norms->add_option("--kind", a_.kind, "Representation kind");
        norms->add_option("--layers", a_.layers, "Layer range a..b; default all");
    }

    // -- config file ----------------------------------------------------------

    /// Injects keys from --config as flags that were not given explicitly.
    void merge_config(const CLI::App& app, std::vector<std::string>& args) {
        std::string path;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
        }
        if (path.empty() || args.empty()) return;
        std::ifstream in(path);
        if (!in) {
            throw ValidationError("cannot open config " + path);
        }
        nlohmann::json cfg;
        try {
            in >> cfg;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("config " + path + ": " + e.what());
        }
        if (!cfg.is_object()) {
            throw ValidationError("config " + path + ": top level must be an object");
        }
        const CLI::App* sub = nullptr;
        for (const auto* s : app.get_subcommands({})) {
            if (s->get_name() == args.front()) sub = s;
        }
        if (!sub) return;  // CLI11 reports the unknown subcommand

        auto given = [&](const std::string& flag) {
            return std::any_of(args.begin(), args.end(), [&](const std::string& s) {
                return s == flag || s.rfind(flag + "=", 0) == 0;
            });
        };
        std::vector<std::string> extra;
        for (const auto& [key, value] : cfg.items()) {
            const std::string flag = "--" + key;
            if (key == "config") continue;
            bool known_elsewhere = false;
            for (const auto* s : app.get_subcommands({})) {
                known_elsewhere = known_elsewhere || s->get_option_no_throw(flag) != nullptr;
            }
            if (!known_elsewhere) {
                throw ValidationError("config " + path + ": unknown key '" + key + "'");
            }
            if (sub->get_option_no_throw(flag) == nullptr || given(flag)) continue;
            if (value.is_boolean()) {
                if (value.get<bool>()) extra.push_back(flag);
            } else if (value.is_array()) {
                std::string joined;
                for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
                extra.insert(extra.end(), {flag, joined});
            } else {
                extra.insert(extra.end(), {flag, value.is_string() ? value.get<std::string>() : value.dump()});
            }
            from_config_.insert(key);
        }
        args.insert(args.end(), extra.begin(), extra.end());
    }

    // -- shared resolution ----------------------------------------------------

    SeedInfo seed(const CLI::App& sub) const {
        if (const char* env = std::getenv(kSeedEnv); env && *env) {
            std::uint64_t v = 0;
            const std::string s(env);
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size()) {
                throw ValidationError(std::string(kSeedEnv) + " is not an unsigned integer: '" + s + "'");
            }
            return {v, "env"};
        }
        if (sub.get_option("--seed")->count() == 0) {
            throw ValidationError(sub.get_name() + " needs a seed: pass --seed, set it in --config, or export " + kSeedEnv);
        }
        return {a_.seed, from_config_.count("seed") ? "config" : "flag"};
    }

    void require_path(const std::string& path, const char* flag) const {
        if (path.empty()) {
            throw ValidationError(std::string(flag) + " is required");
        }
        if (!fs::exists(path)) {
            throw ValidationError(std::string(flag) + " path does not exist: " + path);
        }
    }

    LabeledDataset dataset() const {
        if (!a_.dataset.empty() && !a_.ratings.empty()) {
            throw ValidationError("give either --dataset or --ratings, not both");
        }
        if (!a_.ratings.empty()) {
            require_path(a_.ratings, "--ratings");
            return binarize_ratings(load_ratings(a_.ratings), a_.task.empty() ? "complexity" : a_.task);
        }
        require_path(a_.dataset, "--dataset");
        return load_dataset(a_.dataset, a_.task);
    }

    SweepOptions sweep_options(const SeedInfo& s) const {
        SweepOptions o;
        o.plan.n_folds = a_.folds;
        o.plan.n_runs = a_.runs;
        o.plan.master_seed = s.value;
        o.plan.stratified = !a_.unstratified;
        o.mlp.hidden_width = a_.hidden;
        o.mlp.learning_rate = a_.lr;
        o.mlp.patience = a_.patience;
        o.mlp.validation_fraction = a_.val_frac;
        o.mlp.max_epochs = a_.max_epochs;
        o.mlp.batch_size = a_.batch_size;
        o.mlp.restore_best = a_.restore_best;
        o.ci_over = a_.ci_over == "cells" ? CiMode::cells : CiMode::runs;
        o.jobs = a_.jobs;
        o.plan.validate();
        o.mlp.validate();
        return o;
    }

    TsneConfig tsne_config(const SeedInfo& s) const {
        TsneConfig cfg;
        cfg.perplexity = a_.perplexity;
        cfg.n_iter = a_.iterations;
        cfg.seed = derive_seed({s.value, 0x75E0ULL});
        return cfg;
    }

    struct Features {
        Matrix X;
        std::string description;
    };

    Features features() const {
        if (!a_.matrix.empty()) {
            if (!a_.store.empty()) {
                throw ValidationError("give either --matrix or --store, not both");
            }
            require_path(a_.matrix, "--matrix");
            return {to_matrix(read_dense(a_.matrix)), fs::path(a_.matrix).filename().string()};
        }
        require_path(a_.store, "--store");
        const auto store = load_embedding_store(a_.store);
        const auto kind = parse_representation_kind(a_.kind);
        const auto fm = select_representation(store, {kind, a_.layer});
        std::string desc = store.model_id + " " + std::string(to_string(kind));
        if (kind != RepresentationKind::pooled) desc += " layer " + std::to_string(a_.layer);
        return {fm.values, desc};
    }

    fs::path out_dir() const {
        fs::create_directories(a_.out);
        return a_.out;
    }

    // -- subcommands ------------------------------------------------------------

    int dispatch(const CLI::App& app) {
        const auto* sub = app.get_subcommands().front();
        const auto& name = sub->get_name();
        if (name == "probe-sweep") return probe_sweep(*sub);
        if (name == "baseline") return baseline(*sub);
        if (name == "tsne") return tsne_cmd(*sub);
        if (name == "force-tsne") return force_tsne(*sub);
        if (name == "audit") return audit_cmd(*sub);
        if (name == "validate") return validate();
        if (name == "heatmap") return heatmap();
        return norms();
    }

    int finish_table(ResultsTable& table, const SeedInfo& s, const std::string& label) {
        table.meta["seed_source"] = s.source;
        const auto dir = out_dir();
        write_results_json(table, dir / "results.json");
        write_results_csv(table, dir / "results.csv");
        write_layer_svg(table, dir / "layers.svg");
        const auto failures = std::count_if(table.rows.begin(), table.rows.end(), [](const auto& r) { return !r.valid(); });
        out_ << label << ": " << table.rows.size() << " rows, " << failures << " failed; wrote " << (dir / "results.json").string() << "\n";
        for (const auto& r : table.rows) {
            if (r.valid()) {
                out_ << "  " << r.model << " " << r.featurizer << (r.layer >= 0 ? " layer " + std::to_string(r.layer) : "")
                     << ": " << svg::num(r.mean, 4) << " +/- " << svg::num(r.ci95, 4) << "\n";
            }
        }
        return failures > 0 ? kPartialFailure : kOk;
    }

    int probe_sweep(const CLI::App& sub) {
        const auto s = seed(sub);
        const auto ds = dataset();
        require_path(a_.store, "--store");
        const auto store = load_embedding_store(a_.store);
        std::vector<RepresentationKind> kinds;
        for (const auto& k : a_.kinds) kinds.push_back(parse_representation_kind(k));
        std::vector<std::size_t> layers;
        if (a_.layers.empty()) {
            for (std::size_t l = 0; l < store.num_layers; ++l) layers.push_back(l);
        } else {
            layers = parse_layers(a_.layers);
        }
        auto table = run_probe_sweep(store, ds, kinds, layers, sweep_options(s));
        table.meta["task"] = ds.task_name;
        table.meta["model_id"] = store.model_id;
        return finish_table(table, s, "probe-sweep");
    }

    int baseline(const CLI::App& sub) {
        const auto s = seed(sub);
        const auto ds = dataset();
        const auto grid = parse_max_features(a_.max_features);
        auto table = run_tfidf_baseline(ds, grid, sweep_options(s));
        table.meta["task"] = ds.task_name;
        if (a_.coefficients > 0) {
            // Full-data logistic fit; l2 = 1/n mirrors unit inverse regularization strength.
            const auto vec = tfidf_fit(ds.sentences);
            const auto X = tfidf_transform(vec, ds.sentences).values;
            const double l2 = 1.0 / static_cast<double>(ds.size());
            const auto model = train_logistic(X, ds.labels, l2, s.value);
            const auto report = top_coefficients(model, vec.vocabulary, a_.coefficients);
            nlohmann::json j;
            j["l2"] = l2;
            j["converged"] = model.meta.converged;
            j["positive"] = nlohmann::json::array();
            j["negative"] = nlohmann::json::array();
            for (const auto& [tok, w] : report.positive) j["positive"].push_back({{"token", tok}, {"weight", w}});
            for (const auto& [tok, w] : report.negative) j["negative"].push_back({{"token", tok}, {"weight", w}});
            write_text_file(out_dir() / "coefficients.json", j.dump(2) + "\n");
        }
        return finish_table(table, s, "baseline");
    }

    std::vector<Label> labels_for(std::size_t rows) const {
        const auto ds = dataset();
        if (ds.size() != rows) {
            throw ValidationError("dataset has " + std::to_string(ds.size()) + " sentences but features have " +
                                  std::to_string(rows) + " rows");
        }
        return ds.labels;
    }

    int tsne_cmd(const CLI::App& sub) {
        const auto s = seed(sub);
        const auto f = features();
        const auto labels = labels_for(f.X.rows());
        const auto r = tsne(f.X, tsne_config(s));
        const auto dir = out_dir();
        write_text_file(dir / "embedding.csv", embedding_csv(r.embedding, labels));
        write_text_file(dir / "embedding.svg", scatter_svg(r.embedding, labels, f.description));
        const nlohmann::json meta{{"initial_kl", r.initial_kl}, {"final_kl", r.final_kl}, {"perplexity", a_.perplexity},
                                  {"iterations", a_.iterations}, {"seed", s.value}, {"seed_source", s.source},
                                  {"silhouette", silhouette(r.embedding, labels)}};
        write_text_file(dir / "tsne.json", meta.dump(2) + "\n");
        out_ << "tsne: " << f.X.rows() << " points, KL " << svg::num(r.initial_kl, 4) << " -> " << svg::num(r.final_kl, 4)
             << "; wrote " << (dir / "embedding.svg").string() << "\n";
        return kOk;
    }

    int force_tsne(const CLI::App& sub) {
        const auto s = seed(sub);
        const auto f = features();
        const auto labels = labels_for(f.X.rows());
        const auto forced = force_clusters(f.X, labels, a_.cluster_size);
        const auto X_sub = f.X.take_rows(forced.rows);
        std::vector<Label> y_sub;
        for (auto i : forced.rows) y_sub.push_back(labels[i]);
        const auto cfg = tsne_config(s);
        const auto before = tsne(f.X, cfg);
        const auto after = tsne(X_sub, cfg);
        const auto dir = out_dir();
        auto subset_json = to_json(forced.subset);
        subset_json["rows"] = forced.rows;
        write_text_file(dir / "forced_subset.json", subset_json.dump(2) + "\n");
        write_text_file(dir / "before.csv", embedding_csv(before.embedding, labels));
        write_text_file(dir / "after.csv", embedding_csv(after.embedding, y_sub));
        write_text_file(dir / "before.svg", scatter_svg(before.embedding, labels, f.description + " (all)"));
        write_text_file(dir / "after.svg", scatter_svg(after.embedding, y_sub, f.description + " (forced subset)"));
        out_ << "force-tsne: kept " << forced.subset.selected_a.size() << " of class 0 and " << forced.subset.selected_b.size()
             << " of class 1; silhouette " << svg::num(silhouette(before.embedding, labels), 3) << " -> "
             << svg::num(silhouette(after.embedding, y_sub), 3) << "\n";
        return kOk;
    }

    int audit_cmd(const CLI::App& sub) {
        const auto s = seed(sub);
        const auto f = features();
        const auto labels = labels_for(f.X.rows());
        AuditConfig cfg;
        cfg.probe = sweep_options(s);
        cfg.tsne = tsne_config(s);
        cfg.silhouette_threshold = a_.threshold;
        cfg.accuracy_margin = a_.margin;
        const auto v = audit(f.X, labels, cfg);
        const auto dir = out_dir();
        const nlohmann::json j{{"probe_accuracy", v.probe_accuracy},
                               {"probe_ci95", v.probe_ci95},
                               {"projection_separability", v.projection_separability},
                               {"quadrant", v.quadrant ? nlohmann::json(std::string(to_string(*v.quadrant))) : nlohmann::json(nullptr)},
                               {"diagnostic", v.diagnostic},
                               {"silhouette_threshold", a_.threshold},
                               {"accuracy_margin", a_.margin},
                               {"seed", s.value},
                               {"seed_source", s.source}};
        write_text_file(dir / "audit.json", j.dump(2) + "\n");
        write_text_file(dir / "projection.svg", scatter_svg(v.projection.embedding, labels, f.description));
        out_ << "audit: accuracy " << svg::num(v.probe_accuracy, 4) << ", silhouette " << svg::num(v.projection_separability, 4)
             << " -> " << (v.quadrant ? std::string(to_string(*v.quadrant)) : v.diagnostic) << "\n";
        return v.quadrant ? kOk : kPartialFailure;
    }

    int validate() {
        if (a_.store.empty() && a_.dataset.empty() && a_.ratings.empty() && a_.matrix.empty()) {
            throw ValidationError("validate needs at least one of --store, --dataset, --ratings, --matrix");
        }
        std::optional<std::size_t> n_store, n_dataset;
        if (!a_.store.empty()) {
            require_path(a_.store, "--store");
            const auto store = load_embedding_store(a_.store);
            n_store = store.n_sentences;
            out_ << "store " << store.model_id << ": " << store.num_layers << " layers, dim " << store.dim << ", "
                 << store.n_sentences << " sentences: ok\n";
        }
        if (!a_.dataset.empty() || !a_.ratings.empty()) {
            const auto ds = dataset();
            n_dataset = ds.size();
            const auto counts = ds.class_counts();
            out_ << "dataset " << ds.task_name << ": " << ds.size() << " sentences (" << counts[0] << " / " << counts[1] << "): ok\n";
        }
        if (!a_.matrix.empty()) {
            require_path(a_.matrix, "--matrix");
            const auto m = read_dense(a_.matrix);
            out_ << "matrix " << m.rows << " x " << m.cols << ": ok\n";
        }
        if (n_store && n_dataset && *n_store != *n_dataset) {
            throw ValidationError("store has " + std::to_string(*n_store) + " sentences but dataset has " + std::to_string(*n_dataset));
        }
        return kOk;
    }

    int heatmap() {
        std::vector<ResultsTable> tables;
        for (const auto& p : a_.results) {
            require_path(p, "--results");
            tables.push_back(load_results_json(p));
        }
        const auto map = aggregate_heatmap(tables);
        const auto dir = out_dir();
        write_text_file(dir / "heatmap.json", to_json(map).dump(2) + "\n");
        write_text_file(dir / "heatmap.csv", heatmap_csv(map));
        write_text_file(dir / "heatmap.svg", heatmap_svg(map));
        out_ << "heatmap: " << map.tasks.size() << " tasks x " << map.columns.size() << " columns; wrote "
             << (dir / "heatmap.svg").string() << "\n";
        return kOk;
    }

    int norms() {
        require_path(a_.store, "--store");
        const auto store = load_embedding_store(a_.store);
        std::vector<std::size_t> layers;
        if (a_.layers.empty()) {
            for (std::size_t l = 0; l < store.num_layers; ++l) layers.push_back(l);
        } else {
            layers = parse_layers(a_.layers);
        }
        const auto kind = parse_representation_kind(a_.kind);
        const auto values = representation_norms(store, kind, layers);
        std::string csv = "layer,mean_norm\n";
        for (std::size_t i = 0; i < layers.size(); ++i) {
            csv += std::to_string(layers[i]) + "," + svg::num(values[i], 6) + "\n";
            out_ << "layer " << layers[i] << ": " << svg::num(values[i], 4) << "\n";
        }
        write_text_file(out_dir() / "norms.csv", csv);
        return kOk;
    }
};

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return Runner(out, err).run(std::move(args));
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return Runner(out, err).run(args);
}

}  // namespace probekit::cli
