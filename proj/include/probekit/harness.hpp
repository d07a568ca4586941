#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "probekit/corpus.hpp"
#include "probekit/features.hpp"
#include "probekit/parallel.hpp"
#include "probekit/probe.hpp"
#include "probekit/rng.hpp"
#include "probekit/stats.hpp"

/**
 * @file harness.hpp
 * @brief Cross-validated probe sweeps over representation kinds and layers,
 * TF-IDF baselines, confidence intervals and best-of heatmaps.
 *
 * A sweep is a pure map over (row, run, fold) cells followed by a keyed
 * reduce, so serial and concurrent execution give identical tables.
 */

namespace probekit {

struct CvPlan {
    std::size_t n_folds = 10;
    std::size_t n_runs = 10;
    std::uint64_t master_seed = 0;
    bool stratified = true;

    void validate() const {
        if (n_folds < 2) {
            throw ValidationError("CvPlan: n_folds must be at least 2");
        }
        if (n_runs < 1) {
            throw ValidationError("CvPlan: n_runs must be positive");
        }
    }
};

struct FoldAssignment {
    std::vector<std::vector<std::size_t>> folds;
    bool stratified = false;
    /// Stratification was requested but a class had fewer members than folds.
    bool fell_back = false;

    std::vector<std::size_t> train_indices(std::size_t fold) const {
        std::vector<std::size_t> out;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            if (f != fold) out.insert(out.end(), folds[f].begin(), folds[f].end());
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Seeded k-fold partition. Stratified folds deal each shuffled class round
/// robin, continuing where the previous class stopped, so per-class and total
/// fold sizes each differ by at most one.
inline FoldAssignment make_folds(std::span<const Label> labels, const CvPlan& plan) {
    plan.validate();
    if (labels.size() < plan.n_folds) {
        throw ValidationError("make_folds: " + std::to_string(labels.size()) + " samples cannot fill " +
                              std::to_string(plan.n_folds) + " folds");
    }
    Rng rng(derive_seed({plan.master_seed, 0xF01DULL}));
    FoldAssignment out;
    out.folds.resize(plan.n_folds);

    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i] == 1 ? 1 : 0].push_back(i);
    }
    const bool can_stratify = by_class[0].size() >= plan.n_folds && by_class[1].size() >= plan.n_folds;
    out.stratified = plan.stratified && can_stratify;
    out.fell_back = plan.stratified && !can_stratify;

    std::size_t next = 0;
    auto deal = [&](std::vector<std::size_t>& items) {
        rng.shuffle(std::span<std::size_t>(items));
        for (std::size_t idx : items) {
            out.folds[next].push_back(idx);
            next = (next + 1) % plan.n_folds;
        }
    };
    if (out.stratified) {
        deal(by_class[0]);
        deal(by_class[1]);
    } else {
        std::vector<std::size_t> all(labels.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        deal(all);
    }
    for (auto& f : out.folds) {
        std::sort(f.begin(), f.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Results

enum class CiMode { runs, cells };

struct ResultRow {
    std::string task;
    std::string model;
    std::string kind;
    int layer = -1;  ///< -1 when not layer-indexed (pooled, tf-idf, majority)
    std::string featurizer;
    std::vector<double> run_means;
    std::vector<double> cell_scores;  ///< run-major, n_runs x n_folds
    double mean = std::numeric_limits<double>::quiet_NaN();
    double ci95 = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_folds = 0;
    std::size_t n_runs = 0;
    std::size_t n_dev_total = 0;
    std::uint64_t seed = 0;
    std::size_t underflow_rows = 0;
    std::vector<std::string> failures;

    bool valid() const { return failures.empty() && std::isfinite(mean); }
};

struct ResultsTable {
    std::vector<ResultRow> rows;
    /// Reference rows (majority class) that accompany every sweep.
    std::vector<ResultRow> baselines;
    nlohmann::json meta = nlohmann::json::object();

    std::size_t failure_count() const {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.failures.size();
        return n;
    }
};

struct SweepOptions {
    MlpConfig mlp;
    CvPlan plan;
    CiMode ci_over = CiMode::runs;
    std::size_t jobs = 0;
};

namespace detail {

enum class SeedKind : std::uint64_t { cls = 1, pooled = 2, mean = 3, product = 4, tfidf = 5, majority = 6 };

inline SeedKind seed_kind(RepresentationKind k) {
    switch (k) {
        case RepresentationKind::cls: return SeedKind::cls;
        case RepresentationKind::pooled: return SeedKind::pooled;
        case RepresentationKind::tokens_mean: return SeedKind::mean;
        case RepresentationKind::tokens_product: return SeedKind::product;
    }
    return SeedKind::cls;
}

struct CellOutcome {
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    std::string failure;
};

/// Fills run_means / mean / ci95 / failures of `row` from its cell outcomes.
inline void reduce_row(ResultRow& row, const std::vector<CellOutcome>& cells, CiMode ci_over) {
    row.cell_scores.clear();
    row.run_means.clear();
    for (std::size_t r = 0; r < row.n_runs; ++r) {
        double sum = 0.0;
        bool ok = true;
        for (std::size_t f = 0; f < row.n_folds; ++f) {
            const auto& c = cells[r * row.n_folds + f];
            if (!c.failure.empty()) {
                row.failures.push_back("run " + std::to_string(r) + " fold " + std::to_string(f) + ": " + c.failure);
                ok = false;
                continue;
            }
            sum += c.accuracy;
        }
        if (ok) {
            row.run_means.push_back(sum / static_cast<double>(row.n_folds));
        }
    }
    if (!row.failures.empty()) {
        row.run_means.clear();
        return;
    }
    for (const auto& c : cells) row.cell_scores.push_back(c.accuracy);
    row.mean = mean_of(row.run_means);
    const auto& basis = ci_over == CiMode::runs ? row.run_means : row.cell_scores;
    row.ci95 = basis.size() >= 2 ? confidence_interval(basis).half_width : 0.0;
}

inline std::vector<Label> gather(std::span<const Label> y, std::span<const std::size_t> idx) {
    std::vector<Label> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(y[i]);
    return out;
}

/// Runs every (run, fold) cell of one row. `train_eval(run, fold, train, dev)` returns dev accuracy.
template <typename F>
std::vector<CellOutcome> run_cells(const FoldAssignment& folds, std::size_t n_runs, std::size_t jobs, F&& train_eval) {
    const std::size_t n_folds = folds.folds.size();
    std::vector<std::vector<std::size_t>> train(n_folds);
    for (std::size_t f = 0; f < n_folds; ++f) train[f] = folds.train_indices(f);
    std::vector<CellOutcome> cells(n_runs * n_folds);
    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        const std::size_t run = i / n_folds;
        const std::size_t fold = i % n_folds;
        try {
            cells[i].accuracy = train_eval(run, fold, train[fold], folds.folds[fold]);
        } catch (const std::exception& e) {
            cells[i].failure = e.what();
        }
    });
    return cells;
}

inline ResultRow make_row(const std::string& task, const std::string& model, const std::string& kind, int layer,
                          const std::string& featurizer, const SweepOptions& opts, std::size_t n) {
    ResultRow row;
    row.task = task;
    row.model = model;
    row.kind = kind;
    row.layer = layer;
    row.featurizer = featurizer;
    row.n_folds = opts.plan.n_folds;
    row.n_runs = opts.plan.n_runs;
    row.n_dev_total = n;
    row.seed = opts.plan.master_seed;
    return row;
}

inline ResultRow majority_row(const LabeledDataset& ds, const std::string& model, const FoldAssignment& folds,
                              const SweepOptions& opts) {
    ResultRow row = make_row(ds.task_name, model, "majority", -1, "majority", opts, ds.size());
    const auto cells = run_cells(folds, opts.plan.n_runs, 1, [&](std::size_t, std::size_t, const auto& train, const auto& dev) {
        const auto y_train = gather(ds.labels, train);
        const auto model_ = train_majority(0, y_train);
        const auto y_dev = gather(ds.labels, dev);
        const Label guess = model_.weights[0] >= 0.5 ? 1 : 0;
        std::size_t hits = 0;
        for (Label l : y_dev) hits += l == guess ? 1 : 0;
        return static_cast<double>(hits) / static_cast<double>(y_dev.size());
    });
    reduce_row(row, cells, opts.ci_over);
    return row;
}

inline nlohmann::json plan_meta(const SweepOptions& opts, const FoldAssignment& folds) {
    return {{"n_folds", opts.plan.n_folds},
            {"n_runs", opts.plan.n_runs},
            {"master_seed", opts.plan.master_seed},
            {"stratified", folds.stratified},
            {"stratification_fallback", folds.fell_back},
            {"ci_over", opts.ci_over == CiMode::runs ? "runs" : "cells"},
            {"hidden_width", opts.mlp.hidden_width},
            {"learning_rate", opts.mlp.learning_rate},
            {"patience", opts.mlp.patience},
            {"validation_fraction", opts.mlp.validation_fraction},
            {"max_epochs", opts.mlp.max_epochs},
            {"restore_best", opts.mlp.restore_best}};
}

}  // namespace detail

/**
 * Cross-validated accuracy of the MLP probe on a single feature matrix.
 * Folds come from the plan's master seed and are shared by all runs; each
 * (run, fold) cell trains with its own derived seed.
 */
inline ResultRow evaluate_features(const Matrix& X, std::span<const Label> labels, const std::string& task,
                                   const SweepOptions& opts, const std::string& model, const std::string& kind, int layer,
                                   const FoldAssignment& folds, std::uint64_t kind_code) {
    if (X.rows() != labels.size()) {
        throw ValidationError("evaluate_features: feature rows do not match label count");
    }
    ResultRow row = detail::make_row(task, model, kind, layer, kind, opts, labels.size());
    const auto cells = detail::run_cells(folds, opts.plan.n_runs, opts.jobs,
                                         [&](std::size_t run, std::size_t fold, const auto& train, const auto& dev) {
        MlpConfig cfg = opts.mlp;
        cfg.seed = derive_seed({opts.plan.master_seed, fold, run, static_cast<std::uint64_t>(layer + 1), kind_code});
        const auto probe = train_mlp(X.take_rows(train), detail::gather(labels, train), cfg);
        return accuracy(predict(probe, X.take_rows(dev)).labels, detail::gather(labels, dev));
    });
    detail::reduce_row(row, cells, opts.ci_over);
    return row;
}

/// Probe sweep over representation kinds and layers of one store.
/// Pooled is not layer-indexed and contributes a single row with layer -1.
inline ResultsTable run_probe_sweep(const EmbeddingStore& store, const LabeledDataset& ds,
                                    const std::vector<RepresentationKind>& kinds, const std::vector<std::size_t>& layers,
                                    const SweepOptions& opts) {
    ds.validate();
    opts.mlp.validate();
    if (store.n_sentences != ds.size()) {
        throw ValidationError("store '" + store.model_id + "' has " + std::to_string(store.n_sentences) +
                              " sentences but dataset '" + ds.task_name + "' has " + std::to_string(ds.size()));
    }
    for (auto k : kinds) {
        if (!store.has(required_storage(k))) {
            throw ValidationError("store '" + store.model_id + "' cannot provide representation '" + std::string(to_string(k)) + "'");
        }
    }
    for (auto l : layers) {
        if (l >= store.num_layers) {
            throw ValidationError("layer " + std::to_string(l) + " out of range 0.." + std::to_string(store.num_layers - 1));
        }
    }
    const auto folds = make_folds(ds.labels, opts.plan);
    ResultsTable table;
    for (auto kind : kinds) {
        std::vector<std::optional<std::size_t>> slots;
        if (kind == RepresentationKind::pooled) {
            slots.push_back(std::nullopt);
        } else {
            for (auto l : layers) slots.emplace_back(l);
        }
        for (const auto& slot : slots) {
            const int layer = slot ? static_cast<int>(*slot) : -1;
            const auto fm = select_representation(store, {kind, slot.value_or(0)});
            auto row = evaluate_features(fm.values, ds.labels, ds.task_name, opts, store.model_id, std::string(to_string(kind)), layer, folds,
                                         static_cast<std::uint64_t>(detail::seed_kind(kind)));
            row.underflow_rows = fm.underflow_rows.size();
            table.rows.push_back(std::move(row));
        }
    }
    table.baselines.push_back(detail::majority_row(ds, store.model_id, folds, opts));
    table.meta = detail::plan_meta(opts, folds);
    return table;
}

inline std::string tfidf_featurizer_name(const std::optional<std::size_t>& max_features) {
    return "tfidf:" + (max_features ? std::to_string(*max_features) : std::string("all"));
}

/// TF-IDF + MLP baseline, one row per max_features value. The vectorizer is
/// fit on each training fold only.
inline ResultsTable run_tfidf_baseline(const LabeledDataset& ds, const std::vector<std::optional<std::size_t>>& grid,
                                       const SweepOptions& opts) {
    ds.validate();
    opts.mlp.validate();
    const auto folds = make_folds(ds.labels, opts.plan);
    ResultsTable table;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::string name = tfidf_featurizer_name(grid[g]);
        ResultRow row = detail::make_row(ds.task_name, "tf-idf", "tfidf", -1, name, opts, ds.size());
        const auto cells = detail::run_cells(folds, opts.plan.n_runs, opts.jobs,
                                             [&](std::size_t run, std::size_t fold, const auto& train, const auto& dev) {
            std::vector<std::string> train_text, dev_text;
            for (auto i : train) train_text.push_back(ds.sentences[i]);
            for (auto i : dev) dev_text.push_back(ds.sentences[i]);
            const auto vec = tfidf_fit(train_text, {grid[g], 2});
            MlpConfig cfg = opts.mlp;
            cfg.seed = derive_seed({opts.plan.master_seed, fold, run, g, static_cast<std::uint64_t>(detail::SeedKind::tfidf)});
            const auto probe = train_mlp(tfidf_transform(vec, train_text).values, detail::gather(ds.labels, train), cfg);
            return accuracy(predict(probe, tfidf_transform(vec, dev_text).values).labels, detail::gather(ds.labels, dev));
        });
        detail::reduce_row(row, cells, opts.ci_over);
        table.rows.push_back(std::move(row));
    }
    table.baselines.push_back(detail::majority_row(ds, "tf-idf", folds, opts));
    table.meta = detail::plan_meta(opts, folds);
    return table;
}

// ---------------------------------------------------------------------------
// Heatmap

inline constexpr const char* kTfidfColumn = "tf-idf";

struct TaskHeatmap {
    std::vector<std::string> tasks;    ///< alphabetical
    std::vector<std::string> columns;  ///< model ids alphabetical, then tf-idf
    std::vector<std::vector<std::optional<double>>> cells;  ///< [task][column]; nullopt = missing

    std::optional<double> at(const std::string& task, const std::string& column) const {
        const auto t = std::find(tasks.begin(), tasks.end(), task);
        const auto c = std::find(columns.begin(), columns.end(), column);
        if (t == tasks.end() || c == columns.end()) return std::nullopt;
        return cells[static_cast<std::size_t>(t - tasks.begin())][static_cast<std::size_t>(c - columns.begin())];
    }
};

/// Best accuracy per task: max over kinds and layers for each model, max over
/// max_features for the TF-IDF column. Invalid rows are ignored.
inline TaskHeatmap aggregate_heatmap(const std::vector<ResultsTable>& tables) {
    std::set<std::string> tasks;
    std::set<std::string> models;
    bool has_tfidf = false;
    std::map<std::pair<std::string, std::string>, std::optional<double>> best;
    for (const auto& table : tables) {
        for (const auto& row : table.rows) {
            const bool tfidf = row.featurizer.starts_with("tfidf");
            const std::string column = tfidf ? kTfidfColumn : row.model;
            tasks.insert(row.task);
            if (tfidf) {
                has_tfidf = true;
            } else {
                models.insert(row.model);
            }
            auto& cell = best[{row.task, column}];
            if (row.valid() && (!cell || row.mean > *cell)) {
                cell = row.mean;
            }
        }
    }
    TaskHeatmap map;
    map.tasks.assign(tasks.begin(), tasks.end());
    map.columns.assign(models.begin(), models.end());
    if (has_tfidf) map.columns.push_back(kTfidfColumn);
    map.cells.assign(map.tasks.size(), std::vector<std::optional<double>>(map.columns.size()));
    for (std::size_t t = 0; t < map.tasks.size(); ++t) {
        for (std::size_t c = 0; c < map.columns.size(); ++c) {
            if (auto it = best.find({map.tasks[t], map.columns[c]}); it != best.end()) {
                map.cells[t][c] = it->second;
            }
        }
    }
    return map;
}

// ---------------------------------------------------------------------------
// Diagnostics

/// Mean row L2 norm of a representation at each requested layer.
inline std::vector<double> representation_norms(const EmbeddingStore& store, RepresentationKind kind,
                                                const std::vector<std::size_t>& layers) {
    std::vector<double> out;
    out.reserve(layers.size());
    for (auto layer : layers) {
        const auto fm = select_representation(store, {kind, layer});
        double sum = 0.0;
        for (std::size_t i = 0; i < fm.rows(); ++i) sum += l2_norm(fm.values.row(i));
        out.push_back(sum / static_cast<double>(fm.rows()));
    }
    return out;
}

}  // namespace probekit
