#include <gtest/gtest.h>

#include <set>

#include "probekit/harness.hpp"
#include "probekit/report.hpp"
#include "test_support.hpp"

using namespace probekit;
using probekit::fixtures::dataset_for;
using probekit::fixtures::make_blobs;
using probekit::fixtures::store_from_matrices;

namespace {

SweepOptions quick_options(std::uint64_t seed = 1) {
    SweepOptions o;
    o.plan.n_folds = 3;
    o.plan.n_runs = 2;
    o.plan.master_seed = seed;
    o.mlp.hidden_width = 8;
    o.mlp.max_epochs = 30;
    o.jobs = 1;
    return o;
}

ResultRow row_with(const std::string& task, const std::string& model, const std::string& featurizer, double mean) {
    ResultRow r;
    r.task = task;
    r.model = model;
    r.featurizer = featurizer;
    r.mean = mean;
    return r;
}

}  // namespace

TEST(ConfidenceInterval, StudentTHalfWidth) {
    const std::vector<double> two{0.0, 1.0};
    const auto ci = confidence_interval(two);
    EXPECT_DOUBLE_EQ(ci.mean, 0.5);
    // sd = 1/sqrt(2), t(0.975, 1) = 12.7062
    EXPECT_NEAR(ci.half_width, 12.7062 * std::sqrt(0.5) / std::sqrt(2.0), 1e-4);
    EXPECT_NEAR(ci.half_width, 6.353, 1e-3);
    const std::vector<double> constant(10, 0.7);
    EXPECT_NEAR(confidence_interval(constant).half_width, 0.0, 1e-12);
    const std::vector<double> one{0.5};
    EXPECT_THROW(confidence_interval(one), ValidationError);
}

TEST(MakeFolds, PartitionsAndStratifies) {
    std::vector<Label> y(57, 0);
    for (std::size_t i = 0; i < 23; ++i) y[i * 2] = 1;
    CvPlan plan;
    plan.n_folds = 5;
    plan.master_seed = 42;
    const auto fa = make_folds(y, plan);
    EXPECT_TRUE(fa.stratified);
    std::set<std::size_t> seen;
    std::size_t min_size = 1000, max_size = 0;
    for (const auto& f : fa.folds) {
        min_size = std::min(min_size, f.size());
        max_size = std::max(max_size, f.size());
        std::size_t ones = 0;
        for (auto i : f) {
            EXPECT_TRUE(seen.insert(i).second);
            ones += static_cast<std::size_t>(y[i]);
        }
        EXPECT_TRUE(ones == 4 || ones == 5) << ones;
    }
    EXPECT_EQ(seen.size(), y.size());
    EXPECT_LE(max_size - min_size, 1u);
    // Training indices are the complement of the dev fold.
    EXPECT_EQ(fa.train_indices(0).size() + fa.folds[0].size(), y.size());
}

TEST(MakeFolds, DeterministicInSeed) {
    std::vector<Label> y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = static_cast<Label>(i % 2);
    CvPlan plan;
    plan.master_seed = 9;
    EXPECT_EQ(make_folds(y, plan).folds, make_folds(y, plan).folds);
    plan.master_seed = 10;
    const auto other = make_folds(y, plan).folds;
    plan.master_seed = 9;
    EXPECT_NE(make_folds(y, plan).folds, other);
}

TEST(MakeFolds, FallsBackWhenAClassIsTooSmallAndRejectsTinyInputs) {
    std::vector<Label> y(30, 0);
    y[0] = y[1] = 1;
    CvPlan plan;
    plan.n_folds = 5;
    const auto fa = make_folds(y, plan);
    EXPECT_FALSE(fa.stratified);
    EXPECT_TRUE(fa.fell_back);
    EXPECT_THROW(make_folds(std::vector<Label>{0, 1, 0}, plan), ValidationError);
}

TEST(ProbeSweep, RowPerKindAndLayerPlusMajority) {
    const auto b = make_blobs(15, 3, 5.0, 1);
    auto store = store_from_matrices({b.X, b.X, b.X});
    store.pooled = to_dense32(b.X);
    const auto ds = dataset_for(b.y);
    const auto table = run_probe_sweep(store, ds, {RepresentationKind::cls, RepresentationKind::pooled}, {0, 2}, quick_options());
    ASSERT_EQ(table.rows.size(), 3u);
    EXPECT_EQ(table.rows[0].layer, 0);
    EXPECT_EQ(table.rows[1].layer, 2);
    EXPECT_EQ(table.rows[2].kind, "pooled");
    EXPECT_EQ(table.rows[2].layer, -1);
    for (const auto& r : table.rows) {
        EXPECT_TRUE(r.valid());
        EXPECT_EQ(r.run_means.size(), 2u);
        EXPECT_EQ(r.cell_scores.size(), 6u);
        EXPECT_GE(r.mean, 0.0);
        EXPECT_LE(r.mean, 1.0);
        EXPECT_GE(r.ci95, 0.0);
    }
    ASSERT_EQ(table.baselines.size(), 1u);
    EXPECT_NEAR(table.baselines[0].mean, 0.5, 0.2);
    EXPECT_EQ(table.meta["n_folds"], 3);
}

TEST(ProbeSweep, ValidatesInputs) {
    const auto b = make_blobs(10, 2, 5.0, 1);
    const auto store = store_from_matrices({b.X});
    const auto opts = quick_options();
    EXPECT_THROW(run_probe_sweep(store, dataset_for(b.y), {RepresentationKind::cls}, {1}, opts), ValidationError);
    EXPECT_THROW(run_probe_sweep(store, dataset_for(b.y), {RepresentationKind::tokens_mean}, {0}, opts), ValidationError);
    auto short_labels = b.y;
    short_labels.pop_back();
    EXPECT_THROW(run_probe_sweep(store, dataset_for(short_labels), {RepresentationKind::cls}, {0}, opts), ValidationError);
}

TEST(ProbeSweep, SerialAndConcurrentAgree) {
    const auto b = make_blobs(12, 3, 2.0, 5);
    const auto store = store_from_matrices({b.X, b.X});
    auto opts = quick_options(3);
    const auto serial = run_probe_sweep(store, dataset_for(b.y), {RepresentationKind::cls}, {0, 1}, opts);
    opts.jobs = 4;
    const auto threaded = run_probe_sweep(store, dataset_for(b.y), {RepresentationKind::cls}, {0, 1}, opts);
    EXPECT_EQ(to_json(serial).dump(), to_json(threaded).dump());
}

TEST(ProbeSweep, CellsGetDistinctSeeds) {
    // Same features at two layers: the per-layer seed component must make cell scores differ somewhere.
    const auto b = make_blobs(20, 3, 0.5, 7);
    const auto store = store_from_matrices({b.X, b.X});
    const auto table = run_probe_sweep(store, dataset_for(b.y), {RepresentationKind::cls}, {0, 1}, quick_options());
    EXPECT_NE(table.rows[0].cell_scores, table.rows[1].cell_scores);
}

TEST(EvaluateFeatures, TrainingFailuresMarkTheRowInvalid) {
    const auto b = make_blobs(10, 2, 5.0, 1);
    Matrix X = b.X;
    X(3, 1) = std::numeric_limits<double>::infinity();
    const auto opts = quick_options();
    const auto folds = make_folds(b.y, opts.plan);
    const auto row = evaluate_features(X, b.y, "t", opts, "m", "cls", 0, folds, 1);
    EXPECT_FALSE(row.valid());
    EXPECT_FALSE(row.failures.empty());
    EXPECT_TRUE(row.run_means.empty());
}

TEST(CiMode, CellsUsesEveryFoldScore) {
    const auto b = make_blobs(12, 3, 1.0, 5);
    const auto store = store_from_matrices({b.X});
    auto opts = quick_options();
    opts.ci_over = CiMode::cells;
    const auto row = run_probe_sweep(store, dataset_for(b.y), {RepresentationKind::cls}, {0}, opts).rows[0];
    EXPECT_DOUBLE_EQ(row.ci95, confidence_interval(row.cell_scores).half_width);
}

TEST(TfidfBaseline, RowPerGridValue) {
    std::vector<Label> y;
    std::vector<std::string> text;
    for (int i = 0; i < 30; ++i) {
        y.push_back(i % 2);
        text.push_back(i % 2 ? "the cat sat on the mat" : "dogs run fast today");
    }
    auto ds = dataset_for(y, "toy");
    ds.sentences = text;
    auto opts = quick_options();
    opts.mlp.max_epochs = 200;
    opts.mlp.patience = 10;
    const auto table = run_tfidf_baseline(ds, {2, std::nullopt}, opts);
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].featurizer, "tfidf:2");
    EXPECT_EQ(table.rows[1].featurizer, "tfidf:all");
    EXPECT_EQ(table.rows[0].model, "tf-idf");
    EXPECT_GE(table.rows[1].mean, 0.9);
}

TEST(Heatmap, TakesBestPerTaskAndOrdersColumns) {
    ResultsTable a, c;
    a.rows = {row_with("cola", "bert", "cls", 0.7), row_with("cola", "bert", "mean", 0.8), row_with("amb", "bert", "cls", 0.6)};
    auto bad = row_with("amb", "albert", "cls", 0.99);
    bad.failures.push_back("boom");
    a.rows.push_back(bad);
    c.rows = {row_with("cola", "tf-idf", "tfidf:50", 0.6), row_with("cola", "tf-idf", "tfidf:all", 0.65)};
    const auto map = aggregate_heatmap({a, c});
    EXPECT_EQ(map.tasks, (std::vector<std::string>{"amb", "cola"}));
    EXPECT_EQ(map.columns, (std::vector<std::string>{"albert", "bert", "tf-idf"}));
    EXPECT_DOUBLE_EQ(*map.at("cola", "bert"), 0.8);
    EXPECT_DOUBLE_EQ(*map.at("cola", "tf-idf"), 0.65);
    EXPECT_FALSE(map.at("amb", "albert").has_value());
    EXPECT_FALSE(map.at("amb", "tf-idf").has_value());
}

TEST(Diagnostics, RepresentationNormsPerLayer) {
    Matrix a(2, 2, 0.0), b(2, 2, 0.0);
    a(0, 0) = 3;
    a(0, 1) = 4;
    a(1, 0) = 1;
    b(0, 1) = 2;
    b(1, 1) = 2;
    const auto store = store_from_matrices({a, b});
    const auto norms = representation_norms(store, RepresentationKind::cls, {0, 1});
    EXPECT_DOUBLE_EQ(norms[0], 3.0);
    EXPECT_DOUBLE_EQ(norms[1], 2.0);
}
