#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "probekit/projection.hpp"
#include "test_support.hpp"

using namespace probekit;
using probekit::fixtures::make_blobs;

namespace {

Matrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix X(n, d);
    for (double& v : X.data()) v = rng.normal();
    return X;
}

Matrix rows_of(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t k = 0;
        for (double v : r) m(i, k++) = v;
        ++i;
    }
    return m;
}

/// Straightforward restatement of the forced-cluster selection used as an oracle.
std::pair<std::set<std::size_t>, std::set<std::size_t>> forced_oracle(const Matrix& A, const Matrix& B, std::size_t c) {
    std::size_t sa = 0, sb = 0;
    double best = -1.0;
    for (std::size_t a = 0; a < A.rows(); ++a) {
        for (std::size_t b = 0; b < B.rows(); ++b) {
            double d = 0.0;
            for (std::size_t k = 0; k < A.cols(); ++k) d += (A(a, k) - B(b, k)) * (A(a, k) - B(b, k));
            if (d > best) {
                best = d;
                sa = a;
                sb = b;
            }
        }
    }
    auto dist = [](const Matrix& m, std::size_t i, const Matrix& o, std::size_t j) {
        double d = 0.0;
        for (std::size_t k = 0; k < m.cols(); ++k) d += (m(i, k) - o(j, k)) * (m(i, k) - o(j, k));
        return d;
    };
    auto pick = [&](const Matrix& own, std::size_t own_seed, const Matrix& other, std::size_t other_seed) {
        std::vector<std::pair<double, std::size_t>> near, far;
        for (std::size_t i = 0; i < own.rows(); ++i) {
            near.emplace_back(dist(own, i, own, own_seed), i);
            far.emplace_back(-dist(own, i, other, other_seed), i);
        }
        std::sort(near.begin(), near.end());
        std::sort(far.begin(), far.end());
        std::set<std::size_t> out;
        for (std::size_t k = 0; k < c; ++k) {
            out.insert(near[k].second);
            out.insert(far[k].second);
        }
        return out;
    };
    return {pick(A, sa, B, sb), pick(B, sb, A, sa)};
}

}  // namespace

TEST(Affinities, CalibratedPerplexityAndJointProperties) {
    const auto X = random_points(60, 5, 1);
    const auto aff = compute_affinities(X, 10.0);
    for (double p : aff.achieved_perplexity) EXPECT_NEAR(p, 10.0, 1e-3);
    double total = 0.0;
    for (std::size_t i = 0; i < 60; ++i) {
        EXPECT_EQ(aff.joint(i, i), 0.0);
        for (std::size_t j = 0; j < 60; ++j) {
            EXPECT_DOUBLE_EQ(aff.joint(i, j), aff.joint(j, i));
            EXPECT_GE(aff.joint(i, j), 0.0);
            total += aff.joint(i, j);
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Affinities, AllIdenticalPointsAreRejected) {
    EXPECT_THROW(compute_affinities(Matrix(10, 3, 1.0), 2.0), ValidationError);
}

TEST(TsneGradient, MatchesFiniteDifferences) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto X = random_points(15, 4, seed);
        const auto P = compute_affinities(X, 4.0).joint;
        auto Y = random_points(15, 2, seed + 100);
        const auto g = tsne_gradient(P, Y);
        const double eps = 1e-6;
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < 15; ++i) {
            for (std::size_t k = 0; k < 2; ++k) {
                const double orig = Y(i, k);
                Y(i, k) = orig + eps;
                const double up = tsne_kl(P, Y);
                Y(i, k) = orig - eps;
                const double down = tsne_kl(P, Y);
                Y(i, k) = orig;
                const double numeric = (up - down) / (2 * eps);
                diff += (g(i, k) - numeric) * (g(i, k) - numeric);
                scale += g(i, k) * g(i, k) + numeric * numeric;
            }
        }
        EXPECT_LT(std::sqrt(diff) / std::sqrt(scale), 1e-4) << "seed " << seed;
    }
}

TEST(Tsne, ReducesKlAndIsDeterministic) {
    const auto b = make_blobs(30, 8, 4.0, 2);
    TsneConfig cfg;
    cfg.perplexity = 10.0;
    cfg.n_iter = 400;
    cfg.seed = 3;
    const auto r = tsne(b.X, cfg);
    EXPECT_EQ(r.embedding.rows(), 60u);
    EXPECT_EQ(r.embedding.cols(), 2u);
    EXPECT_LT(r.final_kl, r.initial_kl);
    EXPECT_TRUE(r.embedding.all_finite());
    EXPECT_EQ(tsne(b.X, cfg).embedding, r.embedding);
}

TEST(Tsne, ValidatesPerplexityAgainstSampleSize) {
    TsneConfig cfg;
    cfg.perplexity = 30.0;
    EXPECT_THROW(tsne(random_points(90, 3, 1), cfg), ValidationError);
    cfg.perplexity = 0.5;
    EXPECT_THROW(tsne(random_points(20, 3, 1), cfg), ValidationError);
    cfg.perplexity = 1.0;
    EXPECT_THROW(tsne(random_points(3, 3, 1), cfg), ValidationError);
}

TEST(ForceClusters, HandWorkedExample) {
    const auto A = rows_of({{0, 0}, {1, 0}, {0, 5}, {-3, 0}});
    const auto B = rows_of({{10, 0}, {9, 1}, {0, 6}});
    const auto s = force_clusters(A, B, 4);
    EXPECT_EQ(s.seed_a, 3u);
    EXPECT_EQ(s.seed_b, 0u);
    EXPECT_EQ(s.half_size, 2u);
    EXPECT_EQ(s.selected_a, (std::vector<std::size_t>{0, 2, 3}));
    EXPECT_EQ(s.selected_b, (std::vector<std::size_t>{0, 1}));
}

TEST(ForceClusters, TiesGoToLowerIndex) {
    const auto A = rows_of({{0.0}, {0.0}, {1.0}});
    const auto B = rows_of({{5.0}, {5.0}});
    const auto s = force_clusters(A, B, 2);
    EXPECT_EQ(s.seed_a, 0u);
    EXPECT_EQ(s.seed_b, 0u);
    EXPECT_EQ(s.selected_a, (std::vector<std::size_t>{0}));
    EXPECT_EQ(s.selected_b, (std::vector<std::size_t>{0}));
}

TEST(ForceClusters, MatchesBruteForceOracleOnSmallInputs) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        const std::size_t na = 1 + rng.below(6), nb = 1 + rng.below(6), d = 1 + rng.below(3);
        Matrix A(na, d), B(nb, d);
        // Small integer grid so distance ties are common.
        for (double& v : A.data()) v = static_cast<double>(rng.below(4));
        for (double& v : B.data()) v = static_cast<double>(rng.below(4));
        const std::size_t c = 1 + rng.below(std::min(na, nb));
        const auto s = force_clusters(A, B, 2 * c);
        const auto [oa, ob] = forced_oracle(A, B, c);
        EXPECT_EQ(std::set<std::size_t>(s.selected_a.begin(), s.selected_a.end()), oa) << seed;
        EXPECT_EQ(std::set<std::size_t>(s.selected_b.begin(), s.selected_b.end()), ob) << seed;
        EXPECT_GE(s.selected_a.size(), c);
        EXPECT_LE(s.selected_a.size(), 2 * c);
        EXPECT_TRUE(std::is_sorted(s.selected_a.begin(), s.selected_a.end()));
    }
}

TEST(ForceClusters, RejectsInvalidSizes) {
    const auto A = random_points(3, 2, 1), B = random_points(4, 2, 2);
    EXPECT_THROW(force_clusters(A, B, 3), ValidationError);
    EXPECT_THROW(force_clusters(A, B, 0), ValidationError);
    EXPECT_THROW(force_clusters(A, B, 8), ValidationError);
    EXPECT_THROW(force_clusters(Matrix(0, 2), B, 2), ValidationError);
    EXPECT_NO_THROW(force_clusters(A, B, 6));
}

TEST(ForceClusters, LabeledVariantMapsToRows) {
    const auto b = make_blobs(10, 3, 1.0, 4);
    const auto r = force_clusters(b.X, b.y, 4);
    for (auto i : r.subset.selected_a) EXPECT_EQ(b.y[i], 0);
    for (auto i : r.subset.selected_b) EXPECT_EQ(b.y[i], 1);
    EXPECT_EQ(r.rows.size(), r.subset.selected_a.size() + r.subset.selected_b.size());
    EXPECT_EQ(b.y[r.subset.seed_a], 0);
    EXPECT_EQ(b.y[r.subset.seed_b], 1);
}

TEST(Silhouette, HandComputedWithSingleton) {
    const auto P = rows_of({{0.0}, {1.0}, {10.0}});
    const std::vector<Label> l{0, 0, 1};
    EXPECT_NEAR(silhouette(P, l), (0.9 + 8.0 / 9.0) / 3.0, 1e-12);
}

TEST(Silhouette, RangeAndSeparation) {
    const auto far = make_blobs(20, 2, 50.0, 1);
    EXPECT_GT(silhouette(far.X, far.y), 0.9);
    const auto mixed = make_blobs(20, 2, 0.0, 1);
    const double s = silhouette(mixed.X, mixed.y);
    EXPECT_GE(s, -1.0);
    EXPECT_LT(s, 0.1);
    EXPECT_THROW(silhouette(far.X, std::vector<Label>(40, 0)), ValidationError);
}

TEST(Audit, SeparatedBlobsLandInClustersHighAccuracy) {
    const auto b = make_blobs(40, 5, 10.0, 6);
    AuditConfig cfg;
    cfg.probe.plan.n_folds = 3;
    cfg.probe.plan.n_runs = 2;
    cfg.probe.jobs = 1;
    cfg.tsne.perplexity = 15.0;
    const auto v = audit(b.X, b.y, cfg);
    ASSERT_TRUE(v.quadrant.has_value());
    EXPECT_EQ(*v.quadrant, Quadrant::clusters_high_accuracy);
    EXPECT_GT(v.probe_accuracy, 0.9);
    EXPECT_EQ(to_string(*v.quadrant), "clusters+high-acc");
}

TEST(ForceClusters, CrossPairTieAndDedupExample) {
    const auto A = rows_of({{0, 0}, {0, 1}});
    const auto B = rows_of({{10, 0}, {10, 1}});
    const auto s = force_clusters(A, B, 2);
    EXPECT_EQ(s.seed_a, 0u);
    EXPECT_EQ(s.seed_b, 1u);
    EXPECT_EQ(s.selected_a, (std::vector<std::size_t>{0}));
}

TEST(ForceClusters, SaturatesAndIgnoresTranslation) {
    const auto A = random_points(6, 3, 8), B = random_points(6, 3, 9);
    const auto full = force_clusters(A, B, 12);
    EXPECT_EQ(full.selected_a, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
    EXPECT_EQ(full.selected_b, full.selected_a);

    const auto base = force_clusters(A, B, 4);
    Matrix At = A, Bt = B;
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            At(i, k) += 7.0 * static_cast<double>(k + 1);
            Bt(i, k) += 7.0 * static_cast<double>(k + 1);
        }
    }
    const auto moved = force_clusters(At, Bt, 4);
    EXPECT_EQ(moved.selected_a, base.selected_a);
    EXPECT_EQ(moved.selected_b, base.selected_b);
}

TEST(Silhouette, PerfectSeparationIsOne) {
    const auto P = rows_of({{0, 0}, {0, 0}, {10, 0}, {10, 0}});
    EXPECT_NEAR(silhouette(P, std::vector<Label>{0, 0, 1, 1}), 1.0, 1e-12);
    // Maximally wrong interleaving flips the sign.
    EXPECT_LT(silhouette(P, std::vector<Label>{0, 1, 0, 1}), 0.0);
}

TEST(Silhouette, ShuffledLabelsOnOneBlobAreNearZero) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto X = random_points(100, 3, seed);
        std::vector<Label> labels(100);
        for (std::size_t i = 0; i < 100; ++i) labels[i] = static_cast<Label>(i % 2);
        Rng rng(seed + 1000);
        rng.shuffle(std::span<Label>(labels));
        EXPECT_LT(std::abs(silhouette(X, labels)), 0.1) << seed;
    }
}

TEST(Tsne, FarBlobsStaySeparatedInTwoDimensions) {
    const auto b = make_blobs(50, 10, 20.0, 12);
    TsneConfig cfg;
    cfg.perplexity = 15.0;
    cfg.seed = 4;
    EXPECT_GE(silhouette(tsne(b.X, cfg).embedding, b.y), 0.5);
}
