#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "probekit/common.hpp"
#include "probekit/harness.hpp"
#include "probekit/matrix.hpp"
#include "probekit/rng.hpp"

/**
 * @file projection.hpp
 * @brief Exact t-SNE, forced-cluster subset selection, silhouette scores and
 * the probe-versus-projection audit.
 *
 * The t-SNE here is the exact O(N^2) variant: Gaussian input affinities
 * calibrated per point to a target perplexity, a Student-t (one degree of
 * freedom) output kernel, and gradient descent on KL(P||Q) with momentum,
 * per-coordinate gains and early exaggeration.
 */

namespace probekit {

struct TsneConfig {
    double perplexity = 30.0;
    std::size_t n_iter = 1000;
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iters = 250;
    double learning_rate = 200.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch_iter = 250;
    /// Allowed |perplexity_i - perplexity| after bandwidth search.
    double perplexity_tolerance = 1e-3;
    std::size_t max_bisection_steps = 200;
    /// Standard deviation of the Gaussian initial layout.
    double init_sd = 1e-4;
    std::uint64_t seed = 0;

    void validate(std::size_t n_points) const {
        if (n_points < 4) {
            throw ValidationError("tsne: need at least 4 points");
        }
        if (!(perplexity >= 1.0)) {
            throw ValidationError("tsne: perplexity must be >= 1");
        }
        if (!(static_cast<double>(n_points) > 3.0 * perplexity)) {
            throw ValidationError("tsne: perplexity " + std::to_string(perplexity) + " too large for " +
                                  std::to_string(n_points) + " points (need N > 3 * perplexity)");
        }
        if (!(learning_rate > 0.0) || n_iter == 0) {
            throw ValidationError("tsne: learning_rate and n_iter must be positive");
        }
    }
};

struct Affinities {
    Matrix joint;                             ///< symmetric P, sums to 1
    std::vector<double> achieved_perplexity;  ///< exp(H(P_i)) per point
    std::vector<double> precision;            ///< Gaussian beta = 1 / (2 sigma^2) per point
};

/// Conditional Gaussian affinities with per-point bandwidth search, symmetrized.
inline Affinities compute_affinities(const Matrix& X, double perplexity, double tolerance = 1e-3,
                                     std::size_t max_steps = 200) {
    const std::size_t n = X.rows();
    Matrix d2(n, n);
    bool any_nonzero = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = squared_distance(X.row(i), X.row(j));
            d2(i, j) = d2(j, i) = d;
            any_nonzero = any_nonzero || d > 0.0;
        }
    }
    if (!any_nonzero) {
        throw ValidationError("tsne: all pairwise distances are zero");
    }

    Affinities out;
    out.achieved_perplexity.resize(n);
    out.precision.resize(n);
    Matrix cond(n, n);
    const double target_entropy = std::log(perplexity);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dmin = std::min(dmin, d2(i, j));
        }
        double beta = 1.0;
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        double entropy = 0.0;
        auto evaluate = [&](double b) {
            double sum = 0.0;
            double weighted = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    p[j] = 0.0;
                    continue;
                }
                const double shifted = d2(i, j) - dmin;
                p[j] = std::exp(-b * shifted);
                sum += p[j];
                weighted += shifted * p[j];
            }
            // H = log(sum) + beta * E[d - dmin], in nats.
            entropy = std::log(sum) + b * weighted / sum;
            for (double& v : p) v /= sum;
        };
        evaluate(beta);
        for (std::size_t step = 0; step < max_steps; ++step) {
            if (std::abs(std::exp(entropy) - perplexity) <= tolerance) {
                break;
            }
            if (entropy > target_entropy) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (lo + hi);
            } else {
                hi = beta;
                beta = 0.5 * (lo + hi);
            }
            evaluate(beta);
        }
        out.achieved_perplexity[i] = std::exp(entropy);
        out.precision[i] = beta;
        for (std::size_t j = 0; j < n; ++j) cond(i, j) = p[j];
    }

    out.joint = Matrix(n, n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out.joint(i, j) = (cond(i, j) + cond(j, i)) * scale;
        }
    }
    return out;
}

/// KL(P || Q) for a layout Y, with Q the normalized Student-t kernel.
inline double tsne_kl(const Matrix& P, const Matrix& Y) {
    const std::size_t n = Y.rows();
    double z = 0.0;
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            w(i, j) = w(j, i) = 1.0 / (1.0 + squared_distance(Y.row(i), Y.row(j)));
            z += 2.0 * w(i, j);
        }
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || P(i, j) <= 0.0) continue;
            kl += P(i, j) * std::log(P(i, j) / (w(i, j) / z));
        }
    }
    return kl;
}

/// dKL/dY = 4 * sum_j (exaggeration * p_ij - q_ij) * w_ij * (y_i - y_j).
inline Matrix tsne_gradient(const Matrix& P, const Matrix& Y, double exaggeration = 1.0) {
    const std::size_t n = Y.rows();
    const std::size_t dims = Y.cols();
    Matrix w(n, n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            w(i, j) = w(j, i) = 1.0 / (1.0 + squared_distance(Y.row(i), Y.row(j)));
            z += 2.0 * w(i, j);
        }
    }
    Matrix grad(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        auto g = grad.row(i);
        const auto yi = Y.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double mult = 4.0 * (exaggeration * P(i, j) - w(i, j) / z) * w(i, j);
            const auto yj = Y.row(j);
            for (std::size_t k = 0; k < dims; ++k) g[k] += mult * (yi[k] - yj[k]);
        }
    }
    return grad;
}

struct TsneResult {
    Matrix embedding;  ///< N x 2
    double initial_kl = 0.0;
    double final_kl = 0.0;
    std::vector<double> achieved_perplexity;
};

inline TsneResult tsne(const Matrix& X, const TsneConfig& cfg) {
    cfg.validate(X.rows());
    if (!X.all_finite()) {
        throw ValidationError("tsne: non-finite input");
    }
    const std::size_t n = X.rows();
    auto aff = compute_affinities(X, cfg.perplexity, cfg.perplexity_tolerance, cfg.max_bisection_steps);

    Rng rng(cfg.seed);
    Matrix Y(n, 2);
    for (double& v : Y.data()) v = cfg.init_sd * rng.normal();

    TsneResult result;
    result.initial_kl = tsne_kl(aff.joint, Y);
    Matrix update(n, 2);
    Matrix gains(n, 2, 1.0);
    for (std::size_t iter = 0; iter < cfg.n_iter; ++iter) {
        const double exaggeration = iter < cfg.exaggeration_iters ? cfg.early_exaggeration : 1.0;
        const double momentum = iter < cfg.momentum_switch_iter ? cfg.initial_momentum : cfg.final_momentum;
        const Matrix grad = tsne_gradient(aff.joint, Y, exaggeration);
        auto g = grad.data();
        auto u = update.data();
        auto gn = gains.data();
        auto y = Y.data();
        for (std::size_t k = 0; k < y.size(); ++k) {
            gn[k] = (g[k] > 0.0) != (u[k] > 0.0) ? gn[k] + 0.2 : gn[k] * 0.8;
            gn[k] = std::max(gn[k], 0.01);
            u[k] = momentum * u[k] - cfg.learning_rate * gn[k] * g[k];
            y[k] += u[k];
        }
        for (std::size_t c = 0; c < 2; ++c) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += Y(i, c);
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) Y(i, c) -= mean;
        }
    }
    if (!Y.all_finite()) {
        throw TrainingError("tsne: optimization diverged");
    }
    result.final_kl = tsne_kl(aff.joint, Y);
    result.embedding = std::move(Y);
    result.achieved_perplexity = std::move(aff.achieved_perplexity);
    return result;
}

// ---------------------------------------------------------------------------
// Forced clusters

struct ForcedSubset {
    std::vector<std::size_t> selected_a;  ///< sorted, indices into class A
    std::vector<std::size_t> selected_b;  ///< sorted, indices into class B
    std::size_t seed_a = 0;
    std::size_t seed_b = 0;
    std::size_t requested_size = 0;  ///< c'
    std::size_t half_size = 0;       ///< c = c' / 2
};

namespace detail {

/// First `c` indices ordered by `key` (ascending), ties by lower index.
inline std::vector<std::size_t> top_c(const std::vector<double>& key, std::size_t c) {
    std::vector<std::size_t> order(key.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    order.resize(c);
    return order;
}

inline std::vector<std::size_t> union_sorted(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

}  // namespace detail

/**
 * Picks seeds s_A, s_B as the most distant cross-class pair, then keeps for
 * each class the c = c'/2 points closest to its own seed together with the c
 * points farthest from the opposing seed. Seeds stay eligible. Ties go to the
 * lower index.
 */
inline ForcedSubset force_clusters(const Matrix& class_a, const Matrix& class_b, std::size_t c_prime) {
    if (class_a.rows() == 0 || class_b.rows() == 0) {
        throw ValidationError("force_clusters: both classes must be nonempty");
    }
    if (class_a.cols() != class_b.cols()) {
        throw ValidationError("force_clusters: classes differ in dimension");
    }
    if (c_prime % 2 != 0) {
        throw ValidationError("force_clusters: cluster size c' must be even");
    }
    const std::size_t limit = 2 * std::min(class_a.rows(), class_b.rows());
    if (c_prime < 2 || c_prime > limit) {
        throw ValidationError("force_clusters: cluster size c' must lie in [2, " + std::to_string(limit) + "]");
    }

    ForcedSubset out;
    out.requested_size = c_prime;
    out.half_size = c_prime / 2;
    double best = -1.0;
    for (std::size_t a = 0; a < class_a.rows(); ++a) {
        for (std::size_t b = 0; b < class_b.rows(); ++b) {
            const double d = squared_distance(class_a.row(a), class_b.row(b));
            if (d > best) {
                best = d;
                out.seed_a = a;
                out.seed_b = b;
            }
        }
    }

    auto select = [&](const Matrix& own, std::span<const double> own_seed, std::span<const double> other_seed) {
        std::vector<double> near(own.rows()), far(own.rows());
        for (std::size_t i = 0; i < own.rows(); ++i) {
            near[i] = squared_distance(own.row(i), own_seed);
            far[i] = -squared_distance(own.row(i), other_seed);
        }
        return detail::union_sorted(detail::top_c(near, out.half_size), detail::top_c(far, out.half_size));
    };
    out.selected_a = select(class_a, class_a.row(out.seed_a), class_b.row(out.seed_b));
    out.selected_b = select(class_b, class_b.row(out.seed_b), class_a.row(out.seed_a));
    return out;
}

/// Splits X by label (class 0 as A, class 1 as B) and maps the selection back
/// to row indices of X.
struct LabeledForcedSubset {
    ForcedSubset subset;
    std::vector<std::size_t> rows;  ///< selected rows of X, ascending
};

inline LabeledForcedSubset force_clusters(const Matrix& X, std::span<const Label> labels, std::size_t c_prime) {
    if (X.rows() != labels.size()) {
        throw ValidationError("force_clusters: feature rows do not match label count");
    }
    std::array<std::vector<std::size_t>, 2> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i] == 1 ? 1 : 0].push_back(i);
    LabeledForcedSubset out;
    out.subset = force_clusters(X.take_rows(members[0]), X.take_rows(members[1]), c_prime);
    for (auto i : out.subset.selected_a) out.rows.push_back(members[0][i]);
    for (auto i : out.subset.selected_b) out.rows.push_back(members[1][i]);
    std::sort(out.rows.begin(), out.rows.end());
    // Report seeds and selections in X's row space.
    out.subset.seed_a = members[0][out.subset.seed_a];
    out.subset.seed_b = members[1][out.subset.seed_b];
    for (auto& i : out.subset.selected_a) i = members[0][i];
    for (auto& i : out.subset.selected_b) i = members[1][i];
    return out;
}

// ---------------------------------------------------------------------------
// Silhouette

/// Mean silhouette with Euclidean distance. Points in singleton clusters score 0.
inline double silhouette(const Matrix& points, std::span<const Label> labels) {
    const std::size_t n = points.rows();
    if (labels.size() != n) {
        throw ValidationError("silhouette: label count does not match points");
    }
    if (n < 3) {
        throw ValidationError("silhouette: need at least 3 points");
    }
    std::map<Label, std::size_t> cluster_index;
    for (Label l : labels) cluster_index.emplace(l, 0);
    if (cluster_index.size() < 2) {
        throw ValidationError("silhouette: need at least two clusters");
    }
    std::size_t k = 0;
    for (auto& [_, idx] : cluster_index) idx = k++;
    std::vector<std::size_t> cluster(n);
    std::vector<double> sizes(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        cluster[i] = cluster_index[labels[i]];
        sizes[cluster[i]] += 1.0;
    }

    double total = 0.0;
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[cluster[j]] += std::sqrt(squared_distance(points.row(i), points.row(j)));
        }
        const std::size_t own = cluster[i];
        if (sizes[own] <= 1.0) {
            continue;
        }
        const double a = sums[own] / (sizes[own] - 1.0);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own) b = std::min(b, sums[c] / sizes[c]);
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Audit

enum class Quadrant { clusters_high_accuracy, no_clusters_high_accuracy, no_clusters_low_accuracy };

inline std::string_view to_string(Quadrant q) {
    switch (q) {
        case Quadrant::clusters_high_accuracy: return "clusters+high-acc";
        case Quadrant::no_clusters_high_accuracy: return "no-clusters+high-acc";
        case Quadrant::no_clusters_low_accuracy: return "no-clusters+low-acc";
    }
    return "?";
}

struct AuditConfig {
    SweepOptions probe;
    TsneConfig tsne;
    /// 2-D silhouette at or above which the projection counts as clustered.
    double silhouette_threshold = 0.25;
    /// Probe accuracy at or above 0.5 + margin counts as high.
    double accuracy_margin = 0.1;
};

struct AuditVerdict {
    double probe_accuracy = 0.0;
    double probe_ci95 = 0.0;
    double projection_separability = 0.0;
    /// Empty when clustered projections met a low probe accuracy.
    std::optional<Quadrant> quadrant;
    std::string diagnostic;
    TsneResult projection;
};

/**
 * Cross-validated probe accuracy against the 2-D silhouette of a t-SNE
 * projection. Clustered projections with a low probe accuracy signal a failed
 * probe optimization and produce a diagnostic instead of a quadrant.
 */
inline AuditVerdict audit(const Matrix& X, std::span<const Label> labels, const AuditConfig& cfg,
                          const std::string& task = "audit") {
    const auto folds = make_folds(labels, cfg.probe.plan);
    const auto row = evaluate_features(X, labels, task, cfg.probe, "features", "audit", -1, folds, 7);
    if (!row.valid()) {
        throw TrainingError("audit: probe training failed: " + (row.failures.empty() ? std::string("no result") : row.failures.front()));
    }
    AuditVerdict verdict;
    verdict.probe_accuracy = row.mean;
    verdict.probe_ci95 = row.ci95;
    verdict.projection = tsne(X, cfg.tsne);
    verdict.projection_separability = silhouette(verdict.projection.embedding, labels);

    const bool clusters = verdict.projection_separability >= cfg.silhouette_threshold;
    const bool high = verdict.probe_accuracy >= 0.5 + cfg.accuracy_margin;
    if (clusters && !high) {
        verdict.diagnostic = "probe optimization failure: projection is clustered (silhouette " +
                             std::to_string(verdict.projection_separability) + ") but probe accuracy is " +
                             std::to_string(verdict.probe_accuracy);
    } else if (clusters) {
        verdict.quadrant = Quadrant::clusters_high_accuracy;
    } else {
        verdict.quadrant = high ? Quadrant::no_clusters_high_accuracy : Quadrant::no_clusters_low_accuracy;
    }
    return verdict;
}

}  // namespace probekit
