#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "probekit/binary_io.hpp"
#include "probekit/common.hpp"
#include "probekit/matrix.hpp"
#include "probekit/rng.hpp"

/**
 * @file probe.hpp
 * @brief Shallow probes over frozen representations: a one-hidden-layer MLP,
 * an L2-regularized logistic regression and a majority-class reference.
 */

namespace probekit {

/// `log_loss` scores an epoch by the negated mean validation cross-entropy;
/// `accuracy` by validation accuracy.
enum class StoppingMetric { log_loss, accuracy };

/**
 * Hyperparameters of the MLP probe. Defaults follow the usual scikit-learn
 * `MLPClassifier` settings with early stopping on a held-out validation split.
 */
struct MlpConfig {
    std::size_t hidden_width = 100;
    double learning_rate = 1e-3;
    /// Epochs without validation improvement (by more than `tol`) before stopping.
    std::size_t patience = 1;
    double validation_fraction = 0.1;
    std::size_t max_epochs = 200;
    /// 0 selects min(200, n_train).
    std::size_t batch_size = 0;
    /// L2 penalty on the weight matrices, scaled by 1/batch as in scikit-learn.
    double alpha = 1e-4;
    double tol = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Return the weights of the best validation epoch instead of the last one.
    bool restore_best = false;
    /// Quantity tracked for early stopping on the validation split.
    StoppingMetric stopping_metric = StoppingMetric::log_loss;
    std::uint64_t seed = 0;

    void validate() const {
        if (hidden_width == 0 || max_epochs == 0 || patience == 0) {
            throw ValidationError("MlpConfig: hidden_width, max_epochs and patience must be positive");
        }
        if (!(learning_rate > 0.0) || !(validation_fraction > 0.0 && validation_fraction < 1.0) || alpha < 0.0 || tol < 0.0) {
            throw ValidationError("MlpConfig: learning_rate > 0, 0 < validation_fraction < 1, alpha >= 0 and tol >= 0 required");
        }
        if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
            throw ValidationError("MlpConfig: invalid Adam parameters");
        }
    }
};

enum class ProbeKind : std::uint8_t { mlp = 0, logistic = 1, majority = 2 };

struct TrainingMeta {
    std::size_t epochs = 0;
    /// Validation accuracy of the returned weights.
    double final_validation_score = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    bool converged = true;
    std::size_t iterations = 0;

    friend bool operator==(const TrainingMeta& a, const TrainingMeta& b) {
        auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
        return a.epochs == b.epochs && same(a.final_validation_score, b.final_validation_score) && a.seed == b.seed &&
               a.converged == b.converged && a.iterations == b.iterations;
    }
};

/**
 * A trained probe. Weight layout in `weights`:
 * - mlp: W1 (input_dim x hidden_width, row-major), b1 (hidden_width), w2 (hidden_width), b2
 * - logistic: w (input_dim), b
 * - majority: the predicted class as 0.0 or 1.0
 */
struct ProbeModel {
    ProbeKind kind = ProbeKind::majority;
    std::size_t input_dim = 0;
    std::size_t hidden_width = 0;
    std::vector<double> weights;
    TrainingMeta meta;

    friend bool operator==(const ProbeModel&, const ProbeModel&) = default;
};

struct Predictions {
    std::vector<Label> labels;
    std::vector<double> scores;  ///< probability of class 1
};

// ---------------------------------------------------------------------------
// MLP parameters and loss

/// Flat parameter vector of a one-hidden-layer network with a sigmoid output.
class MlpParameters {
public:
    MlpParameters(std::size_t input_dim, std::size_t hidden)
        : input_dim_(input_dim), hidden_(hidden), flat_(count(input_dim, hidden), 0.0) {}

    MlpParameters(std::size_t input_dim, std::size_t hidden, std::vector<double> flat)
        : input_dim_(input_dim), hidden_(hidden), flat_(std::move(flat)) {
        if (flat_.size() != count(input_dim, hidden)) {
            throw ValidationError("MlpParameters: weight count does not match shape");
        }
    }

    static std::size_t count(std::size_t input_dim, std::size_t hidden) { return input_dim * hidden + 2 * hidden + 1; }

    std::size_t input_dim() const { return input_dim_; }
    std::size_t hidden() const { return hidden_; }

    std::span<double> flat() { return flat_; }
    std::span<const double> flat() const { return flat_; }
    std::vector<double>& storage() { return flat_; }

    std::span<double> w1() { return flat().subspan(0, input_dim_ * hidden_); }
    std::span<const double> w1() const { return flat().subspan(0, input_dim_ * hidden_); }
    std::span<double> b1() { return flat().subspan(input_dim_ * hidden_, hidden_); }
    std::span<const double> b1() const { return flat().subspan(input_dim_ * hidden_, hidden_); }
    std::span<double> w2() { return flat().subspan(input_dim_ * hidden_ + hidden_, hidden_); }
    std::span<const double> w2() const { return flat().subspan(input_dim_ * hidden_ + hidden_, hidden_); }
    double& b2() { return flat_.back(); }
    double b2() const { return flat_.back(); }

    /// Glorot-uniform initialization of every parameter, biases included.
    void initialize(Rng& rng) {
        const double bound1 = std::sqrt(6.0 / static_cast<double>(input_dim_ + hidden_));
        for (double& v : w1()) v = rng.uniform(-bound1, bound1);
        for (double& v : b1()) v = rng.uniform(-bound1, bound1);
        const double bound2 = std::sqrt(6.0 / static_cast<double>(hidden_ + 1));
        for (double& v : w2()) v = rng.uniform(-bound2, bound2);
        b2() = rng.uniform(-bound2, bound2);
    }

private:
    std::size_t input_dim_;
    std::size_t hidden_;
    std::vector<double> flat_;
};

namespace detail {

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Output logit for one row; fills `hidden_out` with post-ReLU activations.
inline double mlp_forward(const MlpParameters& p, std::span<const double> x, std::span<double> hidden_out) {
    const std::size_t h = p.hidden();
    auto b1 = p.b1();
    std::copy(b1.begin(), b1.end(), hidden_out.begin());
    auto w1 = p.w1();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) {
            continue;
        }
        const double* wrow = w1.data() + i * h;
        for (std::size_t j = 0; j < h; ++j) {
            hidden_out[j] += xi * wrow[j];
        }
    }
    double z = p.b2();
    auto w2 = p.w2();
    for (std::size_t j = 0; j < h; ++j) {
        hidden_out[j] = std::max(0.0, hidden_out[j]);
        z += hidden_out[j] * w2[j];
    }
    return z;
}

}  // namespace detail

/**
 * Mean binary cross-entropy over the listed rows plus alpha/(2B) times the
 * squared norm of the weight matrices. When `grad` is given it receives the
 * analytic gradient with the same layout as `params`.
 */
inline double mlp_loss(const MlpParameters& params, const Matrix& X, std::span<const Label> y,
                       std::span<const std::size_t> batch, double alpha, MlpParameters* grad = nullptr) {
    const std::size_t h = params.hidden();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    std::vector<double> hidden(h);
    double loss = 0.0;
    if (grad) {
        std::fill(grad->flat().begin(), grad->flat().end(), 0.0);
    }
    auto w2 = params.w2();
    for (std::size_t idx : batch) {
        const auto x = X.row(idx);
        const double z = detail::mlp_forward(params, x, hidden);
        const double target = static_cast<double>(y[idx]);
        loss += detail::softplus(z) - target * z;
        if (!grad) {
            continue;
        }
        const double dz = (detail::sigmoid(z) - target) * inv_b;
        auto gw1 = grad->w1();
        auto gb1 = grad->b1();
        auto gw2 = grad->w2();
        grad->b2() += dz;
        for (std::size_t j = 0; j < h; ++j) {
            gw2[j] += dz * hidden[j];
            // hidden[j] > 0 exactly when the pre-activation is positive.
            hidden[j] = hidden[j] > 0.0 ? dz * w2[j] : 0.0;
            gb1[j] += hidden[j];
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = x[i];
            if (xi == 0.0) {
                continue;
            }
            double* grow = gw1.data() + i * h;
            for (std::size_t j = 0; j < h; ++j) {
                grow[j] += xi * hidden[j];
            }
        }
    }
    loss *= inv_b;
    double sq = 0.0;
    for (double v : params.w1()) sq += v * v;
    for (double v : params.w2()) sq += v * v;
    loss += 0.5 * alpha * inv_b * sq;
    if (grad) {
        auto gw1 = grad->w1();
        auto w1 = params.w1();
        for (std::size_t k = 0; k < gw1.size(); ++k) gw1[k] += alpha * inv_b * w1[k];
        auto gw2 = grad->w2();
        for (std::size_t k = 0; k < gw2.size(); ++k) gw2[k] += alpha * inv_b * w2[k];
    }
    return loss;
}

// ---------------------------------------------------------------------------
// Prediction

inline Predictions predict(const ProbeModel& model, const Matrix& X) {
    if (X.cols() != model.input_dim) {
        throw ValidationError("predict: feature width " + std::to_string(X.cols()) + " does not match probe input dim " +
                              std::to_string(model.input_dim));
    }
    Predictions out;
    out.labels.resize(X.rows());
    out.scores.resize(X.rows());
    switch (model.kind) {
        case ProbeKind::majority:
            for (std::size_t i = 0; i < X.rows(); ++i) {
                out.scores[i] = model.weights.at(0);
            }
            break;
        case ProbeKind::logistic: {
            const std::span<const double> w(model.weights.data(), model.input_dim);
            const double b = model.weights.at(model.input_dim);
            for (std::size_t i = 0; i < X.rows(); ++i) {
                const auto x = X.row(i);
                out.scores[i] = detail::sigmoid(std::inner_product(x.begin(), x.end(), w.begin(), b));
            }
            break;
        }
        case ProbeKind::mlp: {
            const MlpParameters params(model.input_dim, model.hidden_width, model.weights);
            std::vector<double> hidden(model.hidden_width);
            for (std::size_t i = 0; i < X.rows(); ++i) {
                out.scores[i] = detail::sigmoid(detail::mlp_forward(params, X.row(i), hidden));
            }
            break;
        }
    }
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out.labels[i] = out.scores[i] >= 0.5 ? 1 : 0;
    }
    return out;
}

inline double accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw ValidationError("accuracy: size mismatch or empty input");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        hits += predicted[i] == truth[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

// ---------------------------------------------------------------------------
// Training

namespace detail {

inline void check_training_input(const Matrix& X, std::span<const Label> y, const char* who) {
    if (X.rows() != y.size()) {
        throw ValidationError(std::string(who) + ": feature rows (" + std::to_string(X.rows()) + ") != label count (" +
                              std::to_string(y.size()) + ")");
    }
    std::size_t ones = 0;
    for (Label l : y) {
        if (l != 0 && l != 1) {
            throw ValidationError(std::string(who) + ": label outside {0,1}");
        }
        ones += static_cast<std::size_t>(l);
    }
    if (ones == 0 || ones == y.size()) {
        throw TrainingError(std::string(who) + ": labels contain a single class");
    }
    if (!X.all_finite()) {
        throw TrainingError(std::string(who) + ": non-finite feature values");
    }
}

/// Stratified (train, validation) index split.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(std::span<const Label> y, double fraction,
                                                                                        Rng& rng) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < y.size(); ++i) {
        by_class[static_cast<std::size_t>(y[i])].push_back(i);
    }
    std::array<std::size_t, 2> n_val{};
    for (std::size_t c = 0; c < 2; ++c) {
        rng.shuffle(std::span<std::size_t>(by_class[c]));
        const auto wanted = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(by_class[c].size())));
        n_val[c] = std::min(wanted, by_class[c].size() - 1);
    }
    if (n_val[0] + n_val[1] == 0) {
        const std::size_t c = by_class[1].size() > by_class[0].size() ? 1 : 0;
        if (by_class[c].size() < 2) {
            throw ValidationError("MLP training: too few samples to hold out a validation split");
        }
        n_val[c] = 1;
    }
    std::vector<std::size_t> train, val;
    for (std::size_t c = 0; c < 2; ++c) {
        val.insert(val.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(n_val[c]));
        train.insert(train.end(), by_class[c].begin() + static_cast<std::ptrdiff_t>(n_val[c]), by_class[c].end());
    }
    std::sort(train.begin(), train.end());
    std::sort(val.begin(), val.end());
    return {std::move(train), std::move(val)};
}

}  // namespace detail

/**
 * Trains the MLP probe with Adam over shuffled mini-batches. After every epoch
 * the network is scored on a stratified held-out validation split;
 * training stops once `patience` consecutive epochs fail to improve the best
 * score by more than `tol`, or at `max_epochs`.
 */
inline ProbeModel train_mlp(const Matrix& X, std::span<const Label> y, const MlpConfig& cfg) {
    cfg.validate();
    detail::check_training_input(X, y, "train_mlp");

    Rng rng(cfg.seed);
    auto [train, val] = detail::stratified_holdout(y, cfg.validation_fraction, rng);
    const std::size_t batch_size = cfg.batch_size == 0 ? std::min<std::size_t>(200, train.size())
                                                       : std::min(cfg.batch_size, train.size());

    MlpParameters params(X.cols(), cfg.hidden_width);
    params.initialize(rng);
    MlpParameters grad(X.cols(), cfg.hidden_width);
    std::vector<double> m(params.flat().size(), 0.0);
    std::vector<double> v(params.flat().size(), 0.0);
    std::vector<double> best = params.storage();
    std::vector<Label> y_val;
    for (std::size_t i : val) y_val.push_back(y[i]);
    const Matrix X_val = X.take_rows(val);

    ProbeModel model;
    model.kind = ProbeKind::mlp;
    model.input_dim = X.cols();
    model.hidden_width = cfg.hidden_width;
    model.meta.seed = cfg.seed;

    double best_score = -std::numeric_limits<double>::infinity();
    double last_score = best_score;
    double best_accuracy = 0.0;
    double last_accuracy = 0.0;
    std::size_t stale = 0;
    std::size_t step = 0;
    std::size_t epoch = 0;
    while (epoch < cfg.max_epochs) {
        ++epoch;
        rng.shuffle(std::span<std::size_t>(train));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < train.size(); start += batch_size) {
            const std::size_t end = std::min(start + batch_size, train.size());
            const std::span<const std::size_t> batch(train.data() + start, end - start);
            const double loss = mlp_loss(params, X, y, batch, cfg.alpha, &grad);
            epoch_loss += loss * static_cast<double>(batch.size());
            ++step;
            const double t = static_cast<double>(step);
            const double lr_t = cfg.learning_rate * std::sqrt(1.0 - std::pow(cfg.beta2, t)) / (1.0 - std::pow(cfg.beta1, t));
            auto p = params.flat();
            auto g = grad.flat();
            for (std::size_t k = 0; k < p.size(); ++k) {
                m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
                v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
                p[k] -= lr_t * m[k] / (std::sqrt(v[k]) + cfg.epsilon);
            }
        }
        if (!std::isfinite(epoch_loss)) {
            throw TrainingError("train_mlp: loss diverged (non-finite) at epoch " + std::to_string(epoch));
        }
        model.weights = params.storage();
        const auto val_pred = predict(model, X_val);
        last_accuracy = accuracy(val_pred.labels, y_val);
        if (cfg.stopping_metric == StoppingMetric::accuracy) {
            last_score = last_accuracy;
        } else {
            double ll = 0.0;
            for (std::size_t i = 0; i < y_val.size(); ++i) {
                const double p = std::clamp(val_pred.scores[i], 1e-15, 1.0 - 1e-15);
                ll += y_val[i] == 1 ? std::log(p) : std::log1p(-p);
            }
            last_score = ll / static_cast<double>(y_val.size());
        }
        if (last_score > best_score + cfg.tol) {
            stale = 0;
        } else {
            ++stale;
        }
        if (last_score > best_score) {
            best_score = last_score;
            best_accuracy = last_accuracy;
            best = params.storage();
        }
        if (stale >= cfg.patience) {
            break;
        }
    }
    model.meta.epochs = epoch;
    model.meta.converged = stale >= cfg.patience;
    model.meta.iterations = step;
    if (cfg.restore_best) {
        model.weights = best;
        model.meta.final_validation_score = best_accuracy;
    } else {
        model.weights = params.storage();
        model.meta.final_validation_score = last_accuracy;
    }
    return model;
}

struct LogisticOptions {
    std::size_t max_iterations = 10000;
    double gradient_tolerance = 1e-6;
};

/**
 * L2-regularized logistic regression (bias unpenalized), fit by full-batch
 * gradient descent from zero with the fixed step 1/L, where L bounds the
 * Hessian. `meta.converged` is false when the iteration cap was reached.
 */
inline ProbeModel train_logistic(const Matrix& X, std::span<const Label> y, double l2, std::uint64_t seed,
                                 LogisticOptions options = {}) {
    detail::check_training_input(X, y, "train_logistic");
    if (l2 < 0.0) {
        throw ValidationError("train_logistic: l2 must be non-negative");
    }
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    double max_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double norm = l2_norm(X.row(i));
        max_sq = std::max(max_sq, norm * norm);
    }
    const double step = 1.0 / (0.25 * (max_sq + 1.0) + l2);

    std::vector<double> w(d + 1, 0.0);
    std::vector<double> g(d + 1, 0.0);
    ProbeModel model;
    model.kind = ProbeKind::logistic;
    model.input_dim = d;
    model.meta.seed = seed;
    model.meta.converged = false;
    const double inv_n = 1.0 / static_cast<double>(n);
    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = X.row(i);
            const double z = std::inner_product(x.begin(), x.end(), w.begin(), w[d]);
            const double r = (detail::sigmoid(z) - static_cast<double>(y[i])) * inv_n;
            for (std::size_t k = 0; k < d; ++k) g[k] += r * x[k];
            g[d] += r;
        }
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            g[k] += l2 * w[k];
        }
        for (double v : g) norm_sq += v * v;
        if (!std::isfinite(norm_sq)) {
            throw TrainingError("train_logistic: gradient diverged");
        }
        if (std::sqrt(norm_sq) < options.gradient_tolerance) {
            model.meta.converged = true;
            break;
        }
        for (std::size_t k = 0; k <= d; ++k) {
            w[k] -= step * g[k];
        }
    }
    model.meta.iterations = it;
    model.meta.epochs = it;
    model.weights = std::move(w);
    return model;
}

/// Predicts the training majority class; ties go to class 0.
inline ProbeModel train_majority(std::size_t input_dim, std::span<const Label> y) {
    if (y.empty()) {
        throw ValidationError("train_majority: no labels");
    }
    std::size_t ones = 0;
    for (Label l : y) ones += static_cast<std::size_t>(l);
    ProbeModel model;
    model.kind = ProbeKind::majority;
    model.input_dim = input_dim;
    model.weights = {2 * ones > y.size() ? 1.0 : 0.0};
    return model;
}

// ---------------------------------------------------------------------------
// Coefficient inspection

struct CoefficientReport {
    std::vector<std::pair<std::string, double>> positive;
    std::vector<std::pair<std::string, double>> negative;
};

/// The k most positive and k most negative logistic weights, named by column.
/// Ties are broken by token text; k beyond the vocabulary size truncates.
inline CoefficientReport top_coefficients(const ProbeModel& model, std::span<const std::string> column_names, std::size_t k) {
    if (model.kind != ProbeKind::logistic) {
        throw ValidationError("top_coefficients: requires a logistic probe");
    }
    if (column_names.size() != model.input_dim) {
        throw ValidationError("top_coefficients: vocabulary size does not match probe input dim");
    }
    std::vector<std::pair<std::string, double>> all;
    all.reserve(column_names.size());
    for (std::size_t c = 0; c < column_names.size(); ++c) {
        all.emplace_back(column_names[c], model.weights[c]);
    }
    const std::size_t take = std::min(k, all.size());
    CoefficientReport report;
    auto pos = all;
    std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    report.positive.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    report.negative.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take));
    return report;
}

// ---------------------------------------------------------------------------
// PRB1 serialization: magic, u8 kind, u32 input_dim, u32 hidden_width,
// u64 weight count, f64 weights, then u32 epochs, f64 final validation score,
// u64 seed, u8 converged, u32 iterations.

inline void save_probe(const ProbeModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("cannot write " + path.string());
    }
    binio::write_magic(out, "PRB1");
    binio::write_uint<std::uint8_t>(out, static_cast<std::uint8_t>(model.kind));
    binio::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(model.input_dim));
    binio::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(model.hidden_width));
    binio::write_uint<std::uint64_t>(out, model.weights.size());
    for (double w : model.weights) binio::write_f64(out, w);
    binio::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(model.meta.epochs));
    binio::write_f64(out, model.meta.final_validation_score);
    binio::write_uint<std::uint64_t>(out, model.meta.seed);
    binio::write_uint<std::uint8_t>(out, model.meta.converged ? 1 : 0);
    binio::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(model.meta.iterations));
}

inline ProbeModel load_probe(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open " + path.string());
    }
    const std::string name = path.string();
    binio::expect_magic(in, "PRB1", name);
    ProbeModel model;
    const auto kind = binio::read_uint<std::uint8_t>(in, name);
    if (kind > 2) {
        throw ValidationError(name + ": unknown probe kind " + std::to_string(kind));
    }
    model.kind = static_cast<ProbeKind>(kind);
    model.input_dim = binio::read_uint<std::uint32_t>(in, name);
    model.hidden_width = binio::read_uint<std::uint32_t>(in, name);
    const auto count = binio::read_uint<std::uint64_t>(in, name);
    std::size_t expected = 1;
    if (model.kind == ProbeKind::mlp) expected = MlpParameters::count(model.input_dim, model.hidden_width);
    if (model.kind == ProbeKind::logistic) expected = model.input_dim + 1;
    if (count != expected) {
        throw ValidationError(name + ": weight count inconsistent with probe shape");
    }
    model.weights.resize(count);
    for (auto& w : model.weights) {
        w = binio::read_f64(in, name);
        if (!std::isfinite(w)) {
            throw ValidationError(name + ": non-finite weight");
        }
    }
    model.meta.epochs = binio::read_uint<std::uint32_t>(in, name);
    model.meta.final_validation_score = binio::read_f64(in, name);
    model.meta.seed = binio::read_uint<std::uint64_t>(in, name);
    model.meta.converged = binio::read_uint<std::uint8_t>(in, name) != 0;
    model.meta.iterations = binio::read_uint<std::uint32_t>(in, name);
    return model;
}

}  // namespace probekit
