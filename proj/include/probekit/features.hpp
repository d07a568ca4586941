#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probekit/corpus.hpp"
#include "probekit/matrix.hpp"

namespace probekit {

// ---------------------------------------------------------------------------
// TF-IDF

struct TfidfOptions {
    std::optional<std::size_t> max_features;
    std::size_t min_token_length = 2;
};

/// Lowercases ASCII, splits on runs of non-alphanumeric bytes and drops short
/// tokens. Bytes >= 0x80 count as word characters so UTF-8 words stay whole.
inline std::vector<std::string> tokenize(std::string_view text, std::size_t min_token_length = 2) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= min_token_length && !current.empty()) {
            tokens.push_back(current);
        }
        current.clear();
    };
    for (char ch : text) {
        const auto u = static_cast<unsigned char>(ch);
        if (u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z')) {
            current.push_back(ch);
        } else if (u >= 'A' && u <= 'Z') {
            current.push_back(static_cast<char>(u - 'A' + 'a'));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

struct TfidfModel {
    std::vector<std::string> vocabulary;     ///< column order (alphabetical)
    std::map<std::string, std::size_t, std::less<>> index;
    std::vector<std::size_t> document_frequency;
    std::size_t n_documents = 0;
    TfidfOptions options;

    std::size_t size() const { return vocabulary.size(); }

    double idf(std::size_t column) const {
        return std::log((1.0 + static_cast<double>(n_documents)) /
                        (1.0 + static_cast<double>(document_frequency[column]))) + 1.0;
    }
};

inline TfidfModel tfidf_fit(const std::vector<std::string>& corpus, TfidfOptions options = {}) {
    if (corpus.empty()) {
        throw ValidationError("tfidf_fit: empty corpus");
    }
    std::map<std::string, std::size_t, std::less<>> term_count;
    std::map<std::string, std::size_t, std::less<>> doc_count;
    for (const auto& doc : corpus) {
        auto tokens = tokenize(doc, options.min_token_length);
        for (const auto& t : tokens) {
            ++term_count[t];
        }
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (const auto& t : tokens) {
            ++doc_count[t];
        }
    }
    if (term_count.empty()) {
        throw ValidationError("tfidf_fit: corpus contains no valid tokens");
    }

    std::vector<std::string> kept;
    kept.reserve(term_count.size());
    for (const auto& [term, _] : term_count) {
        kept.push_back(term);
    }
    if (options.max_features && *options.max_features < kept.size()) {
        // Highest corpus count first; std::map order already makes ties alphabetical.
        std::stable_sort(kept.begin(), kept.end(), [&](const std::string& a, const std::string& b) {
            return term_count.find(a)->second > term_count.find(b)->second;
        });
        kept.resize(*options.max_features);
        std::sort(kept.begin(), kept.end());
    }

    TfidfModel model;
    model.options = options;
    model.n_documents = corpus.size();
    model.vocabulary = std::move(kept);
    model.document_frequency.reserve(model.vocabulary.size());
    for (std::size_t c = 0; c < model.vocabulary.size(); ++c) {
        model.index.emplace(model.vocabulary[c], c);
        model.document_frequency.push_back(doc_count.find(model.vocabulary[c])->second);
    }
    return model;
}

/// Smoothed-idf weighted term counts, L2-normalized per row.
inline FeatureMatrix tfidf_transform(const TfidfModel& model, const std::vector<std::string>& sentences) {
    FeatureMatrix out;
    out.values = Matrix(sentences.size(), model.size());
    out.provenance = "tfidf";
    if (model.options.max_features) {
        out.provenance += ":" + std::to_string(*model.options.max_features);
    }
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        auto row = out.values.row(i);
        for (const auto& t : tokenize(sentences[i], model.options.min_token_length)) {
            if (auto it = model.index.find(t); it != model.index.end()) {
                row[it->second] += 1.0;
            }
        }
        double sq = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (row[c] != 0.0) {
                row[c] *= model.idf(c);
                sq += row[c] * row[c];
            }
        }
        if (sq > 0.0) {
            const double inv = 1.0 / std::sqrt(sq);
            for (double& v : row) {
                v *= inv;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Representation selection

enum class RepresentationKind { cls, pooled, tokens_mean, tokens_product };

inline std::string_view to_string(RepresentationKind k) {
    switch (k) {
        case RepresentationKind::cls: return "cls";
        case RepresentationKind::pooled: return "pooled";
        case RepresentationKind::tokens_mean: return "mean";
        case RepresentationKind::tokens_product: return "product";
    }
    return "?";
}

inline RepresentationKind parse_representation_kind(std::string_view s) {
    if (s == "cls" || s == "CLS") return RepresentationKind::cls;
    if (s == "pooled" || s == "Pooled" || s == "pooling") return RepresentationKind::pooled;
    if (s == "mean" || s == "tokens_mean" || s == "TokensMean") return RepresentationKind::tokens_mean;
    if (s == "product" || s == "tokens_product" || s == "TokensProduct") return RepresentationKind::tokens_product;
    throw ValidationError("unknown representation kind '" + std::string(s) + "'");
}

inline StoredKind required_storage(RepresentationKind k) {
    switch (k) {
        case RepresentationKind::cls: return StoredKind::cls;
        case RepresentationKind::pooled: return StoredKind::pooled;
        default: return StoredKind::token_vectors;
    }
}

struct RepresentationSelector {
    RepresentationKind kind = RepresentationKind::cls;
    std::size_t layer = 0;  ///< ignored for pooled
};

enum class AggregationMode { mean, product };

/// Element-wise mean or Hadamard product over each sentence's token vectors,
/// computed in double precision. Masked-out tokens are skipped when the store
/// carries a token mask.
inline FeatureMatrix aggregate_tokens(const EmbeddingStore& store, std::size_t layer, AggregationMode mode) {
    if (!store.has(StoredKind::token_vectors)) {
        throw ValidationError("aggregate_tokens: store '" + store.model_id + "' has no token vectors");
    }
    if (layer >= store.num_layers) {
        throw ValidationError("aggregate_tokens: layer " + std::to_string(layer) + " out of range 0.." +
                              std::to_string(store.num_layers - 1));
    }
    const auto& tokens = store.tokens[layer];
    const TokenMask* mask = store.token_masks.empty() ? nullptr : &store.token_masks[layer];
    FeatureMatrix out;
    out.values = Matrix(tokens.n_sentences(), tokens.dim, mode == AggregationMode::mean ? 0.0 : 1.0);
    out.provenance = std::string(store.model_id) + ":" + (mode == AggregationMode::mean ? "mean" : "product") + ":" +
                     std::to_string(layer);
    for (std::size_t s = 0; s < tokens.n_sentences(); ++s) {
        auto row = out.values.row(s);
        std::size_t used = 0;
        for (std::size_t t = 0; t < tokens.n_tokens(s); ++t) {
            if (mask && !mask->included(s, t)) {
                continue;
            }
            ++used;
            const auto vec = tokens.token(s, t);
            for (std::size_t d = 0; d < row.size(); ++d) {
                if (mode == AggregationMode::mean) {
                    row[d] += static_cast<double>(vec[d]);
                } else {
                    row[d] *= static_cast<double>(vec[d]);
                }
            }
        }
        if (mode == AggregationMode::mean) {
            for (double& v : row) {
                v /= static_cast<double>(used);
            }
        } else if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) {
            out.underflow_rows.push_back(s);
        }
    }
    return out;
}

namespace detail {

inline Matrix widen(const DenseMatrix32& m) {
    Matrix out(m.rows, m.cols);
    auto dst = out.data();
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        dst[i] = static_cast<double>(m.values[i]);
    }
    return out;
}

}  // namespace detail

inline FeatureMatrix select_representation(const EmbeddingStore& store, const RepresentationSelector& sel) {
    const auto needed = required_storage(sel.kind);
    if (!store.has(needed)) {
        throw ValidationError("store '" + store.model_id + "' does not provide " + std::string(to_string(needed)) +
                              " (needed for " + std::string(to_string(sel.kind)) + ")");
    }
    switch (sel.kind) {
        case RepresentationKind::cls: {
            if (sel.layer >= store.num_layers) {
                throw ValidationError("select_representation: layer " + std::to_string(sel.layer) + " out of range");
            }
            return {detail::widen(store.cls[sel.layer]), store.model_id + ":cls:" + std::to_string(sel.layer), {}};
        }
        case RepresentationKind::pooled:
            return {detail::widen(*store.pooled), store.model_id + ":pooled", {}};
        case RepresentationKind::tokens_mean:
            return aggregate_tokens(store, sel.layer, AggregationMode::mean);
        case RepresentationKind::tokens_product:
            return aggregate_tokens(store, sel.layer, AggregationMode::product);
    }
    throw ValidationError("select_representation: unknown kind");
}

/// Narrows to f32 for export in the EMB1 format.
inline DenseMatrix32 to_dense32(const Matrix& m) {
    DenseMatrix32 out;
    out.rows = static_cast<std::uint32_t>(m.rows());
    out.cols = static_cast<std::uint32_t>(m.cols());
    out.values.reserve(m.data().size());
    for (double v : m.data()) {
        out.values.push_back(static_cast<float>(v));
    }
    return out;
}

inline Matrix to_matrix(const DenseMatrix32& m) { return detail::widen(m); }

}  // namespace probekit
