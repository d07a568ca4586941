#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "probekit/binary_io.hpp"
#include "probekit/common.hpp"

/**
 * @file corpus.hpp
 * @brief Labeled sentence datasets, complexity ratings and layer-wise embedding stores.
 *
 * Storage formats (all little-endian):
 * - `EMB1` dense matrix: magic, u32 rows, u32 cols, rows*cols f32, row-major.
 * - `TOK1` ragged tokens: magic, u32 n_sentences, then per sentence u32 n_tokens
 *   followed by n_tokens*dim f32. The width comes from the manifest.
 * - `MSK1` token mask (optional): magic, u32 n_sentences, then per sentence
 *   u32 n_tokens followed by n_tokens bytes, 1 = include in aggregation.
 */

namespace probekit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Labeled datasets

struct LabeledDataset {
    std::string task_name;
    std::vector<std::string> sentences;
    std::vector<Label> labels;
    std::array<std::string, 2> class_names{"negative", "positive"};

    std::size_t size() const { return sentences.size(); }

    std::array<std::size_t, 2> class_counts() const {
        std::array<std::size_t, 2> counts{0, 0};
        for (Label l : labels) {
            ++counts[static_cast<std::size_t>(l)];
        }
        return counts;
    }

    void validate() const {
        if (labels.size() != sentences.size()) {
            throw ValidationError(task_name + ": label count differs from sentence count");
        }
        for (Label l : labels) {
            if (l != 0 && l != 1) {
                throw ValidationError(task_name + ": label outside {0,1}");
            }
        }
        const auto counts = class_counts();
        if (counts[0] == 0 || counts[1] == 0) {
            throw ValidationError(task_name + ": dataset must contain both classes");
        }
    }
};

namespace detail {

inline std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            cols.push_back(line.substr(start));
            break;
        }
        cols.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cols;
}

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

/// Iterates the data records of a two-column TSV, skipping a leading `#` header and blank lines.
template <typename F>
void for_each_record(const fs::path& path, F&& on_record) {
    const auto lines = read_lines(path);
    std::size_t records = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (i == 0 && line.starts_with('#')) {
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto cols = split_tabs(line);
        const std::string where = path.string() + ":" + std::to_string(i + 1);
        if (cols.size() != 2) {
            throw ValidationError(where + ": wrong column count (expected 2, got " +
                                  std::to_string(cols.size()) + ")");
        }
        on_record(cols[0], trim(cols[1]), where);
        ++records;
    }
    if (records == 0) {
        throw ValidationError(path.string() + ": empty file");
    }
}

}  // namespace detail

/// Loads a `sentence<TAB>label` file. The task name defaults to the file stem.
inline LabeledDataset load_dataset(const fs::path& path, std::string task_name = {}) {
    LabeledDataset ds;
    ds.task_name = task_name.empty() ? path.stem().string() : std::move(task_name);
    detail::for_each_record(path, [&](std::string_view sentence, const std::string& label, const std::string& where) {
        if (label != "0" && label != "1") {
            throw ValidationError(where + ": label '" + label + "' outside {0,1}");
        }
        ds.sentences.emplace_back(sentence);
        ds.labels.push_back(label == "1" ? 1 : 0);
    });
    ds.validate();
    return ds;
}

inline void write_dataset(const LabeledDataset& ds, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write " + path.string());
    }
    out << "# sentence\tlabel\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << ds.sentences[i] << '\t' << ds.labels[i] << '\n';
    }
}

// ---------------------------------------------------------------------------
// Complexity ratings

/// Per-sentence mean human complexity rating, scale 1..7.
struct RatingTable {
    std::vector<std::string> sentences;
    std::vector<double> ratings;

    void validate() const {
        if (ratings.size() != sentences.size()) {
            throw ValidationError("rating table: rating count differs from sentence count");
        }
        for (double r : ratings) {
            if (!std::isfinite(r) || r < 1.0 || r > 7.0) {
                throw ValidationError("rating table: rating outside [1,7]");
            }
        }
    }
};

inline RatingTable load_ratings(const fs::path& path) {
    RatingTable table;
    detail::for_each_record(path, [&](std::string_view sentence, const std::string& field, const std::string& where) {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
            throw ValidationError(where + ": rating '" + field + "' is not a decimal number");
        }
        table.sentences.emplace_back(sentence);
        table.ratings.push_back(value);
    });
    table.validate();
    return table;
}

/// Splits sentences at the arithmetic mean rating: below the mean is class 0
/// ("simple"), at or above it class 1 ("complex").
inline LabeledDataset binarize_ratings(const RatingTable& table, std::string task_name = "complexity") {
    if (table.ratings.empty()) {
        throw ValidationError("binarize_ratings: empty rating table");
    }
    table.validate();
    // Summed in sorted order so the threshold is exactly permutation invariant.
    std::vector<double> sorted = table.ratings;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double r : sorted) {
        sum += r;
    }
    const double threshold = sum / static_cast<double>(table.ratings.size());

    LabeledDataset ds;
    ds.task_name = std::move(task_name);
    ds.class_names = {"simple", "complex"};
    ds.sentences = table.sentences;
    ds.labels.reserve(table.ratings.size());
    for (double r : table.ratings) {
        ds.labels.push_back(r < threshold ? 0 : 1);
    }
    ds.validate();
    return ds;
}

struct LengthStatistics {
    std::array<double, 2> class_mean{0.0, 0.0};
    double overall_mean = 0.0;
};

inline std::size_t whitespace_token_count(std::string_view s) {
    std::size_t count = 0;
    bool in_token = false;
    for (char ch : s) {
        const bool space = ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
        if (!space && !in_token) {
            ++count;
        }
        in_token = !space;
    }
    return count;
}

/// Mean whitespace-token count per class and overall.
inline LengthStatistics length_statistics(const LabeledDataset& ds) {
    ds.validate();
    std::array<double, 2> sums{0.0, 0.0};
    const auto counts = ds.class_counts();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        sums[static_cast<std::size_t>(ds.labels[i])] += static_cast<double>(whitespace_token_count(ds.sentences[i]));
    }
    LengthStatistics stats;
    stats.class_mean = {sums[0] / static_cast<double>(counts[0]), sums[1] / static_cast<double>(counts[1])};
    stats.overall_mean = (sums[0] + sums[1]) / static_cast<double>(ds.size());
    return stats;
}

// ---------------------------------------------------------------------------
// Embedding stores

enum class StoredKind { cls, pooled, token_vectors };

inline std::string_view to_string(StoredKind k) {
    switch (k) {
        case StoredKind::cls: return "CLS";
        case StoredKind::pooled: return "Pooled";
        case StoredKind::token_vectors: return "TokenVectors";
    }
    return "?";
}

/// Row-major f32 matrix as stored on disk.
struct DenseMatrix32 {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<float> values;

    std::span<const float> row(std::size_t r) const { return {values.data() + r * cols, cols}; }

    friend bool operator==(const DenseMatrix32&, const DenseMatrix32&) = default;
};

/// Ragged per-sentence token vectors of a fixed width.
struct TokenTensor {
    std::uint32_t dim = 0;
    std::vector<std::uint32_t> offsets{0};  ///< size n_sentences + 1, in tokens
    std::vector<float> values;

    std::size_t n_sentences() const { return offsets.size() - 1; }
    std::size_t n_tokens(std::size_t s) const { return offsets[s + 1] - offsets[s]; }
    std::span<const float> token(std::size_t s, std::size_t t) const {
        return {values.data() + (static_cast<std::size_t>(offsets[s]) + t) * dim, dim};
    }

    void push_sentence(std::span<const float> flat_tokens) {
        if (dim == 0 || flat_tokens.size() % dim != 0) {
            throw ValidationError("token tensor: token block is not a multiple of dim");
        }
        values.insert(values.end(), flat_tokens.begin(), flat_tokens.end());
        offsets.push_back(static_cast<std::uint32_t>(values.size() / dim));
    }

    friend bool operator==(const TokenTensor&, const TokenTensor&) = default;
};

/// Optional per-token inclusion flags aligned with a TokenTensor.
struct TokenMask {
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint8_t> keep;

    std::size_t n_sentences() const { return offsets.size() - 1; }
    std::size_t n_tokens(std::size_t s) const { return offsets[s + 1] - offsets[s]; }
    bool included(std::size_t s, std::size_t t) const { return keep[offsets[s] + t] != 0; }

    friend bool operator==(const TokenMask&, const TokenMask&) = default;
};

namespace detail {

inline void check_finite(std::span<const float> values, const std::string& what) {
    for (float v : values) {
        if (!std::isfinite(v)) {
            throw ValidationError(what + ": non-finite value");
        }
    }
}

inline std::ifstream open_binary(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open " + path.string());
    }
    return in;
}

inline std::ofstream create_binary(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("cannot write " + path.string());
    }
    return out;
}

inline void expect_eof(std::istream& in, const fs::path& path) {
    if (!binio::at_end(in)) {
        throw ValidationError(path.string() + ": trailing bytes after payload");
    }
}

}  // namespace detail

inline DenseMatrix32 read_dense(const fs::path& path) {
    auto in = detail::open_binary(path);
    const std::string name = path.string();
    binio::expect_magic(in, "EMB1", name);
    DenseMatrix32 m;
    m.rows = binio::read_uint<std::uint32_t>(in, name + " rows");
    m.cols = binio::read_uint<std::uint32_t>(in, name + " cols");
    const std::size_t count = static_cast<std::size_t>(m.rows) * m.cols;
    m.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        m.values[i] = binio::read_f32(in, name + " payload (file truncated)");
    }
    detail::expect_eof(in, path);
    detail::check_finite(m.values, name);
    return m;
}

inline void write_dense(const DenseMatrix32& m, const fs::path& path) {
    auto out = detail::create_binary(path);
    binio::write_magic(out, "EMB1");
    binio::write_uint<std::uint32_t>(out, m.rows);
    binio::write_uint<std::uint32_t>(out, m.cols);
    for (float v : m.values) {
        binio::write_f32(out, v);
    }
}

inline TokenTensor read_tokens(const fs::path& path, std::uint32_t dim) {
    auto in = detail::open_binary(path);
    const std::string name = path.string();
    binio::expect_magic(in, "TOK1", name);
    TokenTensor t;
    t.dim = dim;
    const auto n = binio::read_uint<std::uint32_t>(in, name + " n_sentences");
    t.offsets.reserve(n + 1);
    for (std::uint32_t s = 0; s < n; ++s) {
        const auto n_tokens = binio::read_uint<std::uint32_t>(in, name + " n_tokens");
        if (n_tokens == 0) {
            throw ValidationError(name + ": sentence " + std::to_string(s) + " has zero tokens");
        }
        const std::size_t count = static_cast<std::size_t>(n_tokens) * dim;
        const std::size_t base = t.values.size();
        t.values.resize(base + count);
        for (std::size_t i = 0; i < count; ++i) {
            t.values[base + i] = binio::read_f32(in, name + " payload (file truncated)");
        }
        t.offsets.push_back(t.offsets.back() + n_tokens);
    }
    detail::expect_eof(in, path);
    detail::check_finite(t.values, name);
    return t;
}

inline void write_tokens(const TokenTensor& t, const fs::path& path) {
    auto out = detail::create_binary(path);
    binio::write_magic(out, "TOK1");
    binio::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(t.n_sentences()));
    for (std::size_t s = 0; s < t.n_sentences(); ++s) {
        binio::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(t.n_tokens(s)));
        const std::size_t begin = static_cast<std::size_t>(t.offsets[s]) * t.dim;
        const std::size_t end = static_cast<std::size_t>(t.offsets[s + 1]) * t.dim;
        for (std::size_t i = begin; i < end; ++i) {
            binio::write_f32(out, t.values[i]);
        }
    }
}

inline TokenMask read_token_mask(const fs::path& path) {
    auto in = detail::open_binary(path);
    const std::string name = path.string();
    binio::expect_magic(in, "MSK1", name);
    TokenMask m;
    const auto n = binio::read_uint<std::uint32_t>(in, name + " n_sentences");
    for (std::uint32_t s = 0; s < n; ++s) {
        const auto n_tokens = binio::read_uint<std::uint32_t>(in, name + " n_tokens");
        for (std::uint32_t t = 0; t < n_tokens; ++t) {
            m.keep.push_back(binio::read_uint<std::uint8_t>(in, name + " mask"));
        }
        m.offsets.push_back(m.offsets.back() + n_tokens);
    }
    detail::expect_eof(in, path);
    return m;
}

inline void write_token_mask(const TokenMask& m, const fs::path& path) {
    auto out = detail::create_binary(path);
    binio::write_magic(out, "MSK1");
    binio::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(m.n_sentences()));
    for (std::size_t s = 0; s < m.n_sentences(); ++s) {
        binio::write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(m.n_tokens(s)));
        for (std::size_t t = 0; t < m.n_tokens(s); ++t) {
            binio::write_uint<std::uint8_t>(out, m.keep[m.offsets[s] + t]);
        }
    }
}

/// Layer-wise sentence representations of one model over one dataset.
/// Layer 0 is the embedding output; CLS and token vectors are per layer,
/// the pooled output is a single model-level matrix.
struct EmbeddingStore {
    std::string model_id;
    std::uint32_t num_layers = 0;
    std::uint32_t dim = 0;
    std::uint32_t n_sentences = 0;
    std::vector<DenseMatrix32> cls;            ///< empty or num_layers entries
    std::optional<DenseMatrix32> pooled;
    std::vector<TokenTensor> tokens;           ///< empty or num_layers entries
    std::vector<TokenMask> token_masks;        ///< empty or num_layers entries
    nlohmann::json extra = nlohmann::json::object();  ///< unrecognised manifest fields, kept verbatim

    bool has(StoredKind k) const {
        switch (k) {
            case StoredKind::cls: return !cls.empty();
            case StoredKind::pooled: return pooled.has_value();
            case StoredKind::token_vectors: return !tokens.empty();
        }
        return false;
    }

    std::vector<StoredKind> kinds() const {
        std::vector<StoredKind> out;
        for (auto k : {StoredKind::cls, StoredKind::pooled, StoredKind::token_vectors}) {
            if (has(k)) {
                out.push_back(k);
            }
        }
        return out;
    }

    void validate() const {
        const std::string who = "store '" + model_id + "'";
        if (num_layers == 0 || dim == 0 || n_sentences == 0) {
            throw ValidationError(who + ": num_layers, dim and n_sentences must be positive");
        }
        if (!has(StoredKind::cls) && !has(StoredKind::pooled) && !has(StoredKind::token_vectors)) {
            throw ValidationError(who + ": no representation kinds available");
        }
        auto check_dense = [&](const DenseMatrix32& m, const std::string& what) {
            if (m.rows != n_sentences || m.cols != dim) {
                throw ValidationError(who + ": " + what + " shape " + std::to_string(m.rows) + "x" +
                                      std::to_string(m.cols) + " does not match manifest " +
                                      std::to_string(n_sentences) + "x" + std::to_string(dim));
            }
            if (m.values.size() != static_cast<std::size_t>(m.rows) * m.cols) {
                throw ValidationError(who + ": " + what + " payload size mismatch");
            }
            detail::check_finite(m.values, who + " " + what);
        };
        if (has(StoredKind::cls)) {
            if (cls.size() != num_layers) {
                throw ValidationError(who + ": CLS must be present for every layer");
            }
            for (std::size_t l = 0; l < cls.size(); ++l) {
                check_dense(cls[l], "CLS layer " + std::to_string(l));
            }
        }
        if (pooled) {
            check_dense(*pooled, "Pooled");
        }
        if (has(StoredKind::token_vectors)) {
            if (tokens.size() != num_layers) {
                throw ValidationError(who + ": TokenVectors must be present for every layer");
            }
            for (std::size_t l = 0; l < tokens.size(); ++l) {
                const auto& t = tokens[l];
                const std::string what = "TokenVectors layer " + std::to_string(l);
                if (t.dim != dim || t.n_sentences() != n_sentences) {
                    throw ValidationError(who + ": " + what + " shape does not match manifest");
                }
                for (std::size_t s = 0; s < t.n_sentences(); ++s) {
                    if (t.n_tokens(s) == 0) {
                        throw ValidationError(who + ": " + what + " sentence " + std::to_string(s) + " has zero tokens");
                    }
                }
                detail::check_finite(t.values, who + " " + what);
            }
        }
        if (!token_masks.empty()) {
            if (token_masks.size() != tokens.size()) {
                throw ValidationError(who + ": token masks must accompany every token layer");
            }
            for (std::size_t l = 0; l < token_masks.size(); ++l) {
                const auto& m = token_masks[l];
                if (m.offsets != tokens[l].offsets) {
                    throw ValidationError(who + ": token mask layer " + std::to_string(l) + " does not align with tokens");
                }
                for (std::size_t s = 0; s < m.n_sentences(); ++s) {
                    bool any = false;
                    for (std::size_t t = 0; t < m.n_tokens(s); ++t) {
                        any = any || m.included(s, t);
                    }
                    if (!any) {
                        throw ValidationError(who + ": token mask layer " + std::to_string(l) + " excludes every token of sentence " +
                                              std::to_string(s));
                    }
                }
            }
        }
    }
};

namespace detail {

inline std::uint32_t manifest_u32(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_unsigned()) {
        throw ValidationError(std::string("manifest: field '") + key + "' missing or not an unsigned integer");
    }
    return j[key].get<std::uint32_t>();
}

inline std::vector<std::string> manifest_layer_files(const nlohmann::json& files, const char* key, std::uint32_t num_layers) {
    if (!files.contains(key) || !files[key].is_array()) {
        throw ValidationError(std::string("manifest: files.") + key + " must be a list with one file per layer");
    }
    auto list = files[key].get<std::vector<std::string>>();
    if (list.size() != num_layers) {
        throw ValidationError(std::string("manifest: files.") + key + " lists " + std::to_string(list.size()) +
                              " files but num_layers is " + std::to_string(num_layers));
    }
    return list;
}

inline std::string layer_file_name(std::string_view prefix, std::size_t layer, std::string_view ext) {
    std::string idx = std::to_string(layer);
    if (idx.size() < 2) {
        idx.insert(0, 2 - idx.size(), '0');
    }
    return std::string(prefix) + "_" + idx + std::string(ext);
}

}  // namespace detail

/// Loads and fully validates a store. `path` is the store directory or its manifest.json.
inline EmbeddingStore load_embedding_store(const fs::path& path) {
    const fs::path manifest_path = fs::is_directory(path) ? path / "manifest.json" : path;
    const fs::path root = manifest_path.parent_path();
    std::ifstream in(manifest_path);
    if (!in) {
        throw ValidationError("cannot open manifest " + manifest_path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest " + manifest_path.string() + ": " + e.what());
    }

    EmbeddingStore store;
    if (!j.contains("model_id") || !j["model_id"].is_string()) {
        throw ValidationError("manifest: field 'model_id' missing");
    }
    store.model_id = j["model_id"].get<std::string>();
    store.num_layers = detail::manifest_u32(j, "num_layers");
    store.dim = detail::manifest_u32(j, "dim");
    store.n_sentences = detail::manifest_u32(j, "n_sentences");
    if (!j.contains("kinds") || !j["kinds"].is_array() || !j.contains("files") || !j["files"].is_object()) {
        throw ValidationError("manifest: 'kinds' list and 'files' map are required");
    }
    const auto kinds = j["kinds"].get<std::vector<std::string>>();
    const auto& files = j["files"];
    for (const auto& kind : kinds) {
        if (kind == "CLS") {
            for (const auto& f : detail::manifest_layer_files(files, "CLS", store.num_layers)) {
                store.cls.push_back(read_dense(root / f));
            }
        } else if (kind == "Pooled") {
            if (!files.contains("Pooled") || !files["Pooled"].is_string()) {
                throw ValidationError("manifest: files.Pooled must name a single file (pooled output is not per-layer)");
            }
            store.pooled = read_dense(root / files["Pooled"].get<std::string>());
        } else if (kind == "TokenVectors") {
            for (const auto& f : detail::manifest_layer_files(files, "TokenVectors", store.num_layers)) {
                store.tokens.push_back(read_tokens(root / f, store.dim));
            }
            if (files.contains("TokenMask")) {
                for (const auto& f : detail::manifest_layer_files(files, "TokenMask", store.num_layers)) {
                    store.token_masks.push_back(read_token_mask(root / f));
                }
            }
        } else {
            throw ValidationError("manifest: unknown kind '" + kind + "'");
        }
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        static constexpr std::array<std::string_view, 6> known{"model_id", "num_layers", "dim", "n_sentences", "kinds", "files"};
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            store.extra[it.key()] = it.value();
        }
    }
    store.validate();
    return store;
}

/// Writes a store directory with canonical file names.
inline void write_embedding_store(const EmbeddingStore& store, const fs::path& dir) {
    store.validate();
    fs::create_directories(dir);
    nlohmann::json j = store.extra;
    j["model_id"] = store.model_id;
    j["num_layers"] = store.num_layers;
    j["dim"] = store.dim;
    j["n_sentences"] = store.n_sentences;
    nlohmann::json kinds = nlohmann::json::array();
    nlohmann::json files = nlohmann::json::object();
    if (store.has(StoredKind::cls)) {
        kinds.push_back("CLS");
        auto& list = files["CLS"] = nlohmann::json::array();
        for (std::size_t l = 0; l < store.cls.size(); ++l) {
            const auto name = detail::layer_file_name("cls", l, ".emb");
            write_dense(store.cls[l], dir / name);
            list.push_back(name);
        }
    }
    if (store.pooled) {
        kinds.push_back("Pooled");
        write_dense(*store.pooled, dir / "pooled.emb");
        files["Pooled"] = "pooled.emb";
    }
    if (store.has(StoredKind::token_vectors)) {
        kinds.push_back("TokenVectors");
        auto& list = files["TokenVectors"] = nlohmann::json::array();
        for (std::size_t l = 0; l < store.tokens.size(); ++l) {
            const auto name = detail::layer_file_name("tokens", l, ".tok");
            write_tokens(store.tokens[l], dir / name);
            list.push_back(name);
        }
        if (!store.token_masks.empty()) {
            auto& masks = files["TokenMask"] = nlohmann::json::array();
            for (std::size_t l = 0; l < store.token_masks.size(); ++l) {
                const auto name = detail::layer_file_name("mask", l, ".msk");
                write_token_mask(store.token_masks[l], dir / name);
                masks.push_back(name);
            }
        }
    }
    j["kinds"] = kinds;
    j["files"] = files;
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) {
        throw ValidationError("cannot write manifest in " + dir.string());
    }
    out << j.dump(2) << '\n';
}

}  // namespace probekit
