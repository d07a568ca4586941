#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "probekit/harness.hpp"
#include "probekit/projection.hpp"
#include "probekit/svg.hpp"

/**
 * @file report.hpp
 * @brief JSON / CSV / SVG emission for results tables, heatmaps, projections
 * and forced subsets. Every writer is deterministic: identical inputs give
 * byte-identical files.
 */

namespace probekit {

namespace detail {

inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw ValidationError("failed writing " + path.string());
    }
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_number(double v) { return std::isfinite(v) ? svg::num(v, 6) : std::string(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Results tables

inline nlohmann::json to_json(const ResultRow& row) {
    nlohmann::json j;
    j["task"] = row.task;
    j["model"] = row.model;
    j["kind"] = row.kind;
    j["layer"] = row.layer >= 0 ? nlohmann::json(row.layer) : nlohmann::json(nullptr);
    j["featurizer"] = row.featurizer;
    j["run_means"] = row.run_means;
    j["mean"] = detail::number_or_null(row.mean);
    j["ci95"] = detail::number_or_null(row.ci95);
    j["n_folds"] = row.n_folds;
    j["n_runs"] = row.n_runs;
    j["n_dev_total"] = row.n_dev_total;
    j["seed"] = row.seed;
    j["underflow_rows"] = row.underflow_rows;
    j["failures"] = row.failures;
    return j;
}

inline ResultRow row_from_json(const nlohmann::json& j) {
    ResultRow row;
    try {
        row.task = j.at("task").get<std::string>();
        row.model = j.at("model").get<std::string>();
        row.kind = j.at("kind").get<std::string>();
        row.layer = j.at("layer").is_null() ? -1 : j.at("layer").get<int>();
        row.featurizer = j.at("featurizer").get<std::string>();
        row.run_means = j.at("run_means").get<std::vector<double>>();
        row.mean = j.at("mean").is_null() ? std::nan("") : j.at("mean").get<double>();
        row.ci95 = j.at("ci95").is_null() ? std::nan("") : j.at("ci95").get<double>();
        row.n_folds = j.at("n_folds").get<std::size_t>();
        row.n_runs = j.at("n_runs").get<std::size_t>();
        row.seed = j.at("seed").get<std::uint64_t>();
        row.failures = j.at("failures").get<std::vector<std::string>>();
        row.n_dev_total = j.value("n_dev_total", std::size_t{0});
        row.underflow_rows = j.value("underflow_rows", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("results row: ") + e.what());
    }
    return row;
}

inline nlohmann::json to_json(const ResultsTable& table) {
    nlohmann::json j;
    j["meta"] = table.meta;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : table.rows) j["rows"].push_back(to_json(r));
    j["baselines"] = nlohmann::json::array();
    for (const auto& r : table.baselines) j["baselines"].push_back(to_json(r));
    return j;
}

inline ResultsTable load_results_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    ResultsTable table;
    table.meta = j.value("meta", nlohmann::json::object());
    for (const auto& r : j.value("rows", nlohmann::json::array())) table.rows.push_back(row_from_json(r));
    for (const auto& r : j.value("baselines", nlohmann::json::array())) table.baselines.push_back(row_from_json(r));
    return table;
}

inline void write_results_json(const ResultsTable& table, const fs::path& path) {
    detail::write_text(path, to_json(table).dump(2) + "\n");
}

/// One line per row (baselines last), stable column order.
inline std::string results_csv(const ResultsTable& table) {
    std::string out = "task,model,kind,layer,featurizer,mean,ci95,n_folds,n_runs,n_dev_total,seed,underflow_rows,valid,run_means,failures\n";
    auto emit = [&](const ResultRow& r) {
        std::string runs;
        for (std::size_t i = 0; i < r.run_means.size(); ++i) {
            if (i) runs += ';';
            runs += svg::num(r.run_means[i], 6);
        }
        std::string fails;
        for (std::size_t i = 0; i < r.failures.size(); ++i) {
            if (i) fails += " | ";
            fails += r.failures[i];
        }
        out += detail::csv_field(r.task) + "," + detail::csv_field(r.model) + "," + detail::csv_field(r.kind) + "," +
               (r.layer >= 0 ? std::to_string(r.layer) : std::string()) + "," + detail::csv_field(r.featurizer) + "," +
               detail::csv_number(r.mean) + "," + detail::csv_number(r.ci95) + "," + std::to_string(r.n_folds) + "," +
               std::to_string(r.n_runs) + "," + std::to_string(r.n_dev_total) + "," + std::to_string(r.seed) + "," +
               std::to_string(r.underflow_rows) + "," + (r.valid() ? "1" : "0") + "," + runs + "," +
               detail::csv_field(fails) + "\n";
    };
    for (const auto& r : table.rows) emit(r);
    for (const auto& r : table.baselines) emit(r);
    return out;
}

inline void write_results_csv(const ResultsTable& table, const fs::path& path) { detail::write_text(path, results_csv(table)); }

/// Layer-vs-accuracy chart: one line per (model, kind) with a shaded 95% CI
/// band; rows without a layer (pooled, tf-idf, majority) become dashed
/// horizontal references.
inline std::string layer_chart_svg(const ResultsTable& table, const std::string& title = {}) {
    const double width = 720, height = 420, left = 60, right = 200, top = 40, bottom = 50;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    int max_layer = 0;
    for (const auto& r : table.rows) max_layer = std::max(max_layer, r.layer);
    const double span_x = std::max(1, max_layer);
    auto px = [&](double layer) { return left + plot_w * layer / span_x; };
    auto py = [&](double acc) { return top + plot_h * (1.0 - std::clamp(acc, 0.0, 1.0)); };

    svg::Document doc(width, height);
    doc.rect(0, 0, width, height, "#ffffff");
    doc.text(left, 22, title.empty() && !table.rows.empty() ? table.rows.front().task : title, 14);
    for (int t = 0; t <= 10; t += 2) {
        const double acc = t / 10.0;
        doc.line(left, py(acc), left + plot_w, py(acc), "#e0e0e0");
        doc.text(left - 6, py(acc) + 4, svg::num(acc, 1), 10, "end");
    }
    for (int l = 0; l <= max_layer; ++l) {
        doc.text(px(l), top + plot_h + 16, std::to_string(l), 10, "middle");
    }
    doc.text(left + plot_w / 2, height - 12, "layer", 11, "middle");
    doc.text(14, top + plot_h / 2, "dev accuracy", 11, "middle");
    doc.line(left, top + plot_h, left + plot_w, top + plot_h, "#000000");
    doc.line(left, top, left, top + plot_h, "#000000");

    std::vector<std::pair<std::string, std::vector<const ResultRow*>>> series;
    std::vector<const ResultRow*> flat;
    for (const auto& r : table.rows) {
        if (r.layer < 0) {
            flat.push_back(&r);
            continue;
        }
        const std::string key = r.model + " " + r.kind;
        auto it = std::find_if(series.begin(), series.end(), [&](const auto& s) { return s.first == key; });
        if (it == series.end()) {
            series.emplace_back(key, std::vector<const ResultRow*>{});
            it = series.end() - 1;
        }
        it->second.push_back(&r);
    }
    for (const auto& r : table.baselines) flat.push_back(&r);

    std::size_t color = 0;
    double legend_y = top + 10;
    for (auto& [name, rows] : series) {
        std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->layer < b->layer; });
        const auto stroke = svg::kPalette[color++ % std::size(svg::kPalette)];
        std::vector<std::pair<double, double>> line, band_hi, band_lo;
        for (const auto* r : rows) {
            if (!r->valid()) continue;
            line.emplace_back(px(r->layer), py(r->mean));
            band_hi.emplace_back(px(r->layer), py(r->mean + r->ci95));
            band_lo.emplace_back(px(r->layer), py(r->mean - r->ci95));
        }
        if (!line.empty()) {
            std::vector<std::pair<double, double>> band = band_hi;
            band.insert(band.end(), band_lo.rbegin(), band_lo.rend());
            doc.polygon(band, stroke, 0.2);
            doc.polyline(line, stroke);
            for (const auto& [x, y] : line) doc.circle(x, y, 2.5, stroke);
        }
        doc.line(left + plot_w + 15, legend_y - 4, left + plot_w + 35, legend_y - 4, stroke, 2.0);
        doc.text(left + plot_w + 40, legend_y, name, 10);
        legend_y += 16;
    }
    for (const auto* r : flat) {
        const auto stroke = svg::kPalette[color++ % std::size(svg::kPalette)];
        const std::string name = r->model + " " + r->featurizer;
        if (r->valid()) {
            doc.line(left, py(r->mean), left + plot_w, py(r->mean), stroke, 1.2, "5,4");
        }
        doc.line(left + plot_w + 15, legend_y - 4, left + plot_w + 35, legend_y - 4, stroke, 1.2, "5,4");
        doc.text(left + plot_w + 40, legend_y, name, 10);
        legend_y += 16;
    }
    return doc.str();
}

inline void write_layer_svg(const ResultsTable& table, const fs::path& path, const std::string& title = {}) {
    detail::write_text(path, layer_chart_svg(table, title));
}

// ---------------------------------------------------------------------------
// Heatmaps

inline nlohmann::json to_json(const TaskHeatmap& map) {
    nlohmann::json j;
    j["tasks"] = map.tasks;
    j["columns"] = map.columns;
    j["cells"] = nlohmann::json::array();
    for (const auto& row : map.cells) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& c : row) r.push_back(c ? nlohmann::json(*c) : nlohmann::json(nullptr));
        j["cells"].push_back(r);
    }
    return j;
}

inline std::string heatmap_csv(const TaskHeatmap& map) {
    std::string out = "task";
    for (const auto& c : map.columns) out += "," + detail::csv_field(c);
    out += "\n";
    for (std::size_t t = 0; t < map.tasks.size(); ++t) {
        out += detail::csv_field(map.tasks[t]);
        for (const auto& c : map.cells[t]) out += "," + (c ? svg::num(*c, 6) : std::string("missing"));
        out += "\n";
    }
    return out;
}

/// Grid of best accuracies; lighter cells are more accurate.
inline std::string heatmap_svg(const TaskHeatmap& map) {
    const double cell_w = 90, cell_h = 22, left = 260, top = 60;
    const double width = left + cell_w * static_cast<double>(map.columns.size()) + 20;
    const double height = top + cell_h * static_cast<double>(map.tasks.size()) + 20;
    svg::Document doc(width, height);
    doc.rect(0, 0, width, height, "#ffffff");
    for (std::size_t c = 0; c < map.columns.size(); ++c) {
        doc.text(left + cell_w * (static_cast<double>(c) + 0.5), top - 10, map.columns[c], 11, "middle");
    }
    for (std::size_t t = 0; t < map.tasks.size(); ++t) {
        const double y = top + cell_h * static_cast<double>(t);
        doc.text(left - 8, y + cell_h * 0.7, map.tasks[t], 10, "end");
        for (std::size_t c = 0; c < map.columns.size(); ++c) {
            const double x = left + cell_w * static_cast<double>(c);
            const auto& v = map.cells[t][c];
            if (!v) {
                doc.rect(x, y, cell_w, cell_h, "#ffffff", "#999999");
                doc.text(x + cell_w / 2, y + cell_h * 0.7, "missing", 9, "middle", "#999999");
                continue;
            }
            // Accuracy 0.5 maps to black, 1.0 to white.
            const int shade = static_cast<int>(std::lround(255.0 * std::clamp((*v - 0.5) / 0.5, 0.0, 1.0)));
            char fill[8];
            std::snprintf(fill, sizeof(fill), "#%02x%02x%02x", shade, shade, shade);
            doc.rect(x, y, cell_w, cell_h, fill, "#ffffff");
            doc.text(x + cell_w / 2, y + cell_h * 0.7, svg::num(*v, 3), 10, "middle", shade > 128 ? "#000000" : "#ffffff");
        }
    }
    return doc.str();
}

// ---------------------------------------------------------------------------
// Projections

inline std::string embedding_csv(const Matrix& Y, std::span<const Label> labels) {
    std::string out = "x,y,label\n";
    for (std::size_t i = 0; i < Y.rows(); ++i) {
        out += svg::num(Y(i, 0), 6) + "," + svg::num(Y(i, 1), 6) + "," + std::to_string(labels[i]) + "\n";
    }
    return out;
}

/// Scatter plot of a 2-D layout; class 1 in red, class 0 in black.
inline std::string scatter_svg(const Matrix& Y, std::span<const Label> labels, const std::string& title = {}) {
    const double size = 480, margin = 30;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (Y.rows() > 0) {
        xmin = xmax = Y(0, 0);
        ymin = ymax = Y(0, 1);
        for (std::size_t i = 0; i < Y.rows(); ++i) {
            xmin = std::min(xmin, Y(i, 0));
            xmax = std::max(xmax, Y(i, 0));
            ymin = std::min(ymin, Y(i, 1));
            ymax = std::max(ymax, Y(i, 1));
        }
    }
    const double sx = (size - 2 * margin) / std::max(xmax - xmin, 1e-12);
    const double sy = (size - 2 * margin) / std::max(ymax - ymin, 1e-12);
    svg::Document doc(size, size);
    doc.rect(0, 0, size, size, "#ffffff");
    if (!title.empty()) doc.text(margin, 20, title, 12);
    for (std::size_t i = 0; i < Y.rows(); ++i) {
        doc.circle(margin + (Y(i, 0) - xmin) * sx, size - margin - (Y(i, 1) - ymin) * sy, 2.5,
                   labels[i] == 1 ? "#d62728" : "#000000");
    }
    return doc.str();
}

inline nlohmann::json to_json(const ForcedSubset& s) {
    return {{"requested_size", s.requested_size}, {"half_size", s.half_size}, {"seed_a", s.seed_a},
            {"seed_b", s.seed_b},                 {"selected_a", s.selected_a}, {"selected_b", s.selected_b}};
}

inline void write_text_file(const fs::path& path, const std::string& content) { detail::write_text(path, content); }

}  // namespace probekit
