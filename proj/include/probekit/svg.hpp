#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace probekit::svg {

/// Fixed-precision number formatting, locale independent.
inline std::string num(double v, int precision = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Minimal self-contained SVG builder; output has no external references.
class Document {
public:
    Document(double width, double height) : width_(width), height_(height) {}

    void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none") {
        body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
                 "\" fill=\"" + std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
              std::string_view dash = {}) {
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                 "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"";
        if (!dash.empty()) body_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
        body_ += "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke, double width = 1.5) {
        body_ += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) +
                 "\" points=\"" + points(pts) + "\"/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& pts, std::string_view fill, double opacity) {
        body_ += "<polygon fill=\"" + std::string(fill) + "\" fill-opacity=\"" + num(opacity) + "\" stroke=\"none\" points=\"" +
                 points(pts) + "\"/>\n";
    }

    void circle(double cx, double cy, double r, std::string_view fill) {
        body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + std::string(fill) + "\"/>\n";
    }

    void text(double x, double y, std::string_view content, double size = 11.0, std::string_view anchor = "start",
              std::string_view fill = "#000000") {
        body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" + num(size, 1) +
                 "\" text-anchor=\"" + std::string(anchor) + "\" fill=\"" + std::string(fill) + "\">" + escape(content) +
                 "</text>\n";
    }

    std::string str() const {
        return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_, 0) + "\" height=\"" + num(height_, 0) +
               "\" viewBox=\"0 0 " + num(width_, 0) + " " + num(height_, 0) + "\">\n" + body_ + "</svg>\n";
    }

private:
    static std::string points(const std::vector<std::pair<double, double>>& pts) {
        std::string out;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) out += ' ';
            out += num(pts[i].first) + "," + num(pts[i].second);
        }
        return out;
    }

    double width_;
    double height_;
    std::string body_;
};

inline constexpr std::string_view kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

}  // namespace probekit::svg
