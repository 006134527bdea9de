#include "coinlab/report.hpp"

#include "coinlab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace coinlab {

namespace {

// Shortest text that reads back as the same double.
std::string num(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string csv_table(const std::string& x_name, const std::vector<Series>& series) {
    std::ostringstream os;
    os << x_name;
    for (const auto& s : series) os << ',' << s.label;
    os << '\n';
    if (series.empty()) return os.str();
    const auto& xs = series.front().x;
    for (const auto& s : series)
        if (s.x.size() != xs.size() || s.y.size() != xs.size()) throw InvalidInput("series lengths differ");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        os << num(xs[i]);
        for (const auto& s : series) os << ',' << num(s.y[i]);
        os << '\n';
    }
    return os.str();
}

std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series) {
    const double w = 640, h = 420, left = 70, right = 20, top = 40, bottom = 55;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
        for (double v : s.y)
            if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
    if (!(x0 < x1)) x0 = 0, x1 = 1;
    if (!(y0 < y1)) y0 = std::min(y0, 0.0), y1 = std::max(y1, y0 + 1);
    auto sx = [&](double v) { return left + (v - x0) / (x1 - x0) * (w - left - right); };
    auto sy = [&](double v) { return h - bottom - (v - y0) / (y1 - y0) * (h - top - bottom); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
        char lx[32], ly[32];
        std::snprintf(lx, sizeof lx, "%.3g", xv);
        std::snprintf(ly, sizeof ly, "%.3g", yv);
        os << "<text x=\"" << px(sx(xv)) << "\" y=\"" << h - bottom + 18 << "\" text-anchor=\"middle\">" << lx << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << px(sy(yv) + 4) << "\" text-anchor=\"end\">" << ly << "</text>\n";
    }
    os << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">" << escape(x_label)
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << (top + h - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (top + h - bottom) / 2 << ")\">" << escape(y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 6];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (std::isfinite(s.y[i])) os << px(sx(s.x[i])) << ',' << px(sy(s.y[i])) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << w - right - 4 << "\" y=\"" << top + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\"" << c
           << "\">" << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw InvalidInput("failed writing '" + path + "'");
}

}  // namespace coinlab
