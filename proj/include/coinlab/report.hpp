#pragma once

// CSV tables and static SVG line plots.

#include <string>
#include <vector>

namespace coinlab {

inline constexpr const char* kVersion = "0.1.0";

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Header row then one row per point; all series must share x.
std::string csv_table(const std::string& x_name, const std::vector<Series>& series);

std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Writes `text` to `path`; throws InvalidInput when the file cannot be opened.
void write_file(const std::string& path, const std::string& text);

}  // namespace coinlab
