#pragma once

// Field snapshot files: a one-line grid header followed by one value per
// line in row-major cell order.  Doubles are written in shortest
// round-trip form (std::to_chars), so save -> load reproduces every bit.
//
//   # grid dim=2 cells=64,64 extent=1,1
//   <value>
//   ...

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "fetax/grid.hpp"

namespace fetax {

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    std::array<char, 40> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s, const std::string& what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{}) throw error("cannot parse number in " + what + ": '" + std::string(s) + "'");
    return v;
}

inline long long parse_int(std::string_view s, const std::string& what) {
    long long v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{}) throw error("cannot parse integer in " + what + ": '" + std::string(s) + "'");
    return v;
}

inline std::string field_header(const Grid& g) {
    std::string s = "# grid dim=" + std::to_string(g.dim) + " cells=" + std::to_string(g.cells[0]);
    if (g.dim == 2) s += "," + std::to_string(g.cells[1]);
    s += " extent=" + format_double(g.extent[0]);
    if (g.dim == 2) s += "," + format_double(g.extent[1]);
    return s;
}

inline std::string field_to_csv(const Field& f) {
    std::string out = field_header(f.grid);
    out += '\n';
    for (double v : f.values) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

inline void save_field(const Field& f, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    require(bool(os), "cannot open " + path.string() + " for writing");
    os << field_to_csv(f);
    require(bool(os), "write failed for " + path.string());
}

namespace detail {
// Splits "a,b" (or just "a") on commas.
inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return parts;
}

inline std::string_view header_token(std::string_view header, std::string_view key) {
    std::string pat = std::string(key) + "=";
    std::size_t at = header.find(pat);
    require(at != std::string_view::npos, "field header missing '" + std::string(key) + "='");
    std::size_t start = at + pat.size();
    std::size_t end = header.find(' ', start);
    if (end == std::string_view::npos) end = header.size();
    return header.substr(start, end - start);
}
}  // namespace detail

inline Field field_from_csv(const std::string& text, const std::string& what = "field csv") {
    std::istringstream is(text);
    std::string header;
    require(bool(std::getline(is, header)), what + ": empty input");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    require(header.rfind("# grid", 0) == 0, what + ": first line must be a '# grid' header");

    const int dim = static_cast<int>(parse_int(detail::header_token(header, "dim"), what));
    require(dim == 1 || dim == 2, what + ": dim must be 1 or 2");
    auto cell_tok = detail::split(detail::header_token(header, "cells"), ',');
    auto ext_tok = detail::split(detail::header_token(header, "extent"), ',');
    require(static_cast<int>(cell_tok.size()) == dim, what + ": cells= needs one entry per axis");
    require(static_cast<int>(ext_tok.size()) == dim, what + ": extent= needs one entry per axis");

    std::array<int, 2> cells{1, 1};
    std::array<double, 2> extent{1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
        cells[a] = static_cast<int>(parse_int(cell_tok[a], what));
        extent[a] = parse_double(ext_tok[a], what);
    }
    Field f(Grid::make(dim, extent, cells));

    std::string line;
    int i = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        require(i < f.size(), what + ": more values than grid cells");
        f[i++] = parse_double(line, what);
    }
    require(i == f.size(), what + ": expected " + std::to_string(f.size()) + " values, got " +
                               std::to_string(i));
    return f;
}

inline Field load_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    require(bool(is), "cannot open " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return field_from_csv(buf.str(), path.string());
}

}  // namespace fetax
