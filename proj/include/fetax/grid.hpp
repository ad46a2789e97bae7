#pragma once

// Uniform cell-centered grids on axis-aligned boxes (1D intervals, 2D
// rectangles) and the scalar fields living on them.  Cell (ix, iy) owns the
// center ((ix+0.5)*hx, (iy+0.5)*hy); boundaries are handled everywhere else
// in this library by mirror reflection across the wall, so no ghost storage
// exists -- a clamped neighbor index IS the reflected cell.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fetax {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw error(msg);
}

struct Grid {
    int dim = 0;                             // 1 or 2
    std::array<int, 2> cells{0, 1};          // cells per axis; inactive axis = 1
    std::array<double, 2> extent{0.0, 1.0};  // side lengths; inactive axis = 1
    std::array<double, 2> h{0.0, 1.0};       // cell width per axis

    static Grid make(int dim, std::array<double, 2> extent, std::array<int, 2> cells) {
        require(dim == 1 || dim == 2, "grid: dim must be 1 or 2, got " + std::to_string(dim));
        Grid g;
        g.dim = dim;
        for (int a = 0; a < dim; ++a) {
            require(cells[a] >= 4, "grid: need at least 4 cells per axis, axis " +
                                       std::to_string(a) + " has " + std::to_string(cells[a]));
            require(extent[a] > 0.0 && std::isfinite(extent[a]),
                    "grid: extent must be positive and finite on axis " + std::to_string(a));
            g.cells[a] = cells[a];
            g.extent[a] = extent[a];
            g.h[a] = extent[a] / cells[a];
        }
        return g;
    }

    static Grid interval(double length, int n) { return make(1, {length, 1.0}, {n, 1}); }
    static Grid square(double side, int n) { return make(2, {side, side}, {n, n}); }
    static Grid rectangle(double lx, double ly, int nx, int ny) {
        return make(2, {lx, ly}, {nx, ny});
    }

    int cell_count() const { return cells[0] * cells[1]; }
    double cell_volume() const { return dim == 2 ? h[0] * h[1] : h[0]; }
    double measure() const { return dim == 2 ? extent[0] * extent[1] : extent[0]; }
    int stride(int axis) const { return axis == 0 ? 1 : cells[0]; }

    // Center coordinate of cell index `i` along `axis`.
    double center(int axis, int i) const { return (i + 0.5) * h[axis]; }

    int index(int ix, int iy = 0) const { return ix + cells[0] * iy; }

    bool operator==(const Grid&) const = default;
};

struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.cell_count()), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    const double& operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

    // f receives the cell-center coordinates (x, y); y is 0 on 1D grids.
    template <class F>
    static Field from_function(const Grid& g, F&& f) {
        Field out(g);
        const int nx = g.cells[0], ny = g.cells[1];
        for (int iy = 0; iy < ny; ++iy) {
            const double y = g.dim == 2 ? g.center(1, iy) : 0.0;
            for (int ix = 0; ix < nx; ++ix)
                out.values[static_cast<std::size_t>(g.index(ix, iy))] = f(g.center(0, ix), y);
        }
        return out;
    }
};

inline bool all_finite(const Field& f) {
    for (double x : f.values)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double min_entry(const Field& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double x : f.values) m = std::min(m, x);
    return m;
}

inline double max_entry(const Field& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double x : f.values) m = std::max(m, x);
    return m;
}

}  // namespace fetax
