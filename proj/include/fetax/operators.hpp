#pragma once

// Second-order finite-volume stencils with mirror (even-reflection) walls:
// the normal derivative vanishes because the reflected neighbor equals the
// boundary cell, so every wall face carries zero flux.  All operators run on
// cell data; face quantities live in FaceField.

#include <algorithm>
#include <cmath>

#include "fetax/grid.hpp"

namespace fetax {

// comp[a][i] = value on the face between cell i and its +e_a neighbor.
// Entries on the last slice of axis a (no such neighbor) stay 0, matching the
// zero-flux wall; the face before the first slice is implicitly 0 as well.
struct FaceField {
    Grid grid;
    std::array<std::vector<double>, 2> comp;

    FaceField() = default;
    explicit FaceField(const Grid& g) : grid(g) {
        for (int a = 0; a < g.dim; ++a)
            comp[a].assign(static_cast<std::size_t>(g.cell_count()), 0.0);
    }
};

// One-sided difference (f[i+e_a] - f[i]) / h_a on interior faces, 0 on walls.
inline FaceField gradient_faces(const Field& f) {
    const Grid& g = f.grid;
    FaceField out(g);
    const int nx = g.cells[0], ny = g.cells[1];
    for (int a = 0; a < g.dim; ++a) {
        const int s = g.stride(a);
        const int na = g.cells[a];
        const double inv_h = 1.0 / g.h[a];
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const int ia = a == 0 ? ix : iy;
                if (ia + 1 >= na) continue;  // wall face stays 0
                const int i = g.index(ix, iy);
                out.comp[a][static_cast<std::size_t>(i)] = (f[i + s] - f[i]) * inv_h;
            }
    }
    return out;
}

// Conservative divergence: (F_a(i) - F_a(i - e_a)) / h_a summed over axes,
// with wall faces contributing 0.  Summing cell*volume over the grid
// telescopes to exactly zero in exact arithmetic.
inline Field divergence_faces(const FaceField& F) {
    const Grid& g = F.grid;
    Field out(g);
    const int nx = g.cells[0], ny = g.cells[1];
    for (int a = 0; a < g.dim; ++a) {
        const int s = g.stride(a);
        const double inv_h = 1.0 / g.h[a];
        const std::vector<double>& Fa = F.comp[a];
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const int ia = a == 0 ? ix : iy;
                const int i = g.index(ix, iy);
                const double up = Fa[static_cast<std::size_t>(i)];
                const double dn = ia > 0 ? Fa[static_cast<std::size_t>(i - s)] : 0.0;
                out[i] += (up - dn) * inv_h;
            }
    }
    return out;
}

// Five-point (three-point in 1D) Laplacian.  Defined as the composition so
// that laplacian(f) == divergence_faces(gradient_faces(f)) holds bitwise.
inline Field laplacian(const Field& f) { return divergence_faces(gradient_faces(f)); }

// Squared Frobenius norm of the discrete Hessian, |D2 f|^2 per cell.  Both
// off-diagonal entries count (f = x*y gives 2, not 1).  Neighbors reflect at
// walls; corner cells reflect across both walls.
inline Field hessian_frobenius_sq(const Field& f) {
    const Grid& g = f.grid;
    Field out(g);
    const int nx = g.cells[0], ny = g.cells[1];
    auto cl = [](int i, int n) { return std::clamp(i, 0, n - 1); };
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int i = g.index(ix, iy);
            double acc = 0.0;
            {
                const double fm = f[g.index(cl(ix - 1, nx), iy)];
                const double fp = f[g.index(cl(ix + 1, nx), iy)];
                const double d2 = (fp - 2.0 * f[i] + fm) / (g.h[0] * g.h[0]);
                acc += d2 * d2;
            }
            if (g.dim == 2) {
                const double fm = f[g.index(ix, cl(iy - 1, ny))];
                const double fp = f[g.index(ix, cl(iy + 1, ny))];
                const double d2 = (fp - 2.0 * f[i] + fm) / (g.h[1] * g.h[1]);
                acc += d2 * d2;

                const double fpp = f[g.index(cl(ix + 1, nx), cl(iy + 1, ny))];
                const double fpm = f[g.index(cl(ix + 1, nx), cl(iy - 1, ny))];
                const double fmp = f[g.index(cl(ix - 1, nx), cl(iy + 1, ny))];
                const double fmm = f[g.index(cl(ix - 1, nx), cl(iy - 1, ny))];
                const double mixed = (fpp - fpm - fmp + fmm) / (4.0 * g.h[0] * g.h[1]);
                acc += 2.0 * mixed * mixed;
            }
            out[i] = acc;
        }
    return out;
}

// Midpoint quadrature: sum of cell values times cell volume.
inline double cell_integral(const Field& f) {
    double s = 0.0;
    for (double x : f.values) s += x;
    return s * f.grid.cell_volume();
}

// Upwind (donor-cell) face fluxes for a drift coeff * grad(potential): the
// face velocity decides which adjacent cell donates the carrier value.
// Writes into `out` (reusable across calls) and reports the largest
// |velocity| per axis.
inline void upwind_fluxes_into(const Field& carrier, const Field& potential, double coeff,
                               FaceField& out, std::array<double, 2>& max_speed) {
    const Grid& g = carrier.grid;
    require(potential.grid == g, "upwind_fluxes: carrier and potential grids differ");
    if (!(out.grid == g)) out = FaceField(g);
    max_speed = {0.0, 0.0};
    const int nx = g.cells[0], ny = g.cells[1];
    const double* car = carrier.values.data();
    const double* pot = potential.values.data();
    // Four max accumulators per axis break the reduction's latency chain
    // (max is exact under reassociation, so the result is order-independent).
    {
        const double inv_h = 1.0 / g.h[0];
        double top[4] = {0.0, 0.0, 0.0, 0.0};
        double* Fa = out.comp[0].data();
        for (int iy = 0; iy < ny; ++iy) {
            const int base = iy * nx;
            int ix = 0;
            for (; ix + 4 < nx; ix += 4)
                for (int k = 0; k < 4; ++k) {
                    const int i = base + ix + k;
                    const double vel = coeff * (pot[i + 1] - pot[i]) * inv_h;
                    top[k] = std::max(top[k], std::abs(vel));
                    Fa[i] = vel * (vel > 0.0 ? car[i] : car[i + 1]);
                }
            for (; ix + 1 < nx; ++ix) {
                const int i = base + ix;
                const double vel = coeff * (pot[i + 1] - pot[i]) * inv_h;
                top[0] = std::max(top[0], std::abs(vel));
                Fa[i] = vel * (vel > 0.0 ? car[i] : car[i + 1]);
            }
            Fa[base + nx - 1] = 0.0;
        }
        max_speed[0] = std::max(std::max(top[0], top[1]), std::max(top[2], top[3]));
    }
    if (g.dim == 2) {
        const double inv_h = 1.0 / g.h[1];
        double top[4] = {0.0, 0.0, 0.0, 0.0};
        double* Fa = out.comp[1].data();
        for (int iy = 0; iy + 1 < ny; ++iy) {
            const int base = iy * nx;
            int ix = 0;
            for (; ix + 4 <= nx; ix += 4)
                for (int k = 0; k < 4; ++k) {
                    const int i = base + ix + k;
                    const double vel = coeff * (pot[i + nx] - pot[i]) * inv_h;
                    top[k] = std::max(top[k], std::abs(vel));
                    Fa[i] = vel * (vel > 0.0 ? car[i] : car[i + nx]);
                }
            for (; ix < nx; ++ix) {
                const int i = base + ix;
                const double vel = coeff * (pot[i + nx] - pot[i]) * inv_h;
                top[0] = std::max(top[0], std::abs(vel));
                Fa[i] = vel * (vel > 0.0 ? car[i] : car[i + nx]);
            }
        }
        for (int ix = 0; ix < nx; ++ix) Fa[(ny - 1) * nx + ix] = 0.0;
        max_speed[1] = std::max(std::max(top[0], top[1]), std::max(top[2], top[3]));
    }
}

inline FaceField upwind_fluxes(const Field& carrier, const Field& potential, double coeff,
                               std::array<double, 2>* max_speed = nullptr) {
    FaceField out(carrier.grid);
    std::array<double, 2> speed{0.0, 0.0};
    upwind_fluxes_into(carrier, potential, coeff, out, speed);
    if (max_speed) *max_speed = speed;
    return out;
}

}  // namespace fetax
