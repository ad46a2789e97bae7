#pragma once

// Discrete norms and gradient magnitudes.  One convention, used everywhere:
//
//   * Lp norms integrate |f|^p by midpoint quadrature over cells.
//   * A cell's gradient component along an axis is the mean of its adjacent
//     interior face differences.  Boundary cells have only one interior face
//     on that axis and keep it at full weight (no averaging against the
//     mirror wall, which would halve the measured slope of e.g. f = x).
//   * |D2 f| is the Frobenius norm from hessian_frobenius_sq, both
//     off-diagonal entries counted.
//
//   W1_p(f) = (‖f‖_p^p + ‖ |grad f| ‖_p^p)^(1/p)
//   W2_p(f) = (‖f‖_p^p + ‖ |grad f| ‖_p^p + ‖ |D2 f| ‖_p^p)^(1/p)

#include <cmath>

#include "fetax/operators.hpp"

namespace fetax {

inline double discrete_sup_norm(const Field& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

// Pointwise |grad f| with the full-weight boundary convention.
inline Field cell_gradient_magnitude(const Field& f) {
    const Grid& g = f.grid;
    FaceField G = gradient_faces(f);
    Field out(g);
    const int nx = g.cells[0], ny = g.cells[1];
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int i = g.index(ix, iy);
            double sq = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                const int ia = a == 0 ? ix : iy;
                const int na = g.cells[a];
                const int s = g.stride(a);
                const bool has_up = ia + 1 < na;
                const bool has_dn = ia > 0;
                double comp = 0.0;
                if (has_up && has_dn)
                    comp = 0.5 * (G.comp[a][static_cast<std::size_t>(i)] +
                                  G.comp[a][static_cast<std::size_t>(i - s)]);
                else if (has_up)
                    comp = G.comp[a][static_cast<std::size_t>(i)];
                else if (has_dn)
                    comp = G.comp[a][static_cast<std::size_t>(i - s)];
                sq += comp * comp;
            }
            out[i] = std::sqrt(sq);
        }
    return out;
}

// Integral of |f|^q by midpoint quadrature.
inline double integral_abs_pow(const Field& f, double q) {
    double s = 0.0;
    for (double x : f.values) s += std::pow(std::abs(x), q);
    return s * f.grid.cell_volume();
}

inline double discrete_lp_norm(const Field& f, double p) {
    require(p >= 1.0, "lp norm: p must be >= 1, got " + std::to_string(p));
    return std::pow(integral_abs_pow(f, p), 1.0 / p);
}

inline double discrete_w1p_norm(const Field& f, double p) {
    require(p >= 1.0, "w1p norm: p must be >= 1");
    const double fp = integral_abs_pow(f, p);
    const double gp = integral_abs_pow(cell_gradient_magnitude(f), p);
    return std::pow(fp + gp, 1.0 / p);
}

inline double discrete_w2p_norm(const Field& f, double p) {
    require(p >= 1.0, "w2p norm: p must be >= 1");
    const double fp = integral_abs_pow(f, p);
    const double gp = integral_abs_pow(cell_gradient_magnitude(f), p);
    Field h2 = hessian_frobenius_sq(f);
    double hp = 0.0;
    for (double x : h2.values) hp += std::pow(x, p / 2.0);  // (sqrt(x))^p
    hp *= f.grid.cell_volume();
    return std::pow(fp + gp + hp, 1.0 / p);
}

}  // namespace fetax
