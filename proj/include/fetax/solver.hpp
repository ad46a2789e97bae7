#pragma once

// Time integration of the three-species drift-diffusion system
//
//   u_t = lap u - div(u * chi grad w) + eta1 (u - u^m)
//   v_t = lap v - div(v * xi  grad u) + eta2 (v - v^l)
//   w_t = lap w - lambda (u+v) w - mu w + r(x,t)
//
// with zero-flux walls.  Explicit mode is a single unsplit forward-Euler
// update from the old state (Jacobi-style); imex-diffusion mode treats only
// the Laplacians implicitly (one symmetric solve per field) and everything
// else explicitly.  Donor-cell upwinding keeps densities nonnegative within
// the CFL-limited step; conservative fluxes make the zero-reaction mass
// identities exact up to roundoff.

#include <array>
#include <cmath>
#include <limits>

#include "fetax/model.hpp"
#include "fetax/operators.hpp"

namespace fetax {

enum class StepMode { explicit_euler, imex_diffusion };

struct StepControl {
    double dt_max = 0.01;
    double cfl_safety = 0.4;          // in (0,1)
    double positivity_floor = 0.0;    // 0 = no clipping; >0 clamps entries up to it
    StepMode mode = StepMode::explicit_euler;
    double blow_up_threshold = std::numeric_limits<double>::infinity();

    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        if (!(dt_max > 0.0) || !std::isfinite(dt_max)) errs.push_back("step.dt_max must be > 0");
        if (!(cfl_safety > 0.0 && cfl_safety < 1.0))
            errs.push_back("step.cfl_safety must lie in (0,1)");
        if (!(positivity_floor >= 0.0)) errs.push_back("step.positivity_floor must be >= 0");
        if (!(blow_up_threshold > 0.0)) errs.push_back("step.blow_up_threshold must be > 0");
        return errs;
    }
};

struct StepReport {
    double dt_used = 0.0;
    double max_face_speed = 0.0;
    bool any_negative = false;  // some entry fell below -1e-13: scheme failure, not clipped
    bool blow_up = false;       // non-finite entry or |entry| above the threshold
    std::array<double, 3> post_masses{0.0, 0.0, 0.0};  // integrals of u, v, w
};

// Tolerated roundoff undershoot; anything more negative is a scheme failure.
inline constexpr double negative_tolerance = -1e-13;

namespace detail {

// x^q for x >= 0 (negative roundoff treated as 0); fast paths for the small
// integer exponents the logistic terms use.
inline double pow_nonneg(double x, double q) {
    if (x <= 0.0) return 0.0;
    if (q == 1.0) return x;
    if (q == 2.0) return x * x;
    if (q == 3.0) return x * x * x;
    double qi;
    if (q > 0.0 && q < 64.0 && std::modf(q, &qi) == 0.0) {
        long long e = static_cast<long long>(q);
        double acc = 1.0, b = x;
        while (e) {
            if (e & 1) acc *= b;
            b *= b;
            e >>= 1;
        }
        return acc;
    }
    return std::pow(x, q);
}

// Shared CFL formula.  max_speed holds the per-axis maximum taxis face
// velocity over both species.  In imex-diffusion mode the diffusion
// constraint is dropped (diffusion is implicit there); advection, reaction
// and dt_max always apply.
inline double dt_from(const Grid& g, const ModelParams& P, const StepControl& c,
                      const std::array<double, 2>& max_speed, double sup_u, double sup_v) {
    constexpr double tiny = 1e-300;
    double constraint = std::numeric_limits<double>::infinity();
    if (c.mode == StepMode::explicit_euler) {
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a) s += 1.0 / (g.h[a] * g.h[a]);
        constraint = std::min(constraint, 1.0 / (2.0 * s));  // = h^2/(2*dim) on uniform h
    }
    for (int a = 0; a < g.dim; ++a)
        constraint = std::min(constraint, g.h[a] / std::max(max_speed[a], tiny));
    const double rate = P.eta1 * P.m * pow_nonneg(sup_u, P.m - 1.0) +
                        P.eta2 * P.l * pow_nonneg(sup_v, P.l - 1.0) +
                        P.lambda * (sup_u + sup_v) + P.mu + tiny;
    constraint = std::min(constraint, 1.0 / rate);
    return std::min(c.dt_max, c.cfl_safety * constraint);
}

// Scratch buffers reused across steps so the hot loop never allocates.
struct Workspace {
    Grid grid;
    FaceField flux_u, flux_v;
    Field src;
    std::vector<double> cg_r, cg_p, cg_ap, zero_row;

    void bind(const Grid& g) {
        if (grid == g) return;
        grid = g;
        flux_u = FaceField(g);
        flux_v = FaceField(g);
        src = Field(g);
        const auto n = static_cast<std::size_t>(g.cell_count());
        cg_r.assign(n, 0.0);
        cg_p.assign(n, 0.0);
        cg_ap.assign(n, 0.0);
        zero_row.assign(static_cast<std::size_t>(g.cells[0]), 0.0);
    }
};

inline void source_into(const NutrientSource& src, const Grid& g, double t, Field& out) {
    const double amp =
        src.kind == SourceKind::separable_decay ? src.r0 * std::exp(-src.delta * t) : src.r0;
    if (src.g) {
        const Field& prof = *src.g;
        for (int i = 0; i < out.size(); ++i) out[i] = amp * prof[i];
    } else {
        for (double& x : out.values) x = amp;
    }
}

// y = (I - dt lap) x, the implicit-diffusion operator.
inline void helmholtz_apply(const Grid& g, double dt, const std::vector<double>& x,
                            std::vector<double>& y) {
    const int nx = g.cells[0], ny = g.cells[1];
    const bool two_d = g.dim == 2;
    const double ihx2 = 1.0 / (g.h[0] * g.h[0]);
    const double ihy2 = two_d ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int i = ix + nx * iy;
            const double xc = x[static_cast<std::size_t>(i)];
            const double xl = ix > 0 ? x[static_cast<std::size_t>(i - 1)] : xc;
            const double xr = ix + 1 < nx ? x[static_cast<std::size_t>(i + 1)] : xc;
            double lap = ((xr - xc) - (xc - xl)) * ihx2;
            if (two_d) {
                const double xd = iy > 0 ? x[static_cast<std::size_t>(i - nx)] : xc;
                const double xu = iy + 1 < ny ? x[static_cast<std::size_t>(i + nx)] : xc;
                lap += ((xu - xc) - (xc - xd)) * ihy2;
            }
            y[static_cast<std::size_t>(i)] = xc - dt * lap;
        }
}

// Conjugate gradients on (I - dt lap) x = b; the operator is symmetric
// positive definite for dt > 0 under the mirror walls.  x holds b on entry
// (the initial guess) and the solution on exit.
inline void solve_helmholtz(const Grid& g, double dt, std::vector<double>& x, Workspace& ws) {
    const std::size_t n = x.size();
    std::vector<double>& r = ws.cg_r;
    std::vector<double>& p = ws.cg_p;
    std::vector<double>& ap = ws.cg_ap;

    double b_norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) b_norm2 += x[i] * x[i];

    helmholtz_apply(g, dt, x, ap);  // A x0
    double r_norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = x[i] - ap[i];  // b - A x0 with x0 = b
        p[i] = r[i];
        r_norm2 += r[i] * r[i];
    }
    const double tol2 = 1e-24 * b_norm2 + 1e-280;
    const long long max_iter = 5 * static_cast<long long>(n) + 50;
    for (long long it = 0; it < max_iter && r_norm2 > tol2; ++it) {
        helmholtz_apply(g, dt, p, ap);
        double p_ap = 0.0;
        for (std::size_t i = 0; i < n; ++i) p_ap += p[i] * ap[i];
        if (p_ap <= 0.0) break;  // numerically singular direction; accept current x
        const double alpha = r_norm2 / p_ap;
        double r_next2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            r_next2 += r[i] * r[i];
        }
        const double beta = r_next2 / r_norm2;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        r_norm2 = r_next2;
    }
    require(r_norm2 <= tol2 * 1e6 || r_norm2 <= 1e-200,
            "imex diffusion solve failed to converge");
}

struct StepStats {
    double mass_u = 0.0, mass_v = 0.0, mass_w = 0.0;
    double min_entry = 0.0;
    double max_abs = 0.0;
};

inline void scan_field(const Field& f, double& mass, double& mn, double& mx_abs) {
    double s = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double x : f.values) {
        s += x;
        lo = std::min(lo, x);
        hi = std::max(hi, std::abs(x));
    }
    mass = s * f.grid.cell_volume();
    mn = lo;
    mx_abs = hi;
}

inline double sup_abs(const std::vector<double>& v) {
    double hi[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= v.size(); i += 4)
        for (int k = 0; k < 4; ++k) hi[k] = std::max(hi[k], std::abs(v[i + k]));
    for (; i < v.size(); ++i) hi[0] = std::max(hi[0], std::abs(v[i]));
    return std::max(std::max(hi[0], hi[1]), std::max(hi[2], hi[3]));
}

// Masses, global min and global max-abs over the three updated fields in one
// pass, four lanes per accumulator to break the reduction latency chains.
inline void stats_triple(const State& out, const StepControl& c, StepReport& rep) {
    const std::vector<double>& U = out.u.values;
    const std::vector<double>& V = out.v.values;
    const std::vector<double>& W = out.w.values;
    const std::size_t n = U.size();
    double su[4] = {0, 0, 0, 0}, sv[4] = {0, 0, 0, 0}, sw[4] = {0, 0, 0, 0};
    double lo[4], hi[4] = {0, 0, 0, 0};
    for (double& x : lo) x = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (int k = 0; k < 4; ++k) {
            const double a = U[i + k], b = V[i + k], w = W[i + k];
            su[k] += a;
            sv[k] += b;
            sw[k] += w;
            lo[k] = std::min(lo[k], std::min(std::min(a, b), w));
            hi[k] = std::max(hi[k], std::max(std::max(std::abs(a), std::abs(b)), std::abs(w)));
        }
    for (; i < n; ++i) {
        const double a = U[i], b = V[i], w = W[i];
        su[0] += a;
        sv[0] += b;
        sw[0] += w;
        lo[0] = std::min(lo[0], std::min(std::min(a, b), w));
        hi[0] = std::max(hi[0], std::max(std::max(std::abs(a), std::abs(b)), std::abs(w)));
    }
    const double vol = out.u.grid.cell_volume();
    rep.post_masses = {((su[0] + su[1]) + (su[2] + su[3])) * vol,
                       ((sv[0] + sv[1]) + (sv[2] + sv[3])) * vol,
                       ((sw[0] + sw[1]) + (sw[2] + sw[3])) * vol};
    const double mn = std::min(std::min(lo[0], lo[1]), std::min(lo[2], lo[3]));
    const double mx = std::max(std::max(hi[0], hi[1]), std::max(hi[2], hi[3]));
    rep.any_negative = mn < negative_tolerance;
    const double mass_sum = rep.post_masses[0] + rep.post_masses[1] + rep.post_masses[2];
    rep.blow_up = !std::isfinite(mass_sum) || mx > c.blow_up_threshold;
}

// The 2D explicit update, row-swept so the inner loop carries no index
// clamping: wall rows reuse the current row pointer (mirror ghosts) and wall
// columns are peeled.  Field statistics accumulate inside the write loop in
// linear index order, matching scan_field bit for bit.
inline void explicit_step_2d(const State& s, const ModelParams& P, const StepControl& c,
                             double dt, Workspace& ws, State& out, StepReport& rep) {
    const Grid& g = s.u.grid;
    const int nx = g.cells[0], ny = g.cells[1];
    const double ihx = 1.0 / g.h[0], ihy = 1.0 / g.h[1];
    const double ihx2 = ihx * ihx, ihy2 = ihy * ihy;
    const double floor_at = c.positivity_floor;
    const bool has_floor = floor_at > 0.0;
    const bool has_ru = P.eta1 != 0.0;
    const bool has_rv = P.eta2 != 0.0;

    const double* U = s.u.values.data();
    const double* V = s.v.values.data();
    const double* W = s.w.values.data();
    const double* SRC = ws.src.values.data();
    const double* FUX = ws.flux_u.comp[0].data();
    const double* FVX = ws.flux_v.comp[0].data();
    const double* FUY = ws.flux_u.comp[1].data();
    const double* FVY = ws.flux_v.comp[1].data();
    double* OU = out.u.values.data();
    double* OV = out.v.values.data();
    double* OW = out.w.values.data();

    for (int iy = 0; iy < ny; ++iy) {
        const int base = iy * nx;
        const int dn = iy > 0 ? base - nx : base;
        const int up = iy + 1 < ny ? base + nx : base;
        const double* ur = U + base;
        const double* ud = U + dn;
        const double* uu = U + up;
        const double* vr = V + base;
        const double* vd = V + dn;
        const double* vu = V + up;
        const double* wr = W + base;
        const double* wd = W + dn;
        const double* wu = W + up;
        const double* fux = FUX + base;
        const double* fvx = FVX + base;
        const double* fuy = FUY + base;
        const double* fvy = FVY + base;
        const double* fuyd = iy > 0 ? FUY + base - nx : ws.zero_row.data();
        const double* fvyd = iy > 0 ? FVY + base - nx : ws.zero_row.data();
        const double* src_row = SRC + base;
        double* ou = OU + base;
        double* ov = OV + base;
        double* ow = OW + base;

        auto cell = [&](int ix, int il, int ir, double flux_left_u, double flux_left_v) {
            const double ui = ur[ix], vi = vr[ix], wi = wr[ix];
            double lap_u = ((ur[ir] - ui) - (ui - ur[il])) * ihx2;
            double lap_v = ((vr[ir] - vi) - (vi - vr[il])) * ihx2;
            double lap_w = ((wr[ir] - wi) - (wi - wr[il])) * ihx2;
            lap_u += ((uu[ix] - ui) - (ui - ud[ix])) * ihy2;
            lap_v += ((vu[ix] - vi) - (vi - vd[ix])) * ihy2;
            lap_w += ((wu[ix] - wi) - (wi - wd[ix])) * ihy2;
            double div_u = (fux[ix] - flux_left_u) * ihx;
            double div_v = (fvx[ix] - flux_left_v) * ihx;
            div_u += (fuy[ix] - fuyd[ix]) * ihy;
            div_v += (fvy[ix] - fvyd[ix]) * ihy;
            const double ru = has_ru ? P.eta1 * (ui - pow_nonneg(ui, P.m)) : 0.0;
            const double rv = has_rv ? P.eta2 * (vi - pow_nonneg(vi, P.l)) : 0.0;
            const double rw = src_row[ix] - P.lambda * (ui + vi) * wi - P.mu * wi;
            double nu = ui + dt * (lap_u - div_u + ru);
            double nv = vi + dt * (lap_v - div_v + rv);
            double nw = wi + dt * (lap_w + rw);
            if (has_floor) {
                nu = std::max(nu, floor_at);
                nv = std::max(nv, floor_at);
                nw = std::max(nw, floor_at);
            }
            ou[ix] = nu;
            ov[ix] = nv;
            ow[ix] = nw;
        };

        cell(0, 0, 1, 0.0, 0.0);
        for (int ix = 1; ix + 1 < nx; ++ix) cell(ix, ix - 1, ix + 1, fux[ix - 1], fvx[ix - 1]);
        cell(nx - 1, nx - 2, nx - 1, fux[nx - 2], fvx[nx - 2]);
    }

    stats_triple(out, c, rep);
}

inline void step_into(const State& s, const ModelParams& P, const NutrientSource& source,
                      const StepControl& c, double dt_cap, Workspace& ws, State& out,
                      StepReport& rep) {
    s.require_consistent();
    const Grid& g = s.u.grid;
    ws.bind(g);

    std::array<double, 2> speed_u{0.0, 0.0}, speed_v{0.0, 0.0}, speed{0.0, 0.0};
    upwind_fluxes_into(s.u, s.w, P.chi, ws.flux_u, speed_u);
    upwind_fluxes_into(s.v, s.u, P.xi, ws.flux_v, speed_v);
    const double sup_u = sup_abs(s.u.values);
    const double sup_v = sup_abs(s.v.values);
    for (int a = 0; a < g.dim; ++a) speed[a] = std::max(speed_u[a], speed_v[a]);

    double dt = dt_from(g, P, c, speed, sup_u, sup_v);
    require(dt_cap > 0.0, "step: dt cap must be > 0");
    dt = std::min(dt, dt_cap);

    source_into(source, g, s.t, ws.src);

    if (!(out.u.grid == g)) {
        out.u = Field(g);
        out.v = Field(g);
        out.w = Field(g);
    }
    out.t = s.t + dt;  // advance_to snaps this to an exact target when dt was capped

    const int nx = g.cells[0], ny = g.cells[1];
    const bool two_d = g.dim == 2;
    const double ihx = 1.0 / g.h[0];
    const double ihy = two_d ? 1.0 / g.h[1] : 0.0;
    const double ihx2 = ihx * ihx;
    const double ihy2 = ihy * ihy;
    const bool implicit_diffusion = c.mode == StepMode::imex_diffusion;

    rep.dt_used = dt;
    rep.max_face_speed = std::max(speed[0], speed[1]);
    if (two_d && !implicit_diffusion) {
        explicit_step_2d(s, P, c, dt, ws, out, rep);
        return;
    }

    const std::vector<double>& Fu0 = ws.flux_u.comp[0];
    const std::vector<double>& Fv0 = ws.flux_v.comp[0];
    const std::vector<double>* Fu1 = two_d ? &ws.flux_u.comp[1] : nullptr;
    const std::vector<double>* Fv1 = two_d ? &ws.flux_v.comp[1] : nullptr;

    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int i = ix + nx * iy;
            const std::size_t zi = static_cast<std::size_t>(i);
            const double ui = s.u[i], vi = s.v[i], wi = s.w[i];

            double lap_u = 0.0, lap_v = 0.0, lap_w = 0.0;
            if (!implicit_diffusion) {
                const int il = ix > 0 ? i - 1 : i;
                const int ir = ix + 1 < nx ? i + 1 : i;
                lap_u = ((s.u[ir] - ui) - (ui - s.u[il])) * ihx2;
                lap_v = ((s.v[ir] - vi) - (vi - s.v[il])) * ihx2;
                lap_w = ((s.w[ir] - wi) - (wi - s.w[il])) * ihx2;
                if (two_d) {
                    const int id = iy > 0 ? i - nx : i;
                    const int iu = iy + 1 < ny ? i + nx : i;
                    lap_u += ((s.u[iu] - ui) - (ui - s.u[id])) * ihy2;
                    lap_v += ((s.v[iu] - vi) - (vi - s.v[id])) * ihy2;
                    lap_w += ((s.w[iu] - wi) - (wi - s.w[id])) * ihy2;
                }
            }

            double div_u = (Fu0[zi] - (ix > 0 ? Fu0[zi - 1] : 0.0)) * ihx;
            double div_v = (Fv0[zi] - (ix > 0 ? Fv0[zi - 1] : 0.0)) * ihx;
            if (two_d) {
                div_u += ((*Fu1)[zi] - (iy > 0 ? (*Fu1)[zi - static_cast<std::size_t>(nx)] : 0.0)) * ihy;
                div_v += ((*Fv1)[zi] - (iy > 0 ? (*Fv1)[zi - static_cast<std::size_t>(nx)] : 0.0)) * ihy;
            }

            const double ru = P.eta1 == 0.0 ? 0.0 : P.eta1 * (ui - pow_nonneg(ui, P.m));
            const double rv = P.eta2 == 0.0 ? 0.0 : P.eta2 * (vi - pow_nonneg(vi, P.l));
            const double rw = ws.src[i] - P.lambda * (ui + vi) * wi - P.mu * wi;

            out.u[i] = ui + dt * (lap_u - div_u + ru);
            out.v[i] = vi + dt * (lap_v - div_v + rv);
            out.w[i] = wi + dt * (lap_w + rw);
        }

    if (implicit_diffusion) {
        solve_helmholtz(g, dt, out.u.values, ws);
        solve_helmholtz(g, dt, out.v.values, ws);
        solve_helmholtz(g, dt, out.w.values, ws);
    }

    if (c.positivity_floor > 0.0) {
        for (double& x : out.u.values) x = std::max(x, c.positivity_floor);
        for (double& x : out.v.values) x = std::max(x, c.positivity_floor);
        for (double& x : out.w.values) x = std::max(x, c.positivity_floor);
    }

    double mn_u, mn_v, mn_w, mx_u, mx_v, mx_w;
    scan_field(out.u, rep.post_masses[0], mn_u, mx_u);
    scan_field(out.v, rep.post_masses[1], mn_v, mx_v);
    scan_field(out.w, rep.post_masses[2], mn_w, mx_w);
    const double mn = std::min({mn_u, mn_v, mn_w});
    const double mx = std::max({mx_u, mx_v, mx_w});
    rep.any_negative = mn < negative_tolerance;
    const double mass_sum = rep.post_masses[0] + rep.post_masses[1] + rep.post_masses[2];
    rep.blow_up = !std::isfinite(mass_sum) || mx > c.blow_up_threshold;
}

}  // namespace detail

// Discrete -coeff * div(carrier grad potential) building block, in the exact
// conservative flux form the stepper uses (donor-cell upwind faces).
inline Field taxis_divergence(const Field& carrier, const Field& potential, double coeff) {
    require(coeff >= 0.0, "taxis_divergence: coeff must be >= 0");
    return divergence_faces(upwind_fluxes(carrier, potential, coeff));
}

// Zero-order terms: R_u = eta1 (u - u^m), R_v = eta2 (v - v^l),
// R_w = -lambda (u+v) w - mu w + r.  Entries of u, v below the roundoff
// tolerance signal a precondition breach; entries in [-1e-13, 0) act as 0
// inside the fractional powers.
inline std::array<Field, 3> reaction_terms(const State& s, const ModelParams& P,
                                           const Field& source_now) {
    s.require_consistent();
    require(source_now.grid == s.u.grid, "reaction_terms: source grid mismatch");
    require(min_entry(s.u) >= negative_tolerance && min_entry(s.v) >= negative_tolerance,
            "reaction_terms: negative density entry beyond roundoff tolerance");
    Field ru(s.u.grid), rv(s.u.grid), rw(s.u.grid);
    for (int i = 0; i < ru.size(); ++i) {
        const double ui = s.u[i], vi = s.v[i], wi = s.w[i];
        ru[i] = P.eta1 * (ui - detail::pow_nonneg(ui, P.m));
        rv[i] = P.eta2 * (vi - detail::pow_nonneg(vi, P.l));
        rw[i] = source_now[i] - P.lambda * (ui + vi) * wi - P.mu * wi;
    }
    return {std::move(ru), std::move(rv), std::move(rw)};
}

// CFL-limited adaptive step size; see detail::dt_from for the formula.
inline double stable_dt(const State& s, const ModelParams& P, const StepControl& c) {
    s.require_consistent();
    std::array<double, 2> speed{0.0, 0.0};
    FaceField gw = gradient_faces(s.w);
    FaceField gu = gradient_faces(s.u);
    for (int a = 0; a < s.u.grid.dim; ++a) {
        double top = 0.0;
        for (double x : gw.comp[a]) top = std::fmax(top, P.chi * std::abs(x));
        for (double x : gu.comp[a]) top = std::fmax(top, P.xi * std::abs(x));
        speed[a] = top;
    }
    return detail::dt_from(s.u.grid, P, c, speed, discrete_sup_norm(s.u),
                           discrete_sup_norm(s.v));
}

// One time step.  dt_cap (default: none) truncates the CFL step, which
// advance_to uses to land on its target time exactly.
inline std::pair<State, StepReport> step(const State& s, const ModelParams& P,
                                         const NutrientSource& source, const StepControl& c,
                                         double dt_cap = std::numeric_limits<double>::infinity()) {
    detail::Workspace ws;
    State out;
    StepReport rep;
    detail::step_into(s, P, source, c, dt_cap, ws, out, rep);
    return {std::move(out), rep};
}

enum class Termination { reached_t_end, blow_up };

struct AdvanceResult {
    State state;
    Termination reason = Termination::reached_t_end;
    long long steps = 0;
    double min_dt = std::numeric_limits<double>::infinity();
};

// March to t_end exactly (last step truncated), calling
// observer(state, report) after every accepted step.  Stops early when a
// step reports blow-up; the offending state is returned.
template <class Observer>
AdvanceResult advance_to(State s, double t_end, const ModelParams& P,
                         const NutrientSource& source, const StepControl& c, Observer&& observer) {
    s.require_consistent();
    require(t_end >= s.t, "advance_to: t_end must be >= current time");
    AdvanceResult res;
    detail::Workspace ws;
    State next;
    StepReport rep;
    while (s.t < t_end) {
        const double remaining = t_end - s.t;
        detail::step_into(s, P, source, c, remaining, ws, next, rep);
        if (rep.dt_used >= remaining) next.t = t_end;  // exact landing
        std::swap(s, next);
        ++res.steps;
        res.min_dt = std::min(res.min_dt, rep.dt_used);
        observer(std::as_const(s), std::as_const(rep));
        if (rep.blow_up) {
            res.state = std::move(s);
            res.reason = Termination::blow_up;
            return res;
        }
    }
    res.state = std::move(s);
    res.reason = Termination::reached_t_end;
    if (res.steps == 0) res.min_dt = 0.0;
    return res;
}

inline AdvanceResult advance_to(State s, double t_end, const ModelParams& P,
                                const NutrientSource& source, const StepControl& c) {
    return advance_to(std::move(s), t_end, P, source, c,
                      [](const State&, const StepReport&) {});
}

}  // namespace fetax
