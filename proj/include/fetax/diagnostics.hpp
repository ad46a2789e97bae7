#pragma once

// Everything measured about a run: instantaneous norms and integrals,
// sliding-window space-time integrals, the closed-form comparison-ODE
// ceiling, the gradient-interpolation inequality check, and the
// bounded/growing/blow-up classifier.

#include <string>
#include <vector>

#include "fetax/field_io.hpp"
#include "fetax/model.hpp"
#include "fetax/norms.hpp"
#include "fetax/solver.hpp"

namespace fetax {

// What to record each sample: plain Lq norms for every q in lp_list, plus
// the regime-specific functionals derived from integer p.
struct NormSeriesSpec {
    std::vector<double> lp_list{1.0, 2.0};
    int p = 2;

    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        for (double q : lp_list)
            if (!(q >= 1.0)) errs.push_back("lp list entries must be >= 1");
        if (p < 1) errs.push_back("regime exponent p must be >= 1");
        return errs;
    }
};

struct NormSample {
    double t = 0.0;
    double sup_u = 0.0, sup_v = 0.0, sup_w = 0.0;
    double mass_u = 0.0, mass_v = 0.0;
    std::vector<double> lp_u, lp_v, lp_w;         // aligned with spec.lp_list
    double w1_2p_u = 0.0, w1_2p_v = 0.0, w1_2p_w = 0.0;
    double int_grad_w_2p2 = 0.0;  // integral of |grad w|^{2(p+1)}
    double int_grad_u_2p = 0.0;   // integral of |grad u|^{2p}
    double int_lap_w_p1 = 0.0;    // integral of |lap w|^{p+1}   (window integrand)
    double int_grad_u_2p2 = 0.0;  // integral of |grad u|^{2(p+1)} (window integrand)
};

struct NormSeries {
    NormSeriesSpec spec;
    std::vector<NormSample> samples;
    bool blow_up = false;            // solver flagged the final recorded sample
    long long negative_steps = 0;    // steps whose result dipped below the roundoff tolerance
    double threshold = std::numeric_limits<double>::infinity();  // blow-up threshold in force

    // Sliding-window integrals, attached after the run.  window_values[j]
    // anchors at samples[j].t; samples whose window would run past the end
    // carry NaN.  If the window exceeds the covered span entirely, a single
    // truncated window anchored at the first sample is kept and flagged.
    double window = 0.0;
    bool window_truncated = false;
    std::vector<double> win_lap_w, win_grad_u;
};

namespace detail {
inline double int_pow_of_square(const Field& sq, double half_exponent) {
    // integral of (sq)^{half_exponent} where sq holds squared magnitudes
    double s = 0.0;
    for (double x : sq.values) s += std::pow(x, half_exponent);
    return s * sq.grid.cell_volume();
}
}  // namespace detail

inline NormSample compute_sample(const State& s, const NormSeriesSpec& spec) {
    s.require_consistent();
    NormSample r;
    r.t = s.t;
    r.sup_u = discrete_sup_norm(s.u);
    r.sup_v = discrete_sup_norm(s.v);
    r.sup_w = discrete_sup_norm(s.w);
    r.mass_u = cell_integral(s.u);
    r.mass_v = cell_integral(s.v);
    for (double q : spec.lp_list) {
        r.lp_u.push_back(discrete_lp_norm(s.u, q));
        r.lp_v.push_back(discrete_lp_norm(s.v, q));
        r.lp_w.push_back(discrete_lp_norm(s.w, q));
    }
    const double p = static_cast<double>(spec.p);
    const Field gu = cell_gradient_magnitude(s.u);
    const Field gv = cell_gradient_magnitude(s.v);
    const Field gw = cell_gradient_magnitude(s.w);
    const double int_u_2p = integral_abs_pow(s.u, 2.0 * p);
    const double int_v_2p = integral_abs_pow(s.v, 2.0 * p);
    const double int_w_2p = integral_abs_pow(s.w, 2.0 * p);
    const double int_gu_2p = integral_abs_pow(gu, 2.0 * p);
    r.w1_2p_u = std::pow(int_u_2p + int_gu_2p, 1.0 / (2.0 * p));
    r.w1_2p_v = std::pow(int_v_2p + integral_abs_pow(gv, 2.0 * p), 1.0 / (2.0 * p));
    r.w1_2p_w = std::pow(int_w_2p + integral_abs_pow(gw, 2.0 * p), 1.0 / (2.0 * p));
    r.int_grad_u_2p = int_gu_2p;
    r.int_grad_w_2p2 = integral_abs_pow(gw, 2.0 * (p + 1.0));
    r.int_grad_u_2p2 = integral_abs_pow(gu, 2.0 * (p + 1.0));
    r.int_lap_w_p1 = integral_abs_pow(laplacian(s.w), p + 1.0);
    return r;
}

// Observer that records every stride-th step plus the initial state and the
// final state; also folds in the per-step health flags.
struct SeriesRecorder {
    NormSeriesSpec spec;
    long long stride = 1;
    NormSeries series;
    long long steps_seen = 0;

    SeriesRecorder(NormSeriesSpec sp, long long stride_, double threshold)
        : spec(std::move(sp)), stride(stride_ < 1 ? 1 : stride_) {
        series.spec = spec;
        series.threshold = threshold;
    }

    void record_initial(const State& s) { series.samples.push_back(compute_sample(s, spec)); }

    void operator()(const State& s, const StepReport& rep) {
        ++steps_seen;
        if (rep.any_negative) ++series.negative_steps;
        if (rep.blow_up) {
            series.samples.push_back(compute_sample(s, spec));
            series.blow_up = true;
            return;
        }
        if (steps_seen % stride == 0) series.samples.push_back(compute_sample(s, spec));
    }

    // Appends the final state if the stride did not land on it.
    void finish(const State& s) {
        if (series.samples.empty() || series.samples.back().t < s.t)
            series.samples.push_back(compute_sample(s, spec));
    }
};

// Closed-form ceiling y0 + 2b + b/a for trajectories of y' <= -a y + f with
// unit-window integrals of f bounded by b.
inline double ode_comparison_bound(double y0, double a, double b) {
    require(y0 >= 0.0, "ode_comparison_bound: y0 must be >= 0");
    require(a > 0.0, "ode_comparison_bound: a must be > 0");
    require(b > 0.0, "ode_comparison_bound: b must be > 0");
    return y0 + 2.0 * b + b / a;
}

// Trapezoidal integrals of a sampled function over sliding windows.
// Anchors align with sample indices: value[j] integrates [t_j, t_j+window].
struct WindowResult {
    std::vector<double> times;
    std::vector<double> values;
    bool truncated = false;  // window exceeded the covered span; single window kept
};

inline WindowResult window_integrals(const std::vector<double>& times,
                                     const std::vector<double>& values, double window) {
    require(times.size() == values.size(), "window_integrals: times/values length mismatch");
    require(window > 0.0, "window_integrals: window must be > 0");
    WindowResult out;
    const std::size_t n = times.size();
    if (n == 0) return out;
    for (std::size_t k = 1; k < n; ++k)
        require(times[k] > times[k - 1], "window_integrals: times must increase");

    // prefix trapezoid C[k] = integral over [t_0, t_k]
    std::vector<double> C(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        C[k] = C[k - 1] + 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);

    // exact integral of the piecewise-linear interpolant from t_0 to t
    auto prefix_at = [&](double t) {
        std::size_t k = 1;
        while (k + 1 < n && times[k] < t) ++k;
        const double t0 = times[k - 1], t1 = times[k];
        const double th = (t - t0) / (t1 - t0);
        const double f0 = values[k - 1];
        const double ft = f0 + th * (values[k] - values[k - 1]);
        return C[k - 1] + (t - t0) * 0.5 * (f0 + ft);
    };

    const double span = times.back() - times.front();
    if (window > span) {
        out.truncated = true;
        out.times.push_back(times.front());
        out.values.push_back(C.back());
        return out;
    }
    const double slack = 1e-12 * std::max(1.0, std::abs(times.back()));
    for (std::size_t j = 0; j < n; ++j) {
        const double hi = times[j] + window;
        if (hi > times.back() + slack) break;
        out.times.push_back(times[j]);
        out.values.push_back(prefix_at(std::min(hi, times.back())) - C[j]);
    }
    return out;
}

// Attaches the two tracked window integrals to a recorded series; the window
// follows the convention tau = min{1, horizon/2}.
inline void attach_window_integrals(NormSeries& series, double horizon) {
    require(horizon > 0.0, "attach_window_integrals: horizon must be > 0");
    series.window = std::min(1.0, horizon / 2.0);
    std::vector<double> times, lapw, gradu;
    for (const NormSample& s : series.samples) {
        times.push_back(s.t);
        lapw.push_back(s.int_lap_w_p1);
        gradu.push_back(s.int_grad_u_2p2);
    }
    series.win_lap_w.assign(series.samples.size(), std::numeric_limits<double>::quiet_NaN());
    series.win_grad_u.assign(series.samples.size(), std::numeric_limits<double>::quiet_NaN());
    if (times.size() < 2) return;
    WindowResult a = window_integrals(times, lapw, series.window);
    WindowResult b = window_integrals(times, gradu, series.window);
    series.window_truncated = a.truncated;
    for (std::size_t j = 0; j < a.values.size(); ++j) series.win_lap_w[j] = a.values[j];
    for (std::size_t j = 0; j < b.values.size(); ++j) series.win_grad_u[j] = b.values[j];
}

namespace detail {

// Fourth-order central gradient magnitude with mirror ghosts (even
// reflection across the wall faces), used only by the inequality check
// below.  The check raises gradients to the 2(p+1) power on the left but
// only squares them on the right, so a second-order gradient's O(h^2)
// attenuation hits the left side three times harder and biases the ratio
// low on coarse grids; the wider stencil pushes the gradient error to
// O(h^4), leaving the Hessian and sup factors (both of which shrink the
// right side) as the leading error, so the ratio settles from above.
inline Field fourth_order_gradient_magnitude(const Field& f) {
    const Grid& g = f.grid;
    Field out(g);
    const int nx = g.cells[0], ny = g.cells[1];
    auto mir = [](int j, int n) { return j < 0 ? -1 - j : (j >= n ? 2 * n - 1 - j : j); };
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            double sq = 0.0;
            {
                const int m2 = mir(ix - 2, nx), m1 = mir(ix - 1, nx);
                const int p1 = mir(ix + 1, nx), p2 = mir(ix + 2, nx);
                const double c = (-f[g.index(p2, iy)] + 8.0 * f[g.index(p1, iy)] -
                                  8.0 * f[g.index(m1, iy)] + f[g.index(m2, iy)]) /
                                 (12.0 * g.h[0]);
                sq += c * c;
            }
            if (g.dim == 2) {
                const int m2 = mir(iy - 2, ny), m1 = mir(iy - 1, ny);
                const int p1 = mir(iy + 1, ny), p2 = mir(iy + 2, ny);
                const double c = (-f[g.index(ix, p2)] + 8.0 * f[g.index(ix, p1)] -
                                  8.0 * f[g.index(ix, m1)] + f[g.index(ix, m2)]) /
                                 (12.0 * g.h[1]);
                sq += c * c;
            }
            out[g.index(ix, iy)] = std::sqrt(sq);
        }
    return out;
}

}  // namespace detail

// Both sides of the gradient interpolation bound
//   int |grad u|^{2(p+1)}  <=  2 (n + 4 p^2) ||u||_inf^2  int |grad u|^{2(p-1)} |D2 u|^2
// evaluated with a fourth-order gradient (see above) and this library's
// discrete Hessian.
struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;      // lhs/rhs, 0 when both sides vanish
    bool degenerate = false; // rhs = 0 with lhs > 0: discretization artifact
};

inline InequalityCheck check_functional_inequality_3_5a(const Field& u, int p, int n) {
    require(p >= 2, "inequality check: p must be an integer >= 2");
    require(n == u.grid.dim, "inequality check: n must match the grid dimension");
    InequalityCheck out;
    const Field gm = detail::fourth_order_gradient_magnitude(u);
    const Field h2 = hessian_frobenius_sq(u);
    const double pp = static_cast<double>(p);
    out.lhs = integral_abs_pow(gm, 2.0 * (pp + 1.0));
    double s = 0.0;
    for (int i = 0; i < gm.size(); ++i)
        s += std::pow(gm[i], 2.0 * (pp - 1.0)) * h2[i];
    const double sup_u = discrete_sup_norm(u);
    out.rhs = 2.0 * (n + 4.0 * pp * pp) * sup_u * sup_u * s * u.grid.cell_volume();
    if (out.rhs > 0.0)
        out.ratio = out.lhs / out.rhs;
    else if (out.lhs > 0.0)
        out.degenerate = true;
    return out;
}

enum class VerdictKind { bounded, growing, blow_up, inconclusive };

struct Verdict {
    VerdictKind kind = VerdictKind::inconclusive;
    double ceiling = 0.0;  // max of the tracked sup norms over the run
    std::string details;
};

inline const char* verdict_name(VerdictKind k) {
    switch (k) {
        case VerdictKind::bounded: return "bounded";
        case VerdictKind::growing: return "growing";
        case VerdictKind::blow_up: return "blow-up";
        default: return "inconclusive";
    }
}

// Operational stand-in for "global bounded solution" on a finite horizon:
//   blow-up    solver raised the signal;
//   bounded    every sup norm plateaued: its max over the trailing half
//              [H/2, H] exceeds its max over the third quarter [H/2, 3H/4]
//              by at most 1%, and the overall ceiling stays below the
//              blow-up threshold (monotone growth concentrates its trailing
//              max at the end and fails this);
//   growing    some sup norm's log grew by more than ln 10 over the run;
//   else       inconclusive.
inline Verdict classify_run(const NormSeries& series, const RegimeQuantities&, double horizon) {
    require(horizon > 0.0, "classify_run: horizon must be > 0");
    Verdict v;
    if (series.samples.empty()) {
        v.details = "no samples";
        return v;
    }

    double ceiling = 0.0;
    for (const NormSample& s : series.samples)
        for (double x : {s.sup_u, s.sup_v, s.sup_w})
            if (std::isfinite(x)) ceiling = std::max(ceiling, x);
    v.ceiling = ceiling;

    const double t0 = series.samples.front().t;
    const double t_last = series.samples.back().t;
    if (series.blow_up) {
        v.kind = VerdictKind::blow_up;
        v.details = "solver blow-up signal at t=" + format_double(t_last);
        return v;
    }

    auto track = [&](auto pick) {
        std::vector<double> out;
        for (const NormSample& s : series.samples) out.push_back(pick(s));
        return out;
    };
    const std::array<std::vector<double>, 3> norms = {
        track([](const NormSample& s) { return s.sup_u; }),
        track([](const NormSample& s) { return s.sup_v; }),
        track([](const NormSample& s) { return s.sup_w; })};
    const char* names[3] = {"u", "v", "w"};

    const bool covered = t_last - t0 >= horizon * (1.0 - 1e-9);
    const double half = t0 + horizon / 2.0;
    const double three_quarters = t0 + 0.75 * horizon;
    bool plateau = covered;
    std::string ratios;
    for (int f = 0; f < 3 && plateau; ++f) {
        double max_half = 0.0, max_third = 0.0;
        for (std::size_t k = 0; k < series.samples.size(); ++k) {
            const double t = series.samples[k].t;
            if (t < half) continue;
            max_half = std::max(max_half, norms[f][k]);
            if (t <= three_quarters) max_third = std::max(max_third, norms[f][k]);
        }
        if (!(max_half <= 1.01 * max_third)) plateau = false;
        ratios += std::string(f ? " " : "") + names[f] + "=" +
                  format_double(max_third > 0.0 ? max_half / max_third : 0.0);
    }
    if (plateau && ceiling < series.threshold) {
        v.kind = VerdictKind::bounded;
        v.details = "plateau held (trailing-half/third-quarter max " + ratios +
                     "), ceiling=" + format_double(ceiling);
        return v;
    }

    constexpr double tiny = 1e-300;
    for (int f = 0; f < 3; ++f) {
        const double first = norms[f].front();
        const double last = norms[f].back();
        if (last > 0.0 && std::log(last / std::max(first, tiny)) > std::log(10.0)) {
            v.kind = VerdictKind::growing;
            v.details = std::string("sup ") + names[f] + " grew from " + format_double(first) +
                        " to " + format_double(last);
            return v;
        }
    }

    v.kind = VerdictKind::inconclusive;
    v.details = covered ? "no plateau, growth below the log threshold"
                        : "run ended before covering the horizon";
    return v;
}

// --- series CSV -----------------------------------------------------------
//
// One row per sample.  Fixed column order: t; sup and mass columns; then the
// three fields' Lq norms for each configured q (u, v, w per q, ascending list
// order); then the W1_{2p} norms; then the four tracked integrals (their
// powers spelled out in the header); then the two window integrals (NaN on
// rows whose window would pass the end of the run).

inline std::string norm_series_header(const NormSeriesSpec& spec) {
    std::string h = "t,sup_u,sup_v,sup_w,mass_u,mass_v";
    for (double q : spec.lp_list) {
        const std::string qs = format_double(q);
        h += ",l" + qs + "_u,l" + qs + "_v,l" + qs + "_w";
    }
    const std::string p2 = format_double(2.0 * spec.p);
    const std::string p1 = format_double(spec.p + 1.0);
    const std::string p22 = format_double(2.0 * (spec.p + 1.0));
    h += ",w1_" + p2 + "_u,w1_" + p2 + "_v,w1_" + p2 + "_w";
    h += ",int_grad_w_pow" + p22 + ",int_grad_u_pow" + p2;
    h += ",int_lap_w_pow" + p1 + ",int_grad_u_pow" + p22;
    h += ",win_lap_w_pow" + p1 + ",win_grad_u_pow" + p22;
    return h;
}

inline std::string norm_series_csv(const NormSeries& series) {
    std::string out = norm_series_header(series.spec);
    out += '\n';
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < series.samples.size(); ++k) {
        const NormSample& s = series.samples[k];
        out += format_double(s.t);
        for (double x : {s.sup_u, s.sup_v, s.sup_w, s.mass_u, s.mass_v})
            out += "," + format_double(x);
        for (std::size_t q = 0; q < series.spec.lp_list.size(); ++q)
            out += "," + format_double(s.lp_u[q]) + "," + format_double(s.lp_v[q]) + "," +
                   format_double(s.lp_w[q]);
        for (double x : {s.w1_2p_u, s.w1_2p_v, s.w1_2p_w, s.int_grad_w_2p2, s.int_grad_u_2p,
                         s.int_lap_w_p1, s.int_grad_u_2p2})
            out += "," + format_double(x);
        const double wa = k < series.win_lap_w.size() ? series.win_lap_w[k] : nan;
        const double wb = k < series.win_grad_u.size() ? series.win_grad_u[k] : nan;
        out += "," + format_double(wa) + "," + format_double(wb);
        out += '\n';
    }
    return out;
}

}  // namespace fetax
