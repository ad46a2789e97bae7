#pragma once

// End-to-end experiment drivers: single runs with full artifact persistence,
// parameter sweeps (parallel, deterministic), kappa calibration by bisection,
// and the five canned scenario suites with their pass/fail assertions.
//
// Run directory layout (<out_dir>/<label>/):
//   config.txt    canonical config echo (reparses to the same run)
//   report.txt    regime constants, admissibility checks, verdict, counters
//   series.csv    the recorded norm series (deterministic bytes)
//   plotdata/     one "t value" table per tracked norm, for external plotting
//   u_t<T>.csv .. field snapshots at each configured crossing time

#include <chrono>
#include <future>
#include <thread>

#include "fetax/config.hpp"
#include "fetax/diagnostics.hpp"

namespace fetax {

struct RunRecord {
    RunConfig config;
    RegimeQuantities quantities;
    SmallnessReport smallness;
    double u0_w1_2p = 0.0;
    bool condition_1_8 = false;
    NormSeries series;
    Verdict verdict;
    Termination reason = Termination::reached_t_end;
    long long steps = 0;
    double min_dt = 0.0;
    double wall_seconds = 0.0;
    std::filesystem::path dir;  // empty when not persisted
};

namespace detail {

inline void save_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    require(bool(os), "cannot open " + path.string() + " for writing");
    os << text;
    require(bool(os), "write failed for " + path.string());
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline std::string run_report_text(const RunRecord& r) {
    const RegimeQuantities& q = r.quantities;
    std::string t;
    t += "label = " + r.config.label + "\n";
    t += "grid = " + std::to_string(r.config.grid.dim) + "d";
    for (std::size_t a = 0; a < r.config.grid.cells.size(); ++a)
        t += (a ? "x" : " ") + std::to_string(r.config.grid.cells[a]);
    t += "\n";
    t += "p = " + std::to_string(q.p) + "\n";
    t += "A = " + format_double(q.A) + "\n";
    t += "B = " + format_double(q.B) + "\n";
    t += "Q = " + format_double(q.Q) + "\n";
    t += "G0 = " + format_double(q.G0) + "\n";
    t += "H0 = " + format_double(q.H0) + "\n";
    t += "r_star = " + format_double(q.r_star) + "\n";
    t += "kappa = " + format_double(q.kappa) + "\n";
    t += "u0_w1_2p = " + format_double(r.u0_w1_2p) + "\n";
    t += "chi = " + format_double(r.smallness.chi) +
         "  bound = " + format_double(r.smallness.chi_bound) +
         "  ok = " + yes_no(r.smallness.chi_ok) + "\n";
    t += "xi = " + format_double(r.smallness.xi) +
         "  bound = " + format_double(r.smallness.xi_bound) +
         "  ok = " + yes_no(r.smallness.xi_ok) + "\n";
    t += "taxis_smallness = " + yes_no(r.smallness.ok()) + "\n";
    t += "exponent_condition = " + yes_no(r.condition_1_8) + "\n";
    t += "blow_up_threshold = " + format_double(r.series.threshold) + "\n";
    t += std::string("verdict = ") + verdict_name(r.verdict.kind) + "\n";
    t += "ceiling = " + format_double(r.verdict.ceiling) + "\n";
    t += "details = " + r.verdict.details + "\n";
    t += "steps = " + std::to_string(r.steps) + "\n";
    t += "min_dt = " + format_double(r.min_dt) + "\n";
    t += "negative_steps = " + std::to_string(r.series.negative_steps) + "\n";
    t += "window = " + format_double(r.series.window) +
         "  truncated = " + yes_no(r.series.window_truncated) + "\n";
    t += "wall_seconds = " + format_double(r.wall_seconds) + "\n";
    return t;
}

inline void write_plot_data(const std::filesystem::path& dir, const NormSeries& series) {
    std::filesystem::create_directories(dir);
    auto table = [&](const std::string& name, auto pick) {
        std::string t;
        for (std::size_t k = 0; k < series.samples.size(); ++k) {
            const double y = pick(k);
            if (std::isnan(y)) continue;
            t += format_double(series.samples[k].t) + " " + format_double(y) + "\n";
        }
        save_text(dir / (name + ".dat"), t);
    };
    table("sup_u", [&](std::size_t k) { return series.samples[k].sup_u; });
    table("sup_v", [&](std::size_t k) { return series.samples[k].sup_v; });
    table("sup_w", [&](std::size_t k) { return series.samples[k].sup_w; });
    table("mass_u", [&](std::size_t k) { return series.samples[k].mass_u; });
    table("mass_v", [&](std::size_t k) { return series.samples[k].mass_v; });
    table("w1_u", [&](std::size_t k) { return series.samples[k].w1_2p_u; });
    table("w1_v", [&](std::size_t k) { return series.samples[k].w1_2p_v; });
    table("w1_w", [&](std::size_t k) { return series.samples[k].w1_2p_w; });
    table("win_lap_w", [&](std::size_t k) {
        return k < series.win_lap_w.size() ? series.win_lap_w[k]
                                           : std::numeric_limits<double>::quiet_NaN();
    });
    table("win_grad_u", [&](std::size_t k) {
        return k < series.win_grad_u.size() ? series.win_grad_u[k]
                                            : std::numeric_limits<double>::quiet_NaN();
    });
}

}  // namespace detail

// The pre-run part of the pipeline, shared by run() and `check-conditions`.
struct RunPrelude {
    Grid grid;
    State state0;
    NutrientSource source;
    RegimeQuantities quantities;
    SmallnessReport smallness;
    double u0_w1_2p = 0.0;
    bool condition_1_8 = false;
    double threshold = 0.0;
};

inline RunPrelude prepare_run(const RunConfig& cfg) {
    std::vector<std::string> errs = validate_config(cfg);
    if (!errs.empty()) throw config_error(std::move(errs));
    RunPrelude pre;
    pre.grid = cfg.grid.make();
    pre.state0.t = 0.0;
    pre.state0.u = cfg.init_u.build(pre.grid);
    pre.state0.v = cfg.init_v.build(pre.grid);
    pre.state0.w = cfg.init_w.build(pre.grid);
    pre.source = cfg.source();
    pre.quantities = compute_regime_quantities(cfg.params, pre.source, pre.state0.u,
                                               pre.state0.v, pre.state0.w, cfg.kappa);
    pre.u0_w1_2p = discrete_w1p_norm(pre.state0.u, 2.0 * pre.quantities.p);
    pre.smallness = check_smallness_3_23a(pre.quantities, cfg.params, pre.u0_w1_2p);
    pre.condition_1_8 = check_condition_1_8(cfg.params.m, cfg.params.l);
    pre.threshold = cfg.blowup_threshold > 0.0
                        ? cfg.blowup_threshold
                        : 1e6 * std::max({pre.quantities.A, pre.quantities.B, pre.quantities.Q,
                                          1.0});
    return pre;
}

// Executes a configured run end to end.  extra_observer(state, report) is
// called after every step (before the recorder), letting callers track
// per-step quantities without a second simulation.
template <class ExtraObserver>
RunRecord run(const RunConfig& cfg, bool persist, ExtraObserver&& extra_observer) {
    RunPrelude pre = prepare_run(cfg);
    RunRecord rec;
    rec.config = cfg;
    rec.quantities = pre.quantities;
    rec.smallness = pre.smallness;
    rec.u0_w1_2p = pre.u0_w1_2p;
    rec.condition_1_8 = pre.condition_1_8;

    StepControl ctrl = cfg.step;
    ctrl.blow_up_threshold = pre.threshold;

    NormSeriesSpec spec;
    spec.lp_list = cfg.lp_list;
    spec.p = pre.quantities.p;
    SeriesRecorder recorder(spec, cfg.stride, pre.threshold);
    recorder.record_initial(pre.state0);

    if (persist) {
        rec.dir = std::filesystem::path(cfg.out_dir) / cfg.label;
        std::filesystem::create_directories(rec.dir);
    }

    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    auto maybe_snapshot = [&](const State& s) {
        while (next_snap < snaps.size() && s.t >= snaps[next_snap] - 1e-12) {
            if (persist) {
                const std::string tag = "_t" + format_double(snaps[next_snap]) + ".csv";
                save_field(s.u, rec.dir / ("u" + tag));
                save_field(s.v, rec.dir / ("v" + tag));
                save_field(s.w, rec.dir / ("w" + tag));
            }
            ++next_snap;
        }
    };
    maybe_snapshot(pre.state0);

    const auto t_start = std::chrono::steady_clock::now();
    AdvanceResult adv = advance_to(pre.state0, cfg.horizon, cfg.params, pre.source, ctrl,
                                   [&](const State& s, const StepReport& rep) {
                                       extra_observer(s, rep);
                                       recorder(s, rep);
                                       maybe_snapshot(s);
                                   });
    const auto t_stop = std::chrono::steady_clock::now();
    rec.wall_seconds = std::chrono::duration<double>(t_stop - t_start).count();

    recorder.finish(adv.state);
    rec.series = std::move(recorder.series);
    attach_window_integrals(rec.series, cfg.horizon);
    rec.verdict = classify_run(rec.series, rec.quantities, cfg.horizon);
    rec.reason = adv.reason;
    rec.steps = adv.steps;
    rec.min_dt = adv.min_dt;

    if (persist) {
        detail::save_text(rec.dir / "config.txt", serialize_config(cfg));
        detail::save_text(rec.dir / "series.csv", norm_series_csv(rec.series));
        detail::save_text(rec.dir / "report.txt", detail::run_report_text(rec));
        detail::write_plot_data(rec.dir / "plotdata", rec.series);
    }
    return rec;
}

inline RunRecord run(const RunConfig& cfg, bool persist = true) {
    return run(cfg, persist, [](const State&, const StepReport&) {});
}

// --- sweep ------------------------------------------------------------------

inline std::string sanitize_path_component(std::string s) {
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
            c = '_';
    return s;
}

// Independent runs along one numeric config axis.  Runs execute on a small
// thread pool (jobs <= 0 picks the hardware count); outputs land in per-run
// directories so results are identical no matter the schedule.
inline std::vector<RunRecord> sweep(const RunConfig& base, const std::string& axis,
                                    const std::vector<double>& values, int jobs = 0,
                                    bool persist = true) {
    {
        RunConfig probe = base;
        if (numeric_leaf(probe, axis) == nullptr)
            throw config_error({"sweep axis '" + axis + "' does not name a numeric config leaf"});
    }
    const std::string axis_tag = sanitize_path_component(axis);
    std::vector<RunConfig> cfgs;
    for (double value : values) {
        RunConfig cfg = base;
        *numeric_leaf(cfg, axis) = value;
        cfg.out_dir = (std::filesystem::path(base.out_dir) / ("sweep-" + axis_tag)).string();
        cfg.label = base.label + "-" + axis_tag + "-" + sanitize_path_component(format_double(value));
        cfgs.push_back(std::move(cfg));
    }

    std::vector<RunRecord> records(cfgs.size());
    int pool = jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    for (std::size_t begin = 0; begin < cfgs.size(); begin += static_cast<std::size_t>(pool)) {
        const std::size_t end = std::min(cfgs.size(), begin + static_cast<std::size_t>(pool));
        std::vector<std::future<RunRecord>> batch;
        for (std::size_t i = begin; i < end; ++i)
            batch.push_back(std::async(std::launch::async,
                                       [&cfgs, i, persist] { return run(cfgs[i], persist); }));
        for (std::size_t i = begin; i < end; ++i) records[i] = batch[i - begin].get();
    }

    if (persist) {
        std::string csv = "axis,value,verdict,ceiling,steps\n";
        for (std::size_t i = 0; i < records.size(); ++i)
            csv += axis + "," + format_double(values[i]) + "," +
                   verdict_name(records[i].verdict.kind) + "," +
                   format_double(records[i].verdict.ceiling) + "," +
                   std::to_string(records[i].steps) + "\n";
        const std::filesystem::path dir = std::filesystem::path(base.out_dir) / ("sweep-" + axis_tag);
        std::filesystem::create_directories(dir);
        detail::save_text(dir / "summary.csv", csv);
    }
    return records;
}

// --- kappa calibration --------------------------------------------------------

struct CalibrationResult {
    double kappa = 0.0;  // largest kappa observed bounded (the bracket's low end)
    double lo = 0.0, hi = 0.0;
    bool ok = false;
    int runs = 0;
    std::string message;
};

// Bisects kappa in [lo, hi]: each candidate gets chi = kappa/G0 and xi at its
// (3.23a) bound (both inequalities tight), is simulated, and counts as
// feasible only on a bounded verdict.  Requires the eta1 = eta2 = 0 setting.
inline CalibrationResult calibrate_kappa(const RunConfig& base, double lo, double hi,
                                         int iterations = 8) {
    if (base.params.eta1 != 0.0 || base.params.eta2 != 0.0)
        throw config_error({"calibrate-kappa requires eta1 = eta2 = 0"});
    require(lo > 0.0 && hi >= lo, "calibrate-kappa: need 0 < lo <= hi");
    RunPrelude pre = prepare_run(base);  // chi, xi overridden per candidate below
    const RegimeQuantities q0 = pre.quantities;
    require(q0.G0 > 0.0, "calibrate-kappa: G0 = 0, the taxis bound is degenerate for this data");

    CalibrationResult res;
    res.lo = lo;
    res.hi = hi;
    auto bounded_at = [&](double kappa) {
        RunConfig cfg = base;
        cfg.kappa = kappa;
        cfg.params.chi = kappa / q0.G0;
        const double pp = static_cast<double>(q0.p);
        const double bracket = std::pow(cfg.params.chi * q0.G0, 2.0 * (pp + 1.0)) +
                               std::pow(cfg.params.chi * q0.H0, pp + 1.0) + 1.0;
        const double denom = pre.u0_w1_2p * std::pow(bracket, 1.0 / (2.0 * pp));
        cfg.params.xi = denom > 0.0 ? kappa / denom : cfg.params.chi;
        cfg.label = base.label + "-kappa-" + sanitize_path_component(format_double(kappa));
        ++res.runs;
        RunRecord rec = run(cfg, false);
        return rec.verdict.kind == VerdictKind::bounded;
    };

    if (lo == hi) {
        res.ok = bounded_at(lo);
        res.kappa = lo;
        res.message = res.ok ? "degenerate bracket verified bounded"
                             : "degenerate bracket: run not bounded";
        return res;
    }
    if (!bounded_at(lo)) {
        res.ok = false;
        res.kappa = 0.0;
        res.message = "bracket failure: even kappa = " + format_double(lo) +
                      " is not bounded (resolution or horizon inadequate)";
        return res;
    }
    if (bounded_at(hi)) {
        res.ok = true;
        res.kappa = hi;
        res.lo = hi;
        res.message = "entire bracket bounded; empirical kappa is at least the upper end";
        return res;
    }
    double a = lo, b = hi;
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (a + b);
        if (bounded_at(mid)) a = mid;
        else b = mid;
    }
    res.ok = true;
    res.kappa = a;
    res.lo = a;
    res.hi = b;
    res.message = "bisection converged";
    return res;
}

// --- scenario suites ----------------------------------------------------------

struct SuiteCheck {
    std::string name;
    bool pass = false;
    std::string details;
};

struct SuiteReport {
    std::string suite;
    std::vector<SuiteCheck> checks;

    bool all_pass() const {
        for (const SuiteCheck& c : checks)
            if (!c.pass) return false;
        return true;
    }
    std::string text() const {
        std::string t;
        for (const SuiteCheck& c : checks)
            t += std::string(c.pass ? "PASS" : "FAIL") + "  " + suite + "/" + c.name +
                 (c.details.empty() ? "" : "  (" + c.details + ")") + "\n";
        t += std::string(all_pass() ? "PASS" : "FAIL") + "  " + suite + " suite\n";
        return t;
    }
};

namespace detail {

inline void check(SuiteReport& rep, const std::string& name, bool pass,
                  const std::string& details) {
    rep.checks.push_back({name, pass, details});
}

// Shared scenario scaffolding: 2D grid, constant source, smooth bumps.
inline RunConfig suite_base(int cells, const std::string& out_root, const std::string& suite,
                            const std::string& label) {
    RunConfig cfg;
    cfg.grid.dim = 2;
    cfg.grid.cells = {cells, cells};
    cfg.grid.extent = {1.0, 1.0};
    cfg.out_dir = (std::filesystem::path(out_root) / suite).string();
    cfg.label = label;
    cfg.step.cfl_safety = 0.8;
    cfg.step.dt_max = 0.01;
    return cfg;
}

inline SuiteReport suite_mass_identities(const std::string& out_root) {
    SuiteReport rep{"mass-identities", {}};

    // Conservation: no logistic terms, taxis + diffusion + nutrient coupling on.
    RunConfig cons = suite_base(32, out_root, "mass-identities", "conservation");
    cons.params = ModelParams{0.8, 0.5, 0.5, 1.0, 0.0, 0.0, 2.0, 2.0};
    cons.source_r0 = 0.5;
    cons.init_u = InitialPreset{PresetKind::cosine_bump, 0.5, 1.0, 0.0, 3, 1};
    cons.init_v = InitialPreset{PresetKind::gaussian_bump, 0.3, 0.8, 0.0, 3, 2};
    cons.init_w = InitialPreset{PresetKind::cosine_bump, 0.2, 0.6, 0.0, 3, 3};
    cons.horizon = 5.0;
    cons.stride = 50;
    RunRecord c = run(cons);
    double mass_u_err = 0.0, mass_v_err = 0.0, sup_w_max = 0.0;
    const double mu0 = c.series.samples.front().mass_u;
    const double mv0 = c.series.samples.front().mass_v;
    for (const NormSample& s : c.series.samples) {
        mass_u_err = std::max(mass_u_err, std::abs(s.mass_u - mu0));
        mass_v_err = std::max(mass_v_err, std::abs(s.mass_v - mv0));
        sup_w_max = std::max(sup_w_max, s.sup_w);
    }
    const double w_cap = std::max(c.series.samples.front().sup_w,
                                  c.quantities.r_star / cons.params.mu);
    check(rep, "mass-u-conserved", mass_u_err <= 1e-8,
          "max drift " + format_double(mass_u_err));
    check(rep, "mass-v-conserved", mass_v_err <= 1e-8,
          "max drift " + format_double(mass_v_err));
    check(rep, "w-sup-bound", sup_w_max <= w_cap + 1e-10,
          "max " + format_double(sup_w_max) + " cap " + format_double(w_cap));
    check(rep, "no-negative-entries", c.series.negative_steps == 0,
          std::to_string(c.series.negative_steps) + " offending steps");

    // Mass ODE: with eta1 > 0 the discrete defect of d/dt int u against
    // eta1(int u - int u^m) is O(dt) and halves with dt.  The last step is
    // truncated to land on the horizon exactly and can be arbitrarily short;
    // dividing its roundoff-sized mass change by a near-zero dt measures
    // summation noise, not the scheme, so only full-length steps enter.
    auto ode_defect = [&](double dt_fixed, const std::string& label) {
        RunConfig cfg = suite_base(32, out_root, "mass-identities", label);
        cfg.params = ModelParams{0.5, 0.3, 0.5, 1.0, 1.0, 0.0, 2.0, 2.0};
        cfg.source_r0 = 0.5;
        cfg.init_u = InitialPreset{PresetKind::cosine_bump, 0.5, 1.0, 0.0, 3, 1};
        cfg.init_v = InitialPreset{PresetKind::gaussian_bump, 0.3, 0.8, 0.0, 3, 2};
        cfg.init_w = InitialPreset{PresetKind::cosine_bump, 0.2, 0.6, 0.0, 3, 3};
        cfg.horizon = 2.0;
        cfg.stride = 200;
        cfg.step.dt_max = dt_fixed;
        cfg.step.cfl_safety = 0.9;  // keep dt_max the binding constraint
        const double mass0 = cell_integral(cfg.init_u.build(cfg.grid.make()));
        double mass_prev = mass0;
        double max_defect = 0.0;
        RunRecord r = run(cfg, true, [&](const State& s, const StepReport& rp) {
            const double mass_new = rp.post_masses[0];
            const double sink = integral_abs_pow(s.u, cfg.params.m);
            const double defect = std::abs((mass_new - mass_prev) / rp.dt_used -
                                           cfg.params.eta1 * (mass_new - sink));
            if (rp.dt_used >= 0.5 * dt_fixed) max_defect = std::max(max_defect, defect);
            mass_prev = mass_new;
        });
        return std::pair<double, RunRecord>(max_defect, std::move(r));
    };
    auto [defect_1, rec_1] = ode_defect(1e-4, "mass-ode-dt");
    auto [defect_2, rec_2] = ode_defect(5e-5, "mass-ode-dt-half");
    const double ratio = defect_2 > 0.0 ? defect_1 / defect_2 : 0.0;
    check(rep, "mass-ode-defect-halves", ratio >= 1.6 && ratio <= 2.4,
          "defect ratio " + format_double(ratio));

    // L1 ceiling max{int u0, |domain|} in the logistic run.
    double mass_u_peak = 0.0;
    for (const NormSample& s : rec_1.series.samples) mass_u_peak = std::max(mass_u_peak, s.mass_u);
    const double l1_cap = std::max(rec_1.series.samples.front().mass_u, 1.0);
    check(rep, "mass-u-l1-bound", mass_u_peak <= l1_cap + 1e-8,
          "peak " + format_double(mass_u_peak) + " cap " + format_double(l1_cap));
    return rep;
}

inline SuiteReport suite_thm_1_1(const std::string& out_root) {
    SuiteReport rep{"thm-1.1", {}};
    // Small data: (u0, w0, r) scaled down jointly; chi = xi = 1 fixed.
    RunConfig small = suite_base(32, out_root, "thm-1.1", "small-data");
    small.params = ModelParams{1.0, 1.0, 0.5, 1.0, 0.0, 0.0, 2.0, 2.0};
    small.source_r0 = 0.02;
    small.init_u = InitialPreset{PresetKind::cosine_bump, 0.02, 0.03, 0.0, 3, 11};
    small.init_v = InitialPreset{PresetKind::cosine_bump, 0.3, 0.2, 0.0, 3, 12};
    small.init_w = InitialPreset{PresetKind::cosine_bump, 0.02, 0.03, 0.0, 3, 13};
    small.horizon = 50.0;
    small.stride = 400;
    RunRecord s = run(small);
    check(rep, "small-data-smallness-holds", s.smallness.ok(),
          "chi " + format_double(s.smallness.chi) + " <= " + format_double(s.smallness.chi_bound) +
              ", xi " + format_double(s.smallness.xi) + " <= " +
              format_double(s.smallness.xi_bound));
    check(rep, "small-data-bounded", s.verdict.kind == VerdictKind::bounded,
          std::string(verdict_name(s.verdict.kind)) + ": " + s.verdict.details);
    check(rep, "small-data-ceiling-finite",
          std::isfinite(s.verdict.ceiling) && s.verdict.ceiling < s.series.threshold,
          "ceiling " + format_double(s.verdict.ceiling));

    // Reference magnitude for contrast; recorded, not asserted.
    RunConfig ref = small;
    ref.label = "reference-data";
    ref.source_r0 = 0.5;
    ref.init_u = InitialPreset{PresetKind::cosine_bump, 0.5, 0.75, 0.0, 3, 11};
    ref.init_w = InitialPreset{PresetKind::cosine_bump, 0.5, 0.75, 0.0, 3, 13};
    RunRecord r = run(ref);
    check(rep, "reference-data-recorded", true,
          std::string("verdict ") + verdict_name(r.verdict.kind) + ", smallness " +
              (r.smallness.ok() ? "holds" : "violated"));
    return rep;
}

inline SuiteReport suite_thm_1_2(const std::string& out_root) {
    SuiteReport rep{"thm-1.2", {}};
    // Forager logistic on, tiny exploiter taxis: the regime's bounded branch.
    RunConfig damped = suite_base(64, out_root, "thm-1.2", "taxis-damped");
    damped.params = ModelParams{0.5, 1e-3, 0.5, 1.0, 1.0, 0.0, 2.0, 2.0};
    damped.source_r0 = 0.5;
    damped.init_u = InitialPreset{PresetKind::cosine_bump, 0.5, 0.5, 0.0, 3, 21};
    damped.init_v = InitialPreset{PresetKind::gaussian_bump, 0.3, 0.4, 0.0, 3, 22};
    damped.init_w = InitialPreset{PresetKind::cosine_bump, 0.3, 0.3, 0.0, 3, 23};
    damped.horizon = 50.0;
    damped.stride = 2000;
    RunRecord d = run(damped);
    check(rep, "taxis-damped-bounded", d.verdict.kind == VerdictKind::bounded,
          std::string(verdict_name(d.verdict.kind)) + ": " + d.verdict.details);
    check(rep, "taxis-damped-ceilings-finite",
          std::isfinite(d.verdict.ceiling) && d.verdict.ceiling < d.series.threshold,
          "ceiling " + format_double(d.verdict.ceiling) + " threshold " +
              format_double(d.series.threshold));
    check(rep, "taxis-damped-no-negative", d.series.negative_steps == 0,
          std::to_string(d.series.negative_steps) + " offending steps");

    // Spatially homogeneous fixed point: every rate vanishes identically, so
    // the ceiling must equal the initial sup norm bit for bit.
    RunConfig steady = suite_base(64, out_root, "thm-1.2", "steady-state");
    steady.params = ModelParams{0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 2.0, 2.0};
    steady.source_r0 = 1.0;  // balances lambda*(1+1)*w + mu*w at w = 0.5
    steady.init_u = InitialPreset{PresetKind::constant, 1.0, 0.0, 0.0, 3, 1};
    steady.init_v = InitialPreset{PresetKind::constant, 1.0, 0.0, 0.0, 3, 1};
    steady.init_w = InitialPreset{PresetKind::constant, 0.5, 0.0, 0.0, 3, 1};
    steady.horizon = 50.0;
    steady.stride = 100;
    steady.step.mode = StepMode::imex_diffusion;
    RunRecord st = run(steady);
    const double init_ceiling = 1.0;  // max of the three initial sup norms
    check(rep, "steady-state-bounded", st.verdict.kind == VerdictKind::bounded,
          std::string(verdict_name(st.verdict.kind)) + ": " + st.verdict.details);
    check(rep, "steady-state-ceiling-exact", st.verdict.ceiling == init_ceiling,
          "ceiling " + format_double(st.verdict.ceiling));
    return rep;
}

inline SuiteReport suite_thm_1_3(const std::string& out_root) {
    SuiteReport rep{"thm-1.3", {}};
    auto scenario = [&](double m, double l, const std::string& label) {
        RunConfig cfg = suite_base(32, out_root, "thm-1.3", label);
        cfg.params = ModelParams{0.3, 0.3, 0.5, 1.0, 1.0, 1.0, m, l};
        cfg.source_r0 = 0.5;
        cfg.init_u = InitialPreset{PresetKind::cosine_bump, 0.5, 1.0, 0.0, 3, 31};
        cfg.init_v = InitialPreset{PresetKind::gaussian_bump, 0.4, 0.8, 0.0, 3, 32};
        cfg.init_w = InitialPreset{PresetKind::cosine_bump, 0.3, 0.5, 0.0, 3, 33};
        cfg.horizon = 50.0;
        cfg.stride = 500;
        return run(cfg);
    };

    RunRecord inside = scenario(2.0, 6.0, "within-regime-m2-l6");
    check(rep, "m2-l6-condition-true", inside.condition_1_8, "boundary pair of the regime");
    check(rep, "m2-l6-bounded", inside.verdict.kind == VerdictKind::bounded,
          std::string(verdict_name(inside.verdict.kind)) + ": " + inside.verdict.details);

    RunRecord outside = scenario(2.0, 5.0, "outside-regime-m2-l5");
    check(rep, "m2-l5-condition-false", !outside.condition_1_8,
          "exponent pair below the regime boundary");
    check(rep, "m2-l5-informational", true,
          std::string("outside regime; verdict (no claim): ") +
              verdict_name(outside.verdict.kind));
    return rep;
}

inline SuiteReport suite_inequality_3_5a(const std::string& out_root) {
    SuiteReport rep{"inequality-3.5a", {}};
    auto max_ratio = [&](int dim, int cells) {
        double worst = 0.0;
        for (unsigned long long seed = 1; seed <= 100; ++seed) {
            InitialPreset p{PresetKind::random_smooth, 1.0, 1.0, 0.0, 4, seed};
            const Grid g = dim == 1 ? Grid::interval(1.0, cells) : Grid::square(1.0, cells);
            InequalityCheck chk = check_functional_inequality_3_5a(p.build(g), 2, dim);
            worst = std::max(worst, chk.ratio);
        }
        return worst;
    };
    const double r1_128 = max_ratio(1, 128);
    const double r1_256 = max_ratio(1, 256);
    const double r2_128 = max_ratio(2, 128);
    const double r2_256 = max_ratio(2, 256);
    check(rep, "ratio-1d-128", r1_128 <= 1.1, "max ratio " + format_double(r1_128));
    check(rep, "ratio-2d-128", r2_128 <= 1.1, "max ratio " + format_double(r2_128));
    check(rep, "refinement-decreases-1d", r1_256 < r1_128,
          format_double(r1_128) + " -> " + format_double(r1_256));
    check(rep, "refinement-decreases-2d", r2_256 < r2_128,
          format_double(r2_128) + " -> " + format_double(r2_256));
    std::string csv = "dim,cells,max_ratio\n";
    csv += "1,128," + format_double(r1_128) + "\n1,256," + format_double(r1_256) + "\n";
    csv += "2,128," + format_double(r2_128) + "\n2,256," + format_double(r2_256) + "\n";
    const std::filesystem::path dir = std::filesystem::path(out_root) / "inequality-3.5a";
    std::filesystem::create_directories(dir);
    save_text(dir / "ratios.csv", csv);
    return rep;
}

}  // namespace detail

inline SuiteReport scenario_suite(const std::string& name,
                                  const std::string& out_root = "runs/suites") {
    SuiteReport rep;
    if (name == "mass-identities") rep = detail::suite_mass_identities(out_root);
    else if (name == "thm-1.1") rep = detail::suite_thm_1_1(out_root);
    else if (name == "thm-1.2") rep = detail::suite_thm_1_2(out_root);
    else if (name == "thm-1.3") rep = detail::suite_thm_1_3(out_root);
    else if (name == "inequality-3.5a") rep = detail::suite_inequality_3_5a(out_root);
    else throw config_error({"unknown suite '" + name + "' (known: thm-1.1, thm-1.2, thm-1.3, mass-identities, inequality-3.5a)"});
    const std::filesystem::path dir = std::filesystem::path(out_root) / rep.suite;
    std::filesystem::create_directories(dir);
    detail::save_text(dir / "report.txt", rep.text());
    return rep;
}

}  // namespace fetax
