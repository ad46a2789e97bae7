#include "catch2/catch_amalgamated.hpp"
#include "fetax/presets.hpp"
#include "fetax/solver.hpp"

using namespace fetax;
using Catch::Approx;

namespace {

State make_state(const Grid& g, const Field& u, const Field& v, const Field& w) {
    return State{0.0, u, v, w};
}

ModelParams quiet_params() {
    // nothing moves: no drift, no reactions, no decay
    ModelParams p;
    p.chi = p.xi = p.lambda = p.mu = 0.0;
    return p;
}

const NutrientSource no_source{SourceKind::constant, 0.0, 0.0, std::nullopt};

}  // namespace

TEST_CASE("pow_nonneg matches std::pow on its fast paths") {
    using detail::pow_nonneg;
    CHECK(pow_nonneg(-2.0, 2.0) == 0.0);  // roundoff undershoot acts as zero
    CHECK(pow_nonneg(0.0, 2.5) == 0.0);
    CHECK(pow_nonneg(3.0, 1.0) == 3.0);
    CHECK(pow_nonneg(3.0, 2.0) == 9.0);
    CHECK(pow_nonneg(3.0, 3.0) == 27.0);
    CHECK(pow_nonneg(1.7, 7.0) == Approx(std::pow(1.7, 7.0)).epsilon(1e-14));
    CHECK(pow_nonneg(1.7, 2.5) == std::pow(1.7, 2.5));  // fractional falls through
}

TEST_CASE("stable_dt closed forms") {
    Grid g = Grid::interval(1.0, 8);
    State s = make_state(g, Field(g), Field(g), Field(g));
    ModelParams params;  // chi = xi = lambda = mu = 1, eta = 0
    StepControl ctl;     // dt_max = 0.01, cfl = 0.4

    // flat fields: no drift, reaction rate = mu = 1, so the diffusion limit
    // h^2/2 = 1/128 binds and dt = 0.4/128
    CHECK(stable_dt(s, params, ctl) == Approx(0.4 / 128.0).margin(1e-18));

    // doubling the resolution quarters the step
    Grid g16 = Grid::interval(1.0, 16);
    State s16 = make_state(g16, Field(g16), Field(g16), Field(g16));
    CHECK(stable_dt(s, params, ctl) / stable_dt(s16, params, ctl) == Approx(4.0).margin(1e-12));

    // steep nutrient: advection limit h / (chi * K) takes over
    Grid g64 = Grid::interval(1.0, 64);
    Field steep = Field::from_function(g64, [](double x, double) { return 1000.0 * x; });
    State sa = make_state(g64, Field(g64, 1.0), Field(g64, 1.0), steep);
    ModelParams pa = quiet_params();
    pa.chi = 1.0;
    CHECK(stable_dt(sa, pa, ctl) == Approx(0.4 * (1.0 / 64.0) / 1000.0).epsilon(1e-12));

    // strong logistic damping: reaction limit 1/(eta1 * m * sup_u) binds
    Grid g4 = Grid::interval(1.0, 4);
    ModelParams pr = quiet_params();
    pr.eta1 = 100.0;
    State sr = make_state(g4, Field(g4, 3.0), Field(g4), Field(g4));
    CHECK(stable_dt(sr, pr, ctl) == Approx(0.4 / 600.0).epsilon(1e-12));

    // implicit diffusion drops the h^2 constraint; dt_max is all that is left
    StepControl imex = ctl;
    imex.mode = StepMode::imex_diffusion;
    CHECK(stable_dt(s, params, imex) == 0.01);
}

TEST_CASE("one explicit step acts diagonally on the discrete cosine mode") {
    // u0 = 1 + 0.5 cos(pi x) sampled at centers is an exact eigenvector of
    // the mirrored second-difference stencil with rate (2 - 2 cos(pi h))/h^2
    const int n = 64;
    Grid g = Grid::interval(1.0, n);
    Field u0 = Field::from_function(
        g, [](double x, double) { return 1.0 + 0.5 * std::cos(M_PI * x); });
    State s = make_state(g, u0, Field(g, 1.0), Field(g));
    StepControl ctl;
    auto [out, rep] = step(s, quiet_params(), no_source, ctl);
    const double h = 1.0 / n;
    const double rate = (2.0 - 2.0 * std::cos(M_PI * h)) / (h * h);  // ~ pi^2
    for (int i = 0; i < n; ++i) {
        const double expected = 1.0 + (u0[i] - 1.0) * (1.0 - rep.dt_used * rate);
        CHECK(out.u[i] == Approx(expected).margin(1e-12));
    }
    CHECK(out.t == rep.dt_used);
}

TEST_CASE("heat decay rate matches the fundamental mode within one percent") {
    const int n = 128;
    Grid g = Grid::interval(1.0, n);
    Field u0 = Field::from_function(
        g, [](double x, double) { return 1.0 + 0.5 * std::cos(M_PI * x); });
    State s = make_state(g, u0, Field(g, 1.0), Field(g));
    StepControl ctl;
    ctl.cfl_safety = 0.5;
    ctl.dt_max = 1.0;
    const double t_end = 0.1;
    AdvanceResult res = advance_to(s, t_end, quiet_params(), no_source, ctl);
    REQUIRE(res.reason == Termination::reached_t_end);
    const double amp0 = max_entry(u0) - 1.0;
    const double amp1 = max_entry(res.state.u) - 1.0;
    const double rate = std::log(amp0 / amp1) / t_end;
    CHECK(rate == Approx(M_PI * M_PI).epsilon(0.01));
}

TEST_CASE("nutrient relaxes to r0/mu at rate mu when no one eats it") {
    // u = v = 0 leaves w_t = r0 - mu w, so w(t) = r0/mu + (w0 - r0/mu) e^(-mu t)
    Grid g = Grid::interval(1.0, 8);
    State s = make_state(g, Field(g), Field(g), Field(g, 3.0));
    ModelParams params = quiet_params();
    params.mu = 1.0;
    params.lambda = 5.0;  // irrelevant: densities are zero
    NutrientSource src{SourceKind::constant, 2.0, 0.0, std::nullopt};
    StepControl ctl;
    ctl.dt_max = 1e-3;
    ctl.cfl_safety = 0.9;
    AdvanceResult res = advance_to(s, 1.0, params, src, ctl);
    const double exact = 2.0 + std::exp(-1.0);
    for (int i = 0; i < 8; ++i)
        CHECK(res.state.w[i] == Approx(exact).margin(2e-3));  // euler is first order
    CHECK(res.state.t == 1.0);
}

TEST_CASE("mass of both species is conserved without logistic terms") {
    Grid g = Grid::square(1.0, 16);
    Field u0 = InitialPreset{PresetKind::random_smooth, 1.0, 0.8, 0.0, 3, 41}.build(g);
    Field v0 = InitialPreset{PresetKind::random_smooth, 0.8, 0.5, 0.0, 3, 42}.build(g);
    Field w0 = InitialPreset{PresetKind::cosine_bump, 0.2, 0.6, 0.0, 3, 1}.build(g);
    State s = make_state(g, u0, v0, w0);
    ModelParams params;
    params.chi = 0.8;
    params.xi = 0.5;
    NutrientSource src{SourceKind::constant, 0.5, 0.0, std::nullopt};
    StepControl ctl;
    const double mu0 = cell_integral(u0), mv0 = cell_integral(v0);

    for (StepMode mode : {StepMode::explicit_euler, StepMode::imex_diffusion}) {
        // the explicit flux form telescopes exactly; the implicit solve only
        // preserves mass up to the linear-solver residual
        const double tol = mode == StepMode::explicit_euler ? 1e-10 : 1e-8;
        ctl.mode = mode;
        State cur = s;
        StepReport last;
        AdvanceResult res = advance_to(
            cur, 0.2, params, src, ctl,
            [&](const State&, const StepReport& rep) { last = rep; });
        REQUIRE(res.reason == Termination::reached_t_end);
        CHECK(last.post_masses[0] == Approx(mu0).margin(tol));
        CHECK(last.post_masses[1] == Approx(mv0).margin(tol));
        CHECK(cell_integral(res.state.u) == Approx(mu0).margin(tol));
        CHECK(cell_integral(res.state.v) == Approx(mv0).margin(tol));
    }
}

TEST_CASE("flat coexistence state is a bitwise fixed point in both modes") {
    // u = v = 1, w = 1/2 with lambda = 1/2, mu = 1, r0 = 1: every rate is
    // exactly zero in ieee arithmetic, so steps must not move a single bit
    Grid g = Grid::square(1.0, 16);
    ModelParams params;
    params.lambda = 0.5;
    params.eta1 = params.eta2 = 1.0;
    NutrientSource src{SourceKind::constant, 1.0, 0.0, std::nullopt};
    for (StepMode mode : {StepMode::explicit_euler, StepMode::imex_diffusion}) {
        StepControl ctl;
        ctl.mode = mode;
        State s = make_state(g, Field(g, 1.0), Field(g, 1.0), Field(g, 0.5));
        AdvanceResult res = advance_to(s, 0.5, params, src, ctl);
        REQUIRE(res.steps > 10);
        for (int i = 0; i < g.cell_count(); ++i) {
            REQUIRE(res.state.u[i] == 1.0);
            REQUIRE(res.state.v[i] == 1.0);
            REQUIRE(res.state.w[i] == 0.5);
        }
    }
}

TEST_CASE("explicit and implicit diffusion agree to first order in dt") {
    Grid g = Grid::square(1.0, 16);
    Field u0 = InitialPreset{PresetKind::random_smooth, 1.0, 0.5, 0.0, 3, 51}.build(g);
    Field v0 = InitialPreset{PresetKind::random_smooth, 1.0, 0.5, 0.0, 3, 52}.build(g);
    Field w0 = InitialPreset{PresetKind::random_smooth, 0.5, 0.3, 0.0, 3, 53}.build(g);
    ModelParams params;
    params.eta1 = params.eta2 = 0.5;
    NutrientSource src{SourceKind::constant, 0.5, 0.0, std::nullopt};
    StepControl ctl;
    ctl.dt_max = 1e-4;

    State sa = make_state(g, u0, v0, w0);
    AdvanceResult ea = advance_to(sa, 0.05, params, src, ctl);
    ctl.mode = StepMode::imex_diffusion;
    State sb = make_state(g, u0, v0, w0);
    AdvanceResult eb = advance_to(sb, 0.05, params, src, ctl);

    double diff = 0.0, any = 0.0;
    for (int i = 0; i < g.cell_count(); ++i) {
        diff = std::max(diff, std::abs(ea.state.u[i] - eb.state.u[i]));
        diff = std::max(diff, std::abs(ea.state.v[i] - eb.state.v[i]));
        diff = std::max(diff, std::abs(ea.state.w[i] - eb.state.w[i]));
        any = std::max(any, std::abs(ea.state.u[i] - eb.state.u[i]));
    }
    CHECK(diff < 2e-3);
    CHECK(any > 0.0);  // the schemes genuinely differ
}

TEST_CASE("advance_to lands on the target time exactly") {
    Grid g = Grid::interval(1.0, 8);
    State s = make_state(g, Field(g, 1.0), Field(g, 1.0), Field(g, 1.0));
    ModelParams params;
    StepControl ctl;
    AdvanceResult res = advance_to(s, 0.0123, params, no_source, ctl);
    CHECK(res.state.t == 0.0123);
    CHECK(res.steps >= 1);
    CHECK(res.min_dt > 0.0);

    // zero-length horizon: no step, state untouched
    State s2 = make_state(g, Field(g, 1.0), Field(g, 1.0), Field(g, 1.0));
    s2.t = 0.5;
    AdvanceResult none = advance_to(s2, 0.5, params, no_source, ctl);
    CHECK(none.steps == 0);
    CHECK(none.min_dt == 0.0);
    CHECK(none.state.t == 0.5);

    CHECK_THROWS_AS(advance_to(s2, 0.4, params, no_source, ctl), error);
}

TEST_CASE("blow-up threshold stops the march early") {
    Grid g = Grid::interval(1.0, 8);
    State s = make_state(g, Field(g), Field(g), Field(g, 1.0));
    ModelParams params = quiet_params();
    params.mu = 0.01;
    NutrientSource feast{SourceKind::constant, 100.0, 0.0, std::nullopt};
    StepControl ctl;
    ctl.blow_up_threshold = 1.5;
    StepReport last;
    AdvanceResult res = advance_to(s, 10.0, params, feast, ctl,
                                   [&](const State&, const StepReport& rep) { last = rep; });
    CHECK(res.reason == Termination::blow_up);
    CHECK(last.blow_up);
    CHECK(res.state.t < 10.0);
    CHECK(max_entry(res.state.w) > 1.5);
}

TEST_CASE("non-finite entries are reported as blow-up") {
    Grid g = Grid::interval(1.0, 8);
    Field u0(g, 1.0);
    u0[3] = std::numeric_limits<double>::quiet_NaN();
    State s = make_state(g, u0, Field(g, 1.0), Field(g, 1.0));
    auto [out, rep] = step(s, quiet_params(), no_source, StepControl{});
    CHECK(rep.blow_up);
}

TEST_CASE("negative entries beyond roundoff are flagged, never hidden") {
    Grid g = Grid::interval(1.0, 8);

    // the flag describes the state after the update: a uniformly negative
    // field has no gradient to diffuse along and nothing to react, so the
    // dip survives the step and must be reported
    State s = make_state(g, Field(g, -1e-6), Field(g, 1.0), Field(g, 1.0));
    auto [out, rep] = step(s, quiet_params(), no_source, StepControl{});
    CHECK(rep.any_negative);
    CHECK(min_entry(out.u) == -1e-6);

    // a lone dip surrounded by healthy cells heals within one diffusion
    // step, so the post-step scan legitimately comes back clean
    Field u0(g, 1.0);
    u0[2] = -1e-6;
    State s2 = make_state(g, u0, Field(g, 1.0), Field(g, 1.0));
    auto [out2, rep2] = step(s2, quiet_params(), no_source, StepControl{});
    CHECK_FALSE(rep2.any_negative);
    CHECK(min_entry(out2.u) > 0.0);
}

TEST_CASE("positivity floor clamps entries up") {
    Grid g = Grid::interval(1.0, 8);
    State s = make_state(g, Field(g, 0.05), Field(g, 0.05), Field(g, 0.05));
    StepControl ctl;
    ctl.positivity_floor = 0.1;
    auto [out, rep] = step(s, quiet_params(), no_source, ctl);
    CHECK(min_entry(out.u) == 0.1);
    CHECK(min_entry(out.v) == 0.1);
    CHECK(min_entry(out.w) == 0.1);
    CHECK_FALSE(rep.any_negative);
}

TEST_CASE("nutrient stays below its comparison cap along random runs") {
    Grid g = Grid::square(1.0, 16);
    Field u0 = InitialPreset{PresetKind::random_smooth, 1.0, 0.7, 0.0, 3, 61}.build(g);
    Field v0 = InitialPreset{PresetKind::random_smooth, 0.6, 0.4, 0.0, 3, 62}.build(g);
    Field w0 = InitialPreset{PresetKind::gaussian_bump, 0.3, 0.9, 0.0, 3, 1}.build(g);
    State s = make_state(g, u0, v0, w0);
    ModelParams params;
    params.chi = 0.6;
    params.xi = 0.4;
    params.eta1 = params.eta2 = 0.3;
    NutrientSource src{SourceKind::constant, 0.8, 0.0, std::nullopt};
    const double cap = std::max(max_entry(w0), 0.8 / params.mu);
    StepControl ctl;
    double worst = 0.0;
    AdvanceResult res =
        advance_to(s, 0.5, params, src, ctl, [&](const State& st, const StepReport& rep) {
            worst = std::max(worst, max_entry(st.w));
            CHECK_FALSE(rep.any_negative);
        });
    REQUIRE(res.reason == Termination::reached_t_end);
    CHECK(worst <= cap + 1e-10);
}

TEST_CASE("taxis divergence building block") {
    Grid g = Grid::square(1.0, 16);
    Field carrier = InitialPreset{PresetKind::random_smooth, 1.0, 0.6, 0.0, 3, 71}.build(g);

    // constant potential: no drift at all
    Field flatpot(g, 2.0);
    Field z = taxis_divergence(carrier, flatpot, 1.5);
    for (int i = 0; i < z.size(); ++i) CHECK(z[i] == 0.0);

    // constant carrier: donor value is c on every face, so the divergence is
    // exactly c * coeff * laplacian(potential)
    Field pot = InitialPreset{PresetKind::random_smooth, 1.0, 0.5, 0.0, 3, 72}.build(g);
    Field dc = taxis_divergence(Field(g, 3.0), pot, 0.5);
    Field lap = laplacian(pot);
    for (int i = 0; i < dc.size(); ++i)
        CHECK(dc[i] == Approx(3.0 * 0.5 * lap[i]).margin(1e-10));

    // conservative form: total flux divergence telescopes to zero
    Field dv = taxis_divergence(carrier, pot, 2.0);
    CHECK(std::abs(cell_integral(dv)) <= 1e-12 * g.cell_count());

    CHECK_THROWS_AS(taxis_divergence(carrier, pot, -1.0), error);
}

TEST_CASE("reaction terms match their closed forms") {
    Grid g = Grid::interval(1.0, 4);
    Field u(g), v(g), w(g);
    u.values = {0.0, 1.0, 2.0, 0.5};
    v.values = {1.0, 1.0, 3.0, 0.0};
    w.values = {1.0, 2.0, 0.5, 4.0};
    State s = make_state(g, u, v, w);
    ModelParams params;
    params.eta1 = 2.0;
    params.eta2 = 3.0;
    params.m = 2.0;
    params.l = 3.0;
    params.lambda = 0.5;
    params.mu = 0.25;
    Field r(g, 1.5);
    auto [ru, rv, rw] = reaction_terms(s, params, r);
    CHECK(ru[0] == 0.0);                              // eta1 (0 - 0)
    CHECK(ru[1] == 0.0);                              // fixed point u = 1
    CHECK(ru[2] == Approx(2.0 * (2.0 - 4.0)));        // 2 (u - u^2)
    CHECK(rv[2] == Approx(3.0 * (3.0 - 27.0)));       // 3 (v - v^3)
    CHECK(rw[1] == Approx(1.5 - 0.5 * 2.0 * 2.0 - 0.25 * 2.0));
    CHECK(rw[3] == Approx(1.5 - 0.5 * 0.5 * 4.0 - 0.25 * 4.0));

    Field bad = u;
    bad[0] = -1e-6;
    State sb = make_state(g, bad, v, w);
    CHECK_THROWS_AS(reaction_terms(sb, params, r), error);
}
