#pragma once

// Parameters, nutrient source, simulation state, and the derived regime
// constants (p, A, B, Q, G0, H0) plus the two closed-form admissibility
// checks on (m, l) and on (chi, xi).

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fetax/norms.hpp"

namespace fetax {

struct ModelParams {
    double chi = 1.0;     // forager drift strength (up nutrient gradients)
    double xi = 1.0;      // exploiter drift strength (up forager gradients)
    double lambda = 1.0;  // nutrient consumption rate
    double mu = 1.0;      // nutrient decay rate
    double eta1 = 0.0;    // forager logistic intensity
    double eta2 = 0.0;    // exploiter logistic intensity
    double m = 2.0;       // forager degradation exponent
    double l = 2.0;       // exploiter degradation exponent

    // The modeled regime has chi, xi, lambda, mu strictly positive; the
    // solver itself is well defined for zero values (pure heat flow, no
    // consumption, ...), which several calibration scenarios use.  So
    // construction accepts zeros and the regime checkers report on
    // positivity instead.
    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        auto nonneg = [&](double x, const char* name) {
            if (!(x >= 0.0) || !std::isfinite(x))
                errs.push_back(std::string("params.") + name + " must be finite and >= 0");
        };
        nonneg(chi, "chi");
        nonneg(xi, "xi");
        nonneg(lambda, "lambda");
        nonneg(mu, "mu");
        nonneg(eta1, "eta1");
        nonneg(eta2, "eta2");
        if (!(m > 1.0) || !std::isfinite(m)) errs.push_back("params.m must be > 1");
        if (!(l > 1.0) || !std::isfinite(l)) errs.push_back("params.l must be > 1");
        return errs;
    }
};

enum class SourceKind { constant, separable_decay };

// r(x,t): either r0*g(x) for all t, or r0*exp(-delta*t)*g(x).
// g defaults to the constant profile 1; r_star = sup r = r0*max(g).
struct NutrientSource {
    SourceKind kind = SourceKind::constant;
    double r0 = 0.0;
    double delta = 0.0;
    std::optional<Field> g;

    double max_g() const { return g ? max_entry(*g) : 1.0; }
    double r_star() const { return r0 * max_g(); }

    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        if (!(r0 >= 0.0) || !std::isfinite(r0)) errs.push_back("source.r0 must be finite and >= 0");
        if (!(delta >= 0.0) || !std::isfinite(delta))
            errs.push_back("source.delta must be finite and >= 0");
        if (g && min_entry(*g) < 0.0) errs.push_back("source profile g must be nonnegative");
        return errs;
    }
};

inline Field evaluate_source(const NutrientSource& src, const Grid& grid, double t) {
    require(t >= 0.0, "evaluate_source: t must be >= 0");
    const double amp =
        src.kind == SourceKind::separable_decay ? src.r0 * std::exp(-src.delta * t) : src.r0;
    if (src.g) {
        require(src.g->grid == grid, "evaluate_source: profile grid mismatch");
        Field out = *src.g;
        for (double& x : out.values) x *= amp;
        return out;
    }
    return Field(grid, amp);
}

struct State {
    double t = 0.0;
    Field u, v, w;

    void require_consistent() const {
        require(u.grid == v.grid && u.grid == w.grid, "state: u, v, w must share one grid");
        require(t >= 0.0, "state: t must be >= 0");
    }
};

// p = min{k integer : k > n/2}
inline int compute_p(int n) {
    require(n >= 1, "compute_p: n must be >= 1");
    return n / 2 + 1;
}

struct RegimeQuantities {
    int p = 0;
    double A = 0.0;      // 2*sup(u0)
    double B = 0.0;      // 2*sup(v0)
    double Q = 0.0;      // max{sup(w0), r_star/mu}
    double G0 = 0.0;     // (A+B+1)*(W1_{2(p+1)} norm of w0 + r_star)
    double H0 = 0.0;     // (A+B+1)*Q + W2_{p+1} norm of w0 + r_star
    double r_star = 0.0;
    double kappa = 1.0;
};

// All constants of the smallness analysis, computed with the discrete norms
// above.  u0 or v0 identically zero is rejected (A or B would degenerate);
// w0 == 0 is fine and gives Q = G0 = H0 their zero-source values.
inline RegimeQuantities compute_regime_quantities(const ModelParams& params,
                                                  const NutrientSource& source, const Field& u0,
                                                  const Field& v0, const Field& w0, double kappa) {
    require(u0.grid == v0.grid && u0.grid == w0.grid, "regime quantities: fields on one grid");
    require(kappa > 0.0, "regime quantities: kappa must be > 0");
    require(min_entry(u0) >= 0.0 && min_entry(v0) >= 0.0 && min_entry(w0) >= 0.0,
            "regime quantities: initial fields must be nonnegative");
    require(max_entry(u0) > 0.0, "regime quantities: u0 must not be identically zero");
    require(max_entry(v0) > 0.0, "regime quantities: v0 must not be identically zero");

    RegimeQuantities q;
    q.p = compute_p(u0.grid.dim);
    q.kappa = kappa;
    q.r_star = source.r_star();
    q.A = 2.0 * discrete_sup_norm(u0);
    q.B = 2.0 * discrete_sup_norm(v0);
    const double decay_cap = q.r_star > 0.0 ? q.r_star / params.mu : 0.0;
    q.Q = std::max(discrete_sup_norm(w0), decay_cap);
    const double pp = static_cast<double>(q.p);
    q.G0 = (q.A + q.B + 1.0) * (discrete_w1p_norm(w0, 2.0 * (pp + 1.0)) + q.r_star);
    q.H0 = (q.A + q.B + 1.0) * q.Q + discrete_w2p_norm(w0, pp + 1.0) + q.r_star;
    return q;
}

namespace detail {
// Primary form: m,l >= 2 and l >= max{3, 3*mt/(2*mt-3)} with mt = min(m,l).
inline bool condition_1_8_primary(double m, double l) {
    if (m < 2.0 || l < 2.0) return false;
    const double mt = std::min(m, l);
    return l >= std::max(3.0, 3.0 * mt / (2.0 * mt - 3.0));
}
// Equivalent split form: (2 <= m < 3 and l >= 3m/(2m-3)) or (m >= 3 and l >= 3).
inline bool condition_1_8_split(double m, double l) {
    if (m >= 2.0 && m < 3.0 && l >= 3.0 * m / (2.0 * m - 3.0)) return true;
    return m >= 3.0 && l >= 3.0;
}
}  // namespace detail

// Exponent admissibility.  Both algebraic forms are evaluated on every call;
// a disagreement means one of them was transcribed wrong, so it throws
// rather than silently picking a side.
inline bool check_condition_1_8(double m, double l) {
    require(m > 1.0 && l > 1.0, "check_condition_1_8: m and l must be > 1");
    const bool primary = detail::condition_1_8_primary(m, l);
    const bool split = detail::condition_1_8_split(m, l);
    if (primary != split)
        throw std::logic_error("check_condition_1_8: the two equivalent forms disagree at m=" +
                               std::to_string(m) + ", l=" + std::to_string(l));
    return primary;
}

// Both taxis-smallness inequalities, with each bound exposed for reporting:
//   chi <= kappa / G0
//   xi  <= kappa / ( ||u0||_{W1_{2p}} * [ (chi G0)^{2(p+1)} + (chi H0)^{p+1} + 1 ]^{1/(2p)} )
// A zero denominator (G0 = 0, or a zero u0 norm) makes the corresponding
// bound infinite: the constraint is vacuously satisfied.
struct SmallnessReport {
    double chi = 0.0, chi_bound = 0.0;
    double xi = 0.0, xi_bound = 0.0;
    bool chi_ok = false, xi_ok = false;
    bool ok() const { return chi_ok && xi_ok; }
};

inline SmallnessReport check_smallness_3_23a(const RegimeQuantities& q, const ModelParams& params,
                                             double u0_w1_2p_norm) {
    require(q.kappa > 0.0, "smallness check: kappa must be > 0");
    require(u0_w1_2p_norm >= 0.0, "smallness check: u0 norm must be >= 0");
    const double inf = std::numeric_limits<double>::infinity();
    SmallnessReport rep;
    rep.chi = params.chi;
    rep.xi = params.xi;
    rep.chi_bound = q.G0 > 0.0 ? q.kappa / q.G0 : inf;
    const double pp = static_cast<double>(q.p);
    const double bracket = std::pow(params.chi * q.G0, 2.0 * (pp + 1.0)) +
                           std::pow(params.chi * q.H0, pp + 1.0) + 1.0;
    const double denom = u0_w1_2p_norm * std::pow(bracket, 1.0 / (2.0 * pp));
    rep.xi_bound = denom > 0.0 ? q.kappa / denom : inf;
    rep.chi_ok = rep.chi <= rep.chi_bound;
    rep.xi_ok = rep.xi <= rep.xi_bound;
    return rep;
}

}  // namespace fetax
