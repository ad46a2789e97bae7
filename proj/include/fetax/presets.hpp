#pragma once

// Named initial-condition families.  All of them are smooth and
// wall-compatible (zero normal derivative), and each documents its norms so
// regime constants can be cross-checked analytically:
//
//   constant       f = offset
//                  sup = offset, integral = offset*|domain|, grad = 0.
//   cosine-bump    f = offset + amplitude * prod_a 0.5*(1 - cos(2 pi x_a / L_a))
//                  per-axis factor in [0,1], peak at the domain center;
//                  sup = offset + max(amplitude, 0); each factor integrates
//                  to L_a/2, so integral = (offset + amplitude/2^dim)*|domain|.
//   gaussian-bump  f = offset + amplitude * exp(-|x - center|^2 / (2 sigma^2))
//                  sup = offset + max(amplitude, 0); wall gradients are
//                  O(exp(-(L/2sigma)^2)), negligible for sigma <= L/8.
//   random-smooth  f = offset + amplitude * M(x)/sup|M|, M = sum over modes
//                  (k != 0, |k_a| <= modes) of c_k prod_a cos(k_a pi x_a/L_a),
//                  c_k drawn from the seed, weighted 1/(1+|k|^2); the cosine
//                  modes satisfy the mirror condition exactly, so the field
//                  is discretely wall-compatible at every resolution.
//
// Determinism: coefficients come from std::mt19937_64 (a fixed standard
// sequence) through a fixed 53-bit mapping, so a seed pins the field bit for
// bit on every platform.

#include <random>

#include "fetax/grid.hpp"

namespace fetax {

enum class PresetKind { constant, cosine_bump, gaussian_bump, random_smooth };

inline const char* preset_name(PresetKind k) {
    switch (k) {
        case PresetKind::constant: return "constant";
        case PresetKind::cosine_bump: return "cosine-bump";
        case PresetKind::gaussian_bump: return "gaussian-bump";
        default: return "random-smooth";
    }
}

inline bool preset_from_name(const std::string& name, PresetKind& out) {
    if (name == "constant") out = PresetKind::constant;
    else if (name == "cosine-bump") out = PresetKind::cosine_bump;
    else if (name == "gaussian-bump") out = PresetKind::gaussian_bump;
    else if (name == "random-smooth") out = PresetKind::random_smooth;
    else return false;
    return true;
}

namespace detail {
// Uniform in (-1, 1) from the top 53 bits; fixed mapping, no libc variance.
inline double uniform_sym(std::mt19937_64& rng) {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}
}  // namespace detail

struct InitialPreset {
    PresetKind kind = PresetKind::constant;
    double offset = 1.0;
    double amplitude = 0.0;
    double sigma = 0.0;  // gaussian width; 0 picks (shortest extent)/8
    int modes = 3;       // random-smooth: highest mode index per axis
    unsigned long long seed = 1;

    std::vector<std::string> validate(const std::string& where) const {
        std::vector<std::string> errs;
        auto bad = [&](const std::string& msg) { errs.push_back(where + ": " + msg); };
        if (!std::isfinite(offset) || !std::isfinite(amplitude) || !std::isfinite(sigma))
            bad("offset, amplitude, sigma must be finite");
        switch (kind) {
            case PresetKind::constant:
                if (offset < 0.0) bad("constant level (offset) must be >= 0");
                if (amplitude != 0.0) bad("constant preset takes no amplitude");
                break;
            case PresetKind::cosine_bump:
            case PresetKind::gaussian_bump:
                if (offset < 0.0) bad("offset must be >= 0");
                if (offset + std::min(amplitude, 0.0) < 0.0)
                    bad("offset + min(amplitude,0) must be >= 0 to keep the field nonnegative");
                if (kind == PresetKind::gaussian_bump && sigma < 0.0) bad("sigma must be >= 0");
                break;
            case PresetKind::random_smooth:
                if (offset < std::abs(amplitude))
                    bad("random-smooth needs offset >= |amplitude| to stay nonnegative");
                if (modes < 1) bad("modes must be >= 1");
                break;
        }
        return errs;
    }

    Field build(const Grid& g) const {
        switch (kind) {
            case PresetKind::constant:
                return Field(g, offset);
            case PresetKind::cosine_bump:
                return Field::from_function(g, [&](double x, double y) {
                    double shape = 0.5 * (1.0 - std::cos(2.0 * pi() * x / g.extent[0]));
                    if (g.dim == 2)
                        shape *= 0.5 * (1.0 - std::cos(2.0 * pi() * y / g.extent[1]));
                    return offset + amplitude * shape;
                });
            case PresetKind::gaussian_bump: {
                double width = sigma;
                if (width == 0.0) {
                    width = g.extent[0];
                    if (g.dim == 2) width = std::min(width, g.extent[1]);
                    width /= 8.0;
                }
                const double cx = 0.5 * g.extent[0];
                const double cy = g.dim == 2 ? 0.5 * g.extent[1] : 0.0;
                const double inv2s2 = 1.0 / (2.0 * width * width);
                return Field::from_function(g, [&](double x, double y) {
                    const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                    return offset + amplitude * std::exp(-d2 * inv2s2);
                });
            }
            case PresetKind::random_smooth:
            default:
                return build_random(g);
        }
    }

  private:
    static double pi() { return 3.14159265358979323846; }

    Field build_random(const Grid& g) const {
        std::mt19937_64 rng(seed);
        struct Mode {
            int kx, ky;
            double c;
        };
        std::vector<Mode> picked;
        if (g.dim == 1) {
            for (int k = 1; k <= modes; ++k)
                picked.push_back({k, 0, detail::uniform_sym(rng) / (1.0 + k * k)});
        } else {
            for (int ky = 0; ky <= modes; ++ky)
                for (int kx = 0; kx <= modes; ++kx) {
                    if (kx == 0 && ky == 0) continue;
                    picked.push_back(
                        {kx, ky, detail::uniform_sym(rng) / (1.0 + kx * kx + ky * ky)});
                }
        }
        Field mix = Field::from_function(g, [&](double x, double y) {
            double s = 0.0;
            for (const Mode& m : picked) {
                double term = m.c * std::cos(m.kx * pi() * x / g.extent[0]);
                if (g.dim == 2) term *= std::cos(m.ky * pi() * y / g.extent[1]);
                s += term;
            }
            return s;
        });
        const double sup = discrete_sup_raw(mix);
        Field out(g, offset);
        if (sup > 0.0)
            for (int i = 0; i < out.size(); ++i) out[i] = offset + amplitude * (mix[i] / sup);
        return out;
    }

    static double discrete_sup_raw(const Field& f) {
        double m = 0.0;
        for (double x : f.values) m = std::max(m, std::abs(x));
        return m;
    }
};

}  // namespace fetax
