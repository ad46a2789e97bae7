#pragma once

// Line-oriented run configuration:  `section.key = value` per line, `#`
// comments, blank lines ignored.  Unknown keys are errors, and parsing
// collects every problem before failing so a config is fixed in one pass.
//
// Schema (defaults in parentheses):
//
//   grid.dim        = 1 | 2                     (2)
//   grid.cells      = <int per axis>            (64 64)
//   grid.extent     = <length per axis>         (1 1)
//   params.chi      = <real >= 0>               (1)      forager taxis strength
//   params.xi       = <real >= 0>               (1)      exploiter taxis strength
//   params.lambda   = <real >= 0>               (1)      consumption rate
//   params.mu       = <real >= 0>               (1)      nutrient decay
//   params.eta1     = <real >= 0>               (0)      forager logistic intensity
//   params.eta2     = <real >= 0>               (0)      exploiter logistic intensity
//   params.m        = <real > 1>                (2)      forager degradation exponent
//   params.l        = <real > 1>                (2)      exploiter degradation exponent
//   source.kind     = constant | separable-decay (constant)
//   source.r0       = <real >= 0>               (0)
//   source.delta    = <real >= 0>               (0)      decay rate for separable-decay
//   init.u.preset   = constant | cosine-bump | gaussian-bump | random-smooth
//   init.u.offset / amplitude / sigma / modes / seed     (preset parameters)
//   init.v.*, init.w.*                                   (same keys)
//   step.mode       = explicit | imex-diffusion (explicit)
//   step.dt_max     = <real > 0>                (0.01)
//   step.cfl_safety = <real in (0,1)>           (0.4)
//   step.positivity_floor = <real >= 0>         (0)
//   run.horizon     = <real > 0>                (50)
//   run.stride      = <int >= 1>                (100)    steps per recorded sample
//   run.kappa       = <real > 0>                (1)
//   run.blowup_threshold = <real >= 0>          (0)      0 = auto: 1e6*max(A,B,Q,1)
//   run.lp_list     = <reals >= 1>              (1 2)
//   run.snapshot_times = <reals>                ()       save u,v,w when crossing each
//   run.out_dir     = <path>                    (runs)
//   run.label       = <name>                    (run)

#include <map>
#include <sstream>

#include "fetax/field_io.hpp"
#include "fetax/model.hpp"
#include "fetax/presets.hpp"
#include "fetax/solver.hpp"

namespace fetax {

struct config_error : error {
    std::vector<std::string> messages;
    explicit config_error(std::vector<std::string> msgs)
        : error(join(msgs)), messages(std::move(msgs)) {}

  private:
    static std::string join(const std::vector<std::string>& msgs) {
        std::string all = "config errors:";
        for (const std::string& m : msgs) all += "\n  - " + m;
        return all;
    }
};

struct GridSpec {
    int dim = 2;
    std::vector<int> cells{64, 64};
    std::vector<double> extent{1.0, 1.0};

    Grid make() const {
        std::array<int, 2> c{4, 1};
        std::array<double, 2> e{1.0, 1.0};
        for (int a = 0; a < dim && a < static_cast<int>(cells.size()); ++a) c[a] = cells[a];
        for (int a = 0; a < dim && a < static_cast<int>(extent.size()); ++a) e[a] = extent[a];
        return Grid::make(dim, e, c);
    }
};

struct RunConfig {
    GridSpec grid;
    ModelParams params;
    SourceKind source_kind = SourceKind::constant;
    double source_r0 = 0.0;
    double source_delta = 0.0;
    InitialPreset init_u{PresetKind::cosine_bump, 0.5, 1.0, 0.0, 3, 1};
    InitialPreset init_v{PresetKind::cosine_bump, 0.5, 0.5, 0.0, 3, 2};
    InitialPreset init_w{PresetKind::cosine_bump, 0.5, 0.5, 0.0, 3, 3};
    StepControl step;  // blow_up_threshold filled by the harness
    double horizon = 50.0;
    long long stride = 100;
    double kappa = 1.0;
    double blowup_threshold = 0.0;  // 0 = auto
    std::vector<double> lp_list{1.0, 2.0};
    std::vector<double> snapshot_times;
    std::string out_dir = "runs";
    std::string label = "run";

    NutrientSource source() const {
        NutrientSource s;
        s.kind = source_kind;
        s.r0 = source_r0;
        s.delta = source_delta;
        return s;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> tokens(const std::string& value) {
    std::string tmp = value;
    for (char& c : tmp)
        if (c == ',') c = ' ';
    std::istringstream is(tmp);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

struct ConfigReader {
    std::map<std::string, std::string> kv;
    std::vector<std::string> errors;
    std::vector<std::string> consumed;

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    template <class F>
    void take(const std::string& key, F&& apply) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        consumed.push_back(key);
        apply(it->second);
    }

    void number(const std::string& key, double& slot) {
        take(key, [&](const std::string& v) {
            try {
                slot = parse_double(v, key);
            } catch (const error& e) {
                errors.push_back(e.what());
            }
        });
    }

    void integer(const std::string& key, long long& slot) {
        take(key, [&](const std::string& v) {
            try {
                slot = parse_int(v, key);
            } catch (const error& e) {
                errors.push_back(e.what());
            }
        });
    }

    void text(const std::string& key, std::string& slot) {
        take(key, [&](const std::string& v) { slot = v; });
    }

    void number_list(const std::string& key, std::vector<double>& slot) {
        take(key, [&](const std::string& v) {
            std::vector<double> vals;
            try {
                for (const std::string& t : tokens(v)) vals.push_back(parse_double(t, key));
                slot = std::move(vals);
            } catch (const error& e) {
                errors.push_back(e.what());
            }
        });
    }

    void integer_list(const std::string& key, std::vector<int>& slot) {
        take(key, [&](const std::string& v) {
            std::vector<int> vals;
            try {
                for (const std::string& t : tokens(v))
                    vals.push_back(static_cast<int>(parse_int(t, key)));
                slot = std::move(vals);
            } catch (const error& e) {
                errors.push_back(e.what());
            }
        });
    }

    void preset(const std::string& prefix, InitialPreset& p) {
        take(prefix + ".preset", [&](const std::string& v) {
            if (!preset_from_name(v, p.kind))
                errors.push_back(prefix + ".preset: unknown preset '" + v + "'");
        });
        number(prefix + ".offset", p.offset);
        number(prefix + ".amplitude", p.amplitude);
        number(prefix + ".sigma", p.sigma);
        long long m = p.modes, s = static_cast<long long>(p.seed);
        integer(prefix + ".modes", m);
        integer(prefix + ".seed", s);
        if (m < 1) {
            errors.push_back(prefix + ".modes must be >= 1");
        } else {
            p.modes = static_cast<int>(m);
        }
        if (s < 0) {
            errors.push_back(prefix + ".seed must be >= 0");
        } else {
            p.seed = static_cast<unsigned long long>(s);
        }
    }
};

}  // namespace detail

// Full semantic validation of an assembled config; returns every problem.
inline std::vector<std::string> validate_config(const RunConfig& cfg) {
    std::vector<std::string> errs;
    if (cfg.grid.dim != 1 && cfg.grid.dim != 2) errs.push_back("grid.dim must be 1 or 2");
    if (static_cast<int>(cfg.grid.cells.size()) != cfg.grid.dim)
        errs.push_back("grid.cells needs exactly one entry per axis");
    if (static_cast<int>(cfg.grid.extent.size()) != cfg.grid.dim)
        errs.push_back("grid.extent needs exactly one entry per axis");
    if (errs.empty()) {
        try {
            (void)cfg.grid.make();
        } catch (const error& e) {
            errs.push_back(e.what());
        }
    }
    for (const std::string& e : cfg.params.validate()) errs.push_back(e);
    {
        NutrientSource s = cfg.source();
        for (const std::string& e : s.validate()) errs.push_back(e);
    }
    for (const std::string& e : cfg.init_u.validate("init.u")) errs.push_back(e);
    for (const std::string& e : cfg.init_v.validate("init.v")) errs.push_back(e);
    for (const std::string& e : cfg.init_w.validate("init.w")) errs.push_back(e);
    for (const std::string& e : cfg.step.validate()) errs.push_back(e);
    if (!(cfg.horizon > 0.0)) errs.push_back("run.horizon must be > 0");
    if (cfg.stride < 1) errs.push_back("run.stride must be >= 1");
    if (!(cfg.kappa > 0.0)) errs.push_back("run.kappa must be > 0");
    if (!(cfg.blowup_threshold >= 0.0)) errs.push_back("run.blowup_threshold must be >= 0");
    for (double q : cfg.lp_list)
        if (!(q >= 1.0)) errs.push_back("run.lp_list entries must be >= 1");
    for (double t : cfg.snapshot_times)
        if (!(t >= 0.0)) errs.push_back("run.snapshot_times entries must be >= 0");
    if (cfg.label.empty()) errs.push_back("run.label must not be empty");
    for (char c : cfg.label)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
            errs.push_back("run.label may use only letters, digits, '-', '_', '.'");
    return errs;
}

// Parses config text; throws config_error with the full list of problems
// (syntax, unknown keys, type errors, semantic violations).
inline RunConfig parse_config(const std::string& text) {
    detail::ConfigReader rd;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            rd.errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty()) {
            rd.errors.push_back("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        if (rd.kv.count(key))
            rd.errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        rd.kv[key] = value;
    }

    RunConfig cfg;
    long long dim = cfg.grid.dim;
    rd.integer("grid.dim", dim);
    cfg.grid.dim = static_cast<int>(dim);
    rd.integer_list("grid.cells", cfg.grid.cells);
    rd.number_list("grid.extent", cfg.grid.extent);

    rd.number("params.chi", cfg.params.chi);
    rd.number("params.xi", cfg.params.xi);
    rd.number("params.lambda", cfg.params.lambda);
    rd.number("params.mu", cfg.params.mu);
    rd.number("params.eta1", cfg.params.eta1);
    rd.number("params.eta2", cfg.params.eta2);
    rd.number("params.m", cfg.params.m);
    rd.number("params.l", cfg.params.l);

    rd.take("source.kind", [&](const std::string& v) {
        if (v == "constant") cfg.source_kind = SourceKind::constant;
        else if (v == "separable-decay") cfg.source_kind = SourceKind::separable_decay;
        else rd.errors.push_back("source.kind: unknown kind '" + v + "'");
    });
    rd.number("source.r0", cfg.source_r0);
    rd.number("source.delta", cfg.source_delta);

    rd.preset("init.u", cfg.init_u);
    rd.preset("init.v", cfg.init_v);
    rd.preset("init.w", cfg.init_w);

    rd.take("step.mode", [&](const std::string& v) {
        if (v == "explicit") cfg.step.mode = StepMode::explicit_euler;
        else if (v == "imex-diffusion") cfg.step.mode = StepMode::imex_diffusion;
        else rd.errors.push_back("step.mode: unknown mode '" + v + "'");
    });
    rd.number("step.dt_max", cfg.step.dt_max);
    rd.number("step.cfl_safety", cfg.step.cfl_safety);
    rd.number("step.positivity_floor", cfg.step.positivity_floor);

    rd.number("run.horizon", cfg.horizon);
    rd.integer("run.stride", cfg.stride);
    rd.number("run.kappa", cfg.kappa);
    rd.number("run.blowup_threshold", cfg.blowup_threshold);
    rd.number_list("run.lp_list", cfg.lp_list);
    rd.number_list("run.snapshot_times", cfg.snapshot_times);
    rd.text("run.out_dir", cfg.out_dir);
    rd.text("run.label", cfg.label);

    for (const auto& [key, value] : rd.kv) {
        bool known = false;
        for (const std::string& c : rd.consumed)
            if (c == key) {
                known = true;
                break;
            }
        if (!known) rd.errors.push_back("unknown key '" + key + "'");
    }

    std::vector<std::string> errs = std::move(rd.errors);
    for (const std::string& e : validate_config(cfg)) errs.push_back(e);
    if (!errs.empty()) throw config_error(std::move(errs));
    return cfg;
}

inline RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error({"cannot open config file " + path.string()});
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

namespace detail {
inline void emit_preset(std::string& out, const std::string& prefix, const InitialPreset& p) {
    out += prefix + ".preset = " + preset_name(p.kind) + "\n";
    out += prefix + ".offset = " + format_double(p.offset) + "\n";
    out += prefix + ".amplitude = " + format_double(p.amplitude) + "\n";
    out += prefix + ".sigma = " + format_double(p.sigma) + "\n";
    out += prefix + ".modes = " + std::to_string(p.modes) + "\n";
    out += prefix + ".seed = " + std::to_string(p.seed) + "\n";
}

inline std::string join_numbers(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + format_double(xs[i]);
    return out;
}
}  // namespace detail

// Canonical text form; parse(serialize(cfg)) reproduces cfg exactly.
inline std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    out += "grid.dim = " + std::to_string(cfg.grid.dim) + "\n";
    out += "grid.cells =";
    for (int c : cfg.grid.cells) out += " " + std::to_string(c);
    out += "\n";
    out += "grid.extent = " + detail::join_numbers(cfg.grid.extent) + "\n";
    out += "params.chi = " + format_double(cfg.params.chi) + "\n";
    out += "params.xi = " + format_double(cfg.params.xi) + "\n";
    out += "params.lambda = " + format_double(cfg.params.lambda) + "\n";
    out += "params.mu = " + format_double(cfg.params.mu) + "\n";
    out += "params.eta1 = " + format_double(cfg.params.eta1) + "\n";
    out += "params.eta2 = " + format_double(cfg.params.eta2) + "\n";
    out += "params.m = " + format_double(cfg.params.m) + "\n";
    out += "params.l = " + format_double(cfg.params.l) + "\n";
    out += std::string("source.kind = ") +
           (cfg.source_kind == SourceKind::constant ? "constant" : "separable-decay") + "\n";
    out += "source.r0 = " + format_double(cfg.source_r0) + "\n";
    out += "source.delta = " + format_double(cfg.source_delta) + "\n";
    detail::emit_preset(out, "init.u", cfg.init_u);
    detail::emit_preset(out, "init.v", cfg.init_v);
    detail::emit_preset(out, "init.w", cfg.init_w);
    out += std::string("step.mode = ") +
           (cfg.step.mode == StepMode::explicit_euler ? "explicit" : "imex-diffusion") + "\n";
    out += "step.dt_max = " + format_double(cfg.step.dt_max) + "\n";
    out += "step.cfl_safety = " + format_double(cfg.step.cfl_safety) + "\n";
    out += "step.positivity_floor = " + format_double(cfg.step.positivity_floor) + "\n";
    out += "run.horizon = " + format_double(cfg.horizon) + "\n";
    out += "run.stride = " + std::to_string(cfg.stride) + "\n";
    out += "run.kappa = " + format_double(cfg.kappa) + "\n";
    out += "run.blowup_threshold = " + format_double(cfg.blowup_threshold) + "\n";
    out += "run.lp_list = " + detail::join_numbers(cfg.lp_list) + "\n";
    if (!cfg.snapshot_times.empty())
        out += "run.snapshot_times = " + detail::join_numbers(cfg.snapshot_times) + "\n";
    out += "run.out_dir = " + cfg.out_dir + "\n";
    out += "run.label = " + cfg.label + "\n";
    return out;
}

// Resolves a sweep axis path to the numeric slot it names.
inline double* numeric_leaf(RunConfig& cfg, const std::string& path) {
    static const char* names[] = {
        "params.chi",    "params.xi",       "params.lambda",   "params.mu",
        "params.eta1",   "params.eta2",     "params.m",        "params.l",
        "source.r0",     "source.delta",    "step.dt_max",     "step.cfl_safety",
        "step.positivity_floor",            "run.horizon",     "run.kappa",
        "run.blowup_threshold",
        "init.u.offset", "init.u.amplitude", "init.u.sigma",
        "init.v.offset", "init.v.amplitude", "init.v.sigma",
        "init.w.offset", "init.w.amplitude", "init.w.sigma",
    };
    double* slots[] = {
        &cfg.params.chi,    &cfg.params.xi,       &cfg.params.lambda,   &cfg.params.mu,
        &cfg.params.eta1,   &cfg.params.eta2,     &cfg.params.m,        &cfg.params.l,
        &cfg.source_r0,     &cfg.source_delta,    &cfg.step.dt_max,     &cfg.step.cfl_safety,
        &cfg.step.positivity_floor,               &cfg.horizon,         &cfg.kappa,
        &cfg.blowup_threshold,
        &cfg.init_u.offset, &cfg.init_u.amplitude, &cfg.init_u.sigma,
        &cfg.init_v.offset, &cfg.init_v.amplitude, &cfg.init_v.sigma,
        &cfg.init_w.offset, &cfg.init_w.amplitude, &cfg.init_w.sigma,
    };
    for (std::size_t i = 0; i < std::size(names); ++i)
        if (path == names[i]) return slots[i];
    return nullptr;
}

}  // namespace fetax
