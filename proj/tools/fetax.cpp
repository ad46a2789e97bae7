// fetax command-line driver.
//
//   fetax run <config> [--out DIR] [--label NAME] [--set key=value ...]
//   fetax sweep <config> --axis <path> --values <list> [--jobs N]
//   fetax suite <name> [--out DIR]
//   fetax calibrate-kappa <config> --lo X --hi Y [--iterations N]
//   fetax check-conditions <config>
//
// Exit codes: 0 success (a blow-up verdict from `run` is still success),
// 2 configuration error, 3 suite assertion failure, 1 anything else.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "fetax/harness.hpp"

namespace {

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& tok : fetax::detail::tokens(text))
        out.push_back(fetax::parse_double(tok, "sweep value"));
    return out;
}

void apply_overrides(fetax::RunConfig& cfg, const std::vector<std::string>& sets) {
    for (const std::string& s : sets) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw fetax::config_error({"--set expects key=value, got '" + s + "'"});
        const std::string key = fetax::detail::trim(s.substr(0, eq));
        const std::string val = fetax::detail::trim(s.substr(eq + 1));
        double* leaf = fetax::numeric_leaf(cfg, key);
        if (leaf == nullptr)
            throw fetax::config_error({"--set key '" + key + "' is not a numeric config leaf"});
        *leaf = fetax::parse_double(val, key);
    }
}

void print_conditions(const fetax::RunConfig& cfg) {
    const fetax::RunPrelude pre = fetax::prepare_run(cfg);
    const fetax::RegimeQuantities& q = pre.quantities;
    std::cout << "p = " << q.p << "\n"
              << "A = " << fetax::format_double(q.A) << "\n"
              << "B = " << fetax::format_double(q.B) << "\n"
              << "Q = " << fetax::format_double(q.Q) << "\n"
              << "G0 = " << fetax::format_double(q.G0) << "\n"
              << "H0 = " << fetax::format_double(q.H0) << "\n"
              << "r_star = " << fetax::format_double(q.r_star) << "\n"
              << "kappa = " << fetax::format_double(q.kappa) << "\n"
              << "u0_w1_2p = " << fetax::format_double(pre.u0_w1_2p) << "\n"
              << "chi = " << fetax::format_double(pre.smallness.chi)
              << "  bound = " << fetax::format_double(pre.smallness.chi_bound)
              << "  ok = " << (pre.smallness.chi_ok ? "yes" : "no") << "\n"
              << "xi = " << fetax::format_double(pre.smallness.xi)
              << "  bound = " << fetax::format_double(pre.smallness.xi_bound)
              << "  ok = " << (pre.smallness.xi_ok ? "yes" : "no") << "\n"
              << "taxis_smallness = " << (pre.smallness.ok() ? "yes" : "no") << "\n"
              << "exponent_condition = " << (pre.condition_1_8 ? "yes" : "no") << "\n"
              << "blow_up_threshold = " << fetax::format_double(pre.threshold) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-difference experiments for the forager-exploiter taxis system"};
    app.require_subcommand(1);

    std::string config_path, out_dir, label, axis, values_text, suite_name;
    std::vector<std::string> sets;
    int jobs = 0, iterations = 8;
    double lo = 0.0, hi = 0.0;

    CLI::App* cmd_run = app.add_subcommand("run", "execute one configured run");
    cmd_run->add_option("config", config_path, "config file")->required();
    cmd_run->add_option("--out", out_dir, "output directory override");
    cmd_run->add_option("--label", label, "run label override");
    cmd_run->add_option("--set", sets, "numeric override key=value (repeatable)");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "vary one numeric axis");
    cmd_sweep->add_option("config", config_path, "base config file")->required();
    cmd_sweep->add_option("--axis", axis, "config path of the swept leaf")->required();
    cmd_sweep->add_option("--values", values_text, "comma/space separated values")->required();
    cmd_sweep->add_option("--jobs", jobs, "max parallel runs (0 = hardware)");

    CLI::App* cmd_suite = app.add_subcommand("suite", "run a canned scenario suite");
    cmd_suite
        ->add_option("name", suite_name,
                     "thm-1.1 | thm-1.2 | thm-1.3 | mass-identities | inequality-3.5a")
        ->required();
    cmd_suite->add_option("--out", out_dir, "suite output root (default runs/suites)");

    CLI::App* cmd_cal = app.add_subcommand("calibrate-kappa", "bisect the taxis budget");
    cmd_cal->add_option("config", config_path, "base config file")->required();
    cmd_cal->add_option("--lo", lo, "bracket low end")->required();
    cmd_cal->add_option("--hi", hi, "bracket high end")->required();
    cmd_cal->add_option("--iterations", iterations, "bisection steps");

    CLI::App* cmd_chk = app.add_subcommand("check-conditions", "print regime quantities only");
    cmd_chk->add_option("config", config_path, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_run->parsed()) {
            fetax::RunConfig cfg = fetax::load_config_file(config_path);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (!label.empty()) cfg.label = label;
            apply_overrides(cfg, sets);
            const fetax::RunRecord rec = fetax::run(cfg);
            std::cout << fetax::detail::run_report_text(rec) << "artifacts = "
                      << rec.dir.string() << "\n";
            return 0;
        }
        if (cmd_sweep->parsed()) {
            fetax::RunConfig cfg = fetax::load_config_file(config_path);
            const std::vector<double> values = parse_value_list(values_text);
            const std::vector<fetax::RunRecord> recs = fetax::sweep(cfg, axis, values, jobs);
            std::cout << "axis value verdict ceiling steps\n";
            for (std::size_t i = 0; i < recs.size(); ++i)
                std::cout << axis << " " << fetax::format_double(values[i]) << " "
                          << fetax::verdict_name(recs[i].verdict.kind) << " "
                          << fetax::format_double(recs[i].verdict.ceiling) << " "
                          << recs[i].steps << "\n";
            return 0;
        }
        if (cmd_suite->parsed()) {
            const std::string root = out_dir.empty() ? std::string("runs/suites") : out_dir;
            const fetax::SuiteReport rep = fetax::scenario_suite(suite_name, root);
            std::cout << rep.text();
            return rep.all_pass() ? 0 : 3;
        }
        if (cmd_cal->parsed()) {
            fetax::RunConfig cfg = fetax::load_config_file(config_path);
            const fetax::CalibrationResult res = fetax::calibrate_kappa(cfg, lo, hi, iterations);
            std::cout << "kappa = " << fetax::format_double(res.kappa) << "\n"
                      << "bracket = [" << fetax::format_double(res.lo) << ", "
                      << fetax::format_double(res.hi) << "]\n"
                      << "runs = " << res.runs << "\n"
                      << "ok = " << (res.ok ? "yes" : "no") << "\n"
                      << "message = " << res.message << "\n";
            return res.ok ? 0 : 1;
        }
        if (cmd_chk->parsed()) {
            print_conditions(fetax::load_config_file(config_path));
            return 0;
        }
    } catch (const fetax::config_error& e) {
        for (const std::string& msg : e.messages) std::cerr << "config error: " << msg << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
