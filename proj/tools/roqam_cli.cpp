// roqam: command-line front end for the Green's function experiments and
// resource estimates.  Exit codes: 0 ok, 2 validation, 3 numerical, 4 I/O.

#include "roqam/roqam.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Overrides {
    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;  // filled from named options
};

roqam::RunConfig resolve(const Overrides& o) {
    roqam::RunConfig cfg;
    if (!o.config_path.empty()) roqam::apply_key_values(cfg, roqam::parse_key_values(roqam::read_text_file(o.config_path)));
    std::map<std::string, std::string> sets;
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw roqam::ValidationError("set", "expected key=value, got '" + s + "'");
        sets[s.substr(0, eq)] = s.substr(eq + 1);
    }
    roqam::apply_key_values(cfg, sets);
    roqam::apply_key_values(cfg, o.flags);
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Krylov Green's function estimation from noisy moments, with T-gate costing"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(roqam::kVersion));

    Overrides o;
    std::map<std::string, std::string> raw;
    auto flag = [&](CLI::App* target, const std::string& name, const std::string& key, const std::string& help) {
        target->add_option_function<std::string>(name, [&raw, key](const std::string& v) { raw[key] = v; }, help);
    };

    app.add_option("--config", o.config_path, "key = value configuration file");
    app.add_option("--set", o.sets, "override any configuration key (key=value, repeatable)");
    flag(&app, "--seed", "seed", "base RNG seed");
    flag(&app, "--out", "out", "output path (stdout when omitted)");
    flag(&app, "--format", "format", "csv or json");
    flag(&app, "--u", "u", "Hubbard interaction");
    flag(&app, "--n-bath", "n_bath", "number of bath sites");
    flag(&app, "--gamma", "gamma", "broadening on the real axis");
    flag(&app, "--axis", "axis", "real or imaginary");
    flag(&app, "--n-omega", "n_omega", "number of grid points");
    flag(&app, "--r", "r", "Krylov depth");
    flag(&app, "--r-max", "r_max", "largest depth in convergence runs");
    flag(&app, "--depths", "depths", "comma-separated depths for spectral runs");
    flag(&app, "--delta1", "delta1", "base moment error");
    flag(&app, "--deltas", "deltas", "comma-separated base errors");
    flag(&app, "--budget", "budget", "EB1, EB2 or EB3");
    flag(&app, "--generator", "generator", "time_evolution, scaled_hamiltonian or qubitized_walk");
    flag(&app, "--dt", "dt", "timestep or auto");
    flag(&app, "--lam", "lam", "Hamiltonian rescaling");
    flag(&app, "--repair", "repair", "auto, none, unitary or hermitian");
    flag(&app, "--n-seeds", "n_seeds", "seeds per median");
    flag(&app, "--beta", "beta", "inverse temperature");

    struct Sub {
        const char* name;
        const char* help;
        roqam::Document (*run)(const roqam::RunConfig&);
    };
    const Sub subs[] = {
        {"spectral", "exact and Krylov Green's functions at several depths", roqam::cmd_spectral},
        {"convergence", "mean relative error against depth and noise level", roqam::cmd_convergence},
        {"timestep-scan", "error against the evolution timestep", roqam::cmd_timestep_scan},
        {"budget-compare", "median errors of the three error budgets", roqam::cmd_budget_compare},
        {"thermal", "finite-temperature Green's function via the thermofield double", roqam::cmd_thermal},
        {"resources", "T-gate estimates (method roqam, qsvt or compare)", roqam::cmd_resources},
    };
    const Sub* chosen = nullptr;
    for (const auto& s : subs) {
        auto* sc = app.add_subcommand(s.name, s.help);
        if (std::string(s.name) == "resources") {
            sc->add_option_function<std::string>("method,--method",
                                                  [&raw](const std::string& v) { raw["method"] = v; },
                                                  "roqam, qsvt or compare");
        }
        sc->callback([&chosen, &s] { chosen = &s; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        o.flags = raw;
        const auto cfg = resolve(o);
        const auto text = chosen->run(cfg).render();
        if (cfg.out.empty()) {
            std::cout << text;
            std::cout.flush();
            if (!std::cout) throw roqam::IoError("write to stdout failed");
        } else {
            roqam::write_text_file(cfg.out, text);
        }
        return 0;
    } catch (const roqam::ValidationError& e) {
        std::cerr << "error: invalid " << e.what() << '\n';
        return 2;
    } catch (const roqam::NumericalError& e) {
        std::cerr << "error: numerical: " << e.what() << '\n';
        return 3;
    } catch (const roqam::IoError& e) {
        std::cerr << "error: i/o: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
