#pragma once

// Experiment drivers behind the command-line tool.  Each command turns a
// resolved RunConfig into a single output document (CSV or JSON) whose
// header carries the full configuration and the artifact version.

#include "roqam/greens.hpp"
#include "roqam/io.hpp"
#include "roqam/qsvt_costing.hpp"
#include "roqam/roqam_costing.hpp"

#include <cstdio>
#include <limits>
#include <optional>

namespace roqam {

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
    // model
    double u = 5.0;
    int n_bath = 1;
    double bandwidth = 4.0;
    // frequency grid; NaN bounds and n_omega = 0 select the axis defaults
    Axis axis = Axis::real;
    double gamma = 0.4;
    double omega_min = std::numeric_limits<double>::quiet_NaN();
    double omega_max = std::numeric_limits<double>::quiet_NaN();
    int n_omega = 0;
    // estimator
    int r = 3;
    int r_max = 8;
    std::vector<int> depths{1, 2, 3};
    double delta1 = 0.0;
    std::vector<double> deltas{1e-3, 1e-5, 1e-7};
    Budget budget = Budget::EB3;
    GeneratorKind generator = GeneratorKind::time_evolution;
    double dt = 0.0;  // 0 = auto
    double lam = 1.0;
    std::string repair = "auto";
    std::uint64_t seed = 0;
    int n_seeds = 20;
    std::optional<double> beta;
    int n_dt = 30;
    // resources
    std::string method = "compare";
    std::vector<int> n_bath_list{1, 2, 3};
    double error_target = 0.01;
    double p_fail = 0.05;
    bool calibrate = true;
    // output
    std::string out;
    std::string format = "csv";

    SiamParams model() const { return two_site_dmft_params(u, n_bath, bandwidth); }

    Repair resolved_repair() const {
        if (repair == "auto")
            return generator == GeneratorKind::scaled_hamiltonian ? Repair::hermitian_projection
                                                                  : Repair::unitary_projection;
        return parse_repair(repair);
    }

    FrequencyGrid grid() const {
        if (axis == Axis::real) {
            const double half = u / 2.0 + 4.0;
            const double lo = std::isnan(omega_min) ? -half : omega_min;
            const double hi = std::isnan(omega_max) ? half : omega_max;
            return real_grid(lo, hi, static_cast<std::size_t>(n_omega > 0 ? n_omega : 1000), gamma);
        }
        return imaginary_grid(std::isnan(omega_max) ? 10.0 : omega_max,
                              static_cast<std::size_t>(n_omega > 0 ? n_omega : 200));
    }

    RoqamConfig estimator(int depth, double delta, std::uint64_t seed_value, Budget b) const {
        RoqamConfig c;
        c.gen = {generator, dt, lam};
        c.noise.budget = b;
        c.noise.delta_base = delta;
        c.noise.seed = seed_value;
        c.noise.r = depth;
        c.r = depth;
        c.repair = resolved_repair();
        return c;
    }

    void validate() const {
        require(std::isfinite(u) && u >= 0.0, "u", "must be >= 0");
        require(n_bath >= 1 && n_bath <= 6, "n_bath", "must lie in 1..6 for dense diagonalization");
        require(bandwidth > 0.0, "bandwidth", "must be positive");
        if (axis == Axis::real) require(gamma > 0.0 && std::isfinite(gamma), "gamma", "must be > 0 on the real axis");
        require(n_omega >= 0, "n_omega", "must be >= 0");
        require(r >= 1, "r", "must be >= 1");
        require(r_max >= 1, "r_max", "must be >= 1");
        require(!depths.empty(), "depths", "must list at least one depth");
        for (int d : depths) require(d >= 1, "depths", "entries must be >= 1");
        require(delta1 >= 0.0 && std::isfinite(delta1), "delta1", "must be >= 0");
        for (double d : deltas) require(d > 0.0 && std::isfinite(d), "deltas", "entries must be positive");
        require(dt >= 0.0 && std::isfinite(dt), "dt", "must be >= 0 (0 selects auto)");
        require(lam > 0.0 && std::isfinite(lam), "lam", "must be positive");
        (void)resolved_repair();
        require(n_seeds >= 1, "n_seeds", "must be >= 1");
        if (beta) require(*beta >= 0.0 && std::isfinite(*beta), "beta", "must be >= 0");
        require(n_dt >= 1, "n_dt", "must be >= 1");
        require(method == "roqam" || method == "qsvt" || method == "compare", "method",
                "expected roqam, qsvt or compare");
        for (int nb : n_bath_list) require(nb >= 1 && nb <= 6, "n_bath_list", "entries must lie in 1..6");
        require(error_target > 0.0 && error_target < 1.0, "error_target", "must lie in (0, 1)");
        require(p_fail > 0.0 && p_fail < 1.0, "p_fail", "must lie in (0, 1)");
        require(format == "csv" || format == "json", "format", "expected csv or json");
    }

    std::vector<std::pair<std::string, std::string>> to_pairs() const;
};

namespace detail {

inline std::string join_ints(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
    return out;
}

inline std::string maybe_double(double x) { return std::isnan(x) ? "auto" : format_double(x); }

inline long long parse_integer(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(key, "not an integer: '" + s + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& s) {
    const long long v = parse_integer(key, s);
    require(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max(), key.c_str(),
            "out of range");
    return static_cast<int>(v);
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& s) {
    std::vector<int> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) out.push_back(parse_int(key, item));
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ValidationError(key, "expected true or false, got '" + s + "'");
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>> RunConfig::to_pairs() const {
    return {
        {"u", format_double(u)},
        {"n_bath", std::to_string(n_bath)},
        {"bandwidth", format_double(bandwidth)},
        {"axis", to_string(axis)},
        {"gamma", format_double(gamma)},
        {"omega_min", detail::maybe_double(omega_min)},
        {"omega_max", detail::maybe_double(omega_max)},
        {"n_omega", n_omega > 0 ? std::to_string(n_omega) : "auto"},
        {"r", std::to_string(r)},
        {"r_max", std::to_string(r_max)},
        {"depths", detail::join_ints(depths)},
        {"delta1", format_double(delta1)},
        {"deltas", join_doubles(deltas)},
        {"budget", to_string(budget)},
        {"generator", to_string(generator)},
        {"dt", dt > 0.0 ? format_double(dt) : "auto"},
        {"lam", format_double(lam)},
        {"repair", repair},
        {"seed", std::to_string(seed)},
        {"n_seeds", std::to_string(n_seeds)},
        {"beta", beta ? format_double(*beta) : "none"},
        {"n_dt", std::to_string(n_dt)},
        {"method", method},
        {"n_bath_list", detail::join_ints(n_bath_list)},
        {"error_target", format_double(error_target)},
        {"p_fail", format_double(p_fail)},
        {"calibrate", calibrate ? "true" : "false"},
        {"format", format},
    };
}

/// Applies `key = value` pairs on top of cfg; unknown keys are rejected.
inline void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    using namespace detail;
    auto opt_double = [](const std::string& k, const std::string& v) {
        return v == "auto" ? std::numeric_limits<double>::quiet_NaN() : parse_double(k, v);
    };
    for (const auto& [k, v] : kv) {
        if (k == "u") cfg.u = parse_double(k, v);
        else if (k == "n_bath") cfg.n_bath = parse_int(k, v);
        else if (k == "bandwidth") cfg.bandwidth = parse_double(k, v);
        else if (k == "axis") cfg.axis = parse_axis(v);
        else if (k == "gamma") cfg.gamma = parse_double(k, v);
        else if (k == "omega_min") cfg.omega_min = opt_double(k, v);
        else if (k == "omega_max") cfg.omega_max = opt_double(k, v);
        else if (k == "n_omega") cfg.n_omega = v == "auto" ? 0 : parse_int(k, v);
        else if (k == "r") cfg.r = parse_int(k, v);
        else if (k == "r_max") cfg.r_max = parse_int(k, v);
        else if (k == "depths") cfg.depths = parse_int_list(k, v);
        else if (k == "delta1") cfg.delta1 = parse_double(k, v);
        else if (k == "deltas") cfg.deltas = parse_double_list(k, v);
        else if (k == "budget") cfg.budget = parse_budget(v);
        else if (k == "generator") cfg.generator = parse_generator(v);
        else if (k == "dt") cfg.dt = v == "auto" ? 0.0 : parse_double(k, v);
        else if (k == "lam") cfg.lam = parse_double(k, v);
        else if (k == "repair") cfg.repair = v;
        else if (k == "seed") {
            const long long s = parse_integer(k, v);
            require(s >= 0, "seed", "must be >= 0");
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (k == "n_seeds") cfg.n_seeds = parse_int(k, v);
        else if (k == "beta") cfg.beta = v == "none" ? std::nullopt : std::optional<double>(parse_double(k, v));
        else if (k == "n_dt") cfg.n_dt = parse_int(k, v);
        else if (k == "method") cfg.method = v;
        else if (k == "n_bath_list") cfg.n_bath_list = parse_int_list(k, v);
        else if (k == "error_target") cfg.error_target = parse_double(k, v);
        else if (k == "p_fail") cfg.p_fail = parse_double(k, v);
        else if (k == "calibrate") cfg.calibrate = parse_bool(k, v);
        else if (k == "format") cfg.format = v;
        else if (k == "out") cfg.out = v;
        else throw ValidationError(k, "unknown configuration key");
    }
}

inline std::string to_key_values(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.to_pairs()) out += k + " = " + v + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Tabular output

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
    Json summary = Json::object();

    void add_row(std::vector<Json> row) {
        if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
        rows.push_back(std::move(row));
    }
};

namespace detail {

inline std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

/// JSON has no inf or NaN; those become strings.
inline Json json_number(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? Json("nan") : Json(x > 0 ? "inf" : "-inf");
}

}  // namespace detail

struct Document {
    std::string command;
    RunConfig config;
    std::optional<Table> table;
    Json payload;  // used when there is no table

    std::string render() const {
        if (config.format == "json") {
            Json j;
            j["artifact"] = kVersion;
            j["command"] = command;
            j["config"] = Json::object();
            for (const auto& [k, v] : config.to_pairs()) j["config"][k] = v;
            if (table) {
                j["summary"] = table->summary;
                j["columns"] = table->columns;
                j["rows"] = Json::array();
                for (const auto& row : table->rows) j["rows"].push_back(row);
            } else {
                j["result"] = payload;
            }
            return j.dump(2) + '\n';
        }
        std::string out = comment_header(command, config.to_pairs());
        if (!table) return out + "# result = " + payload.dump() + '\n';
        for (const auto& [k, v] : table->summary.items()) out += "# summary " + k + " = " + detail::csv_cell(v) + '\n';
        for (std::size_t i = 0; i < table->columns.size(); ++i) out += (i ? "," : "") + table->columns[i];
        out += '\n';
        for (const auto& row : table->rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + detail::csv_cell(row[i]);
            out += '\n';
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

inline double safe_error(const GreensProblem& pr, const FrequencyGrid& grid, const RoqamConfig& rc,
                         const GreensEstimate& exact) {
    try {
        return mean_relative_error(roqam_greens_diagonal(pr, 0, grid, rc), exact);
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::infinity();
    }
}

/// Median error over n_seeds consecutive seeds starting at cfg.seed.
inline double median_error(const RunConfig& cfg, const GreensProblem& pr, const FrequencyGrid& grid,
                           const GreensEstimate& exact, int depth, double delta, Budget b) {
    if (delta == 0.0) return safe_error(pr, grid, cfg.estimator(depth, 0.0, cfg.seed, b), exact);
    std::vector<double> errs;
    for (int s = 0; s < cfg.n_seeds; ++s)
        errs.push_back(safe_error(pr, grid, cfg.estimator(depth, delta, cfg.seed + std::uint64_t(s), b), exact));
    return median(errs);
}

inline std::string delta_label(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0e", d);
    return buf;
}

inline double mean_abs(const std::vector<cplx>& xs) {
    double s = 0.0;
    for (const auto& x : xs) s += std::abs(x);
    return xs.empty() ? 0.0 : s / double(xs.size());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

inline Document cmd_spectral(const RunConfig& cfg) {
    cfg.validate();
    const auto ctx = make_context(cfg.model());
    const auto pr = ctx.zero_temperature();
    const auto grid = cfg.grid();
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);

    Table t;
    t.columns = {"omega", "A_exact", "re_exact", "im_exact"};
    std::vector<GreensEstimate> est;
    for (int d : cfg.depths) {
        est.push_back(roqam_greens_diagonal(pr, 0, grid, cfg.estimator(d, cfg.delta1, cfg.seed, cfg.budget)));
        const std::string s = "r" + std::to_string(d);
        t.columns.insert(t.columns.end(), {"A_" + s, "re_" + s, "im_" + s});
        t.summary["error_" + s] = detail::json_number(mean_relative_error(est.back(), exact));
    }
    const bool real_axis = grid.axis == Axis::real;
    const auto a_exact = spectral_function(exact);
    std::vector<std::vector<double>> a_est;
    for (const auto& e : est) a_est.push_back(spectral_function(e));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<Json> row{grid.points[i], real_axis ? Json(a_exact[i]) : Json(), exact.values[i].real(),
                              exact.values[i].imag()};
        for (std::size_t k = 0; k < est.size(); ++k) {
            row.push_back(real_axis ? Json(a_est[k][i]) : Json());
            row.push_back(est[k].values[i].real());
            row.push_back(est[k].values[i].imag());
        }
        t.add_row(std::move(row));
    }
    return {"spectral", cfg, t, {}};
}

inline Document cmd_convergence(const RunConfig& cfg) {
    cfg.validate();
    const auto ctx = make_context(cfg.model());
    const auto pr = ctx.zero_temperature();
    const auto grid = cfg.grid();
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);

    Table t;
    t.columns = {"depth", "error_noiseless"};
    for (double d : cfg.deltas) t.columns.push_back("error_seeded_median_" + detail::delta_label(d));
    for (int r = 1; r <= cfg.r_max; ++r) {
        std::vector<Json> row{r, detail::json_number(detail::median_error(cfg, pr, grid, exact, r, 0.0, cfg.budget))};
        for (double d : cfg.deltas)
            row.push_back(detail::json_number(detail::median_error(cfg, pr, grid, exact, r, d, cfg.budget)));
        t.add_row(std::move(row));
    }
    return {"convergence", cfg, t, {}};
}

inline Document cmd_timestep_scan(const RunConfig& cfg) {
    cfg.validate();
    require(cfg.generator == GeneratorKind::time_evolution, "generator", "timestep scan needs time_evolution");
    const auto ctx = make_context(cfg.model());
    const auto pr = ctx.zero_temperature();
    const auto grid = cfg.grid();
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    const double bound = max_timestep(operator_norm(ctx.spectrum) / cfg.lam);

    Table t;
    t.columns = {"dt", "dt_over_bound", "error"};
    t.summary["max_timestep"] = bound;
    for (int k = 1; k <= cfg.n_dt; ++k) {
        RunConfig c = cfg;
        c.dt = 1.5 * bound * double(k) / double(cfg.n_dt);
        t.add_row({c.dt, c.dt / bound,
                   detail::json_number(detail::median_error(c, pr, grid, exact, cfg.r, cfg.delta1, cfg.budget))});
    }
    return {"timestep-scan", cfg, t, {}};
}

inline Document cmd_budget_compare(const RunConfig& cfg) {
    cfg.validate();
    const auto ctx = make_context(cfg.model());
    const auto pr = ctx.zero_temperature();
    const auto grid = cfg.grid();
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    const std::vector<double> ds = cfg.delta1 > 0.0 ? std::vector<double>{cfg.delta1} : cfg.deltas;

    Table t;
    t.columns = {"delta1", "EB1", "EB2", "EB3"};
    for (double d : ds) {
        std::vector<Json> row{d};
        for (Budget b : {Budget::EB1, Budget::EB2, Budget::EB3})
            row.push_back(detail::json_number(detail::median_error(cfg, pr, grid, exact, cfg.r, d, b)));
        t.add_row(std::move(row));
    }
    return {"budget-compare", cfg, t, {}};
}

inline Document cmd_thermal(const RunConfig& cfg) {
    cfg.validate();
    require(cfg.beta.has_value(), "beta", "thermal runs need beta");
    const double beta = *cfg.beta;
    const auto ctx = make_context(cfg.model());
    const auto grid = cfg.grid();
    const auto est = thermal_greens(ctx, beta, 0, 0, grid, cfg.estimator(cfg.r, cfg.delta1, cfg.seed, cfg.budget));
    const bool with_trace = cfg.n_bath <= 2;
    const bool real_axis = grid.axis == Axis::real;
    const auto a = real_axis ? spectral_function(est) : std::vector<double>(grid.size(), 0.0);

    Table t;
    t.columns = {"omega", "re_G", "im_G", "A"};
    if (with_trace) t.columns.insert(t.columns.end(), {"re_trace", "im_trace"});
    t.columns.insert(t.columns.end(), {"re_zero_t", "im_zero_t"});
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx z = grid.z(i);
        std::vector<Json> row{grid.points[i], est.values[i].real(), est.values[i].imag(),
                              real_axis ? Json(a[i]) : Json()};
        if (with_trace) {
            const cplx tr = exact_thermal_greens(ctx.spectrum, beta, 0, 0, z);
            row.push_back(tr.real());
            row.push_back(tr.imag());
            num += std::abs(est.values[i] - tr);
            den += std::abs(tr);
        }
        const cplx g0 = exact_greens(ctx.spectrum, ctx.ground, 0, 0, z);
        row.push_back(g0.real());
        row.push_back(g0.imag());
        t.add_row(std::move(row));
    }
    t.summary["depth"] = est.depth.value_or(0);
    if (with_trace) t.summary["error_vs_trace"] = detail::json_number(num / den);
    return {"thermal", cfg, t, {}};
}

// ---------------------------------------------------------------------------
// Resources

struct Calibration {
    int r = 1;
    double delta1 = 0.0;
    double noiseless_error = 0.0;
    double median_error = 0.0;
};

/// Smallest depth whose noiseless error is below half the target, then the
/// largest delta1 on a half-decade ladder whose median error meets the target.
inline Calibration calibrate_roqam(const RunConfig& cfg, const GreensProblem& pr, const FrequencyGrid& grid,
                                   const GreensEstimate& exact) {
    Calibration c;
    if (!cfg.calibrate) {
        c.r = cfg.r;
        c.delta1 = cfg.delta1;
        c.noiseless_error = detail::median_error(cfg, pr, grid, exact, c.r, 0.0, cfg.budget);
        c.median_error = detail::median_error(cfg, pr, grid, exact, c.r, c.delta1, cfg.budget);
        return c;
    }
    bool found = false;
    for (int r = 1; r <= cfg.r_max; ++r) {
        c.noiseless_error = detail::median_error(cfg, pr, grid, exact, r, 0.0, cfg.budget);
        if (c.noiseless_error <= 0.5 * cfg.error_target) {
            c.r = r;
            found = true;
            break;
        }
    }
    if (!found) throw NumericalError("no depth up to r_max reaches half the error target noiselessly");
    for (int k = 2; k <= 20; ++k) {
        const double d = std::pow(10.0, -0.5 * k);
        const double e = detail::median_error(cfg, pr, grid, exact, c.r, d, cfg.budget);
        if (e <= cfg.error_target) {
            c.delta1 = d;
            c.median_error = e;
            return c;
        }
    }
    throw NumericalError("no delta1 down to 1e-10 meets the error target");
}

inline Json to_json(const Calibration& c) {
    return Json{{"r", c.r},
                {"delta1", c.delta1},
                {"noiseless_error", detail::json_number(c.noiseless_error)},
                {"median_error", detail::json_number(c.median_error)}};
}

struct RoqamResources {
    Calibration calibration;
    RoqamCostResult cost;
};

inline RoqamResources roqam_resources(const RunConfig& cfg, const ModelContext& ctx) {
    RunConfig c = cfg;
    c.axis = Axis::real;
    const auto pr = ctx.zero_temperature();
    const auto grid = c.grid();
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    RoqamResources out;
    out.calibration = calibrate_roqam(c, pr, grid, exact);
    RoqamCostConfig rc;
    rc.r = out.calibration.r;
    rc.delta1 = out.calibration.delta1;
    rc.budget = cfg.budget;
    rc.dt = cfg.dt;
    rc.options.p_fail = cfg.p_fail;
    out.cost = roqam_total_t(ctx.h, ctx.spectrum, ctx.ground, rc);
    return out;
}

/// QSVT sweep at a per-point absolute error of error_target * mean|G|.
inline QsvtSweep qsvt_resources(const RunConfig& cfg, const ModelContext& ctx, const FrequencyGrid& grid) {
    const auto exact = exact_greens_estimate(ctx.zero_temperature(), 0, 0, grid);
    const double eps_abs = cfg.error_target * detail::mean_abs(exact.values);
    std::vector<cplx> zs;
    for (std::size_t i = 0; i < grid.size(); ++i) zs.push_back(grid.z(i));
    QsvtCostOptions opt;
    opt.p_fail = cfg.p_fail;
    auto sw = qsvt_sweep(make_qsvt_model(ctx.h, ctx.spectrum, ctx.ground), zs, eps_abs, opt);
    sw.total.context["eps_abs"] = format_double(eps_abs);
    return sw;
}

inline Document cmd_resources(const RunConfig& cfg) {
    cfg.validate();
    Document doc{"resources", cfg, std::nullopt, {}};
    if (cfg.method == "roqam") {
        const auto ctx = make_context(cfg.model());
        const auto res = roqam_resources(cfg, ctx);
        if (cfg.format == "csv") {
            Table t;
            t.columns = {"branch", "l", "delta_l", "order", "steps", "eps_qae", "eps_trot", "eps_syn", "t_count"};
            for (const auto& [b, p] : res.cost.plans)
                t.add_row({b, p.l, p.delta_l, p.trotter.order, p.trotter.steps, p.eps_qae, p.eps_trot, p.eps_syn,
                           p.t_count});
            t.summary["r"] = res.calibration.r;
            t.summary["delta1"] = res.calibration.delta1;
            t.summary["t_count"] = res.cost.report.t_count;
            doc.table = t;
        } else {
            Json plans = Json::array();
            for (const auto& [b, p] : res.cost.plans) {
                Json j = to_json(p);
                j["branch"] = b;
                plans.push_back(j);
            }
            doc.payload = {{"calibration", to_json(res.calibration)},
                           {"report", to_json(res.cost.report)},
                           {"plans", plans}};
        }
        return doc;
    }
    if (cfg.method == "qsvt") {
        const auto ctx = make_context(cfg.model());
        const auto sw = qsvt_resources(cfg, ctx, cfg.grid());
        if (cfg.format == "csv") {
            Table t;
            t.columns = {"omega", "kappa", "degree", "t_count"};
            const auto grid = cfg.grid();
            for (std::size_t i = 0; i < sw.points.size(); ++i) {
                const auto& p = sw.points[i];
                t.add_row({grid.points[i], p.kappa, p.degree, p.report.feasible ? Json(p.report.t_count) : Json()});
            }
            t.summary["total_t"] = sw.total.t_count;
            t.summary["hardest_t"] = sw.hardest.report.t_count;
            t.summary["hardest_omega"] = grid.points[sw.hardest_index];
            t.summary["infeasible"] = sw.infeasible;
            doc.table = t;
        } else {
            doc.payload = {{"total", to_json(sw.total)}, {"hardest", to_json(sw.hardest.report)}};
        }
        return doc;
    }

    Table t;
    t.columns = {"n_bath", "roqam_t", "qsvt_total_100", "qsvt_total_1000", "qsvt_hardest", "ratio", "r", "delta1"};
    for (int nb : cfg.n_bath_list) {
        RunConfig c = cfg;
        c.n_bath = nb;
        c.axis = Axis::real;
        const auto ctx = make_context(c.model());
        const auto ro = roqam_resources(c, ctx);
        c.n_omega = 100;
        const auto q100 = qsvt_resources(c, ctx, c.grid());
        c.n_omega = 1000;
        const auto q1000 = qsvt_resources(c, ctx, c.grid());
        const auto hardest = std::max(q100.hardest.report.t_count, q1000.hardest.report.t_count);
        t.add_row({nb, ro.cost.report.t_count, q100.total.t_count, q1000.total.t_count, hardest,
                   double(hardest) / double(ro.cost.report.t_count), ro.calibration.r, ro.calibration.delta1});
    }
    doc.table = t;
    return doc;
}

}  // namespace roqam
