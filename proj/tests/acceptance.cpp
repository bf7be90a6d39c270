// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "oracles.hpp"
#include "roqam/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace roqam;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Moments dense_moments(const CMatrix& u, const CVector& chi, int r) {
    Moments m;
    m.kind = MomentKind::unitary;
    const double n2 = chi.squaredNorm();
    CVector v = chi;
    for (int l = 0; l <= r; ++l) {
        m.m.push_back(chi.dot(v) / n2);
        m.deltas.push_back(0.0);
        v = u * v;
    }
    return m;
}

RoqamConfig noiseless(int r) {
    RoqamConfig c;
    c.r = r;
    return c;
}

double median_gf_error(const GreensProblem& pr, const FrequencyGrid& grid, const GreensEstimate& exact,
                       RoqamConfig cfg, double delta, int n_seeds) {
    std::vector<double> errs;
    for (int s = 0; s < n_seeds; ++s) {
        cfg.noise.delta_base = delta;
        cfg.noise.seed = static_cast<std::uint64_t>(s);
        errs.push_back(detail::safe_error(pr, grid, cfg, exact));
    }
    return median(errs);
}

// 1 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
    std::mt19937 rng(20240601);
    std::uniform_int_distribution<int> dim_d(4, 64), r_d(2, 12);
    double worst = 0.0;
    int mismatched_depth = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = dim_d(rng);
        const int r = std::min(r_d(rng), dim);
        const CMatrix h = oracle::random_hermitian(dim, rng);
        const double norm = diagonalize(h).eigenvalues.cwiseAbs().maxCoeff();
        const CMatrix u = oracle::unitary_from_hermitian(h, 0.9 * kPi / norm);
        const CVector chi = oracle::random_vector(dim, rng);
        const auto ref = arnoldi_standard(u, chi, r);
        const auto got = arnoldi_from_moments(dense_moments(u, chi, r), r);
        if (got.projected.r() != ref.projected.r()) {
            ++mismatched_depth;
            continue;
        }
        worst = std::max(worst, max_abs(got.projected.entries - ref.projected.entries));
    }
    return {worst < 1e-8 && mismatched_depth == 0,
            "max entry difference " + sci(worst) + ", depth mismatches " + std::to_string(mismatched_depth)};
}

// 2 -------------------------------------------------------------------------
Outcome breakdown_exactness() {
    double worst = 0.0;
    std::string where;
    for (int nb : {1, 2}) {
        const auto ctx = make_context(two_site_dmft_params(5.0, nb));
        const auto pr = ctx.zero_temperature();
        for (const auto& grid : {default_real_grid(5.0, 0.4), default_imaginary_grid()}) {
            const auto exact = exact_greens_estimate(pr, 0, 0, grid);
            const auto est = roqam_greens_diagonal(pr, 0, grid, noiseless(16));
            const double e = mean_relative_error(est, exact);
            where += " n_bath=" + std::to_string(nb) + "/" + to_string(grid.axis) + ":" + sci(e);
            worst = std::max(worst, e);
        }
    }
    return {worst < 1e-7, "relative-L1" + where};
}

// 3 -------------------------------------------------------------------------
Outcome depth_convergence() {
    const auto ctx = make_context(two_site_dmft_params(5.0, 4));
    const auto pr = ctx.zero_temperature();
    const auto grid = default_real_grid(5.0, 0.4);
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    std::vector<double> e;
    for (int d : {1, 2, 3}) e.push_back(mean_relative_error(roqam_greens_diagonal(pr, 0, grid, noiseless(d)), exact));
    const bool decreasing = e[0] > e[1] && e[1] > e[2];
    return {e[2] < 0.01 && decreasing,
            "errors r1=" + sci(e[0]) + " r2=" + sci(e[1]) + " r3=" + sci(e[2]) +
                (decreasing ? "" : "; not strictly decreasing")};
}

// 4 -------------------------------------------------------------------------
Outcome noise_floor() {
    const auto ctx = make_context(two_site_dmft_params(5.0, 4));
    const auto pr = ctx.zero_temperature();
    const auto grid = default_real_grid(5.0, 0.4, 400);
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    const int r_max = 6;
    std::vector<double> clean;
    for (int r = 1; r <= r_max; ++r) clean.push_back(detail::safe_error(pr, grid, noiseless(r), exact));

    bool tracks = true, plateaus = true;
    std::vector<double> floors;
    std::string text;
    for (double d : {1e-3, 1e-5, 1e-7}) {
        std::vector<double> med;
        for (int r = 1; r <= r_max; ++r) med.push_back(median_gf_error(pr, grid, exact, noiseless(r), d, 20));
        tracks = tracks && std::abs(med[0] - clean[0]) <= 0.1 * clean[0];
        plateaus = plateaus && std::max(med[r_max - 1], med[r_max - 2]) <= 3.0 * std::min(med[r_max - 1], med[r_max - 2]);
        floors.push_back(med[r_max - 1]);
        text += " floor(" + sci(d) + ")=" + sci(med[r_max - 1]);
    }
    const bool ordered = floors[0] >= 3.0 * floors[1] && floors[1] >= 3.0 * floors[2];
    return {tracks && plateaus && ordered, "r1 tracks noiseless: " + std::string(tracks ? "yes" : "no") +
                                               ", plateau: " + (plateaus ? "yes" : "no") + "," + text};
}

// 5 -------------------------------------------------------------------------
Outcome structure_under_noise() {
    const auto ctx = make_context(two_site_dmft_params(5.0, 2));
    const CVector chi = apply_ladder(LadderKind::create, 0, ctx.ground.psi0);
    const auto mu = spectral_measure(ctx.spectrum, chi);
    int ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
        NoiseModel nm;
        nm.delta_base = 0.1;
        nm.budget = Budget::EB1;
        nm.seed = static_cast<std::uint64_t>(seed);
        const auto rep = run_roqam(mu, {}, nm, 6, Repair::none);
        const CMatrix& u = rep.u_raw.entries;
        bool good = true;
        for (Eigen::Index i = 0; i < u.rows(); ++i)
            for (Eigen::Index j = 0; j < u.cols(); ++j) {
                if (i > j + 1) good = good && u(i, j) == cplx(0.0, 0.0);
                if (i == j + 1) good = good && u(i, j).imag() == 0.0 && u(i, j).real() >= 0.0;
            }
        ok += good;
    }
    return {ok == 100, std::to_string(ok) + "/100 seeds upper Hessenberg with real nonnegative subdiagonal"};
}

// 6 -------------------------------------------------------------------------
Outcome sum_rule_and_symmetry() {
    const auto ctx = make_context(two_site_dmft_params(5.0, 2));
    const auto pr = ctx.zero_temperature();
    const auto wide = real_grid(-200.0, 200.0, 40001, 0.1);
    const double integral = trapezoid(wide.points, spectral_function(exact_greens_estimate(pr, 0, 0, wide)));

    const auto grid = real_grid(-6.5, 6.5, 261, 0.4);
    const auto a = spectral_function(exact_greens_estimate(pr, 0, 0, grid));
    const std::size_t n = grid.size();
    double exact_asym = 0.0;
    for (std::size_t i = 0; i < n; ++i) exact_asym = std::max(exact_asym, std::abs(a[i] - a[n - 1 - i]));

    // Noise scale of A: delta_r / (pi gamma) with delta_r the last-iterate budget.
    const int r = 3;
    const double d1 = 1e-3;
    const double scale = r * d1 / (kPi * grid.gamma);
    double est_asym = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        RoqamConfig cfg = noiseless(r);
        cfg.noise.delta_base = d1;
        cfg.noise.seed = static_cast<std::uint64_t>(seed);
        const auto ae = spectral_function(roqam_greens_diagonal(pr, 0, grid, cfg));
        for (std::size_t i = 0; i < n; ++i) est_asym = std::max(est_asym, std::abs(ae[i] - ae[n - 1 - i]));
    }
    const bool pass = std::abs(integral - 1.0) < 1e-3 && exact_asym < 1e-10 && est_asym < 5.0 * scale;
    return {pass, "integral " + sci(integral) + ", exact asymmetry " + sci(exact_asym) + ", estimate asymmetry " +
                      sci(est_asym) + " vs 5*scale " + sci(5.0 * scale)};
}

// 7 -------------------------------------------------------------------------
Outcome thermal_equivalence() {
    const auto ctx = make_context(two_site_dmft_params(5.0, 1));
    const auto grid = default_real_grid(5.0, 0.4, 300);
    double worst = 0.0;
    std::string text;
    for (double beta : {0.0, 1.0, 10.0}) {
        const auto est = thermal_greens(ctx, beta, 0, 0, grid, noiseless(12));
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const cplx tr = exact_thermal_greens(ctx.spectrum, beta, 0, 0, grid.z(i));
            num += std::abs(est.values[i] - tr);
            den += std::abs(tr);
        }
        worst = std::max(worst, num / den);
        text += " beta=" + sci(beta) + ":" + sci(num / den);
    }
    const auto& ev = ctx.spectrum.eigenvalues;
    double gap = 0.0;
    for (Eigen::Index k = 1; k < ev.size() && gap == 0.0; ++k)
        if (ev(k) - ev(0) > 1e-9) gap = ev(k) - ev(0);
    const double beta_cold = 41.0 / gap;
    const auto cold = thermal_greens(ctx, beta_cold, 0, 0, grid, noiseless(12));
    const auto zero_t = exact_greens_estimate(ctx.zero_temperature(), 0, 0, grid);
    const double cold_err = mean_relative_error(cold, zero_t);
    return {worst < 1e-7 && cold_err < 1e-6, "TFD vs trace" + text + "; beta*gap=41 vs zero-T " + sci(cold_err)};
}

// 8 -------------------------------------------------------------------------
Outcome polynomial_bound() {
    double worst_ratio = 0.0, worst_sup = 0.0;
    for (double kappa : {5.0, 10.0, 20.0})
        for (double eps : {0.1, 0.01}) {
            const MatrixInversionPoly p(inversion_poly_params(kappa, eps));
            for (int i = 0; i < 1000; ++i) {
                const double x = 1.0 / kappa + (1.0 - 1.0 / kappa) * i / 999.0;
                worst_ratio = std::max(worst_ratio, std::abs(p(x) - 1.0 / (2.0 * kappa * x)) / (eps / (2.0 * kappa)));
            }
            for (int i = 0; i <= 2000; ++i) worst_sup = std::max(worst_sup, std::abs(p(-1.0 + i / 1000.0)));
        }
    return {worst_ratio <= 1.0 && worst_sup <= 1.0 + 1e-9,
            "worst error / bound " + sci(worst_ratio) + ", sup|p| " + sci(worst_sup)};
}

// 9 -------------------------------------------------------------------------
Outcome lambda_scaling() {
    const auto ctx = make_context(two_site_dmft_params(5.0, 1));
    const auto pr = ctx.zero_temperature();
    const auto grid = default_real_grid(5.0, 0.4, 300);
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    const double bound = max_timestep(operator_norm(ctx.spectrum));

    std::vector<cplx> ref;
    double spread = 0.0;
    for (double lam : {1.0, 4.0, 16.0}) {
        RoqamConfig cfg = noiseless(3);
        cfg.gen = {GeneratorKind::time_evolution, 0.9 * bound * lam, lam};
        const auto g = roqam_greens_diagonal(pr, 0, grid, cfg);
        if (ref.empty()) ref = g.values;
        for (std::size_t i = 0; i < grid.size(); ++i) spread = std::max(spread, std::abs(g.values[i] - ref[i]));
    }

    std::vector<double> meds;
    for (double lam : {1.0, 4.0, 16.0}) {
        RoqamConfig cfg = noiseless(2);
        cfg.gen = {GeneratorKind::scaled_hamiltonian, 0.0, lam};
        cfg.repair = Repair::hermitian_projection;
        meds.push_back(median_gf_error(pr, grid, exact, cfg, 1e-4, 20));
    }
    const bool increasing = meds[0] < meds[1] && meds[1] < meds[2];
    return {spread < 1e-9 && increasing, "time-evolution spread " + sci(spread) + "; scaled-Hamiltonian medians " +
                                             sci(meds[0]) + ", " + sci(meds[1]) + ", " + sci(meds[2])};
}

// 10 ------------------------------------------------------------------------
Outcome resource_advantage() {
    RunConfig cfg;
    cfg.method = "compare";
    cfg.n_bath_list = {1, 2, 3};
    cfg.error_target = 0.01;
    const auto doc = cmd_resources(cfg);
    bool pass = true;
    std::string text = "hardest-frequency QSVT / ROQAM T ratios:";
    const auto& cols = doc.table->columns;
    const auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin());
    };
    for (const auto& row : doc.table->rows) {
        const double ratio = row[col("ratio")].get<double>();
        pass = pass && ratio >= 10.0;
        text += " n_bath=" + std::to_string(row[col("n_bath")].get<int>()) + ":" + sci(ratio);
    }
    return {pass, text};
}

// 11 ------------------------------------------------------------------------
Outcome budget_equivalence() {
    RunConfig cfg;
    cfg.delta1 = 1e-4;
    cfg.n_seeds = 20;
    cfg.n_omega = 400;
    const auto doc = cmd_budget_compare(cfg);
    const auto& row = doc.table->rows.at(0);
    const double e1 = row[1].get<double>(), e2 = row[2].get<double>(), e3 = row[3].get<double>();
    const double spread = std::max({e1, e2, e3}) / std::min({e1, e2, e3});
    return {spread <= 3.0, "medians EB1=" + sci(e1) + " EB2=" + sci(e2) + " EB3=" + sci(e3) + ", max/min " + sci(spread)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // 0 = no runtime limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "moment Arnoldi matches dense Arnoldi", 10, oracle_equivalence},
        {2, "exact at breakdown", 30, breakdown_exactness},
        {3, "depth convergence on n_bath=4", 60, depth_convergence},
        {4, "noise floors ordered by delta1", 600, noise_floor},
        {5, "Hessenberg structure under delta=0.1", 0, structure_under_noise},
        {6, "sum rule and particle-hole symmetry", 0, sum_rule_and_symmetry},
        {7, "thermofield double matches trace", 120, thermal_equivalence},
        {8, "inversion polynomial bound", 60, polynomial_bound},
        {9, "lambda scaling", 0, lambda_scaling},
        {10, "T-count advantage over QSVT", 900, resource_advantage},
        {11, "error budgets agree", 0, budget_equivalence},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0.0 && secs > c.limit_s) {
            o.pass = false;
            o.detail += "; over the " + sci(c.limit_s) + " s limit";
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " ("
                  << sci(secs) << " s)" << std::endl;
    }
    std::cout << (criteria.size() - std::size_t(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
