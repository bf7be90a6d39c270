#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace roqam;

namespace {

struct Siam1 {
    ModelContext ctx = make_context(two_site_dmft_params(5.0, 1));
    CVector chi = apply_ladder(LadderKind::create, 0, ctx.ground.psi0);
};

double gf_error(const GreensProblem& pr, const FrequencyGrid& grid, const RoqamConfig& cfg,
                const GreensEstimate& exact) {
    return mean_relative_error(roqam_greens_diagonal(pr, 0, grid, cfg), exact);
}

}  // namespace

TEST(ErrorBudget, Schedules) {
    NoiseModel m;
    m.delta_base = 1e-5;
    m.r = 4;
    m.budget = Budget::EB3;
    EXPECT_DOUBLE_EQ(error_budget(m)[3], 4e-5);
    m.budget = Budget::EB1;
    for (double d : error_budget(m)) EXPECT_DOUBLE_EQ(d, 1e-5);
    m.budget = Budget::EB2;
    m.r = 3;
    const auto eb2 = error_budget(m);
    EXPECT_NEAR(eb2[0], 1e-5, 1e-20);
    EXPECT_NEAR(eb2[1], 16.0 / 12.0 * 1e-5, 1e-18);
    EXPECT_NEAR(eb2[2], 16.0 / 6.0 * 1e-5, 1e-18);
    m.r = 0;
    EXPECT_THROW(error_budget(m), ValidationError);
}

TEST(HessenbergCount, BruteForce) {
    EXPECT_EQ(hessenberg_nonzero_count(3), 8);
    EXPECT_EQ(hessenberg_nonzero_count(5), 19);
    for (int r = 1; r <= 8; ++r) {
        int count = 0;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) count += i <= j + 1;
        EXPECT_EQ(hessenberg_nonzero_count(r), count) << "r=" << r;
    }
}

TEST(MaxTimestep, Examples) {
    EXPECT_DOUBLE_EQ(max_timestep(kPi), 1.0);
    EXPECT_THROW(max_timestep(0.0), ValidationError);
    // eigenvalues +-1: dt = pi + 0.1 folds the phase of +1 onto the wrong branch
    CMatrix h = CMatrix::Zero(2, 2);
    h.diagonal() << 1.0, -1.0;
    for (double dt : {kPi - 0.1, kPi + 0.1}) {
        const CMatrix u = oracle::unitary_from_hermitian(h, dt);
        const auto ev = diagonalize(project_to_hermitian(hamiltonian_from_u(u, dt))).eigenvalues;
        if (dt < kPi) {
            EXPECT_NEAR(ev(0), -1.0, 1e-9);
            EXPECT_NEAR(ev(1), 1.0, 1e-9);
        } else {
            // each phase wraps across pi and lands at the mirrored energy
            EXPECT_NEAR(ev(1), (kPi - 0.1) / (kPi + 0.1), 1e-9);
            EXPECT_NEAR(ev(0), -(kPi - 0.1) / (kPi + 0.1), 1e-9);
        }
    }
}

TEST(EstimateMoments, NoiselessMatchesDense) {
    Siam1 s;
    GeneratorSpec gen{GeneratorKind::time_evolution, 0.3, 1.0};
    const auto mom = estimate_moments(s.ctx.h, s.chi, gen, NoiseModel{}, 6);
    const CMatrix u = oracle::unitary_from_hermitian(s.ctx.h.dense, 0.3);
    const CVector chi = s.chi / s.chi.norm();
    CVector v = chi;
    for (int l = 0; l <= 6; ++l) {
        EXPECT_LT(std::abs(mom.m[l] - chi.dot(v)), 1e-12) << "l=" << l;
        v = u * v;
    }
    EXPECT_EQ(mom.m[0], cplx(1.0, 0.0));
}

TEST(EstimateMoments, PurePhase) {
    CMatrix h = CMatrix::Zero(2, 2);
    h.diagonal() << 0.5, -1.0;
    CVector chi = CVector::Zero(2);
    chi(0) = 1.0;
    const auto mu = spectral_measure(diagonalize(h), chi);
    const auto mom = estimate_moments(mu, {GeneratorKind::time_evolution, 1.0, 1.0}, NoiseModel{}, 5);
    for (int l = 0; l <= 5; ++l) EXPECT_LT(std::abs(mom.m[l] - std::polar(1.0, -0.5 * l)), 1e-14);
}

TEST(EstimateMoments, ZeroBiasAndBounds) {
    Siam1 s;
    const auto mu = spectral_measure(s.ctx.spectrum, s.chi);
    const GeneratorSpec gen{GeneratorKind::time_evolution, 0.3, 1.0};
    const auto exact = estimate_moments(mu, gen, NoiseModel{}, 2);
    const double delta = 1e-3;
    cplx mean{};
    const int n = 10000;
    for (int seed = 0; seed < n; ++seed) {
        NoiseModel nm;
        nm.delta_base = delta;
        nm.seed = static_cast<std::uint64_t>(seed);
        nm.r = 2;
        const auto m = estimate_moments(mu, gen, nm, 2);
        mean += m.m[1] - exact.m[1];
        for (int l = 1; l <= 2; ++l) ASSERT_LE(std::abs(m.m[l]), 1.0 + 5.0 * m.deltas[l]);
    }
    EXPECT_LT(std::abs(mean / double(n)), 5.0 * delta / 100.0);
}

TEST(EstimateMoments, DeterministicPerSeed) {
    Siam1 s;
    NoiseModel nm;
    nm.delta_base = 1e-2;
    nm.seed = 42;
    const GeneratorSpec gen{GeneratorKind::time_evolution, 0.0, 1.0};
    const auto a = estimate_moments(s.ctx.h, s.chi, gen, nm, 4);
    const auto b = estimate_moments(s.ctx.h, s.chi, gen, nm, 4);
    EXPECT_EQ(a.m, b.m);
    nm.seed = 43;
    EXPECT_NE(estimate_moments(s.ctx.h, s.chi, gen, nm, 4).m, a.m);
}

TEST(EstimateMoments, WalkRequiresLambda) {
    Siam1 s;
    const GeneratorSpec gen{GeneratorKind::qubitized_walk, 0.0, 0.5};
    EXPECT_THROW(estimate_moments(s.ctx.h, s.chi, gen, NoiseModel{}, 2), ValidationError);
}

TEST(HamiltonianFromU, Examples) {
    EXPECT_LT(max_abs(hamiltonian_from_u(CMatrix::Identity(1, 1), 1.0)), 1e-15);

    CMatrix h = CMatrix::Zero(2, 2);
    h.diagonal() << 0.3, -0.7;
    CVector chi(2);
    chi << 1.0, 1.0;
    const auto rep = run_roqam(spectral_measure(diagonalize(h), chi / std::sqrt(2.0)),
                               {GeneratorKind::time_evolution, 1.0, 1.0}, NoiseModel{}, 2);
    const auto ev = diagonalize(project_to_hermitian(rep.h_proj)).eigenvalues;
    EXPECT_NEAR(ev(0), -0.7, 1e-9);
    EXPECT_NEAR(ev(1), 0.3, 1e-9);

    // 0.9 at dt = 4 wraps onto (0.9 * 4 - 2 pi) / 4
    CMatrix u = CMatrix::Constant(1, 1, std::polar(1.0, -0.9 * 4.0));
    EXPECT_NEAR(hamiltonian_from_u(u, 4.0)(0, 0).real(), (0.9 * 4.0 - 2.0 * kPi) / 4.0, 1e-12);

    bool ambiguous = false;
    hamiltonian_from_u(CMatrix::Constant(1, 1, std::polar(1.0, kPi - 1e-8)), 1.0, &ambiguous);
    EXPECT_TRUE(ambiguous);
}

TEST(Projections, Unitary) {
    std::mt19937 rng(11);
    const CMatrix u = oracle::unitary_from_hermitian(oracle::random_hermitian(4, rng), 0.7);
    EXPECT_LT(max_abs(project_to_unitary(u) - u), 1e-10);
    CMatrix d = CMatrix::Zero(2, 2);
    d.diagonal() << 2.0, 0.5;
    EXPECT_LT(max_abs(project_to_unitary(d) - CMatrix::Identity(2, 2)), 1e-14);
    EXPECT_THROW(project_to_unitary(CMatrix::Zero(2, 2)), NumericalError);

    // sampled minimality around a perturbed unitary
    std::normal_distribution<double> g;
    CMatrix noisy = u;
    for (int i = 0; i < 16; ++i) noisy(i % 4, i / 4) += cplx(0.05 * g(rng), 0.05 * g(rng));
    const CMatrix p = project_to_unitary(noisy);
    Eigen::JacobiSVD<CMatrix> svd(p);
    EXPECT_LT((svd.singularValues().array() - 1.0).abs().maxCoeff(), 1e-10);
    const double best = (p - noisy).norm();
    for (int k = 0; k < 1000; ++k) {
        const CMatrix cand = p * oracle::unitary_from_hermitian(oracle::random_hermitian(4, rng), 0.05);
        ASSERT_GE((cand - noisy).norm(), best - 1e-12);
    }
}

TEST(Projections, Hermitian) {
    std::mt19937 rng(12);
    const CMatrix h = oracle::random_hermitian(3, rng);
    EXPECT_LT(max_abs(project_to_hermitian(h) - h), 1e-15);
    CMatrix a(2, 2);
    a << 0.0, 1.0, 0.0, 0.0;
    CMatrix expect(2, 2);
    expect << 0.0, 0.5, 0.5, 0.0;
    EXPECT_LT(max_abs(project_to_hermitian(a) - expect), 1e-15);
    const CMatrix anti = kI * h;
    EXPECT_LT(max_abs(project_to_hermitian(anti)), 1e-15);
}

TEST(RunRoqam, NoiselessFullDepthIsExact) {
    Siam1 s;
    const auto rep = run_roqam(s.ctx.h, s.chi, {}, NoiseModel{}, 6);
    EXPECT_NE(rep.status, BreakdownStatus::none);
    const cplx z{0.7, 0.4};
    const cplx exact = oracle::dense_expectation(s.ctx.h.dense, s.chi, [&](double e) {
        return 1.0 / (z + s.ctx.ground.e0 - e);
    });
    EXPECT_LT(std::abs(rep.resolvent(z, s.ctx.ground.e0, 1.0) - exact), 1e-8);
    EXPECT_LT(hermitian_defect(rep.h_proj), 1e-10);
}

TEST(RunRoqam, UnitaryRepairGivesHermitianH) {
    Siam1 s;
    NoiseModel nm;
    nm.delta_base = 1e-3;
    nm.seed = 3;
    const auto rep = run_roqam(s.ctx.h, s.chi, {}, nm, 2);
    EXPECT_LT(hermitian_defect(rep.h_proj), 1e-10);
    Eigen::JacobiSVD<CMatrix> svd(rep.u_proj.entries);
    EXPECT_LT((svd.singularValues().array() - 1.0).abs().maxCoeff(), 1e-10);
    const auto herm = run_roqam(s.ctx.h, s.chi, {}, nm, 2, Repair::hermitian_projection);
    EXPECT_EQ(max_abs(herm.h_proj - herm.h_proj.adjoint()), 0.0);
}

TEST(RunRoqam, Deterministic) {
    Siam1 s;
    NoiseModel nm;
    nm.delta_base = 1e-2;
    nm.seed = 77;
    const auto a = run_roqam(s.ctx.h, s.chi, {}, nm, 3);
    const auto b = run_roqam(s.ctx.h, s.chi, {}, nm, 3);
    EXPECT_EQ(max_abs(a.h_proj - b.h_proj), 0.0);
    EXPECT_EQ(a.moments.m, b.moments.m);
}

TEST(RunRoqam, PrincipalBranchEigenvalues) {
    Siam1 s;
    const auto rep = run_roqam(s.ctx.h, s.chi, {}, NoiseModel{}, 8);
    const auto mu = spectral_measure(s.ctx.spectrum, s.chi);
    const auto ev = diagonalize(project_to_hermitian(rep.h_proj)).eigenvalues;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        double best = 1e9;
        for (double e : mu.energies) best = std::min(best, std::abs(e - ev(k)));
        EXPECT_LT(best, 1e-8);
    }
}

TEST(RunRoqam, ScaledHamiltonianRejectsUnitaryRepair) {
    Siam1 s;
    EXPECT_THROW(run_roqam(s.ctx.h, s.chi, {GeneratorKind::scaled_hamiltonian, 0.0, 8.0}, NoiseModel{}, 2,
                           Repair::unitary_projection),
                 ValidationError);
}

TEST(Generators, AllExactNoiselessly) {
    Siam1 s;
    const auto pr = s.ctx.zero_temperature();
    const auto grid = default_real_grid(5.0, 0.4, 200);
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    const double norm = operator_norm(s.ctx.spectrum);
    for (auto [kind, lam, repair] :
         {std::tuple{GeneratorKind::time_evolution, 1.0, Repair::unitary_projection},
          std::tuple{GeneratorKind::scaled_hamiltonian, norm, Repair::hermitian_projection},
          std::tuple{GeneratorKind::qubitized_walk, 1.5 * norm, Repair::unitary_projection}}) {
        RoqamConfig cfg;
        cfg.gen = {kind, 0.0, lam};
        cfg.r = 4;
        cfg.repair = repair;
        EXPECT_LT(gf_error(pr, grid, cfg, exact), 1e-7) << to_string(kind);
    }
}

TEST(LambdaScaling, TimeEvolutionCancels) {
    Siam1 s;
    const double bound = max_timestep(operator_norm(s.ctx.spectrum));
    std::vector<double> ref;
    for (double lam : {1.0, 4.0, 16.0}) {
        const auto rep = run_roqam(s.ctx.h, s.chi, {GeneratorKind::time_evolution, 0.9 * bound * lam, lam},
                                   NoiseModel{}, 3);
        const auto ev = diagonalize(project_to_hermitian(rep.h_proj)).eigenvalues;
        if (ref.empty()) ref.assign(ev.data(), ev.data() + ev.size());
        ASSERT_EQ(static_cast<std::size_t>(ev.size()), ref.size());
        for (Eigen::Index k = 0; k < ev.size(); ++k) EXPECT_NEAR(ev(k), ref[k], 1e-9);
    }
}

TEST(LambdaScaling, ScaledHamiltonianNoiseGrows) {
    Siam1 s;
    const auto pr = s.ctx.zero_temperature();
    const auto grid = default_real_grid(5.0, 0.4, 300);
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    double prev = -1.0;
    for (double lam : {1.0, 4.0, 16.0}) {
        std::vector<double> errs;
        for (int seed = 0; seed < 20; ++seed) {
            RoqamConfig cfg;
            cfg.gen = {GeneratorKind::scaled_hamiltonian, 0.0, lam};
            cfg.repair = Repair::hermitian_projection;
            cfg.r = 2;
            cfg.noise.delta_base = 1e-4;
            cfg.noise.seed = static_cast<std::uint64_t>(seed);
            errs.push_back(gf_error(pr, grid, cfg, exact));
        }
        const double med = median(errs);
        EXPECT_GT(med, prev) << "lam=" << lam;
        prev = med;
    }
}

TEST(NoiseFloor, OrderedByDelta) {
    const auto ctx = make_context(two_site_dmft_params(5.0, 2));
    const auto pr = ctx.zero_temperature();
    const auto grid = default_real_grid(5.0, 0.4, 300);
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    RoqamConfig base;
    base.r = 6;
    const double noiseless = gf_error(pr, grid, base, exact);
    std::vector<double> floors;
    for (double d : {1e-3, 1e-5}) {
        std::vector<double> errs;
        for (int seed = 0; seed < 20; ++seed) {
            RoqamConfig cfg = base;
            cfg.noise.delta_base = d;
            cfg.noise.seed = static_cast<std::uint64_t>(seed);
            errs.push_back(gf_error(pr, grid, cfg, exact));
        }
        floors.push_back(median(errs));
    }
    EXPECT_GT(floors[0], floors[1]);
    EXPECT_GT(floors[1], noiseless);
}

TEST(Repair, ImprovesOnMostSeeds) {
    const auto ctx = make_context(two_site_dmft_params(5.0, 2));
    const auto pr = ctx.zero_temperature();
    const auto grid = default_real_grid(5.0, 0.4, 200);
    const auto exact = exact_greens_estimate(pr, 0, 0, grid);
    int unitary_wins = 0, hermitian_wins = 0;
    double max_gap = 0.0;
    for (int seed = 0; seed < 100; ++seed) {
        RoqamConfig cfg;
        cfg.r = 3;
        cfg.noise.delta_base = 1e-3;
        cfg.noise.seed = static_cast<std::uint64_t>(seed);
        cfg.repair = Repair::none;
        const double raw = gf_error(pr, grid, cfg, exact);
        cfg.repair = Repair::unitary_projection;
        const auto gu = roqam_greens_diagonal(pr, 0, grid, cfg);
        cfg.repair = Repair::hermitian_projection;
        const auto gh = roqam_greens_diagonal(pr, 0, grid, cfg);
        unitary_wins += mean_relative_error(gu, exact) <= raw;
        hermitian_wins += mean_relative_error(gh, exact) <= raw;
        for (std::size_t i = 0; i < grid.size(); ++i) max_gap = std::max(max_gap, std::abs(gu.values[i] - gh.values[i]));
    }
    EXPECT_GE(unitary_wins, 75);
    EXPECT_GE(hermitian_wins, 75);
    EXPECT_LT(max_gap, 10.0 * 1e-3 * 3.0 / 0.4);  // noise scale delta_r / gamma
}

TEST(MomentsCsv, Header) {
    Siam1 s;
    const auto mom = estimate_moments(s.ctx.h, s.chi, {}, NoiseModel{}, 2);
    EXPECT_EQ(moments_csv(mom).rfind("l,re_m,im_m,delta_l\n", 0), 0u);
}
