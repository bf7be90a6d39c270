#pragma once

// Green's-function estimates from Krylov representations.
//
// A GreensProblem packages what the emulator needs for one Hamiltonian:
// how to expand a starting state (a combination of ladder operators acting
// on the reference state) in the eigenbasis of the generator, and how the
// forward and backward resolvents are shifted.
//
//   zero temperature   generator H,   reference |psi0>
//     G+ = nu^2 [((z + E0) - [H])^-1]_00   with chi0 = a_q^dag |psi0>
//     G- = nu^2 [((z - E0) + [H])^-1]_00   with chi0 = a_q |psi0>
//   thermofield double generator L = H^T (x) 1 - 1 (x) H,  reference vec(e^{-beta H/2})/sqrt(Z)
//     G+ = nu^2 [(z + [L])^-1]_00          with chi0 = (1 (x) a_q^dag) |Psi(beta)>
//     G- = nu^2 [(z - [L])^-1]_00          with chi0 = (1 (x) a_q) |Psi(beta)>
//
// L acts as vec(Y) -> vec(Y H - H Y).  For real H it equals H (x) 1 - 1 (x) H.
// Its eigenvector vec(|m><n|) carries eigenvalue E_n - E_m, so the TFD
// measure is read off from V^dag a V scaled by the Boltzmann amplitudes.

#include "roqam/emulation.hpp"
#include "roqam/exact_reference.hpp"
#include "roqam/fermion_model.hpp"

#include <sstream>

namespace roqam {

enum class Axis { real, imaginary };
enum class GreensSource { exact, roqam, atomic_limit };

inline const char* to_string(Axis a) { return a == Axis::real ? "real" : "imaginary"; }
inline const char* to_string(GreensSource s) {
    switch (s) {
        case GreensSource::exact: return "exact";
        case GreensSource::roqam: return "roqam";
        case GreensSource::atomic_limit: return "atomic_limit";
    }
    return "?";
}
inline Axis parse_axis(const std::string& s) {
    if (s == "real") return Axis::real;
    if (s == "imaginary" || s == "imag") return Axis::imaginary;
    throw ValidationError("axis", "expected real or imaginary, got '" + s + "'");
}

struct FrequencyGrid {
    Axis axis = Axis::real;
    std::vector<double> points;
    double gamma = 0.4;

    std::size_t size() const { return points.size(); }

    /// Complex evaluation point: omega + i gamma, or i omega on the imaginary axis.
    cplx z(std::size_t i) const {
        return axis == Axis::real ? cplx{points[i], gamma} : cplx{0.0, points[i]};
    }

    void validate() const {
        require(!points.empty(), "grid", "must contain at least one point");
        if (axis == Axis::real) require(gamma > 0.0 && std::isfinite(gamma), "gamma", "must be > 0 on the real axis");
        for (std::size_t i = 0; i < points.size(); ++i) {
            require(std::isfinite(points[i]), "grid", "points must be finite");
            if (i) require(points[i] > points[i - 1], "grid", "points must be strictly ascending");
        }
    }
};

inline FrequencyGrid real_grid(double lo, double hi, std::size_t n, double gamma) {
    require(n >= 1, "n_omega", "must be >= 1");
    require(hi > lo || n == 1, "omega_max", "must exceed omega_min");
    FrequencyGrid g{Axis::real, linspace(lo, hi, n), gamma};
    g.validate();
    return g;
}

/// 1000 points on [-(u/2 + 4), u/2 + 4].
inline FrequencyGrid default_real_grid(double u, double gamma, std::size_t n = 1000) {
    const double half = u / 2.0 + 4.0;
    return real_grid(-half, half, n, gamma);
}

/// n points omega_k = omega_max * k / n, k = 1..n.
inline FrequencyGrid imaginary_grid(double omega_max, std::size_t n) {
    require(n >= 1, "n_omega", "must be >= 1");
    require(omega_max > 0.0, "omega_max", "must be positive");
    FrequencyGrid g{Axis::imaginary, {}, 0.0};
    for (std::size_t k = 1; k <= n; ++k) g.points.push_back(omega_max * double(k) / double(n));
    return g;
}

inline FrequencyGrid default_imaginary_grid(std::size_t n = 200) { return imaginary_grid(10.0, n); }

struct GreensEstimate {
    FrequencyGrid grid;
    std::vector<cplx> values;
    GreensSource source = GreensSource::exact;
    std::optional<int> depth;
    int p = 0;
    int q = 0;
    std::vector<std::string> notes;
};

struct RoqamConfig {
    GeneratorSpec gen;
    NoiseModel noise;
    int r = 3;
    Repair repair = Repair::unitary_projection;
    double tol = kMomentBreakdownTol;
};

// ---------------------------------------------------------------------------
// Problems

class GreensProblem {
public:
    static GreensProblem zero_temperature(const FermionHamiltonian& h, const Spectrum& s, const GroundPair& g) {
        GreensProblem pr;
        pr.n_modes_ = h.n_modes;
        pr.spectrum_ = s;
        pr.e0_ = g.e0;
        pr.psi0_ = g.psi0;
        pr.op_norm_ = operator_norm(s);
        return pr;
    }

    /// TFD problem; the doubled space is capped at 4^8 = 65536 amplitudes.
    static GreensProblem thermal(const FermionHamiltonian& h, const Spectrum& s, double beta) {
        check_beta(beta);
        require(h.n_modes <= 8, "n_bath", "thermal doubled dimension 4^n_modes exceeds 65536");
        GreensProblem pr;
        pr.thermal_ = true;
        pr.beta_ = beta;
        pr.n_modes_ = h.n_modes;
        pr.spectrum_ = s;
        pr.e0_ = s.eigenvalues(0);
        pr.sqrt_boltz_ = boltzmann_weights(s, beta).cwiseSqrt();
        pr.op_norm_ = s.eigenvalues(s.dim() - 1) - s.eigenvalues(0);
        const auto n = static_cast<std::size_t>(h.n_modes);
        pr.create_.resize(n);
        pr.annihilate_.resize(n);
        for (int p = 0; p < h.n_modes; ++p) {
            pr.create_[p] = ladder_in_eigenbasis(s, LadderKind::create, p);
            pr.annihilate_[p] = ladder_in_eigenbasis(s, LadderKind::annihilate, p);
        }
        return pr;
    }

    bool is_thermal() const { return thermal_; }
    double beta() const { return beta_; }
    double e0() const { return e0_; }
    int n_modes() const { return n_modes_; }
    const Spectrum& spectrum() const { return spectrum_; }
    double generator_norm() const { return op_norm_; }

    /// Measure of chi0 = cp * O_p |ref> + cq * O_q |ref>, O = a^dag or a.
    SpectralMeasure measure(LadderKind kind, int p, cplx cp, int q, cplx cq) const {
        require(p >= 0 && p < n_modes_ && q >= 0 && q < n_modes_, "mode_index", "out of range");
        if (!thermal_) {
            CVector chi = cp * apply_ladder(kind, p, psi0_);
            if (cq != cplx{}) chi += cq * apply_ladder(kind, q, psi0_);
            return spectral_measure(spectrum_, chi);
        }
        const auto& ops = kind == LadderKind::create ? create_ : annihilate_;
        CMatrix y = cp * ops[p];
        if (cq != cplx{}) y += cq * ops[q];
        y = y * sqrt_boltz_.cast<cplx>().asDiagonal();
        const Eigen::Index d = spectrum_.dim();
        RVector energies(d * d);
        for (Eigen::Index n = 0; n < d; ++n)
            for (Eigen::Index m = 0; m < d; ++m)
                energies(n * d + m) = spectrum_.eigenvalues(n) - spectrum_.eigenvalues(m);
        return measure_from_coefficients(energies, vec(y), op_norm_);
    }

    /// Forward branch uses a^dag, backward uses a.
    double shift(bool forward) const {
        if (thermal_) return 0.0;
        return forward ? e0_ : -e0_;
    }
    double sign(bool forward) const {
        if (thermal_) return forward ? -1.0 : 1.0;
        return forward ? 1.0 : -1.0;
    }

    GreensPoles exact_poles(int p, int q) const {
        if (thermal_) return exact_thermal_greens_poles(spectrum_, beta_, p, q);
        GroundPair g{e0_, psi0_, 1};
        return exact_greens_poles(spectrum_, g, p, q);
    }

private:
    bool thermal_ = false;
    double beta_ = 0.0;
    int n_modes_ = 0;
    Spectrum spectrum_;
    double e0_ = 0.0;
    CVector psi0_;
    RVector sqrt_boltz_;
    double op_norm_ = 0.0;
    std::vector<CMatrix> create_, annihilate_;
};

/// Everything derived from one parameter set by exact diagonalization.
struct ModelContext {
    FermionHamiltonian h;
    Spectrum spectrum;
    GroundPair ground;

    GreensProblem zero_temperature() const { return GreensProblem::zero_temperature(h, spectrum, ground); }
    GreensProblem thermal(double beta) const { return GreensProblem::thermal(h, spectrum, beta); }
};

inline ModelContext make_context(const SiamParams& params) {
    ModelContext ctx;
    ctx.h = build_siam(params);
    ctx.spectrum = diagonalize(ctx.h);
    ctx.ground = ground_state(ctx.spectrum);
    return ctx;
}

// ---------------------------------------------------------------------------
// Estimators

namespace detail {

enum class Combo : std::uint64_t { single = 0, plus = 1, plus_i = 2 };

inline std::uint64_t branch_stream(std::uint64_t base, bool forward, Combo combo, int p, int q) {
    const std::uint64_t code = (forward ? 1u : 0u) | (static_cast<std::uint64_t>(combo) << 2) |
                               (static_cast<std::uint64_t>(p) << 8) | (static_cast<std::uint64_t>(q) << 20);
    return splitmix64(base ^ splitmix64(code + 0x51ED270B27C4A1F3ULL));
}

/// Forward plus backward resolvent for one starting-state combination.
inline std::vector<cplx> combo_values(const GreensProblem& pr, const FrequencyGrid& grid, const RoqamConfig& cfg,
                                      int p, cplx cp, int q, cplx cq, Combo combo,
                                      std::vector<std::string>* notes, int* depth) {
    std::vector<cplx> out(grid.size(), cplx{});
    for (bool forward : {true, false}) {
        const auto kind = forward ? LadderKind::create : LadderKind::annihilate;
        NoiseModel noise = cfg.noise;
        noise.stream = branch_stream(cfg.noise.stream, forward, combo, p, q);
        const auto mu = pr.measure(kind, p, cp, q, cq);
        const auto rep = run_roqam(mu, cfg.gen, noise, cfg.r, cfg.repair, cfg.tol);
        const char* label = forward ? "forward" : "backward";
        if (notes) {
            if (mu.norm_sq == 0.0) notes->push_back(std::string(label) + ": zero-norm starting state");
            if (rep.status != BreakdownStatus::none)
                notes->push_back(std::string(label) + ": " + to_string(rep.status) + " breakdown at depth " +
                                 std::to_string(rep.depth));
            if (rep.branch_warning) notes->push_back(std::string(label) + ": eigenphase near branch cut");
        }
        if (depth) *depth = std::max(*depth, rep.depth);
        const double shift = pr.shift(forward);
        const double sign = pr.sign(forward);
        for (std::size_t i = 0; i < grid.size(); ++i) out[i] += rep.resolvent(grid.z(i), shift, sign);
    }
    return out;
}

}  // namespace detail

inline GreensEstimate roqam_greens_diagonal(const GreensProblem& pr, int p, const FrequencyGrid& grid,
                                            const RoqamConfig& cfg) {
    grid.validate();
    GreensEstimate est;
    est.grid = grid;
    est.source = GreensSource::roqam;
    est.p = est.q = p;
    int depth = 0;
    est.values = detail::combo_values(pr, grid, cfg, p, 1.0, p, 0.0, detail::Combo::single, &est.notes, &depth);
    est.depth = depth;
    return est;
}

/// (G_pq, G_qp) from the (a_p + a_q) and (a_p + i a_q) starting states:
///   S = F_plus - G_pp - G_qq,  T = F_plus_i - G_pp - G_qq
///   G_pq = S/2 - i T/2,        G_qp = S/2 + i T/2
inline std::pair<GreensEstimate, GreensEstimate> roqam_greens_offdiagonal(
    const GreensProblem& pr, int p, int q, const FrequencyGrid& grid, const RoqamConfig& cfg,
    const GreensEstimate& diag_p, const GreensEstimate& diag_q) {
    grid.validate();
    require(diag_p.values.size() == grid.size() && diag_q.values.size() == grid.size(), "grid",
            "diagonal estimates must share the grid");
    std::vector<std::string> notes;
    int depth = 0;
    const auto f_plus = detail::combo_values(pr, grid, cfg, p, 1.0, q, 1.0, detail::Combo::plus, &notes, &depth);
    const auto f_i = detail::combo_values(pr, grid, cfg, p, 1.0, q, kI, detail::Combo::plus_i, &notes, &depth);
    GreensEstimate pq, qp;
    for (auto* e : {&pq, &qp}) {
        e->grid = grid;
        e->source = GreensSource::roqam;
        e->depth = depth;
        e->notes = notes;
        e->values.resize(grid.size());
    }
    pq.p = qp.q = p;
    pq.q = qp.p = q;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx base = diag_p.values[i] + diag_q.values[i];
        const cplx s = f_plus[i] - base;
        const cplx t = f_i[i] - base;
        pq.values[i] = 0.5 * s - 0.5 * kI * t;
        qp.values[i] = 0.5 * s + 0.5 * kI * t;
    }
    return {pq, qp};
}

inline GreensEstimate exact_greens_estimate(const GreensProblem& pr, int p, int q, const FrequencyGrid& grid) {
    grid.validate();
    const auto poles = pr.exact_poles(p, q);
    GreensEstimate est;
    est.grid = grid;
    est.source = GreensSource::exact;
    est.p = p;
    est.q = q;
    est.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) est.values[i] = poles(grid.z(i));
    return est;
}

/// Thermal ROQAM estimate of G_pq on the TFD problem.
inline GreensEstimate thermal_greens(const ModelContext& ctx, double beta, int p, int q, const FrequencyGrid& grid,
                                     const RoqamConfig& cfg) {
    const auto pr = ctx.thermal(beta);
    auto dp = roqam_greens_diagonal(pr, p, grid, cfg);
    if (p == q) return dp;
    auto dq = roqam_greens_diagonal(pr, q, grid, cfg);
    return roqam_greens_offdiagonal(pr, p, q, grid, cfg, dp, dq).first;
}

/// Hubbard atom at half filling: G = (1/2)[1/(z - u/2) + 1/(z + u/2)].
inline GreensEstimate atomic_limit_greens(double u, const FrequencyGrid& grid) {
    grid.validate();
    GreensEstimate est;
    est.grid = grid;
    est.source = GreensSource::atomic_limit;
    est.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx z = grid.z(i);
        est.values[i] = 0.5 / (z - u / 2.0) + 0.5 / (z + u / 2.0);
    }
    return est;
}

// ---------------------------------------------------------------------------
// Metrics

inline std::vector<double> spectral_function(const GreensEstimate& g) {
    require(g.grid.axis == Axis::real, "axis", "spectral function needs the real axis");
    std::vector<double> a(g.values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = -g.values[i].imag() / kPi;
    return a;
}

inline void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b) {
    require(a.axis == b.axis && a.size() == b.size(), "grid", "estimates are on different grids");
    for (std::size_t i = 0; i < a.size(); ++i)
        require(std::abs(a.points[i] - b.points[i]) <= 1e-12 * std::max(1.0, std::abs(a.points[i])), "grid",
                "estimates are on different grids");
    if (a.axis == Axis::real) require(std::abs(a.gamma - b.gamma) <= 1e-15, "gamma", "broadening differs");
}

/// sum |est - ref| / sum |ref| over the grid.
inline double mean_relative_error(const GreensEstimate& est, const GreensEstimate& ref) {
    require_same_grid(est.grid, ref.grid);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < est.values.size(); ++i) {
        num += std::abs(est.values[i] - ref.values[i]);
        den += std::abs(ref.values[i]);
    }
    require(den > 0.0, "reference", "reference Green's function vanishes on the grid");
    return num / den;
}

inline double a_posteriori_bound(double delta_trusted, cplx est_at_point, cplx trusted_at_point) {
    return delta_trusted + std::abs(est_at_point - trusted_at_point);
}

/// Trapezoid integral over the grid.
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

inline std::string greens_csv(const GreensEstimate& g) {
    std::ostringstream os;
    os.precision(17);
    os << "omega,re_G,im_G,A\n";
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        os << g.grid.points[i] << ',' << g.values[i].real() << ',' << g.values[i].imag() << ',';
        if (g.grid.axis == Axis::real) os << -g.values[i].imag() / kPi;
        os << '\n';
    }
    return os.str();
}

}  // namespace roqam
