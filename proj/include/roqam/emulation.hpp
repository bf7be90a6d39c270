#pragma once

// Emulated quantum Arnoldi: noisy moment generation for three generating
// matrices, precision schedules, reconstruction of [U], projection repair
// and recovery of [H] through the matrix logarithm.
//
// Moments are computed from the spectral decomposition of the starting
// state, sum_n w_n g(E_n)^l, then perturbed by independent Gaussian noise of
// standard deviation delta_l on the real and imaginary parts.

#include "roqam/arnoldi.hpp"
#include "roqam/core.hpp"
#include "roqam/exact_reference.hpp"
#include "roqam/random.hpp"

#include <optional>
#include <string>

namespace roqam {

enum class Budget { EB1, EB2, EB3 };
enum class GeneratorKind { time_evolution, scaled_hamiltonian, qubitized_walk };
enum class Repair { none, unitary_projection, hermitian_projection };

inline const char* to_string(Budget b) {
    switch (b) {
        case Budget::EB1: return "EB1";
        case Budget::EB2: return "EB2";
        case Budget::EB3: return "EB3";
    }
    return "?";
}
inline const char* to_string(GeneratorKind g) {
    switch (g) {
        case GeneratorKind::time_evolution: return "time_evolution";
        case GeneratorKind::scaled_hamiltonian: return "scaled_hamiltonian";
        case GeneratorKind::qubitized_walk: return "qubitized_walk";
    }
    return "?";
}
inline const char* to_string(Repair r) {
    switch (r) {
        case Repair::none: return "none";
        case Repair::unitary_projection: return "unitary_projection";
        case Repair::hermitian_projection: return "hermitian_projection";
    }
    return "?";
}

inline Budget parse_budget(const std::string& s) {
    if (s == "EB1" || s == "eb1") return Budget::EB1;
    if (s == "EB2" || s == "eb2") return Budget::EB2;
    if (s == "EB3" || s == "eb3") return Budget::EB3;
    throw ValidationError("budget", "expected EB1, EB2 or EB3, got '" + s + "'");
}
inline GeneratorKind parse_generator(const std::string& s) {
    if (s == "time_evolution") return GeneratorKind::time_evolution;
    if (s == "scaled_hamiltonian") return GeneratorKind::scaled_hamiltonian;
    if (s == "qubitized_walk") return GeneratorKind::qubitized_walk;
    throw ValidationError("generator", "unknown generator '" + s + "'");
}
inline Repair parse_repair(const std::string& s) {
    if (s == "none") return Repair::none;
    if (s == "unitary" || s == "unitary_projection") return Repair::unitary_projection;
    if (s == "hermitian" || s == "hermitian_projection") return Repair::hermitian_projection;
    throw ValidationError("repair", "expected none, unitary or hermitian, got '" + s + "'");
}

struct NoiseModel {
    Budget budget = Budget::EB3;
    double delta_base = 0.0;
    std::uint64_t seed = 0;
    int r = 1;
    std::uint64_t stream = 0;  // separates independent estimation runs sharing a seed
};

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::time_evolution;
    double dt = 0.0;   // time_evolution only; <= 0 selects the default heuristic
    double lam = 1.0;  // H is divided by lam before forming the generator
};

// ---------------------------------------------------------------------------
// Schedules and small formulas

/// delta_1 .. delta_r (element l-1 holds delta_l).
inline std::vector<double> error_budget(const NoiseModel& model) {
    require(model.r >= 1, "r", "must be >= 1");
    require(model.delta_base >= 0.0 && std::isfinite(model.delta_base), "delta1", "must be >= 0");
    const double r = model.r;
    std::vector<double> out(model.r);
    for (int l = 1; l <= model.r; ++l) {
        switch (model.budget) {
            case Budget::EB1: out[l - 1] = model.delta_base; break;
            case Budget::EB2: {
                const double den = r * r + 3 * r - double(l) * l - l;
                require(den > 0.0, "r", "EB2 denominator must be positive");
                out[l - 1] = model.delta_base * (r * r + 3 * r - 2) / den;
                break;
            }
            case Budget::EB3: out[l - 1] = l * model.delta_base; break;
        }
    }
    return out;
}

/// Structurally nonzero entries of an r x r upper-Hessenberg matrix.
constexpr int hessenberg_nonzero_count(int r) { return r * (r + 3) / 2 - 1; }

/// Largest timestep free of eigenphase aliasing.
inline double max_timestep(double e_abs_max) {
    require(e_abs_max > 0.0, "e_abs_max", "must be positive");
    return kPi / e_abs_max;
}

inline double default_timestep(double operator_norm) { return 0.5 * max_timestep(operator_norm); }

// ---------------------------------------------------------------------------
// Spectral measure of a starting state

/// chi0 expanded in the eigenbasis of the generator's Hamiltonian:
/// weights w_n = |c_n|^2 / nu^2 at energies E_n, nu^2 = <chi0|chi0>.
struct SpectralMeasure {
    std::vector<double> energies;
    std::vector<double> weights;
    double norm_sq = 0.0;
    double operator_norm = 0.0;  // ||H||_2 of the full operator
};

inline SpectralMeasure measure_from_coefficients(const RVector& energies, const CVector& c,
                                                 double operator_norm) {
    SpectralMeasure m;
    m.operator_norm = operator_norm;
    m.norm_sq = c.squaredNorm();
    if (m.norm_sq == 0.0) return m;
    for (Eigen::Index n = 0; n < c.size(); ++n) {
        const double w = std::norm(c(n)) / m.norm_sq;
        if (w < 1e-30) continue;
        m.energies.push_back(energies(n));
        m.weights.push_back(w);
    }
    return m;
}

inline double operator_norm(const Spectrum& s) {
    return std::max(std::abs(s.eigenvalues(0)), std::abs(s.eigenvalues(s.dim() - 1)));
}

inline SpectralMeasure spectral_measure(const Spectrum& s, const CVector& chi0) {
    require(chi0.size() == s.dim(), "chi0", "dimension mismatch");
    return measure_from_coefficients(s.eigenvalues, s.eigenvectors.adjoint() * chi0, operator_norm(s));
}

inline MomentKind moment_kind(GeneratorKind g) {
    return g == GeneratorKind::scaled_hamiltonian ? MomentKind::hermitian : MomentKind::unitary;
}

/// Resolves dt <= 0 to the default heuristic for this operator norm.
inline GeneratorSpec resolve_generator(GeneratorSpec gen, double op_norm) {
    require(gen.lam > 0.0 && std::isfinite(gen.lam), "lam", "must be positive");
    if (gen.kind == GeneratorKind::time_evolution && !(gen.dt > 0.0))
        gen.dt = op_norm > 0.0 ? default_timestep(op_norm / gen.lam) : 1.0;
    return gen;
}

// ---------------------------------------------------------------------------
// Moments

/// Noisy estimates of <chi0|G^l|chi0>.  Unitary generators need l = 0..r,
/// the scaled Hamiltonian needs l = 0..2r.  The precision schedule is drawn
/// from `noise` with its depth set to the number of estimated moments.
inline Moments estimate_moments(const SpectralMeasure& mu, GeneratorSpec gen, NoiseModel noise, int r) {
    require(r >= 1, "r", "must be >= 1");
    require(mu.norm_sq > 0.0, "chi0", "starting state has zero norm");
    gen = resolve_generator(gen, mu.operator_norm);
    if (gen.kind == GeneratorKind::qubitized_walk)
        require(gen.lam >= mu.operator_norm * (1.0 - 1e-12), "lam",
                "qubitized walk requires lam >= ||H||");

    Moments out;
    out.kind = moment_kind(gen.kind);
    out.dt = gen.kind == GeneratorKind::time_evolution ? gen.dt : 0.0;
    const int top = out.kind == MomentKind::unitary ? r : 2 * r;
    out.m.assign(top + 1, cplx{});
    out.m[0] = 1.0;

    // Unitary generators are tracked by eigenphase, the scaled Hamiltonian by value.
    const std::size_t n_support = mu.energies.size();
    std::vector<double> phase(n_support), value(n_support);
    for (std::size_t n = 0; n < n_support; ++n) {
        const double x = mu.energies[n] / gen.lam;
        value[n] = x;
        if (gen.kind == GeneratorKind::time_evolution) phase[n] = -x * gen.dt;
        if (gen.kind == GeneratorKind::qubitized_walk) phase[n] = std::acos(std::clamp(x, -1.0, 1.0));
    }
    std::vector<double> power(n_support, 1.0);
    for (int l = 1; l <= top; ++l) {
        cplx acc{};
        for (std::size_t n = 0; n < n_support; ++n) {
            if (out.kind == MomentKind::hermitian) {
                power[n] *= value[n];
                acc += mu.weights[n] * power[n];
            } else {
                acc += mu.weights[n] * std::polar(1.0, phase[n] * l);
            }
        }
        out.m[l] = acc;
    }

    noise.r = top;
    const auto deltas = error_budget(noise);
    out.deltas.assign(top + 1, 0.0);
    const CounterNormal rng(noise.seed, noise.stream);
    for (int l = 1; l <= top; ++l) {
        const double d = deltas[l - 1];
        out.deltas[l] = d;
        if (d == 0.0) continue;
        const auto [z0, z1] = rng.normal_pair(static_cast<std::uint64_t>(l));
        out.m[l] += cplx{d * z0, d * z1};
    }
    return out;
}

inline Moments estimate_moments(const FermionHamiltonian& h, const CVector& chi0, const GeneratorSpec& gen,
                                const NoiseModel& noise, int r) {
    return estimate_moments(spectral_measure(diagonalize(h), chi0), gen, noise, r);
}

// ---------------------------------------------------------------------------
// Repairs and the matrix logarithm

inline CMatrix project_to_unitary(const CMatrix& u) {
    require(u.rows() == u.cols() && u.rows() > 0, "u_proj", "must be square and non-empty");
    Eigen::JacobiSVD<CMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) >= 1e-12)) throw NumericalError("project_to_unitary: singular input");
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline CMatrix project_to_hermitian(const CMatrix& h) {
    require(h.rows() == h.cols(), "h_proj", "must be square");
    return (h + h.adjoint()) / 2.0;
}

inline bool is_unitary(const CMatrix& u, double tol = 1e-10) {
    return max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())) < tol;
}

/// Applies a scalar function through the eigendecomposition; unitary input
/// goes through a Schur factorisation so the eigenbasis stays orthonormal.
inline CMatrix apply_function(const CMatrix& a, const std::function<cplx(cplx)>& f) {
    if (is_unitary(a)) {
        Eigen::ComplexSchur<CMatrix> schur(a);
        const CMatrix& q = schur.matrixU();
        const CMatrix& t = schur.matrixT();
        CVector d(t.rows());
        for (Eigen::Index k = 0; k < t.rows(); ++k) d(k) = f(t(k, k));
        return q * d.asDiagonal() * q.adjoint();
    }
    const auto ed = small_eigen(a);
    CVector d(ed.values.size());
    for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = f(ed.values(k));
    return ed.vectors * d.asDiagonal() * ed.inverse;
}

/// [H] = (i / dt) log [U] on the principal branch.  Sets *branch_ambiguous
/// when an eigenphase lies within 1e-6 of +-pi.
inline CMatrix hamiltonian_from_u(const CMatrix& u_proj, double dt, bool* branch_ambiguous = nullptr) {
    require(dt > 0.0, "dt", "must be positive");
    bool ambiguous = false;
    const CMatrix h = apply_function(u_proj, [&](cplx lam) {
        if (std::abs(std::arg(lam)) > kPi - 1e-6) ambiguous = true;
        return kI * std::log(lam) / dt;
    });
    if (branch_ambiguous) *branch_ambiguous = ambiguous;
    return h;
}

// ---------------------------------------------------------------------------
// Pipeline

struct KrylovRepresentation {
    HessenbergMatrix u_proj;  // after repair when repair == unitary_projection
    HessenbergMatrix u_raw;
    CMatrix h_proj;
    GeneratorSpec gen;
    double dt = 0.0;
    double norm_sq_chi0 = 0.0;
    int depth = 0;
    Repair repaired = Repair::none;
    BreakdownStatus status = BreakdownStatus::none;
    bool branch_warning = false;
    std::uint64_t seed = 0;
    Moments moments;

    /// norm_sq * [((z + shift) I - sign [H])^-1]_00; zero for an empty state.
    cplx resolvent(cplx z, double shift, double sign) const {
        if (depth == 0 || norm_sq_chi0 == 0.0) return {};
        return norm_sq_chi0 * resolvent_00(sign * h_proj, z + shift);
    }
};

inline KrylovRepresentation run_roqam(const SpectralMeasure& mu, GeneratorSpec gen, const NoiseModel& noise,
                                      int r, Repair repair = Repair::unitary_projection,
                                      double tol = kMomentBreakdownTol) {
    require(r >= 1, "r", "must be >= 1");
    gen = resolve_generator(gen, mu.operator_norm);
    if (gen.kind == GeneratorKind::scaled_hamiltonian)
        require(repair != Repair::unitary_projection, "repair",
                "unitary projection needs a unitary generator");

    KrylovRepresentation rep;
    rep.gen = gen;
    rep.dt = gen.dt;
    rep.norm_sq_chi0 = mu.norm_sq;
    rep.repaired = repair;
    rep.seed = noise.seed;
    if (mu.norm_sq == 0.0) return rep;

    rep.moments = estimate_moments(mu, gen, noise, r);
    const auto ar = arnoldi_from_moments(rep.moments, r, tol);
    rep.status = ar.status;
    rep.u_raw = ar.projected;
    rep.depth = static_cast<int>(ar.projected.r());

    CMatrix m = ar.projected.entries;
    if (repair == Repair::unitary_projection) m = project_to_unitary(m);
    rep.u_proj.entries = m;

    switch (gen.kind) {
        case GeneratorKind::time_evolution:
            rep.h_proj = gen.lam * hamiltonian_from_u(m, gen.dt, &rep.branch_warning);
            break;
        case GeneratorKind::scaled_hamiltonian:
            rep.h_proj = gen.lam * m;
            break;
        case GeneratorKind::qubitized_walk:
            rep.h_proj = gen.lam * apply_function(m, [](cplx w) { return 0.5 * (w + 1.0 / w); });
            break;
    }
    if (repair == Repair::hermitian_projection) rep.h_proj = project_to_hermitian(rep.h_proj);
    return rep;
}

inline KrylovRepresentation run_roqam(const FermionHamiltonian& h, const CVector& chi0, const GeneratorSpec& gen,
                                      const NoiseModel& noise, int r,
                                      Repair repair = Repair::unitary_projection, double tol = kMomentBreakdownTol) {
    return run_roqam(spectral_measure(diagonalize(h), chi0), gen, noise, r, repair, tol);
}

// ---------------------------------------------------------------------------
// Export

inline std::string moments_csv(const Moments& m) {
    std::ostringstream os;
    os.precision(17);
    os << "l,re_m,im_m,delta_l\n";
    for (std::size_t l = 0; l < m.m.size(); ++l)
        os << l << ',' << m.m[l].real() << ',' << m.m[l].imag() << ',' << m.deltas[l] << '\n';
    return os.str();
}

}  // namespace roqam
