#pragma once

// Exact-diagonalization oracle: spectra, ground states, zero- and
// finite-temperature Green's functions as explicit pole sums, and the
// thermofield-double state.
//
// vec(M) stacks the columns of M, so vec(M)[j * dim + i] = M(i, j).  With
// this convention vec(AB) = (1 (x) A) vec(B) and vec(AB) = (B^T (x) 1) vec(A).

#include "roqam/core.hpp"
#include "roqam/fermion_model.hpp"

#include <limits>
#include <sstream>

namespace roqam {

struct Spectrum {
    RVector eigenvalues;  // ascending
    CMatrix eigenvectors; // columns
    Eigen::Index dim() const { return eigenvalues.size(); }
};

struct GroundPair {
    double e0 = 0.0;
    CVector psi0;
    int degeneracy = 1;
};

/// A sum of simple poles, sum_k w_k / (z - x_k).
struct PoleSum {
    std::vector<double> poles;
    std::vector<cplx> weights;

    cplx operator()(cplx z) const {
        cplx out{};
        for (std::size_t k = 0; k < poles.size(); ++k) {
            const cplx den = z - poles[k];
            if (std::abs(den) < 1e-14)
                throw NumericalError("pole evaluation: z within 1e-14 of pole " +
                                     std::to_string(poles[k]));
            out += weights[k] / den;
        }
        return out;
    }

    cplx total_weight() const {
        cplx s{};
        for (auto w : weights) s += w;
        return s;
    }

    void add(double pole, cplx weight) {
        if (std::abs(weight) < 1e-30) return;
        poles.push_back(pole);
        weights.push_back(weight);
    }
};

/// Rotates v so its largest-magnitude entry (lowest index on near-ties) is
/// real and positive.
inline void fix_phase(Eigen::Ref<CVector> v) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best_abs + 1e-12) {
            best_abs = a;
            best = i;
        }
    }
    if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

inline Spectrum diagonalize(const CMatrix& h) {
    require(h.rows() == h.cols() && h.rows() > 0, "hamiltonian", "must be square and non-empty");
    require(h.rows() <= (Eigen::Index{1} << kMaxDenseModes), "hamiltonian", "dimension exceeds 16384");
    const double scale = std::max(1.0, max_abs(h));
    require(hermitian_defect(h) <= 1e-10 * scale, "hamiltonian", "matrix is not Hermitian");

    Spectrum s;
    if (max_abs(h.imag()) == 0.0) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(h.real());
        if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
        s.eigenvalues = es.eigenvalues();
        s.eigenvectors = es.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
        s.eigenvalues = es.eigenvalues();
        s.eigenvectors = es.eigenvectors();
    }
    for (Eigen::Index k = 0; k < s.eigenvectors.cols(); ++k) fix_phase(s.eigenvectors.col(k));
    return s;
}

inline Spectrum diagonalize(const FermionHamiltonian& h) { return diagonalize(h.dense); }

/// Ground state.  Within a degenerate ground space the representative is the
/// projection of the lowest-index basis state with non-negligible weight in
/// that space, which keeps particle number and S_z definite.
inline GroundPair ground_state(const Spectrum& s, double degeneracy_tol = 1e-9) {
    GroundPair g;
    g.e0 = s.eigenvalues(0);
    int k = 1;
    while (k < s.dim() && s.eigenvalues(k) - g.e0 < degeneracy_tol) ++k;
    g.degeneracy = k;
    if (k == 1) {
        g.psi0 = s.eigenvectors.col(0);
        return g;
    }
    const auto block = s.eigenvectors.leftCols(k);
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
        const double w = block.row(i).squaredNorm();
        if (w > 1e-6) {
            CVector v = block * block.row(i).adjoint();
            v /= v.norm();
            fix_phase(v);
            g.psi0 = v;
            return g;
        }
    }
    throw NumericalError("ground_state: degenerate block has no basis support");
}

/// V^dagger op V for a ladder operator, expressed in the eigenbasis.
inline CMatrix ladder_in_eigenbasis(const Spectrum& s, LadderKind kind, int mode) {
    CMatrix applied(s.dim(), s.dim());
    for (Eigen::Index k = 0; k < s.dim(); ++k)
        applied.col(k) = apply_ladder(kind, mode, s.eigenvectors.col(k));
    return s.eigenvectors.adjoint() * applied;
}

struct GreensPoles {
    PoleSum plus;   // G+(z) = plus(z)
    PoleSum minus;  // G-(z) = minus(z)
    cplx operator()(cplx z) const { return plus(z) + minus(z); }
};

/// Zero-temperature G_pq as explicit pole sums:
///   G+_pq(z) = <psi0| a_p [z - (H - E0)]^-1 a_q^dag |psi0>
///   G-_pq(z) = <psi0| a_p^dag [z + (H - E0)]^-1 a_q |psi0>
inline GreensPoles exact_greens_poles(const Spectrum& s, const GroundPair& g, int p, int q) {
    const CMatrix vh = s.eigenvectors.adjoint();
    const CVector up = vh * apply_ladder(LadderKind::create, p, g.psi0);
    const CVector uq = vh * apply_ladder(LadderKind::create, q, g.psi0);
    const CVector dp = vh * apply_ladder(LadderKind::annihilate, p, g.psi0);
    const CVector dq = vh * apply_ladder(LadderKind::annihilate, q, g.psi0);
    GreensPoles out;
    for (Eigen::Index n = 0; n < s.dim(); ++n) {
        const double ex = s.eigenvalues(n) - g.e0;
        out.plus.add(ex, std::conj(up(n)) * uq(n));
        out.minus.add(-ex, std::conj(dp(n)) * dq(n));
    }
    return out;
}

inline cplx exact_greens(const Spectrum& s, const GroundPair& g, int p, int q, cplx z) {
    return exact_greens_poles(s, g, p, q)(z);
}

// ---------------------------------------------------------------------------
// Finite temperature

inline void check_beta(double beta) {
    require(std::isfinite(beta) && beta >= 0.0, "beta", "must be finite and >= 0");
}

/// Boltzmann weights exp(-beta (E_n - E0)) / Z in the shifted gauge.
inline RVector boltzmann_weights(const Spectrum& s, double beta) {
    check_beta(beta);
    RVector w(s.dim());
    const double e0 = s.eigenvalues(0);
    for (Eigen::Index n = 0; n < s.dim(); ++n) w(n) = std::exp(-beta * (s.eigenvalues(n) - e0));
    return w / w.sum();
}

inline CVector vec(const CMatrix& m) {
    return Eigen::Map<const CVector>(m.data(), m.size());
}

inline CMatrix unvec(const CVector& v, Eigen::Index dim) {
    require(v.size() == dim * dim, "state", "length must be dim^2");
    return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

/// exp(-beta H / 2) / sqrt(Z) as a matrix; its vectorization is the TFD state.
inline CMatrix thermal_root(const Spectrum& s, double beta) {
    const RVector w = boltzmann_weights(s, beta).cwiseSqrt();
    return s.eigenvectors * w.cast<cplx>().asDiagonal() * s.eigenvectors.adjoint();
}

inline CVector tfd_state(const Spectrum& s, double beta) {
    require(s.dim() * s.dim() <= 16384 * 16, "dim", "doubled dimension too large");
    return vec(thermal_root(s, beta));
}

/// Trace formula for the thermal Green's function:
///   G+ = sum_{n,m} p_n <n|a_p|m><m|a_q^dag|n> / (z - (E_m - E_n))
///   G- = sum_{n,m} p_n <n|a_p^dag|m><m|a_q|n> / (z + (E_m - E_n))
inline GreensPoles exact_thermal_greens_poles(const Spectrum& s, double beta, int p, int q) {
    const RVector pn = boltzmann_weights(s, beta);
    const CMatrix cp = ladder_in_eigenbasis(s, LadderKind::create, p);
    const CMatrix cq = p == q ? cp : ladder_in_eigenbasis(s, LadderKind::create, q);
    const CMatrix ap = ladder_in_eigenbasis(s, LadderKind::annihilate, p);
    const CMatrix aq = p == q ? ap : ladder_in_eigenbasis(s, LadderKind::annihilate, q);
    GreensPoles out;
    for (Eigen::Index n = 0; n < s.dim(); ++n) {
        if (pn(n) == 0.0) continue;
        for (Eigen::Index m = 0; m < s.dim(); ++m) {
            const double diff = s.eigenvalues(m) - s.eigenvalues(n);
            out.plus.add(diff, pn(n) * std::conj(cp(m, n)) * cq(m, n));
            out.minus.add(-diff, pn(n) * std::conj(ap(m, n)) * aq(m, n));
        }
    }
    return out;
}

inline cplx exact_thermal_greens(const Spectrum& s, double beta, int p, int q, cplx z) {
    return exact_thermal_greens_poles(s, beta, p, q)(z);
}

inline std::string spectrum_csv(const Spectrum& s) {
    std::ostringstream os;
    os.precision(17);
    os << "index,eigenvalue\n";
    for (Eigen::Index n = 0; n < s.dim(); ++n) os << n << ',' << s.eigenvalues(n) << '\n';
    return os.str();
}

}  // namespace roqam
