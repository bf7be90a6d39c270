#pragma once

// Arnoldi machinery.
//
// arnoldi_standard runs the textbook vector iteration.  arnoldi_from_moments
// rebuilds the same projected matrix from scalar autocorrelations
// m[l] = <chi0|M^l|chi0> alone: each Krylov vector is stored as polynomial
// coefficients P_j(M) = sum_a c[a, j] M^a, and every inner product reduces
// to a bilinear form in the moments.  The upper-Hessenberg pattern and the
// real non-negative subdiagonal are imposed by construction, so they hold
// for any moment sequence, noisy or not.

#include "roqam/core.hpp"

#include <functional>
#include <optional>
#include <sstream>

namespace roqam {

struct HessenbergMatrix {
    CMatrix entries;
    Eigen::Index r() const { return entries.rows(); }
};

struct ArnoldiResult {
    HessenbergMatrix projected;
    std::optional<CMatrix> basis;
    std::optional<int> breakdown_at;
    double norm_sq_chi0 = 0.0;
};

/// Single-pass classical Gram-Schmidt Arnoldi on a dense matrix.  Breakdown
/// at step j (1-based) means the (j+1)-th residual had norm below tol; the
/// projected matrix is then j x j.
inline ArnoldiResult arnoldi_standard(const CMatrix& m, const CVector& chi0, int r,
                                      double tol = 1e-10) {
    require(r >= 1, "r", "must be >= 1");
    require(m.rows() == m.cols() && m.rows() == chi0.size(), "chi0", "dimension mismatch");
    const double nrm = chi0.norm();
    require(nrm > 0.0, "chi0", "starting vector is zero");

    const Eigen::Index n = m.rows();
    CMatrix q = CMatrix::Zero(n, r);
    CMatrix h = CMatrix::Zero(r, r);
    q.col(0) = chi0 / nrm;
    int size = r;
    std::optional<int> breakdown;
    for (int j = 0; j < r; ++j) {
        CVector w = m * q.col(j);
        const CVector coeffs = q.leftCols(j + 1).adjoint() * w;
        h.col(j).head(j + 1) = coeffs;
        w -= q.leftCols(j + 1) * coeffs;
        const double beta = w.norm();
        if (beta < tol) {
            breakdown = j + 1;
            size = j + 1;
            break;
        }
        if (j + 1 < r) {
            h(j + 1, j) = beta;
            q.col(j + 1) = w / beta;
        }
    }
    ArnoldiResult out;
    out.projected.entries = h.topLeftCorner(size, size);
    out.basis = q.leftCols(size);
    out.breakdown_at = breakdown;
    out.norm_sq_chi0 = nrm * nrm;
    return out;
}

// ---------------------------------------------------------------------------
// Moment-based reconstruction

/// unitary:   M^dagger = M^-1, so <M^a chi|M^b chi> = m[b - a], m[-l] = conj(m[l]).
/// hermitian: M^dagger = M,    so <M^a chi|M^b chi> = m[a + b].
enum class MomentKind { unitary, hermitian };

struct Moments {
    std::vector<cplx> m;        // m[0] = 1
    std::vector<double> deltas; // per-l standard deviations, deltas[0] = 0
    double dt = 0.0;
    MomentKind kind = MomentKind::unitary;

    /// Largest Krylov depth these moments support.
    int max_depth() const {
        const int top = static_cast<int>(m.size()) - 1;
        return kind == MomentKind::unitary ? top : top / 2;
    }

    cplx at(int l) const {
        if (l < 0) return std::conj(m.at(static_cast<std::size_t>(-l)));
        return m.at(static_cast<std::size_t>(l));
    }
};

enum class BreakdownStatus { none, exact, noise_dominated };

inline const char* to_string(BreakdownStatus s) {
    switch (s) {
        case BreakdownStatus::none: return "none";
        case BreakdownStatus::exact: return "exact";
        case BreakdownStatus::noise_dominated: return "noise_dominated";
    }
    return "?";
}

struct MomentArnoldiResult {
    HessenbergMatrix projected;
    BreakdownStatus status = BreakdownStatus::none;
    std::optional<int> breakdown_at;
    std::vector<double> subdiagonal_norm_sq;  // computed nu^2 per step
};

namespace detail {

/// <P_i | M^k | P_j> from polynomial coefficient columns.
inline cplx moment_form(const Moments& mom, const CVector& ci, const CVector& cj, int k) {
    cplx acc{};
    const auto n = ci.size();
    for (Eigen::Index a = 0; a < n; ++a) {
        if (ci(a) == cplx{}) continue;
        cplx inner{};
        for (Eigen::Index b = 0; b < n; ++b) {
            if (cj(b) == cplx{}) continue;
            const int idx = mom.kind == MomentKind::unitary ? static_cast<int>(b - a) + k
                                                             : static_cast<int>(a + b) + k;
            inner += cj(b) * mom.at(idx);
        }
        acc += std::conj(ci(a)) * inner;
    }
    return acc;
}

}  // namespace detail

/// Default breakdown threshold on the residual norm nu.  nu^2 is formed by
/// cancellation in the moment bilinear form, so at an exact breakdown it
/// sits at the 1e-16 level rather than at zero.
inline constexpr double kMomentBreakdownTol = 1e-7;

/// Rebuilds the r x r projected matrix [M] from moments.  Stops early when
/// the squared residual norm drops below tol^2 (exact breakdown) or is
/// negative beyond -tol^2 (noise-dominated breakdown).  The threshold is
/// raised to the rounding level of the monomial expansion when that is larger.
inline MomentArnoldiResult arnoldi_from_moments(const Moments& mom, int r, double tol = kMomentBreakdownTol) {
    require(r >= 1, "r", "must be >= 1");
    require(!mom.m.empty(), "moments", "empty moment sequence");
    require(r <= mom.max_depth(), "r", "moments do not reach the requested depth");
    const double tol2 = tol * tol;

    // Column j holds the monomial coefficients of P_j; degree <= j.
    CMatrix coeff = CMatrix::Zero(r + 1, r + 1);
    coeff(0, 0) = 1.0;
    CMatrix h = CMatrix::Zero(r, r);
    MomentArnoldiResult out;
    int size = r;

    for (int j = 0; j < r; ++j) {
        for (int i = 0; i <= j; ++i) h(i, j) = detail::moment_form(mom, coeff.col(i), coeff.col(j), 1);

        // Unnormalised next polynomial: M P_j - sum_i h_ij P_i.
        CVector next = CVector::Zero(r + 1);
        next.tail(r) = coeff.col(j).head(r);
        for (int i = 0; i <= j; ++i) next -= h(i, j) * coeff.col(i);
        const double nu2 = detail::moment_form(mom, next, next, 0).real();
        out.subdiagonal_norm_sq.push_back(nu2);
        // |m_l| <= 1, so the rounding error in nu2 is about eps * ||next||_1^2.
        const double l1 = next.cwiseAbs().sum();
        const double floor = std::max(tol2, 8.0 * std::numeric_limits<double>::epsilon() * l1 * l1);

        if (nu2 < -floor) {
            out.status = BreakdownStatus::noise_dominated;
            out.breakdown_at = j + 1;
            size = j + 1;
            break;
        }
        if (nu2 < floor) {
            out.status = BreakdownStatus::exact;
            out.breakdown_at = j + 1;
            size = j + 1;
            break;
        }
        if (j + 1 < r) {
            const double nu = std::sqrt(nu2);
            h(j + 1, j) = nu;
            coeff.col(j + 1) = next / nu;
        }
    }
    out.projected.entries = h.topLeftCorner(size, size);
    return out;
}

// ---------------------------------------------------------------------------
// Quadrature

/// Eigen-decomposition of a small square matrix with a conditioning check.
struct SmallEigen {
    CVector values;
    CMatrix vectors;
    CMatrix inverse;
};

inline SmallEigen small_eigen(const CMatrix& a, double max_cond = 1e12) {
    Eigen::ComplexEigenSolver<CMatrix> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    SmallEigen out{es.eigenvalues(), es.eigenvectors(), {}};
    Eigen::JacobiSVD<CMatrix> svd(out.vectors);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(sv.size() - 1);
    if (!(cond <= max_cond))
        throw NumericalError("projected matrix is not diagonalizable (eigenvector condition " +
                             std::to_string(cond) + ")");
    out.inverse = out.vectors.inverse();
    return out;
}

/// norm_sq * f([M])_{00} via eigen-decomposition of [M].
inline cplx quadrature(const std::function<cplx(cplx)>& f, const HessenbergMatrix& projected,
                       double norm_sq_chi0) {
    require(projected.r() >= 1, "projected", "empty matrix");
    const auto ed = small_eigen(projected.entries);
    cplx acc{};
    for (Eigen::Index k = 0; k < ed.values.size(); ++k)
        acc += ed.vectors(0, k) * f(ed.values(k)) * ed.inverse(k, 0);
    return norm_sq_chi0 * acc;
}

/// [(z I - A)^-1]_{00} by a direct solve.
inline cplx resolvent_00(const CMatrix& a, cplx z) {
    const Eigen::Index n = a.rows();
    CMatrix shifted = -a;
    shifted.diagonal().array() += z;
    CVector e0 = CVector::Zero(n);
    e0(0) = 1.0;
    const CVector x = Eigen::PartialPivLU<CMatrix>(shifted).solve(e0);
    if (!is_finite(x(0))) throw NumericalError("resolvent: singular shifted matrix");
    return x(0);
}

inline std::string hessenberg_csv(const HessenbergMatrix& h) {
    std::ostringstream os;
    os.precision(17);
    os << "i,j,re,im\n";
    for (Eigen::Index i = 0; i < h.r(); ++i)
        for (Eigen::Index j = 0; j < h.r(); ++j)
            os << i << ',' << j << ',' << h.entries(i, j).real() << ',' << h.entries(i, j).imag() << '\n';
    return os.str();
}

}  // namespace roqam
