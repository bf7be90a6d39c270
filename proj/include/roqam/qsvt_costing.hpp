#pragma once

// QSVT matrix-inversion costing.
//
// p_MI(x) = p_inv(x) p_rect(x) / (2 kappa), where p_inv is the Chebyshev
// truncation of (1 - (1 - x^2)^b) / x and p_rect is a sum of two polynomial
// error functions that switches p_inv off for |x| < 1/kappa.
//
// The rectangle is 1 + [E(x - c) - E(x + c)] / 2 with c = 1/(2 kappa) and
// half-width w = 1/(4 kappa).  E(y) = erf(k y) with k = erfc^-1(eps_rect) / w
// is expanded in Chebyshev polynomials of s = y / (1 + c), so its argument
// stays in [-1, 1]; the effective steepness is k' = k (1 + c).

#include "roqam/cost_model.hpp"
#include "roqam/exact_reference.hpp"
#include "roqam/fermion_model.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <sstream>

namespace roqam {

struct InversionPolyParams {
    double kappa = 0.0;
    double eps_qsvt = 0.0;
    std::int64_t b = 0;
    std::int64_t d = 0;
    double eps_rect = 0.0;
    double beta_e = 0.0;    // k'^2 / 2, the first argument scale in t
    double steepness = 0.0; // k' in the rescaled variable s
    double center = 0.0;    // c
    std::int64_t t = 0;
    std::int64_t n = 0;     // odd degree of each erf polynomial

    std::int64_t degree() const { return d + n; }
};

inline double effective_kappa(double lam, double sigma_min) {
    require(sigma_min > 0.0, "sigma_min", "must be positive");
    require(lam >= sigma_min, "lam", "must be >= sigma_min");
    return lam / sigma_min;
}

inline InversionPolyParams inversion_poly_params(double kappa, double eps_qsvt) {
    require(kappa > 1.0 && std::isfinite(kappa), "kappa", "must be > 1");
    require(eps_qsvt > 0.0 && eps_qsvt < 1.0, "eps_qsvt", "must lie in (0, 1)");
    InversionPolyParams p;
    p.kappa = kappa;
    p.eps_qsvt = eps_qsvt;
    const double b = std::ceil(kappa * kappa * std::log(kappa / eps_qsvt));
    p.b = static_cast<std::int64_t>(b);
    p.d = static_cast<std::int64_t>(std::ceil(std::sqrt(b * std::log(4.0 * b / eps_qsvt))));
    p.eps_rect = std::min(2.0 * eps_qsvt / (5.0 * kappa), kappa / (2.0 * double(p.d)));
    p.center = 1.0 / (2.0 * kappa);
    const double half_width = 1.0 / (4.0 * kappa);
    const double k = boost::math::erfc_inv(p.eps_rect) / half_width;
    p.steepness = k * (1.0 + p.center);
    p.beta_e = 0.5 * p.steepness * p.steepness;
    const double log4 = std::log(4.0 / p.eps_rect);
    p.t = static_cast<std::int64_t>(std::ceil(std::max(p.beta_e * std::exp(2.0), log4)));
    auto n = static_cast<std::int64_t>(std::ceil(std::sqrt(2.0 * double(p.t) * log4)));
    if (n % 2 == 0) ++n;
    p.n = n;
    return p;
}

namespace detail {

/// exp(-z) I_j(z) for j = 0..jmax by Miller's backward recurrence,
/// normalised with I_0 + 2 sum_j I_j = exp(z).
inline std::vector<double> scaled_bessel_i(double z, int jmax) {
    require(z >= 0.0, "z", "must be >= 0");
    std::vector<double> out(jmax + 1, 0.0);
    if (z == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const int start = jmax + 32 + static_cast<int>(std::ceil(std::sqrt(80.0 * std::max(z, 1.0))));
    double above = 0.0, cur = 1e-300, norm = 0.0;
    for (int j = start; j >= 1; --j) {
        const double below = above + (2.0 * j / z) * cur;  // I_{j-1}
        norm += 2.0 * cur;
        if (j <= jmax) out[j] = cur;
        above = cur;
        cur = below;
        if (cur > 1e250) {
            above *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            for (int i = j; i <= jmax; ++i) out[i] *= 1e-250;
        }
    }
    out[0] = cur;
    norm += cur;
    for (auto& v : out) v /= norm;
    return out;
}

/// Chebyshev values T_0..T_kmax at x via the three-term recurrence.
inline void chebyshev_values(double x, std::vector<double>& t) {
    if (t.empty()) return;
    t[0] = 1.0;
    if (t.size() > 1) t[1] = x;
    for (std::size_t k = 2; k < t.size(); ++k) t[k] = 2.0 * x * t[k - 1] - t[k - 2];
}

}  // namespace detail

/// Chebyshev coefficients of p_inv on T_{2j+1}, j = 0..d:
///   c_j = 4 (-1)^j 2^{-2b} sum_{i=j+1}^{b} C(2b, b+i),
/// with the binomial tail accumulated in log space.
inline std::vector<double> p_inv_coefficients(const InversionPolyParams& p) {
    const std::int64_t b = p.b;
    const double lg2b = std::lgamma(2.0 * b + 1.0) - 2.0 * b * std::log(2.0);
    std::vector<double> tail(static_cast<std::size_t>(p.d + 2), 0.0);
    // tail[j] = 2^{-2b} sum_{i > j} C(2b, b+i), accumulated from i = b down.
    double sum = 0.0, comp = 0.0;
    std::vector<double> by_i(static_cast<std::size_t>(b + 1), 0.0);
    for (std::int64_t i = b; i >= 1; --i) {
        const double term = std::exp(lg2b - std::lgamma(double(b + i) + 1.0) - std::lgamma(double(b - i) + 1.0));
        const double y = term - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if (i - 1 <= p.d) tail[static_cast<std::size_t>(i - 1)] = sum;
    }
    std::vector<double> c(static_cast<std::size_t>(p.d + 1));
    for (std::int64_t j = 0; j <= p.d; ++j)
        c[static_cast<std::size_t>(j)] = 4.0 * ((j % 2) ? -1.0 : 1.0) * (j < b ? tail[static_cast<std::size_t>(j)] : 0.0);
    return c;
}

/// Precomputed evaluator for p_MI.
class MatrixInversionPoly {
public:
    explicit MatrixInversionPoly(const InversionPolyParams& p) : p_(p) {
        inv_ = p_inv_coefficients(p);
        const int jmax = static_cast<int>((p.n - 1) / 2);
        const double z = 0.5 * p.steepness * p.steepness;
        const auto bes = detail::scaled_bessel_i(z, jmax);
        // erf(k' s) = sum_m e_m T_m(s), odd m only.
        erf_.assign(static_cast<std::size_t>(p.n + 1), 0.0);
        const double pref = 2.0 * p.steepness / std::sqrt(kPi);
        erf_[1] += pref * bes[0];
        for (int j = 1; j <= jmax; ++j) {
            const double sgn = (j % 2) ? -1.0 : 1.0;
            erf_[2 * j + 1] += pref * sgn * bes[j] / (2.0 * j + 1.0);
            erf_[2 * j - 1] -= pref * sgn * bes[j] / (2.0 * j - 1.0);
        }
    }

    double p_inv(double x) const {
        std::vector<double> t(static_cast<std::size_t>(2 * p_.d + 2));
        detail::chebyshev_values(x, t);
        double acc = 0.0;
        for (std::size_t j = 0; j < inv_.size(); ++j) acc += inv_[j] * t[2 * j + 1];
        return acc;
    }

    double erf_poly(double s) const {
        std::vector<double> t(erf_.size());
        detail::chebyshev_values(s, t);
        double acc = 0.0;
        for (std::size_t m = 1; m < erf_.size(); m += 2) acc += erf_[m] * t[m];
        return acc;
    }

    double p_rect(double x) const {
        const double scale = 1.0 + p_.center;
        return 1.0 + 0.5 * (erf_poly((x - p_.center) / scale) - erf_poly((x + p_.center) / scale));
    }

    double operator()(double x) const {
        require(std::abs(x) <= 1.0, "x", "must lie in [-1, 1]");
        return p_inv(x) * p_rect(x) / (2.0 * p_.kappa);
    }

    const InversionPolyParams& params() const { return p_; }

private:
    InversionPolyParams p_;
    std::vector<double> inv_;
    std::vector<double> erf_;
};

inline double eval_p_mi(double x, const InversionPolyParams& p) { return MatrixInversionPoly(p)(x); }

// ---------------------------------------------------------------------------
// Per-frequency T counts

struct QsvtCostOptions {
    double p_fail = 0.05;
    double frac_qae = 0.90;
    double frac_qsvt = 0.05;
    double frac_syn = 0.05;
    LogBase iqae_log = LogBase::natural;
};

/// Poles of one resolvent branch: energies E_n with weight on the starting
/// state, and the block-encoded operator's identity coefficient.
struct BranchSupport {
    std::vector<double> energies;
};

namespace detail {

inline BranchSupport branch_support(const Spectrum& s, const CVector& chi) {
    BranchSupport b;
    const CVector c = s.eigenvectors.adjoint() * chi;
    for (Eigen::Index n = 0; n < c.size(); ++n)
        if (std::norm(c(n)) > 1e-12) b.energies.push_back(s.eigenvalues(n));
    return b;
}

}  // namespace detail

/// Everything the per-frequency QSVT cost needs from one model.
struct QsvtModel {
    double lambda_terms = 0.0;  // sum of |Pauli coefficients|, identity excluded
    double identity = 0.0;
    int n_terms = 0;
    double e0 = 0.0;
    BranchSupport forward, backward;
    double norm_sq_forward = 0.0, norm_sq_backward = 0.0;
};

inline QsvtModel make_qsvt_model(const FermionHamiltonian& h, const Spectrum& s, const GroundPair& g, int p = 0) {
    QsvtModel m;
    m.lambda_terms = subnormalization(h.terms, 0.0);
    m.identity = h.terms.identity_coefficient;
    m.n_terms = static_cast<int>(h.terms.size());
    m.e0 = g.e0;
    const CVector up = apply_ladder(LadderKind::create, p, g.psi0);
    const CVector dn = apply_ladder(LadderKind::annihilate, p, g.psi0);
    m.forward = detail::branch_support(s, up);
    m.backward = detail::branch_support(s, dn);
    m.norm_sq_forward = up.squaredNorm();
    m.norm_sq_backward = dn.squaredNorm();
    return m;
}

/// T count of one branch at complex frequency z.  The forward operator is
/// (z + E0) - H, the backward one (z - E0) + H; the Hamiltonian's identity
/// coefficient merges into the shift term of the LCU.
inline ResourceReport qsvt_branch_cost(const QsvtModel& m, bool forward, cplx z, double eps_abs,
                                       const QsvtCostOptions& opt = {}) {
    require(eps_abs > 0.0, "eps_target", "must be positive");
    const auto& support = forward ? m.forward : m.backward;
    ResourceReport rep;
    const std::string tag = forward ? "forward" : "backward";
    if (support.energies.empty()) return rep;

    const cplx shift = forward ? z + m.e0 - m.identity : z - m.e0 + m.identity;
    const double lam = m.lambda_terms + std::abs(shift);
    double sigma_min = std::numeric_limits<double>::infinity();
    for (double e : support.energies) {
        const cplx ev = forward ? z + m.e0 - e : z - m.e0 + e;
        sigma_min = std::min(sigma_min, std::abs(ev));
    }
    if (!(sigma_min > 1e-12)) {
        rep.feasible = false;
        rep.context["status"] = "infeasible: frequency on a supported pole";
        return rep;
    }
    const double kappa = std::max(effective_kappa(lam, sigma_min), 1.0 + 1e-9);

    const double eps_qae = opt.frac_qae * eps_abs * sigma_min / 2.0;
    const double eps_qsvt = std::min(opt.frac_qsvt * eps_abs * 2.0 * kappa, 0.5);
    const auto params = inversion_poly_params(kappa, eps_qsvt);
    const std::int64_t degree = params.degree();
    const std::int64_t n_iqae = iqae_queries(std::min(eps_qae, 0.5), opt.p_fail, opt.iqae_log);

    // Each IQAE iterate applies the Hadamard-test circuit and its inverse.
    const std::int64_t queries = n_iqae * 2 * degree;
    const auto lcu = lcu_costs(m.n_terms, true);
    const std::int64_t rotations = queries * (lcu.rotations + 1);
    const double eps_rot = std::min(opt.frac_syn * eps_abs * sigma_min / 2.0 / double(rotations), 0.5);
    const auto rot_t = static_cast<std::int64_t>(std::ceil(double(rotations) * rotation_t_cost(eps_rot)));

    rep.queries = queries;
    rep.rotation_count = rotations;
    rep.add(tag + "_select", queries * lcu.select_t);
    rep.add(tag + "_rotations", rot_t);
    rep.context[tag + "_kappa"] = format_double(kappa);
    rep.context[tag + "_degree"] = std::to_string(degree);
    rep.context[tag + "_sigma_min"] = format_double(sigma_min);
    rep.context[tag + "_iqae_queries"] = std::to_string(n_iqae);
    return rep;
}

struct QsvtPointReport {
    cplx z;
    double kappa = 0.0;  // larger of the two branches
    std::int64_t degree = 0;
    ResourceReport report;
};

/// Both branches at one frequency; eps_target is the absolute error allowed
/// on G(z), split evenly between the branches.
inline QsvtPointReport qsvt_t_count(const QsvtModel& m, cplx z, double eps_target, const QsvtCostOptions& opt = {}) {
    QsvtPointReport out;
    out.z = z;
    out.report.context["frequency"] = format_double(z.real()) + (z.imag() >= 0 ? "+" : "") +
                                      format_double(z.imag()) + "i";
    for (bool forward : {true, false}) {
        const auto b = qsvt_branch_cost(m, forward, z, eps_target / 2.0, opt);
        if (!b.feasible) {
            out.report.feasible = false;
            out.report.context["status"] = b.context.at("status");
        }
        out.report.absorb(b);
        for (const auto& [k, v] : b.context) out.report.context[k] = v;
        const std::string tag = forward ? "forward" : "backward";
        if (auto it = b.context.find(tag + "_kappa"); it != b.context.end()) {
            out.kappa = std::max(out.kappa, std::stod(it->second));
            out.degree = std::max<std::int64_t>(out.degree, std::stoll(b.context.at(tag + "_degree")));
        }
    }
    return out;
}

struct QsvtSweep {
    ResourceReport total;
    QsvtPointReport hardest;
    std::size_t hardest_index = 0;
    std::vector<QsvtPointReport> points;
    std::size_t infeasible = 0;
};

inline QsvtSweep qsvt_sweep(const QsvtModel& m, const std::vector<cplx>& zs, double eps_target,
                            const QsvtCostOptions& opt = {}) {
    require(!zs.empty(), "grid", "must contain at least one point");
    QsvtSweep sw;
    bool have = false;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        auto pt = qsvt_t_count(m, zs[i], eps_target, opt);
        if (!pt.report.feasible) {
            ++sw.infeasible;
            sw.points.push_back(pt);
            continue;
        }
        sw.total.absorb(pt.report);
        if (!have || pt.report.t_count > sw.hardest.report.t_count) {
            sw.hardest = pt;
            sw.hardest_index = i;
            have = true;
        }
        sw.points.push_back(pt);
    }
    sw.total.context["n_omega"] = std::to_string(zs.size());
    if (sw.infeasible) sw.total.context["warning"] = std::to_string(sw.infeasible) + " infeasible frequencies excluded";
    return sw;
}

/// One row per point, labelled by the caller's grid coordinate.
inline std::string qsvt_sweep_csv(const QsvtSweep& sw, const std::vector<double>& omegas) {
    require(omegas.size() == sw.points.size(), "grid", "one omega per sweep point");
    std::ostringstream os;
    os.precision(17);
    os << "omega,kappa,degree,t_count\n";
    for (std::size_t i = 0; i < sw.points.size(); ++i) {
        const auto& p = sw.points[i];
        os << omegas[i] << ',' << p.kappa << ',' << p.degree << ','
           << (p.report.feasible ? std::to_string(p.report.t_count) : "") << '\n';
    }
    return os.str();
}

}  // namespace roqam
