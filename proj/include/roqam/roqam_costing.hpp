#pragma once

// T-gate costing of moment estimation: each m[l] = <chi|U^l|chi> is
// estimated by a Hadamard test wrapped in IQAE, with U a product formula
// over the Pauli terms of H.  The budget delta_l is split between the
// estimator (eps_qae), the Trotter error computed directly (eps_trot) and
// rotation synthesis (eps_syn).

#include "roqam/cost_model.hpp"
#include "roqam/emulation.hpp"
#include "roqam/exact_reference.hpp"
#include "roqam/fermion_model.hpp"

#include <array>
#include <bit>
#include <map>
#include <sstream>

namespace roqam {

struct TrotterSpec {
    int order = 2;  // 1, 2 or 4
    int steps = 1;
    double dt = 0.0;

    void validate() const {
        require(order == 1 || order == 2 || order == 4, "order", "supported Trotter orders are 1, 2 and 4");
        require(steps >= 1, "steps", "must be >= 1");
        require(std::isfinite(dt), "dt", "must be finite");
    }
};

/// Synthesized rotations in one Trotter step over n_terms non-identity words.
inline std::int64_t rotations_per_step(int order, int n_terms) {
    switch (order) {
        case 1: return n_terms;
        case 2: return 2LL * n_terms - 1;
        case 4: return 5LL * (2LL * n_terms - 1);
        default: throw ValidationError("order", "supported Trotter orders are 1, 2 and 4");
    }
}

namespace detail {

struct PauliKernel {
    std::uint64_t flip = 0;
    std::uint64_t phase_mask = 0;
    cplx phase{1.0, 0.0};  // i^{#Y}
    double coefficient = 0.0;
};

inline std::vector<PauliKernel> pauli_kernels(const PauliTermSum& sum) {
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::vector<PauliKernel> out;
    for (const auto& t : sum.terms) {
        PauliKernel k;
        int n_y = 0;
        for (int q = 0; q < static_cast<int>(t.word.size()); ++q) {
            const std::uint64_t bit = std::uint64_t{1} << q;
            switch (t.word[q]) {
                case 'I': break;
                case 'X': k.flip |= bit; break;
                case 'Y': k.flip |= bit; k.phase_mask |= bit; ++n_y; break;
                case 'Z': k.phase_mask |= bit; break;
                default: throw ValidationError("word", "unexpected Pauli letter");
            }
        }
        k.phase = kIPow[n_y % 4];
        k.coefficient = t.coefficient;
        out.push_back(k);
    }
    return out;
}

/// psi <- exp(-i theta P) psi = cos(theta) psi - i sin(theta) P psi.
inline void apply_pauli_exponential(const PauliKernel& k, double theta, CVector& psi) {
    const double c = std::cos(theta), s = std::sin(theta);
    const cplx f = cplx(0.0, -s) * k.phase;
    const auto dim = static_cast<std::uint64_t>(psi.size());
    if (k.flip == 0) {
        for (std::uint64_t x = 0; x < dim; ++x) {
            const double sign = (std::popcount(x & k.phase_mask) & 1) ? -1.0 : 1.0;
            psi(x) *= c + sign * f;
        }
        return;
    }
    // Pair x with y = x ^ flip and update both once.
    const std::uint64_t top = std::uint64_t{1} << (std::bit_width(k.flip) - 1);
    for (std::uint64_t x = 0; x < dim; ++x) {
        if (x & top) continue;
        const std::uint64_t y = x ^ k.flip;
        const double sx = (std::popcount(x & k.phase_mask) & 1) ? -1.0 : 1.0;
        const double sy = (std::popcount(y & k.phase_mask) & 1) ? -1.0 : 1.0;
        const cplx a = psi(x), b = psi(y);
        // (P psi)(y) = sx phase a,  (P psi)(x) = sy phase b
        psi(x) = c * a + f * sy * b;
        psi(y) = c * b + f * sx * a;
    }
}

}  // namespace detail

/// Applies the product-formula approximation of exp(-i H dt) to vectors.
/// The identity coefficient contributes an exact global phase.
class TrotterPropagator {
public:
    TrotterPropagator(const FermionHamiltonian& h, const TrotterSpec& spec)
        : kernels_(detail::pauli_kernels(h.terms)), spec_(spec), identity_(h.terms.identity_coefficient) {
        spec.validate();
        if (spec.order == 4) {
            const double p = 1.0 / (4.0 - std::cbrt(4.0));
            stages_ = {p, p, 1.0 - 4.0 * p, p, p};
        }
    }

    void apply(CVector& psi) const {
        const double tau = spec_.dt / spec_.steps;
        for (int s = 0; s < spec_.steps; ++s) {
            switch (spec_.order) {
                case 1:
                    for (const auto& k : kernels_) detail::apply_pauli_exponential(k, k.coefficient * tau, psi);
                    break;
                case 2: strang(tau, psi); break;
                case 4:
                    for (double w : stages_) strang(w * tau, psi);
                    break;
            }
        }
        psi *= std::polar(1.0, -identity_ * spec_.dt);
    }

    int n_terms() const { return static_cast<int>(kernels_.size()); }

private:
    void strang(double tau, CVector& psi) const {
        const auto n = kernels_.size();
        if (n == 0) return;
        for (std::size_t i = 0; i + 1 < n; ++i)
            detail::apply_pauli_exponential(kernels_[i], kernels_[i].coefficient * tau / 2.0, psi);
        detail::apply_pauli_exponential(kernels_[n - 1], kernels_[n - 1].coefficient * tau, psi);
        for (std::size_t i = n - 1; i-- > 0;)
            detail::apply_pauli_exponential(kernels_[i], kernels_[i].coefficient * tau / 2.0, psi);
    }

    std::vector<detail::PauliKernel> kernels_;
    TrotterSpec spec_;
    double identity_ = 0.0;
    std::array<double, 5> stages_{};
};

inline CMatrix trotter_unitary(const FermionHamiltonian& h, const TrotterSpec& spec) {
    require(h.dim() <= 4096, "dim", "dense Trotter products are limited to dimension 4096");
    const TrotterPropagator prop(h, spec);
    CMatrix u = CMatrix::Identity(h.dim(), h.dim());
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        CVector col = u.col(j);
        prop.apply(col);
        u.col(j) = col;
    }
    return u;
}

/// exp(-i H t) applied through the exact spectrum.
inline CVector exact_evolution(const Spectrum& s, const CVector& psi, double t) {
    CVector c = s.eigenvectors.adjoint() * psi;
    for (Eigen::Index n = 0; n < c.size(); ++n) c(n) *= std::polar(1.0, -s.eigenvalues(n) * t);
    return s.eigenvectors * c;
}

/// |<chi|(U_trot^l - U^l)|chi>| for the normalized chi0.
inline double trotter_error(const FermionHamiltonian& h, const CVector& chi0, int l, const TrotterSpec& spec) {
    require(l >= 0, "l", "must be >= 0");
    const double nrm = chi0.norm();
    require(nrm > 0.0, "chi0", "starting vector is zero");
    const CVector chi = chi0 / nrm;
    const TrotterPropagator prop(h, spec);
    CVector psi = chi;
    for (int i = 0; i < l; ++i) prop.apply(psi);
    const CVector ex = exact_evolution(diagonalize(h), chi, spec.dt * l);
    return std::abs(chi.dot(psi - ex));
}

// ---------------------------------------------------------------------------
// Per-step optimization

struct CostSplit {
    double qae = 0.0, trot = 0.0, syn = 0.0;  // fractions of delta_l
};

struct StepCostOptions {
    std::vector<int> orders{1, 2, 4};
    std::vector<int> steps{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    std::vector<CostSplit> splits{{0.10, 0.45, 0.45}, {0.45, 0.10, 0.45}, {0.45, 0.45, 0.10},
                                  {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    double p_fail = 0.05;
    LogBase iqae_log = LogBase::natural;
};

struct StepCostPlan {
    int l = 0;
    double delta_l = 0.0;
    TrotterSpec trotter;
    double eps_qae = 0.0, eps_trot = 0.0, eps_syn = 0.0;
    std::int64_t iqae_queries = 0;
    std::int64_t rotations = 0;
    std::int64_t t_count = 0;

    bool feasible() const { return eps_qae + eps_trot + eps_syn <= delta_l; }
};

/// Scans the candidate grid for one starting state, memoizing U_trot^l chi
/// per (order, steps) so that successive powers reuse earlier work.
class StepCostOptimizer {
public:
    StepCostOptimizer(const FermionHamiltonian& h, const Spectrum& s, const CVector& chi0, double dt,
                      StepCostOptions opt = {})
        : h_(h), spectrum_(s), dt_(dt), opt_(std::move(opt)) {
        const double nrm = chi0.norm();
        require(nrm > 0.0, "chi0", "starting vector is zero");
        require(dt > 0.0 && std::isfinite(dt), "dt", "must be positive");
        chi_ = chi0 / nrm;
        n_terms_ = static_cast<int>(h.terms.size());
        require(n_terms_ >= 1, "terms", "Hamiltonian has no non-identity Pauli terms");
    }

    double trotter_error(int order, int steps, int l) {
        return std::abs(chi_.dot(trotter_power(order, steps, l) - exact_power(l)));
    }

    StepCostPlan optimize(int l, double delta_l) {
        require(l >= 1, "l", "must be >= 1");
        require(delta_l > 0.0 && std::isfinite(delta_l), "delta_l", "must be positive");
        std::optional<StepCostPlan> best;
        for (int order : opt_.orders) {
            for (const auto& split : opt_.splits) {
                const double trot_budget = split.trot * delta_l;
                for (int steps : opt_.steps) {
                    const double err = trotter_error(order, steps, l);
                    if (err > trot_budget) continue;
                    auto plan = cost(l, delta_l, order, steps, split, err);
                    if (!best || plan.t_count < best->t_count) best = plan;
                    break;  // more steps only cost more at this split
                }
            }
        }
        if (!best)
            throw NumericalError("no Trotter candidate meets delta_" + std::to_string(l) + " = " +
                                 format_double(delta_l));
        return *best;
    }

private:
    StepCostPlan cost(int l, double delta_l, int order, int steps, const CostSplit& split, double err) const {
        StepCostPlan p;
        p.l = l;
        p.delta_l = delta_l;
        p.trotter = {order, steps, dt_};
        p.eps_qae = std::min(split.qae * delta_l, 0.5);
        p.eps_trot = err;
        p.eps_syn = std::min(split.syn * delta_l, 0.5);
        while (p.eps_qae + p.eps_trot + p.eps_syn > delta_l) p.eps_syn = std::nextafter(p.eps_syn, 0.0);

        p.iqae_queries = iqae_queries(p.eps_qae, opt_.p_fail, opt_.iqae_log);
        // Grover iterate: Hadamard test and its inverse, each with a
        // controlled U^l costing controlled_query_multiplier() queries.
        const std::int64_t per_iterate = 2LL * controlled_query_multiplier() * l * steps *
                                         rotations_per_step(order, n_terms_);
        p.rotations = p.iqae_queries * per_iterate;
        const double eps_rot = std::min(p.eps_syn / double(p.rotations), 0.5);
        p.t_count = static_cast<std::int64_t>(std::ceil(double(p.rotations) * rotation_t_cost(eps_rot)));
        return p;
    }

    const CVector& exact_power(int l) {
        auto it = exact_.find(l);
        if (it == exact_.end()) it = exact_.emplace(l, exact_evolution(spectrum_, chi_, dt_ * l)).first;
        return it->second;
    }

    const CVector& trotter_power(int order, int steps, int l) {
        auto& seq = cache_[{order, steps}];
        if (seq.empty()) seq.push_back(chi_);
        if (static_cast<int>(seq.size()) <= l) {
            const TrotterPropagator prop(h_, {order, steps, dt_});
            while (static_cast<int>(seq.size()) <= l) {
                CVector next = seq.back();
                prop.apply(next);
                seq.push_back(std::move(next));
            }
        }
        return seq[static_cast<std::size_t>(l)];
    }

    const FermionHamiltonian& h_;
    const Spectrum& spectrum_;
    CVector chi_;
    double dt_;
    StepCostOptions opt_;
    int n_terms_ = 0;
    std::map<std::pair<int, int>, std::vector<CVector>> cache_;
    std::map<int, CVector> exact_;
};

inline StepCostPlan optimize_step_cost(const FermionHamiltonian& h, const CVector& chi0, int l, double delta_l,
                                       double dt, const StepCostOptions& opt = {}) {
    const auto s = diagonalize(h);
    StepCostOptimizer o(h, s, chi0, dt, opt);
    return o.optimize(l, delta_l);
}

struct RoqamCostConfig {
    int r = 2;
    double delta1 = 1e-3;
    Budget budget = Budget::EB3;
    double dt = 0.0;  // <= 0 selects the default timestep
    int mode = 0;     // impurity orbital p of G_pp
    bool forward = true;
    bool backward = true;
    StepCostOptions options;
};

struct RoqamCostResult {
    ResourceReport report;
    std::vector<std::pair<std::string, StepCostPlan>> plans;  // (branch, plan)
};

inline RoqamCostResult roqam_total_t(const FermionHamiltonian& h, const Spectrum& s, const GroundPair& g,
                                     const RoqamCostConfig& cfg) {
    require(cfg.r >= 1, "r", "must be >= 1");
    require(cfg.delta1 > 0.0, "delta1", "resource estimates need a positive delta1");
    const double dt = cfg.dt > 0.0 ? cfg.dt : default_timestep(operator_norm(s));
    NoiseModel nm;
    nm.budget = cfg.budget;
    nm.delta_base = cfg.delta1;
    nm.r = cfg.r;
    const auto deltas = error_budget(nm);

    RoqamCostResult out;
    auto& rep = out.report;
    rep.context["r"] = std::to_string(cfg.r);
    rep.context["delta1"] = format_double(cfg.delta1);
    rep.context["budget"] = to_string(cfg.budget);
    rep.context["dt"] = format_double(dt);
    rep.context["n_terms"] = std::to_string(h.terms.size());
    for (bool forward : {true, false}) {
        if (forward ? !cfg.forward : !cfg.backward) continue;
        const CVector chi =
            apply_ladder(forward ? LadderKind::create : LadderKind::annihilate, cfg.mode, g.psi0);
        if (chi.norm() == 0.0) continue;
        const std::string branch = forward ? "forward" : "backward";
        StepCostOptimizer opt(h, s, chi, dt, cfg.options);
        for (int l = 1; l <= cfg.r; ++l) {
            const auto plan = opt.optimize(l, deltas[static_cast<std::size_t>(l - 1)]);
            rep.add(branch + "_l" + std::to_string(l), plan.t_count);
            rep.rotation_count += plan.rotations;
            rep.queries += plan.iqae_queries;
            out.plans.emplace_back(branch, plan);
        }
    }
    return out;
}

}  // namespace roqam
