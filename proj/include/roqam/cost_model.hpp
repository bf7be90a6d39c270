#pragma once

// Cost primitives shared by both costing pipelines: the IQAE query bound,
// single-rotation synthesis cost, LCU block-encoding costs and the
// ResourceReport container.

#include "roqam/core.hpp"

#include <map>
#include <string>

namespace roqam {

struct ResourceReport {
    std::int64_t t_count = 0;
    std::int64_t rotation_count = 0;
    std::int64_t queries = 0;
    std::map<std::string, std::int64_t> breakdown;   // sums to t_count
    std::map<std::string, std::string> context;
    bool feasible = true;

    void add(const std::string& label, std::int64_t t) {
        breakdown[label] += t;
        t_count += t;
    }

    /// Adds counts and breakdown of another report under a prefix.
    void absorb(const ResourceReport& other, const std::string& prefix = "") {
        for (const auto& [k, v] : other.breakdown) breakdown[prefix + k] += v;
        t_count += other.t_count;
        rotation_count += other.rotation_count;
        queries += other.queries;
    }
};

enum class LogBase { natural, two };

/// Clopper-Pearson IQAE query bound
///   N = ceil((0.8 / eps) * log(2 / (p_fail * log(pi / (4 eps))))).
inline std::int64_t iqae_queries(double eps_qae, double p_fail, LogBase base = LogBase::natural) {
    require(eps_qae > 0.0 && eps_qae < 1.0, "eps_qae", "must lie in (0, 1)");
    require(p_fail > 0.0 && p_fail < 1.0, "p_fail", "must lie in (0, 1)");
    const auto lg = [base](double x) { return base == LogBase::natural ? std::log(x) : std::log2(x); };
    const double inner = lg(kPi / (4.0 * eps_qae));
    require(inner > 0.0, "eps_qae", "too large for the IQAE bound (log(pi/4eps) <= 0)");
    const double n = (0.8 / eps_qae) * lg(2.0 / (p_fail * inner));
    return static_cast<std::int64_t>(std::ceil(std::max(n, 1.0)));
}

/// Expected T gates per synthesized single-qubit rotation at precision eps.
inline double rotation_t_cost(double eps_syn) {
    require(eps_syn > 0.0 && eps_syn < 1.0, "eps_syn", "must lie in (0, 1)");
    return 0.53 * std::log2(1.0 / eps_syn) + 4.86;
}

/// Controlled-U costs two U queries because chi0 is not an eigenstate.
constexpr int controlled_query_multiplier() { return 2; }

struct LcuCosts {
    std::int64_t prepare_rotations = 0;  // one prepare oracle
    std::int64_t select_t = 0;           // controlled select by unary iteration
    std::int64_t rotations = 0;          // prepare + unprepare
    std::int64_t t_gates = 0;            // select only; rotations are costed separately
};

/// LCU block encoding over n_terms Pauli words; with_identity adds the
/// identity-shift term to the prepare state.
inline LcuCosts lcu_costs(int n_terms, bool with_identity = false) {
    require(n_terms >= 1, "n_terms", "must be >= 1");
    LcuCosts c;
    c.prepare_rotations = n_terms - 1 + (with_identity ? 1 : 0);
    c.select_t = 4LL * n_terms - 4;
    c.rotations = 2 * c.prepare_rotations;
    c.t_gates = c.select_t;
    return c;
}

}  // namespace roqam
