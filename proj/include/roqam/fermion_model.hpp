#pragma once

// Single-impurity Anderson model: parameters, dense many-body Hamiltonian,
// Jordan-Wigner Pauli decomposition and fermionic ladder operators.
//
// Mode layout (fixed, recorded in FermionHamiltonian::mode_labels):
//   mode 0        impurity, spin up
//   mode 1        impurity, spin down
//   mode 2 + 2j   bath site j, spin up
//   mode 3 + 2j   bath site j, spin down
// Mode p is qubit p, which is bit p of a computational-basis index
// (bit set = occupied).  Character k of a Pauli word acts on qubit k.
//
// Ladder operators follow a_p = Z_0 ... Z_{p-1} (X_p + i Y_p)/2.

#include "roqam/core.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace roqam {

inline constexpr int kMaxDenseModes = 14;

struct SiamParams {
    double u = 0.0;
    double mu = 0.0;
    double eps_imp = 0.0;
    std::vector<double> eps_bath;
    std::vector<double> v;
    int n_bath = 1;
    double bandwidth = 4.0;  // sets the default broadening 0.1 * bandwidth

    int n_modes() const { return 2 * (n_bath + 1); }
    double default_gamma() const { return 0.1 * bandwidth; }

    void validate() const {
        require(n_bath >= 1, "n_bath", "must be >= 1");
        require(static_cast<int>(eps_bath.size()) == n_bath, "eps_bath",
                "length must equal n_bath");
        require(static_cast<int>(v.size()) == n_bath, "v", "length must equal n_bath");
        require(bandwidth > 0.0 && std::isfinite(bandwidth), "bandwidth", "must be positive");
        require(std::isfinite(u) && std::isfinite(mu) && std::isfinite(eps_imp), "u",
                "u, mu and eps_imp must be finite");
        for (double x : v) require(std::isfinite(x), "v", "hopping amplitudes must be finite");
        for (double x : eps_bath) require(std::isfinite(x), "eps_bath", "bath levels must be finite");
    }
};

enum class LadderKind { create, annihilate };
enum class Spin { up = 0, down = 1 };

constexpr int impurity_mode(Spin s) { return static_cast<int>(s); }
constexpr int bath_mode(int site, Spin s) { return 2 + 2 * site + static_cast<int>(s); }

struct PauliTerm {
    double coefficient = 0.0;
    std::string word;  // over {I,X,Y,Z}, length n_modes
};

/// Pauli decomposition without the identity word; the identity coefficient
/// is kept separately so the dense matrix can be rebuilt exactly.
struct PauliTermSum {
    std::vector<PauliTerm> terms;
    double identity_coefficient = 0.0;
    int n_modes = 0;

    std::size_t size() const { return terms.size(); }
};

struct FermionHamiltonian {
    SiamParams params;
    int n_modes = 0;
    CMatrix dense;
    PauliTermSum terms;
    std::vector<std::string> mode_labels;

    Eigen::Index dim() const { return dense.rows(); }
};

// ---------------------------------------------------------------------------
// Parameterisation

/// Analytic two-site DMFT solution at half filling, with the hopping rescaled
/// by 1/sqrt(n_bath) so the hybridization function stays fixed.
inline SiamParams two_site_dmft_params(double u, int n_bath, double bandwidth = 4.0) {
    require(u >= 0.0 && std::isfinite(u), "u", "must be >= 0");
    require(n_bath >= 1, "n_bath", "must be >= 1");
    SiamParams p;
    p.u = u;
    p.mu = u / 2.0;
    p.eps_imp = 0.0;
    p.n_bath = n_bath;
    p.bandwidth = bandwidth;
    const double v1 = u < 6.0 ? std::sqrt(1.0 - u * u / 36.0) : 0.0;
    p.eps_bath.assign(n_bath, p.mu);
    p.v.assign(n_bath, v1 / std::sqrt(static_cast<double>(n_bath)));
    return p;
}

/// Number of Pauli terms the SIAM carries for generic parameters.
constexpr int structural_term_count(int n_bath) { return 3 + 6 * n_bath; }

inline std::vector<std::string> mode_labels(int n_bath) {
    std::vector<std::string> out{"imp_up", "imp_dn"};
    for (int j = 0; j < n_bath; ++j) {
        out.push_back("bath" + std::to_string(j) + "_up");
        out.push_back("bath" + std::to_string(j) + "_dn");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bit-level fermion algebra

namespace detail {

inline int parity_below(std::uint64_t state, int mode) {
    const std::uint64_t mask = (std::uint64_t{1} << mode) - 1;
    return std::popcount(state & mask) & 1;
}

/// a_p or a_p^dagger on one basis state.  Returns false when annihilated.
inline bool ladder_on_state(LadderKind kind, int mode, std::uint64_t& state, double& sign) {
    const std::uint64_t bit = std::uint64_t{1} << mode;
    const bool occupied = state & bit;
    if ((kind == LadderKind::annihilate) != occupied) return false;
    sign *= parity_below(state, mode) ? -1.0 : 1.0;
    state ^= bit;
    return true;
}

inline void check_mode(int mode, int n_modes) {
    require(n_modes >= 1 && n_modes <= kMaxDenseModes, "n_modes",
            "must be in [1, " + std::to_string(kMaxDenseModes) + "]");
    require(mode >= 0 && mode < n_modes, "mode_index", "out of range");
}

}  // namespace detail

/// Applies a_p (or a_p^dagger) to a state vector on 2^n_modes amplitudes.
inline CVector apply_ladder(LadderKind kind, int mode, const CVector& psi) {
    const auto dim = static_cast<std::uint64_t>(psi.size());
    const int n_modes = std::countr_zero(dim);
    require(std::has_single_bit(dim), "state", "dimension must be a power of two");
    detail::check_mode(mode, n_modes);
    CVector out = CVector::Zero(psi.size());
    for (std::uint64_t s = 0; s < dim; ++s) {
        if (psi(s) == cplx{}) continue;
        std::uint64_t t = s;
        double sign = 1.0;
        if (detail::ladder_on_state(kind, mode, t, sign)) out(t) += sign * psi(s);
    }
    return out;
}

/// Dense 2^n x 2^n matrix of a_p or a_p^dagger.
inline CMatrix mode_operator(LadderKind kind, int mode, int n_modes) {
    detail::check_mode(mode, n_modes);
    const std::uint64_t dim = std::uint64_t{1} << n_modes;
    CMatrix op = CMatrix::Zero(dim, dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
        std::uint64_t t = s;
        double sign = 1.0;
        if (detail::ladder_on_state(kind, mode, t, sign)) op(t, s) = sign;
    }
    return op;
}

// ---------------------------------------------------------------------------
// Hamiltonian assembly

namespace detail {

inline std::vector<double> onsite_energies(const SiamParams& p) {
    std::vector<double> e(p.n_modes(), 0.0);
    e[0] = e[1] = p.eps_imp - p.mu;
    for (int j = 0; j < p.n_bath; ++j)
        e[bath_mode(j, Spin::up)] = e[bath_mode(j, Spin::down)] = p.eps_bath[j] - p.mu;
    return e;
}

/// c_p^dagger c_q on a basis state (p != q).
inline bool hop_on_state(int p, int q, std::uint64_t& state, double& sign) {
    return ladder_on_state(LadderKind::annihilate, q, state, sign) &&
           ladder_on_state(LadderKind::create, p, state, sign);
}

}  // namespace detail

inline PauliTermSum jordan_wigner_terms(const SiamParams& params);

/// Dense SIAM Hamiltonian assembled directly in the occupation basis.
inline FermionHamiltonian build_siam(const SiamParams& params) {
    params.validate();
    const int n = params.n_modes();
    require(n <= kMaxDenseModes, "n_bath",
            "dense representation is capped at " + std::to_string(kMaxDenseModes) + " modes");
    const std::uint64_t dim = std::uint64_t{1} << n;
    const auto e = detail::onsite_energies(params);

    CMatrix h = CMatrix::Zero(dim, dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int m = 0; m < n; ++m)
            if (s >> m & 1) diag += e[m];
        if ((s & 1) && (s & 2)) diag += params.u;
        h(s, s) = diag;
        for (int j = 0; j < params.n_bath; ++j) {
            for (Spin sp : {Spin::up, Spin::down}) {
                const int a = impurity_mode(sp);
                const int c = bath_mode(j, sp);
                for (auto [to, from] : {std::pair{a, c}, std::pair{c, a}}) {
                    std::uint64_t t = s;
                    double sign = 1.0;
                    if (detail::hop_on_state(to, from, t, sign)) h(t, s) += sign * params.v[j];
                }
            }
        }
    }

    FermionHamiltonian out;
    out.params = params;
    out.n_modes = n;
    out.dense = std::move(h);
    out.terms = jordan_wigner_terms(params);
    out.mode_labels = mode_labels(params.n_bath);
    return out;
}

/// Jordan-Wigner decomposition.  Words whose coefficient cancels exactly
/// (for example Z on a level sitting at the chemical potential) are dropped.
inline PauliTermSum jordan_wigner_terms(const SiamParams& params) {
    params.validate();
    const int n = params.n_modes();
    const auto e = detail::onsite_energies(params);
    std::map<std::string, double> acc;
    double identity = 0.0;

    auto word_with = [n](std::initializer_list<std::pair<int, char>> ops) {
        std::string w(n, 'I');
        for (auto [q, c] : ops) w[q] = c;
        return w;
    };

    // e n_p = e/2 (I - Z_p)
    for (int m = 0; m < n; ++m) {
        identity += e[m] / 2.0;
        acc[word_with({{m, 'Z'}})] -= e[m] / 2.0;
    }
    // U n_0 n_1 = U/4 (I - Z_0 - Z_1 + Z_0 Z_1)
    identity += params.u / 4.0;
    acc[word_with({{0, 'Z'}})] -= params.u / 4.0;
    acc[word_with({{1, 'Z'}})] -= params.u / 4.0;
    acc[word_with({{0, 'Z'}, {1, 'Z'}})] += params.u / 4.0;
    // V (a_p^dag a_q + h.c.) = V/2 (X Z..Z X + Y Z..Z Y),  p < q
    for (int j = 0; j < params.n_bath; ++j) {
        for (Spin sp : {Spin::up, Spin::down}) {
            const int p = impurity_mode(sp);
            const int q = bath_mode(j, sp);
            for (char c : {'X', 'Y'}) {
                std::string w(n, 'I');
                w[p] = w[q] = c;
                for (int k = p + 1; k < q; ++k) w[k] = 'Z';
                acc[w] += params.v[j] / 2.0;
            }
        }
    }

    PauliTermSum out;
    out.n_modes = n;
    out.identity_coefficient = identity;
    for (auto& [w, c] : acc)
        if (c != 0.0) out.terms.push_back({c, w});
    return out;
}

/// Rebuilds the dense matrix sum_k c_k P_k + identity_shift * I.
inline CMatrix pauli_to_dense(const PauliTermSum& sum, double identity_shift) {
    const int n = sum.n_modes;
    require(n >= 1 && n <= kMaxDenseModes, "n_modes", "out of range");
    const std::uint64_t dim = std::uint64_t{1} << n;
    CMatrix out = CMatrix::Identity(dim, dim) * identity_shift;
    for (const auto& term : sum.terms) {
        require(static_cast<int>(term.word.size()) == n, "word", "length must equal n_modes");
        std::uint64_t flip = 0, phase_mask = 0;
        int n_y = 0;
        for (int q = 0; q < n; ++q) {
            const std::uint64_t bit = std::uint64_t{1} << q;
            switch (term.word[q]) {
                case 'I': break;
                case 'X': flip |= bit; break;
                case 'Y': flip |= bit; phase_mask |= bit; ++n_y; break;
                case 'Z': phase_mask |= bit; break;
                default: throw ValidationError("word", "unexpected Pauli letter");
            }
        }
        static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const cplx base = term.coefficient * kIPow[n_y % 4];
        for (std::uint64_t s = 0; s < dim; ++s) {
            const double sign = (std::popcount(s & phase_mask) & 1) ? -1.0 : 1.0;
            out(s ^ flip, s) += sign * base;
        }
    }
    return out;
}

/// LCU 1-norm: sum of absolute Pauli coefficients plus the identity shift.
inline double subnormalization(const PauliTermSum& terms, double shift) {
    double lam = std::abs(shift);
    for (const auto& t : terms.terms) lam += std::abs(t.coefficient);
    return lam;
}

/// Delta(z) = sum_j V_j^2 / (z - (eps_j - mu)).
inline cplx hybridization(const SiamParams& params, cplx z) {
    params.validate();
    cplx out{};
    for (int j = 0; j < params.n_bath; ++j) {
        const cplx den = z - (params.eps_bath[j] - params.mu);
        if (std::abs(den) < 1e-14) {
            if (params.v[j] == 0.0) continue;
            throw NumericalError("hybridization: z coincides with bath level " + std::to_string(j));
        }
        out += params.v[j] * params.v[j] / den;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plain-text key-value form: `key = value`, '#' comments, sequences
// comma-separated.

/// Shortest text that parses back to the same double.
inline std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

inline std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += format_double(xs[i]);
    }
    return out;
}

inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config", "line " + std::to_string(lineno) + " has no '='");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline double parse_double(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const double x = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return x;
    } catch (const std::exception&) {
        throw ValidationError(key, "not a number: '" + s + "'");
    }
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) out.push_back(parse_double(key, item));
    return out;
}

inline std::string to_key_values(const SiamParams& p) {
    std::ostringstream os;
    os << "u = " << format_double(p.u) << '\n'
       << "mu = " << format_double(p.mu) << '\n'
       << "eps_imp = " << format_double(p.eps_imp) << '\n'
       << "eps_bath = " << join_doubles(p.eps_bath) << '\n'
       << "v = " << join_doubles(p.v) << '\n'
       << "n_bath = " << p.n_bath << '\n'
       << "bandwidth = " << format_double(p.bandwidth) << '\n';
    return os.str();
}

inline SiamParams siam_params_from_key_values(const std::string& text) {
    const auto kv = parse_key_values(text);
    auto get = [&](const char* k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end()) throw ValidationError(k, "missing key");
        return it->second;
    };
    SiamParams p;
    p.u = parse_double("u", get("u"));
    p.mu = parse_double("mu", get("mu"));
    p.eps_imp = parse_double("eps_imp", get("eps_imp"));
    p.eps_bath = parse_double_list("eps_bath", get("eps_bath"));
    p.v = parse_double_list("v", get("v"));
    p.n_bath = static_cast<int>(parse_double("n_bath", get("n_bath")));
    if (auto it = kv.find("bandwidth"); it != kv.end()) p.bandwidth = parse_double("bandwidth", it->second);
    p.validate();
    return p;
}

inline std::string pauli_terms_csv(const PauliTermSum& sum) {
    std::string out = "coefficient,word\n";
    for (const auto& t : sum.terms) out += format_double(t.coefficient) + ',' + t.word + '\n';
    return out;
}

}  // namespace roqam
