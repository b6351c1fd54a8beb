#pragma once

// Decides whether a direct sum of modular summands lifts to characteristic
// zero by partitioning the summands into alpha-chains:
//
//   (a) each chain's kappa-sum is at most q,
//   (b) each chain's kappa-sum is 0 or 1 mod m,
//   (c) consecutive chain members satisfy eps_next = eps_prev + a0 * kappa_prev (mod m).
//
// A positive answer carries the witness (the chains plus eigenvalue-exponent
// and subdiagonal assignments for the construction); a negative answer
// carries a certificate that the bounded search space was exhausted.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "metalift/group_params.hpp"
#include "metalift/modular_reps.hpp"

namespace metalift {

enum class SubdiagSymbol { unit, uniformizer };  // chain boundaries carry an implicit 0

struct ChainGraph {
    std::vector<SummandSpec> nodes;
    std::vector<std::pair<int, int>> edges;  // i -> j iff eps_j = eps_i + a0 * kappa_i (mod m)
};

inline ChainGraph build_chain_graph(const Decomposition& dec, const GroupParams& params) {
    ChainGraph g;
    g.nodes = dec.summands;
    const i64 m = params.m();
    const i64 a0 = params.a0();
    for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i)
        for (int j = 0; j < static_cast<int>(g.nodes.size()); ++j) {
            if (i == j) continue;
            if (g.nodes[static_cast<size_t>(j)].epsilon ==
                ((g.nodes[static_cast<size_t>(i)].epsilon + a0 * g.nodes[static_cast<size_t>(i)].kappa) % m + m) % m)
                g.edges.emplace_back(i, j);
        }
    return g;
}

struct LiftPlan {
    Decomposition input;                        // canonically sorted; chain entries index into it
    std::vector<std::vector<int>> chains;       // ordered summand indices per chain
    std::vector<int> a_flags;                   // kappa-sum of each chain mod m, in {0, 1}
    std::vector<std::vector<i64>> exponents;    // zeta_q exponents along each chain (set by assign_eigenvalues)
    std::vector<std::vector<SubdiagSymbol>> subdiag;  // within-chain pattern, length = chain dim - 1

    i64 chain_dim(size_t c) const {
        i64 d = 0;
        for (int idx : chains[c]) d += input.summands[static_cast<size_t>(idx)].kappa;
        return d;
    }
    i64 total_dim() const { return input.total_dim(); }
    i64 chain_epsilon(size_t c) const { return input.summands[static_cast<size_t>(chains[c][0])].epsilon; }
};

struct RefusalCertificate {
    i64 s = 0;                  // number of summands
    double search_bound = 0;    // s! * Bell(s), the unpruned space that was covered
    ChainGraph graph;
    std::string statement;
};

struct LiftDecision {
    std::optional<LiftPlan> plan;          // engaged iff liftable
    std::optional<RefusalCertificate> refusal;
    bool liftable() const { return plan.has_value(); }
};

namespace detail {

inline double factorial_d(i64 n) {
    double r = 1;
    for (i64 i = 2; i <= n; ++i) r *= static_cast<double>(i);
    return r;
}

inline double bell_number_d(i64 n) {
    // Bell triangle
    std::vector<std::vector<double>> tri{{1}};
    for (i64 i = 1; i <= n; ++i) {
        std::vector<double> row{tri.back().back()};
        for (size_t j = 0; j < tri.back().size(); ++j) row.push_back(row.back() + tri.back()[j]);
        tri.push_back(std::move(row));
    }
    return tri[static_cast<size_t>(n)][0];
}

struct SearchState {
    const std::vector<SummandSpec>* specs;
    i64 q, m, a0;
    std::optional<int> required_a;  // strict-uniform-a mode: all chains share this flag
    std::vector<bool> used;
    std::vector<std::vector<int>> chains;
    std::vector<int> a_flags;
};

inline bool chain_can_close(const SearchState& st, i64 sum, int* a_flag) {
    if (st.m == 1) {
        // 0 and 1 coincide mod 1; take a = 1 so the exponent-0 slot is always
        // available (a chain of dimension q needs it)
        *a_flag = 1;
        return true;
    }
    i64 r = sum % st.m;
    if (r != 0 && r != 1) return false;
    if (st.required_a && static_cast<i64>(*st.required_a) != r) return false;
    *a_flag = static_cast<int>(r);
    return true;
}

// Chains are built one at a time with strictly increasing head indices; each
// family of chains is visited exactly once, sorted by head.
inline bool search_chains(SearchState& st, int last_head);

inline bool extend_chain(SearchState& st, int last_head, std::vector<int>& chain, i64 sum) {
    int a_flag = 0;
    if (chain_can_close(st, sum, &a_flag)) {
        st.chains.push_back(chain);
        st.a_flags.push_back(a_flag);
        if (search_chains(st, last_head)) return true;
        st.chains.pop_back();
        st.a_flags.pop_back();
    }
    const auto& specs = *st.specs;
    const SummandSpec& tail = specs[static_cast<size_t>(chain.back())];
    i64 want_eps = ((tail.epsilon + st.a0 * tail.kappa) % st.m + st.m) % st.m;
    for (int u = 0; u < static_cast<int>(specs.size()); ++u) {
        if (st.used[static_cast<size_t>(u)]) continue;
        if (specs[static_cast<size_t>(u)].epsilon != want_eps) continue;
        if (sum + specs[static_cast<size_t>(u)].kappa > st.q) continue;
        st.used[static_cast<size_t>(u)] = true;
        chain.push_back(u);
        if (extend_chain(st, last_head, chain, sum + specs[static_cast<size_t>(u)].kappa)) return true;
        chain.pop_back();
        st.used[static_cast<size_t>(u)] = false;
    }
    return false;
}

inline bool search_chains(SearchState& st, int last_head) {
    const auto& specs = *st.specs;
    bool any_unused = false;
    for (bool b : st.used) any_unused = any_unused || !b;
    if (!any_unused) return true;
    for (int head = last_head + 1; head < static_cast<int>(specs.size()); ++head) {
        if (st.used[static_cast<size_t>(head)]) continue;
        if (specs[static_cast<size_t>(head)].kappa > st.q) continue;
        st.used[static_cast<size_t>(head)] = true;
        std::vector<int> chain{head};
        if (extend_chain(st, head, chain, specs[static_cast<size_t>(head)].kappa)) return true;
        st.used[static_cast<size_t>(head)] = false;
    }
    return false;
}

}  // namespace detail

// Exhaustive backtracking; deterministic first witness (summands canonically
// sorted, chains listed by increasing head index, smallest-index extension
// tried first after attempting to close).
inline LiftDecision decide_lift(const Decomposition& dec_in, const GroupParams& params,
                                bool strict_uniform_a = false) {
    if (!params.has_a0()) throw std::logic_error("decide_lift: a0 must be bound first");
    Decomposition dec;
    for (const auto& s : dec_in.summands) dec.summands.push_back(normalize_spec(params, s));
    dec = dec.sorted();

    LiftDecision out;
    if (dec.summands.empty()) {
        out.plan = LiftPlan{dec, {}, {}, {}, {}};
        return out;
    }

    std::vector<std::optional<int>> modes;
    if (strict_uniform_a) {
        modes.push_back(0);
        modes.push_back(1);
    } else {
        modes.push_back(std::nullopt);
    }
    for (auto mode : modes) {
        detail::SearchState st;
        st.specs = &dec.summands;
        st.q = params.q();
        st.m = params.m();
        st.a0 = params.a0();
        st.required_a = mode;
        st.used.assign(dec.summands.size(), false);
        if (detail::search_chains(st, -1)) {
            LiftPlan plan;
            plan.input = dec;
            plan.chains = st.chains;
            plan.a_flags = st.a_flags;
            plan.exponents.resize(plan.chains.size());
            plan.subdiag.resize(plan.chains.size());
            for (size_t c = 0; c < plan.chains.size(); ++c) {
                i64 d = plan.chain_dim(c);
                std::vector<SubdiagSymbol> sd(static_cast<size_t>(d > 0 ? d - 1 : 0), SubdiagSymbol::unit);
                i64 cum = 0;
                for (size_t j = 0; j + 1 < plan.chains[c].size(); ++j) {
                    cum += dec.summands[static_cast<size_t>(plan.chains[c][j])].kappa;
                    sd[static_cast<size_t>(cum - 1)] = SubdiagSymbol::uniformizer;
                }
                plan.subdiag[c] = std::move(sd);
            }
            out.plan = std::move(plan);
            return out;
        }
    }

    RefusalCertificate cert;
    cert.s = static_cast<i64>(dec.summands.size());
    cert.search_bound = detail::factorial_d(cert.s) * detail::bell_number_d(cert.s);
    cert.graph = build_chain_graph(dec, params);
    cert.statement = "exhaustive search over all partitions of " + std::to_string(cert.s) +
                     " summands into ordered chains (bounded by s! * Bell(s)) found no witness";
    out.refusal = std::move(cert);
    return out;
}

// Re-validate a plan's conditions (a), (b), (c) independently of the search.
inline bool plan_conditions_hold(const LiftPlan& plan, const GroupParams& params) {
    const i64 m = params.m();
    const i64 a0 = params.a0();
    std::vector<bool> seen(plan.input.summands.size(), false);
    for (size_t c = 0; c < plan.chains.size(); ++c) {
        i64 sum = 0;
        for (size_t j = 0; j < plan.chains[c].size(); ++j) {
            int idx = plan.chains[c][j];
            if (idx < 0 || idx >= static_cast<int>(plan.input.summands.size()) || seen[static_cast<size_t>(idx)])
                return false;
            seen[static_cast<size_t>(idx)] = true;
            const SummandSpec& s = plan.input.summands[static_cast<size_t>(idx)];
            sum += s.kappa;
            if (j > 0) {
                const SummandSpec& prev = plan.input.summands[static_cast<size_t>(plan.chains[c][j - 1])];
                if (s.epsilon != ((prev.epsilon + a0 * prev.kappa) % m + m) % m) return false;
            }
        }
        if (sum > params.q()) return false;
        int a = plan.a_flags[c];
        if (a != 0 && a != 1) return false;
        if (((sum - a) % m + m) % m != 0) return false;
    }
    for (bool b : seen)
        if (!b) return false;
    return true;
}

// Assign zeta_q exponents along each chain: full alpha-orbits laid out
// consecutively (lambda_{i+1} = lambda_i^alpha inside an orbit, wraparound at
// orbit ends), orbits chosen greedily by smallest unused representative, and
// the exponent 0 reserved as the final slot when the chain's a-flag is 1.
inline void assign_eigenvalues(LiftPlan& plan, const GroupParams& params) {
    const i64 q = params.q();
    const i64 alpha = params.alpha();
    plan.exponents.assign(plan.chains.size(), {});
    for (size_t c = 0; c < plan.chains.size(); ++c) {
        const i64 d = plan.chain_dim(c);
        const int a_flag = plan.a_flags[c];
        const i64 orbits_needed = (d - a_flag);
        std::vector<bool> used(static_cast<size_t>(q), false);
        std::vector<i64>& exps = plan.exponents[c];
        i64 laid = 0;
        for (i64 rep = 1; laid < orbits_needed && rep < q; ++rep) {
            if (used[static_cast<size_t>(rep)]) continue;
            // lay the whole orbit of rep under multiplication by alpha
            i64 cur = rep;
            i64 len = 0;
            do {
                if (used[static_cast<size_t>(cur)])
                    throw std::runtime_error("assign_eigenvalues: orbit collision (internal)");
                used[static_cast<size_t>(cur)] = true;
                exps.push_back(cur);
                cur = (cur * alpha) % q;
                ++len;
            } while (cur != rep);
            laid += len;
        }
        if (laid != orbits_needed)
            throw std::runtime_error("assign_eigenvalues: not enough orbits below q (conditions (a),(b) violated)");
        if (a_flag == 1) exps.push_back(0);
        if (static_cast<i64>(exps.size()) != d)
            throw std::runtime_error("assign_eigenvalues: exponent count mismatch (internal)");
    }
}

// Orbit balance of the planned eigenvalue multiset: the multiplicity must be
// constant along each orbit of multiplication by alpha on Z/q, and m must
// divide (total dimension - multiplicity of exponent 0).  Requires the
// faithfulness hypothesis ord_{p^i}(alpha) = m.
inline bool orbit_balance_check(const LiftPlan& plan, const GroupParams& params) {
    if (!params.faithful())
        throw std::invalid_argument(
            "orbit_balance_check: requires the faithful action hypothesis (ord_{p^i} alpha = m for all i)");
    const i64 q = params.q();
    std::vector<i64> mult(static_cast<size_t>(q), 0);
    i64 total = 0;
    for (const auto& exps : plan.exponents)
        for (i64 ex : exps) {
            ++mult[static_cast<size_t>(((ex % q) + q) % q)];
            ++total;
        }
    for (i64 r = 1; r < q; ++r) {
        i64 next = (r * params.alpha()) % q;
        if (mult[static_cast<size_t>(r)] != mult[static_cast<size_t>(next)]) return false;
    }
    return (total - mult[0]) % params.m() == 0;
}

}  // namespace metalift
