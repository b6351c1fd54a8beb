#pragma once

// Constructs the characteristic-zero lift (T, Gamma) from a LiftPlan,
// verifies the group relations and the structural identities at precision,
// reduces modulo the maximal ideal and checks the predicted modular
// decomposition.
//
// T is block diagonal over the chains; within a chain it is lower bidiagonal
// with diagonal zeta_q^{c_i} and subdiagonal entries 1 (inside a summand) or
// t (at summand splits).  Gamma is built per block from its first column
// zeta_m^eps * E_1 by the forced recursion
//
//     a_{i-1} Gamma E_i = (T^alpha - lambda_{i-1}) Gamma E_{i-1},
//
// the division by a_{i-1} = t being an exact uniformizer division whose
// admissibility is asserted through valuations.

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "metalift/lift_decision.hpp"
#include "metalift/local_ring.hpp"
#include "metalift/modular_reps.hpp"
#include "metalift/symfun.hpp"

namespace metalift {

struct LiftPair {
    RingCtxPtr ring;
    LocalMatrix T;
    LocalMatrix Gamma;
    LiftPlan plan;
};

namespace detail {

inline std::vector<i64> chain_offsets(const LiftPlan& plan) {
    std::vector<i64> off;
    i64 cur = 0;
    for (size_t c = 0; c < plan.chains.size(); ++c) {
        off.push_back(cur);
        cur += plan.chain_dim(c);
    }
    off.push_back(cur);  // total dimension sentinel
    return off;
}

inline std::vector<LocalElement> chain_lambdas(const LiftPlan& plan, size_t c, const RingCtxPtr& ring) {
    std::vector<LocalElement> lams;
    for (i64 ex : plan.exponents[c]) lams.push_back(ring->zeta_q(ex));
    return lams;
}

inline std::vector<LocalElement> chain_subdiag(const LiftPlan& plan, size_t c, const RingCtxPtr& ring) {
    std::vector<LocalElement> as;
    for (SubdiagSymbol s : plan.subdiag[c])
        as.push_back(s == SubdiagSymbol::unit ? ring->one() : ring->uniformizer());
    return as;
}

// global subdiagonal segment boundaries: maximal runs not interrupted by a
// uniformizer split or a chain boundary; returns segment index per row
inline std::vector<int> segment_of_rows(const LiftPlan& plan) {
    std::vector<int> seg;
    int s = 0;
    for (size_t c = 0; c < plan.chains.size(); ++c) {
        i64 d = plan.chain_dim(c);
        for (i64 i = 0; i < d; ++i) {
            seg.push_back(s);
            bool split_after = (i + 1 < d) && plan.subdiag[c][static_cast<size_t>(i)] == SubdiagSymbol::uniformizer;
            if (split_after || i + 1 == d) ++s;
        }
    }
    return seg;
}

}  // namespace detail

inline LocalMatrix build_T(const LiftPlan& plan, const RingCtxPtr& ring) {
    auto off = detail::chain_offsets(plan);
    const int d = static_cast<int>(off.back());
    LocalMatrix T(ring, d);
    for (size_t c = 0; c < plan.chains.size(); ++c) {
        if (plan.exponents[c].size() != static_cast<size_t>(plan.chain_dim(c)))
            throw std::logic_error("build_T: plan has no eigenvalue assignment");
        const int o = static_cast<int>(off[c]);
        auto lams = detail::chain_lambdas(plan, c, ring);
        auto as = detail::chain_subdiag(plan, c, ring);
        for (size_t i = 0; i < lams.size(); ++i) T.at(o + static_cast<int>(i), o + static_cast<int>(i)) = lams[i];
        for (size_t i = 0; i < as.size(); ++i) T.at(o + static_cast<int>(i) + 1, o + static_cast<int>(i)) = as[i];
    }
    return T;
}

// Gamma for one chain by the forced recursion; T^alpha of the block is taken
// from the closed formula for powers of a bidiagonal matrix.
inline std::vector<std::vector<LocalElement>> build_gamma_block_recursive(
    const std::vector<LocalElement>& lams, const std::vector<LocalElement>& as, i64 epsilon,
    const RingCtxPtr& ring, const GroupParams& params) {
    const int d = static_cast<int>(lams.size());
    auto Ta = t_alpha_matrix(params.alpha(), std::span<const LocalElement>(lams), std::span<const LocalElement>(as));
    std::vector<std::vector<LocalElement>> gamma(static_cast<size_t>(d),
                                                 std::vector<LocalElement>(static_cast<size_t>(d), ring->zero()));
    std::vector<LocalElement> col(static_cast<size_t>(d), ring->zero());
    col[0] = ring->zeta_m(epsilon);
    for (int i = 0; i < d; ++i) gamma[static_cast<size_t>(i)][0] = col[static_cast<size_t>(i)];
    for (int i = 2; i <= d; ++i) {
        const LocalElement& lam_prev = lams[static_cast<size_t>(i - 2)];
        std::vector<LocalElement> next(static_cast<size_t>(d), ring->zero());
        for (int mu = 0; mu < d; ++mu) {
            LocalElement acc = ring->zero();
            for (int nu = 0; nu <= mu; ++nu)
                acc = acc + Ta[static_cast<size_t>(mu)][static_cast<size_t>(nu)] * col[static_cast<size_t>(nu)];
            next[static_cast<size_t>(mu)] = acc - lam_prev * col[static_cast<size_t>(mu)];
        }
        // divide by a_{i-1}
        auto va = valuation(as[static_cast<size_t>(i - 2)]);
        if (va && *va == 1) {
            for (auto& entry : next) {
                if (!reduce(entry).is_zero())
                    throw std::domain_error(
                        "gamma recursion: entry not divisible by the uniformizer (invalid plan)");
                entry = divide_by_t(entry);
            }
        } else if (!(va && *va == 0)) {
            throw std::logic_error("gamma recursion: subdiagonal entry is neither a unit nor the uniformizer");
        }
        col = next;
        for (int mu = 0; mu < d; ++mu) gamma[static_cast<size_t>(mu)][static_cast<size_t>(i - 1)] = col[static_cast<size_t>(mu)];
    }
    return gamma;
}

inline LocalMatrix build_Gamma_recursive(const LiftPlan& plan, const RingCtxPtr& ring, const GroupParams& params) {
    auto off = detail::chain_offsets(plan);
    const int d = static_cast<int>(off.back());
    LocalMatrix G(ring, d);
    for (size_t c = 0; c < plan.chains.size(); ++c) {
        auto lams = detail::chain_lambdas(plan, c, ring);
        auto as = detail::chain_subdiag(plan, c, ring);
        auto blk = build_gamma_block_recursive(lams, as, plan.chain_epsilon(c), ring, params);
        const int o = static_cast<int>(off[c]);
        for (size_t i = 0; i < blk.size(); ++i)
            for (size_t j = 0; j < blk.size(); ++j) G.at(o + static_cast<int>(i), o + static_cast<int>(j)) = blk[i][j];
    }
    return G;
}

// Closed-form entries for a single chain with nonzero subdiagonal:
//   gamma_{1,i} = zeta_m^eps [lambda_1^alpha - lambda_x]_1^{i-1} / [a]_1^{i-1},
//   gamma_{mu,i} (mu >= 2) as the double sum over interior mu-sequences and
//   decreasing index sequences, with the a-quotient handled per factor.
inline std::vector<std::vector<LocalElement>> build_gamma_block_closed_form(
    const std::vector<LocalElement>& lams, const std::vector<LocalElement>& as, i64 epsilon,
    const RingCtxPtr& ring, const GroupParams& params) {
    const i64 d = static_cast<i64>(lams.size());
    const i64 alpha = params.alpha();
    std::span<const LocalElement> ls(lams);
    std::vector<LocalElement> lam_alpha;
    for (const auto& l : lams) lam_alpha.push_back(pow_of(l, static_cast<u64>(alpha)));
    LocalElement zeps = ring->zeta_m(epsilon);

    auto t_count = [&](i64 lo, i64 hi) {  // number of uniformizer factors in [a]_lo^hi
        i64 n = 0;
        for (i64 x = lo; x <= hi; ++x) {
            auto v = valuation(as[static_cast<size_t>(x - 1)]);
            if (v && *v == 1) ++n;
        }
        return n;
    };
    auto unit_product = [&](i64 lo, i64 hi) {  // product of the unit factors in [a]_lo^hi
        LocalElement acc = ring->one();
        for (i64 x = lo; x <= hi; ++x) {
            auto v = valuation(as[static_cast<size_t>(x - 1)]);
            if (v && *v == 0) acc = acc * as[static_cast<size_t>(x - 1)];
        }
        return acc;
    };
    auto divide_t_power = [&](LocalElement z, i64 k) {
        for (i64 i = 0; i < k; ++i) {
            if (!reduce(z).is_zero())
                throw std::domain_error("gamma closed form: quantity not divisible by the uniformizer");
            z = divide_by_t(z);
        }
        return z;
    };

    std::vector<std::vector<LocalElement>> gamma(static_cast<size_t>(d),
                                                 std::vector<LocalElement>(static_cast<size_t>(d), ring->zero()));
    for (i64 i = 1; i <= d; ++i) {
        // mu = 1 row from the telescoped product; in [a]_1^{i-1} the unit
        // factors are literally 1, so only the uniformizer count matters
        {
            LocalElement num = zeps * bracket_lambda(lam_alpha[0], ls, 1, i - 1);
            gamma[0][static_cast<size_t>(i - 1)] = divide_t_power(num, t_count(1, i - 1));
        }
        for (i64 mu = 2; mu <= d; ++mu) {
            if (i == 1) continue;  // gamma_{mu,1} = 0 for mu >= 2
            LocalElement total = ring->zero();
            for (const MuSequence& seq : enumerate_mu_sequences(mu)) {
                const i64 s = static_cast<i64>(seq.size());
                // product of h factors over consecutive pairs of the sequence
                LocalElement hprod = ring->one();
                bool dead = false;
                for (i64 nu = 2; nu <= s; ++nu) {
                    i64 hi_idx = seq[static_cast<size_t>(nu - 2)];  // mu_{nu-1} (larger)
                    i64 lo_idx = seq[static_cast<size_t>(nu - 1)];  // mu_nu
                    i64 deg = alpha - hi_idx + lo_idx;
                    if (deg < 0) {
                        dead = true;
                        break;
                    }
                    auto vars = ls.subspan(static_cast<size_t>(lo_idx - 1), static_cast<size_t>(hi_idx - lo_idx + 1));
                    hprod = hprod * complete_homogeneous(deg, vars);
                }
                if (dead) continue;
                // sum over i = i_1 > i_2 > ... > i_s >= 1 of the bracket products
                LocalElement bracket_sum = ring->zero();
                std::vector<i64> iseq{i};
                auto rec = [&](auto&& self, i64 level, LocalElement acc) -> void {
                    // level nu in [1, s): choose i_{nu+1} < i_nu, leave room for the tail
                    if (level == s) {
                        // last factor: [lambda_{mu_s}^alpha - lambda_x]_{1}^{i_s - 1}
                        LocalElement last = bracket_lambda(lam_alpha[static_cast<size_t>(seq.back() - 1)], ls, 1,
                                                           iseq.back() - 1);
                        bracket_sum = bracket_sum + acc * last;
                        return;
                    }
                    i64 i_nu = iseq.back();
                    for (i64 nxt = i_nu - 1; nxt >= s - level; --nxt) {
                        LocalElement factor =
                            bracket_lambda(lam_alpha[static_cast<size_t>(seq[static_cast<size_t>(level - 1)] - 1)],
                                           ls, nxt + 1, i_nu - 1);
                        iseq.push_back(nxt);
                        self(self, level + 1, acc * factor);
                        iseq.pop_back();
                    }
                };
                rec(rec, 1, ring->one());
                total = total + hprod * bracket_sum;
            }
            total = total * zeps;
            // the a-quotient [a]_1^{mu-1} / [a]_1^{i-1}
            if (i > mu) {
                total = total * unit_product(mu, i - 1);  // units contribute 1; kept for generality
                total = divide_t_power(total, t_count(mu, i - 1));
            } else if (i < mu) {
                total = total * bracket_subdiag(std::span<const LocalElement>(as), i, mu - 1);
            }
            gamma[static_cast<size_t>(mu - 1)][static_cast<size_t>(i - 1)] = total;
        }
    }
    return gamma;
}

inline LocalMatrix build_Gamma_closed_form(const LiftPlan& plan, const RingCtxPtr& ring, const GroupParams& params) {
    if (plan.chains.size() != 1)
        throw std::invalid_argument("closed-form Gamma: defined for a single chain");
    auto lams = detail::chain_lambdas(plan, 0, ring);
    auto as = detail::chain_subdiag(plan, 0, ring);
    auto blk = build_gamma_block_closed_form(lams, as, plan.chain_epsilon(0), ring, params);
    const int d = static_cast<int>(lams.size());
    LocalMatrix G(ring, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G.at(i, j) = blk[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return G;
}

// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    bool indeterminate = false;  // failed only because precision could not certify a nonzero
    i64 precision = 0;
    std::string details;
};

struct LiftReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    bool any_indeterminate() const {
        for (const auto& c : checks)
            if (!c.pass && c.indeterminate) return true;
        return false;
    }
};

namespace detail {

inline void check_equal(LiftReport& rep, const std::string& name, const LocalMatrix& A, const LocalMatrix& B) {
    auto cmp = matrices_equal_at_precision(A, B);
    CheckResult r{name, cmp.equal, false, cmp.precision, ""};
    if (!cmp.equal) {
        std::ostringstream os;
        os << "entry (" << cmp.row << "," << cmp.col << ") differs with valuation " << cmp.valuation;
        r.details = os.str();
    }
    rep.checks.push_back(std::move(r));
}

}  // namespace detail

inline LiftReport verify_lift(const LiftPair& pair, const GroupParams& params) {
    LiftReport rep;
    const RingCtxPtr& ring = pair.ring;
    const int d = pair.T.dim();
    const i64 q = params.q();
    const i64 m = params.m();
    if (d == 0) {
        rep.checks.push_back({"empty lift", true, false, ring->prec_cap(), "nothing to verify"});
        return rep;
    }
    LocalMatrix I = LocalMatrix::identity(ring, d);

    // (i) T^q = Id, and the order of T equals the maximal eigenvalue order
    detail::check_equal(rep, "T^q = Id", pair.T.pow(static_cast<u64>(q)), I);
    {
        i64 predicted = 1;
        for (const auto& exps : pair.plan.exponents)
            for (i64 c : exps) predicted = std::max(predicted, q / gcd_i64(q, c == 0 ? q : c));
        i64 found = -1;
        bool indet = false;
        for (i64 j = 1; j <= q; j *= params.p()) {
            auto cmp = matrices_equal_at_precision(pair.T.pow(static_cast<u64>(j)), I);
            if (cmp.equal) {
                found = j;
                break;
            }
        }
        CheckResult r{"order(T) = max eigenvalue order", found == predicted, indet, ring->prec_cap(), ""};
        if (found != predicted) {
            r.details = "computed order " + std::to_string(found) + ", predicted " + std::to_string(predicted);
            r.indeterminate = found > 0 && found < predicted;  // an early "equal" can only be a precision artifact
        }
        rep.checks.push_back(std::move(r));
    }

    // (ii) Gamma^m = Id and the strict order where the theory pins it down
    detail::check_equal(rep, "Gamma^m = Id", pair.Gamma.pow(static_cast<u64>(m)), I);
    {
        i64 found = -1;
        for (i64 j : divisors_of(m)) {
            auto cmp = matrices_equal_at_precision(pair.Gamma.pow(static_cast<u64>(j)), I);
            if (cmp.equal) {
                found = j;
                break;
            }
        }
        bool enforce = params.faithful() || m == 1;
        i64 predicted = 1;
        if (enforce) {
            for (size_t c = 0; c < pair.plan.chains.size(); ++c) {
                i64 dim = pair.plan.chain_dim(c);
                i64 ord = dim >= 2 ? m : m / gcd_i64(m, pair.plan.chain_epsilon(c) == 0 ? m : pair.plan.chain_epsilon(c));
                predicted = predicted / gcd_i64(predicted, ord) * ord;  // lcm
            }
            if (pair.plan.chains.empty()) predicted = 1;
        }
        CheckResult r{"order(Gamma)", true, false, ring->prec_cap(), "computed order " + std::to_string(found)};
        if (enforce && found != predicted) {
            r.pass = false;
            r.indeterminate = found > 0 && found < predicted;
            r.details = "computed order " + std::to_string(found) + ", predicted " + std::to_string(predicted);
        }
        rep.checks.push_back(std::move(r));
    }

    // (iii) Gamma T = T^alpha Gamma (T^alpha via matrix power, an independent route)
    detail::check_equal(rep, "Gamma T = T^alpha Gamma", pair.Gamma.mul(pair.T),
                        pair.T.pow(static_cast<u64>(params.alpha())).mul(pair.Gamma));

    // (iv) reduction pattern: lower triangular and block diagonal along the
    // subdiagonal segments (splits and chain boundaries)
    {
        auto seg = detail::segment_of_rows(pair.plan);
        bool ok = true;
        std::string detail_str;
        i64 min_prec = ring->prec_cap();
        for (int r = 0; r < d && ok; ++r)
            for (int c = 0; c < d && ok; ++c) {
                min_prec = std::min(min_prec, pair.Gamma.at(r, c).prec());
                bool allowed = seg[static_cast<size_t>(r)] == seg[static_cast<size_t>(c)] && r >= c;
                if (!allowed && !reduce(pair.Gamma.at(r, c)).is_zero()) {
                    ok = false;
                    detail_str = "entry (" + std::to_string(r) + "," + std::to_string(c) + ") has unit valuation";
                }
            }
        rep.checks.push_back({"Gamma mod m is block lower triangular", ok, false, min_prec, detail_str});
    }

    // ramification hypothesis, per chain: v(lambda_i - lambda_j) >= e > v(a_nu),
    // which is what makes the uniformizer divisions and triangularity work
    {
        bool ok = true;
        std::string detail_str;
        for (size_t c = 0; c < pair.plan.chains.size() && ok; ++c) {
            auto lams = detail::chain_lambdas(pair.plan, c, ring);
            for (size_t i = 0; i < lams.size() && ok; ++i)
                for (size_t j = i + 1; j < lams.size() && ok; ++j) {
                    auto v = valuation(lams[i] - lams[j]);
                    if (!v || *v < ring->e()) {
                        ok = false;
                        detail_str = "eigenvalue pair in chain " + std::to_string(c) +
                                     " violates v(lambda_i - lambda_j) >= e";
                    }
                }
            auto as = detail::chain_subdiag(pair.plan, c, ring);
            for (const auto& a : as) {
                auto v = valuation(a);
                if (!v || *v >= ring->e()) {
                    ok = false;
                    detail_str = "subdiagonal valuation not below e in chain " + std::to_string(c);
                }
            }
        }
        rep.checks.push_back({"v(lambda_i - lambda_j) >= e > v(a_nu)", ok, false, ring->prec_cap(), detail_str});
    }

    // (v) structural identities on every full-orbit chain (a-flag 0): the
    // final column vanishes above the last two rows, and the closing identity
    // (lambda_d - lambda_d^alpha) gamma_{d,d} = t^{(alpha)}_{d,d-1} gamma_{d-1,d}
    {
        auto off = detail::chain_offsets(pair.plan);
        bool zero_ok = true, final_ok = true, any = false;
        bool zero_indet = false;
        i64 min_prec = ring->prec_cap();
        std::string zdetail, fdetail;
        for (size_t c = 0; c < pair.plan.chains.size(); ++c) {
            if (pair.plan.a_flags[c] != 0) continue;
            const i64 db = pair.plan.chain_dim(c);
            if (db < 2) continue;
            any = true;
            const int o = static_cast<int>(off[c]);
            for (i64 mu = 1; mu <= db - 2; ++mu) {
                auto cmp = ring->compare_zero(pair.Gamma.at(o + static_cast<int>(mu) - 1, o + static_cast<int>(db) - 1));
                min_prec = std::min(min_prec, cmp.precision);
                if (!cmp.equal) {
                    zero_ok = false;
                    zdetail = "gamma_{" + std::to_string(mu) + "," + std::to_string(db) + "} in chain " +
                              std::to_string(c) + " has valuation " + std::to_string(cmp.valuation);
                }
            }
            auto lams = detail::chain_lambdas(pair.plan, c, ring);
            auto as = detail::chain_subdiag(pair.plan, c, ring);
            LocalElement lam_d = lams[static_cast<size_t>(db - 1)];
            LocalElement lam_d_alpha = pow_of(lam_d, static_cast<u64>(params.alpha()));
            LocalElement lhs = (lam_d - lam_d_alpha) * pair.Gamma.at(o + static_cast<int>(db) - 1, o + static_cast<int>(db) - 1);
            LocalElement tdd1 = t_alpha_entry(db, db - 1, params.alpha(), std::span<const LocalElement>(lams),
                                              std::span<const LocalElement>(as));
            LocalElement rhs = tdd1 * pair.Gamma.at(o + static_cast<int>(db) - 2, o + static_cast<int>(db) - 1);
            auto cmp = ring->compare(lhs, rhs);
            min_prec = std::min(min_prec, cmp.precision);
            if (!cmp.equal) {
                final_ok = false;
                fdetail = "closing identity fails in chain " + std::to_string(c) + " (valuation " +
                          std::to_string(cmp.valuation) + ")";
            }
        }
        rep.checks.push_back({"gamma_{mu,d} = 0 for mu <= d-2 (full-orbit chains)", zero_ok, zero_indet, min_prec,
                              any ? zdetail : "no full-orbit chain present"});
        rep.checks.push_back({"(lambda_d - lambda_d^alpha) gamma_{d,d} = t_{d,d-1}^(alpha) gamma_{d-1,d}", final_ok,
                              false, min_prec, any ? fdetail : "no full-orbit chain present"});
    }

    return rep;
}

// Predicted reduction: each chain splits at its uniformizer positions into
// summands V(eps + a0 * (kappa laid so far), next kappa).
inline Decomposition predicted_reduction(const LiftPlan& plan, const GroupParams& params) {
    Decomposition out;
    const i64 m = params.m();
    const i64 a0 = params.a0();
    for (size_t c = 0; c < plan.chains.size(); ++c) {
        const i64 dchain = plan.chain_dim(c);
        const i64 eps = plan.chain_epsilon(c);
        i64 seg_start = 0;
        for (i64 i = 0; i < dchain; ++i) {
            bool boundary = (i + 1 == dchain) ||
                            plan.subdiag[c][static_cast<size_t>(i)] == SubdiagSymbol::uniformizer;
            if (boundary) {
                i64 kappa = i + 1 - seg_start;
                i64 e2 = ((eps + a0 * seg_start) % m + m) % m;
                out.summands.push_back({e2, kappa});
                seg_start = i + 1;
            }
        }
    }
    return out.sorted();
}

struct ReductionResult {
    KModule module;          // the reduced matrix pair
    Decomposition computed;  // from the decomposition algorithm
    Decomposition predicted; // from the plan
    bool match = false;
};

inline ReductionResult reduce_lift_full(const LiftPair& pair, const GroupParams& params) {
    const auto& F = pair.ring->residue_field();
    const int d = pair.T.dim();
    ResidueMatrix tau(F, d), sigma(F, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            tau.at(i, j) = reduce(pair.T.at(i, j));
            sigma.at(i, j) = reduce(pair.Gamma.at(i, j));
        }
    ReductionResult out{KModule{std::move(tau), std::move(sigma)}, {}, {}, false};
    RelationReport rel = verify_kg_relations(out.module, params);
    if (!rel.all_ok())
        throw std::runtime_error("reduce_lift: reduced pair violates the group relations");
    out.computed = decompose(out.module, params);
    out.predicted = predicted_reduction(pair.plan, params);
    out.match = out.computed == out.predicted;
    return out;
}

inline Decomposition reduce_lift(const LiftPair& pair, const GroupParams& params) {
    ReductionResult r = reduce_lift_full(pair, params);
    if (!r.match)
        throw std::runtime_error("reduce_lift: computed decomposition differs from the predicted one");
    return r.computed;
}

// ---------------------------------------------------------------------------

inline i64 default_precision_level(const GroupParams& params, i64 e) {
    i64 per_level = e * params.phi_q();
    i64 N = (64 + per_level - 1) / per_level;
    return std::max<i64>(N, 2);
}

struct RoundTripOptions {
    i64 N = 0;  // 0: derived so that the precision cap is at least 64
    i64 e = 2;
    bool strict_uniform_a = false;
};

struct RoundTripResult {
    bool liftable = false;
    std::optional<RefusalCertificate> refusal;
    std::optional<LiftPair> pair;
    LiftReport report;
    Decomposition reduced;
    bool round_trip_ok = false;  // reduced decomposition equals the (sorted) input
    i64 used_N = 0;
    bool retried = false;
};

inline LiftPair build_lift(const LiftPlan& plan, const GroupParams& params, i64 N, i64 e) {
    RingCtxPtr ring = make_ring(params, N, e);
    LocalMatrix T = build_T(plan, ring);
    LocalMatrix G = build_Gamma_recursive(plan, ring, params);
    return LiftPair{ring, std::move(T), std::move(G), plan};
}

// decide -> assign eigenvalues -> build -> verify -> reduce -> compare.
// One automatic rebuild at doubled N when a verification could not certify a
// required nonzero at the working precision.
inline RoundTripResult round_trip(const Decomposition& dec, const GroupParams& params,
                                  RoundTripOptions opt = {}) {
    RoundTripResult out;
    LiftDecision decision = decide_lift(dec, params, opt.strict_uniform_a);
    if (!decision.liftable()) {
        out.refusal = decision.refusal;
        return out;
    }
    out.liftable = true;
    LiftPlan plan = *decision.plan;
    assign_eigenvalues(plan, params);

    i64 N = opt.N > 0 ? opt.N : default_precision_level(params, opt.e);
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            LiftPair pair = build_lift(plan, params, N, opt.e);
            out.report = verify_lift(pair, params);
            if (out.report.any_indeterminate() && attempt == 0) {
                N *= 2;
                out.retried = true;
                continue;
            }
            ReductionResult red = reduce_lift_full(pair, params);
            out.pair = std::move(pair);
            out.reduced = red.computed;
            out.used_N = N;
            Decomposition want;
            for (const auto& s : dec.summands) want.summands.push_back(normalize_spec(params, s));
            out.round_trip_ok = red.match && (red.computed == want.sorted());
            return out;
        } catch (const precision_exhausted&) {
            if (attempt == 1) throw;
            N *= 2;
            out.retried = true;
        }
    }
    throw std::runtime_error("round_trip: verification failed after precision escalation");
}

}  // namespace metalift
