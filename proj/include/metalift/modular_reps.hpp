#pragma once

// The indecomposable k[G]-modules V_alpha(lambda, kappa) as explicit matrix
// pairs over the residue field, the uniserial translation, relation checks,
// and decomposition of arbitrary pairs into indecomposable summands.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "metalift/group_params.hpp"
#include "metalift/residue_field.hpp"

namespace metalift {

struct SummandSpec {
    i64 epsilon = 0;  // exponent of zeta_m on the generator, normalized to [0, m)
    i64 kappa = 1;    // dimension, 1 <= kappa <= q

    friend bool operator==(const SummandSpec&, const SummandSpec&) = default;
};

// canonical order used throughout: kappa descending, epsilon ascending
inline bool canonical_less(const SummandSpec& a, const SummandSpec& b) {
    if (a.kappa != b.kappa) return a.kappa > b.kappa;
    return a.epsilon < b.epsilon;
}

struct Decomposition {
    std::vector<SummandSpec> summands;

    i64 total_dim() const {
        i64 s = 0;
        for (const auto& x : summands) s += x.kappa;
        return s;
    }
    Decomposition sorted() const {
        Decomposition d = *this;
        std::sort(d.summands.begin(), d.summands.end(), canonical_less);
        return d;
    }
    friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

inline SummandSpec normalize_spec(const GroupParams& params, SummandSpec s) {
    s.epsilon = ((s.epsilon % params.m()) + params.m()) % params.m();
    if (s.kappa < 1 || s.kappa > params.q())
        throw std::invalid_argument("summand: kappa must lie in [1, q]");
    return s;
}

struct KModule {
    ResidueMatrix tau;
    ResidueMatrix sigma;

    int dim() const { return tau.dim(); }
};

// tau = Id + subdiagonal of ones; sigma column i+1 = (tau^alpha - Id)^i zeta_m^eps e_1,
// which comes out lower triangular with diagonal (zeta^eps, alpha zeta^eps, ...).
inline KModule build_summand(const FieldCtxPtr& ctx, const GroupParams& params, SummandSpec spec) {
    spec = normalize_spec(params, spec);
    const int k = static_cast<int>(spec.kappa);
    ResidueMatrix tau = ResidueMatrix::identity(ctx, k);
    for (int i = 0; i + 1 < k; ++i) tau.at(i + 1, i) = ctx->one();
    ResidueMatrix ta = tau.pow(static_cast<u64>(params.alpha()));
    for (int i = 0; i < k; ++i) ta.at(i, i) = ta.at(i, i) - ctx->one();  // A = tau^alpha - Id
    ResidueMatrix sigma(ctx, k);
    std::vector<FieldElement> col(static_cast<size_t>(k), ctx->zero());
    col[0] = ctx->pow(ctx->zeta_m(), static_cast<u64>(spec.epsilon));
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) sigma.at(i, j) = col[static_cast<size_t>(i)];
        if (j + 1 < k) col = ta.apply(col);
    }
    return KModule{std::move(tau), std::move(sigma)};
}

inline KModule direct_sum(const std::vector<KModule>& modules) {
    if (modules.empty()) throw std::invalid_argument("direct_sum: empty list");
    const auto& ctx = modules[0].tau.ctx();
    int n = 0;
    for (const auto& M : modules) {
        if (M.tau.ctx().get() != ctx.get())
            throw std::invalid_argument("direct_sum: modules from different field contexts");
        n += M.dim();
    }
    ResidueMatrix tau(ctx, n), sigma(ctx, n);
    int off = 0;
    for (const auto& M : modules) {
        for (int i = 0; i < M.dim(); ++i)
            for (int j = 0; j < M.dim(); ++j) {
                tau.at(off + i, off + j) = M.tau.at(i, j);
                sigma.at(off + i, off + j) = M.sigma.at(i, j);
            }
        off += M.dim();
    }
    return KModule{std::move(tau), std::move(sigma)};
}

struct RelationReport {
    bool tau_order_ok = false;    // tau^q = Id
    bool sigma_order_ok = false;  // sigma^m = Id
    bool conjugation_ok = false;  // sigma tau = tau^alpha sigma
    i64 tau_order = -1;           // least k <= q with tau^k = Id, -1 if none
    i64 sigma_order = -1;

    bool all_ok() const { return tau_order_ok && sigma_order_ok && conjugation_ok; }
};

inline RelationReport verify_kg_relations(const KModule& M, const GroupParams& params) {
    RelationReport rep;
    const auto& ctx = M.tau.ctx();
    const int n = M.dim();
    ResidueMatrix id = ResidueMatrix::identity(ctx, n);
    ResidueMatrix cur = id;
    for (i64 k = 1; k <= params.q(); ++k) {
        cur = cur.mul(M.tau);
        if (cur == id) {
            rep.tau_order = k;
            break;
        }
    }
    rep.tau_order_ok = rep.tau_order > 0 && params.q() % rep.tau_order == 0;
    cur = id;
    for (i64 k = 1; k <= params.m(); ++k) {
        cur = cur.mul(M.sigma);
        if (cur == id) {
            rep.sigma_order = k;
            break;
        }
    }
    rep.sigma_order_ok = rep.sigma_order > 0 && params.m() % rep.sigma_order == 0;
    ResidueMatrix lhs = M.sigma.mul(M.tau);
    ResidueMatrix rhs = M.tau.pow(static_cast<u64>(params.alpha())).mul(M.sigma);
    rep.conjugation_ok = lhs == rhs;
    return rep;
}

// V_alpha(lambda, kappa) = U_{lambda+kappa, kappa} (socle label, dimension)
inline std::pair<i64, i64> to_uniserial(const GroupParams& params, SummandSpec spec) {
    spec = normalize_spec(params, spec);
    return {(spec.epsilon + spec.kappa) % params.m(), spec.kappa};
}

inline SummandSpec from_uniserial(const GroupParams& params, i64 ell, i64 mu) {
    if (ell < 0 || ell >= params.m()) throw std::invalid_argument("uniserial: socle label out of range");
    if (mu < 1 || mu > params.q()) throw std::invalid_argument("uniserial: dimension out of range");
    return normalize_spec(params, SummandSpec{ell - mu, mu});
}

namespace detail {

// nilpotency index on the current space: least k >= 0 with N^k = 0
inline int nilpotency_index(const ResidueMatrix& N) {
    if (N.dim() == 0) return 0;
    ResidueMatrix cur = ResidueMatrix::identity(N.ctx(), N.dim());
    for (int k = 0; k <= N.dim(); ++k) {
        if (cur.is_zero()) return k;
        cur = cur.mul(N);
    }
    throw std::runtime_error("decompose: tau - Id is not nilpotent (invalid module)");
}

}  // namespace detail

// Peel off one indecomposable summand at a time: take the nilpotency index
// kappa_1 of N = tau - Id, pick the first sigma-eigenvector E (smallest
// eigenvalue exponent, echelon order) with N^(kappa_1 - 1) E != 0, split off
// span{N^i E} and recurse on the quotient.
inline Decomposition decompose(const KModule& M, const GroupParams& params) {
    const auto& ctx = M.tau.ctx();
    Decomposition result;
    ResidueMatrix tau = M.tau, sigma = M.sigma;
    while (tau.dim() > 0) {
        const int n = tau.dim();
        ResidueMatrix N = tau;
        for (int i = 0; i < n; ++i) N.at(i, i) = N.at(i, i) - ctx->one();
        const int kappa1 = detail::nilpotency_index(N);
        if (kappa1 == 0) throw std::runtime_error("decompose: empty nilpotency on nonzero space");
        ResidueMatrix Npow = N.pow(static_cast<u64>(kappa1 - 1));

        std::vector<FieldElement> E;
        i64 eps_found = -1;
        for (i64 eps = 0; eps < params.m() && eps_found < 0; ++eps) {
            FieldElement ev = ctx->pow(ctx->zeta_m(), static_cast<u64>(eps));
            for (const auto& v : eigenspace_basis(sigma, ev)) {
                bool escapes = false;
                for (const auto& c : Npow.apply(v))
                    if (!c.is_zero()) {
                        escapes = true;
                        break;
                    }
                if (escapes) {
                    E = v;
                    eps_found = eps;
                    break;
                }
            }
        }
        if (eps_found < 0)
            throw std::runtime_error("decompose: no sigma-eigenvector escapes Ker N^(kappa-1); relations violated");

        // basis of the split-off submodule S = span{E, NE, ..., N^(kappa1-1) E}
        std::vector<std::vector<FieldElement>> scols;
        std::vector<FieldElement> cur = E;
        for (int i = 0; i < kappa1; ++i) {
            scols.push_back(cur);
            if (i + 1 < kappa1) cur = N.apply(cur);
        }
        // complete to a basis of the whole space with standard vectors (greedy)
        std::vector<std::vector<FieldElement>> cols = scols;
        for (int j = 0; j < n && static_cast<int>(cols.size()) < n; ++j) {
            std::vector<FieldElement> ej(static_cast<size_t>(n), ctx->zero());
            ej[static_cast<size_t>(j)] = ctx->one();
            std::vector<std::vector<FieldElement>> trial;
            for (const auto& c : cols) trial.push_back(c);
            trial.push_back(ej);
            if (rank_of(trial, ctx) == static_cast<int>(trial.size())) cols.push_back(std::move(ej));
        }
        if (static_cast<int>(cols.size()) != n)
            throw std::runtime_error("decompose: basis completion failed (internal)");

        // P^{-1} M P in the new basis; S is a submodule so the matrices are
        // block upper triangular with the quotient action at bottom right
        ResidueMatrix P(ctx, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) P.at(i, j) = cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
        // invert P by solving P X = Id with Gaussian elimination
        std::vector<std::vector<FieldElement>> aug(static_cast<size_t>(n),
                                                   std::vector<FieldElement>(static_cast<size_t>(2 * n), ctx->zero()));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) aug[static_cast<size_t>(i)][static_cast<size_t>(j)] = P.at(i, j);
            aug[static_cast<size_t>(i)][static_cast<size_t>(n + i)] = ctx->one();
        }
        rref_in_place(aug, ctx);
        ResidueMatrix Pinv(ctx, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Pinv.at(i, j) = aug[static_cast<size_t>(i)][static_cast<size_t>(n + j)];

        ResidueMatrix tconj = Pinv.mul(tau).mul(P);
        ResidueMatrix sconj = Pinv.mul(sigma).mul(P);
        const int rest = n - kappa1;
        for (int i = kappa1; i < n; ++i)
            for (int j = 0; j < kappa1; ++j)
                if (!tconj.at(i, j).is_zero() || !sconj.at(i, j).is_zero())
                    throw std::runtime_error("decompose: span{N^i E} is not invariant (invalid module)");

        result.summands.push_back(SummandSpec{eps_found, kappa1});
        ResidueMatrix tq(ctx, rest), sq(ctx, rest);
        for (int i = 0; i < rest; ++i)
            for (int j = 0; j < rest; ++j) {
                tq.at(i, j) = tconj.at(kappa1 + i, kappa1 + j);
                sq.at(i, j) = sconj.at(kappa1 + i, kappa1 + j);
            }
        tau = std::move(tq);
        sigma = std::move(sq);
    }
    return result.sorted();
}

}  // namespace metalift
