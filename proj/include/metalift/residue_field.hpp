#pragma once

// The residue field k0 = F_{p^f}, f = ord_m(p), realized as F_p[Y]/(g) where
// g is the minimal polynomial of a deterministically chosen primitive m-th
// root of unity zeta_m.  An algebraically closed field is not needed:
// every object handled here (zeta_m-eigenvalues, the modules
// V_alpha(lambda,kappa)) is already defined over F_{p^f}.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "metalift/fppoly.hpp"
#include "metalift/group_params.hpp"
#include "metalift/numutil.hpp"

namespace metalift {

class FieldContext;
using FieldCtxPtr = std::shared_ptr<const FieldContext>;

class FieldElement {
public:
    FieldElement() = default;
    FieldElement(FieldCtxPtr ctx, std::vector<i64> coeffs);

    const std::vector<i64>& coeffs() const { return coeffs_; }
    const FieldCtxPtr& ctx() const { return ctx_; }

    bool is_zero() const {
        for (i64 c : coeffs_)
            if (c != 0) return false;
        return true;
    }

    // base-p integer encoding c0 + c1*p + ... ; used for deterministic choices
    u64 encoded() const;

    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.coeffs_ == b.coeffs_;
    }

private:
    FieldCtxPtr ctx_;
    std::vector<i64> coeffs_;  // length f, entries in [0, p)
};

class FieldContext : public std::enable_shared_from_this<FieldContext> {
public:
    i64 p() const { return p_; }
    i64 f() const { return f_; }
    i64 m() const { return m_; }
    const FpPoly& modulus_poly() const { return modulus_; }

    FieldElement zero() const { return element(std::vector<i64>(static_cast<size_t>(f_), 0)); }
    FieldElement one() const {
        std::vector<i64> c(static_cast<size_t>(f_), 0);
        c[0] = 1 % p_;
        return element(std::move(c));
    }
    FieldElement from_int(i64 v) const {
        std::vector<i64> c(static_cast<size_t>(f_), 0);
        c[0] = ((v % p_) + p_) % p_;
        return element(std::move(c));
    }
    FieldElement from_poly(const FpPoly& a) const {
        FpPoly r = fp_mod(a, modulus_, p_);
        std::vector<i64> c(static_cast<size_t>(f_), 0);
        for (size_t i = 0; i < r.size(); ++i) c[i] = r[i];
        return element(std::move(c));
    }
    FieldElement from_encoding(u64 e) const {
        std::vector<i64> c(static_cast<size_t>(f_), 0);
        for (i64 i = 0; i < f_; ++i) {
            c[static_cast<size_t>(i)] = static_cast<i64>(e % static_cast<u64>(p_));
            e /= static_cast<u64>(p_);
        }
        return element(std::move(c));
    }

    FieldElement zeta_m() const { return from_poly(FpPoly{0, 1}); }

    FieldElement add(const FieldElement& a, const FieldElement& b) const {
        auto c = a.coeffs();
        for (size_t i = 0; i < c.size(); ++i) c[i] = (c[i] + b.coeffs()[i]) % p_;
        return element(std::move(c));
    }
    FieldElement sub(const FieldElement& a, const FieldElement& b) const {
        auto c = a.coeffs();
        for (size_t i = 0; i < c.size(); ++i) c[i] = ((c[i] - b.coeffs()[i]) % p_ + p_) % p_;
        return element(std::move(c));
    }
    FieldElement neg(const FieldElement& a) const {
        auto c = a.coeffs();
        for (auto& v : c) v = (p_ - v) % p_;
        return element(std::move(c));
    }
    FieldElement mul(const FieldElement& a, const FieldElement& b) const {
        FpPoly pa(a.coeffs().begin(), a.coeffs().end());
        FpPoly pb(b.coeffs().begin(), b.coeffs().end());
        return from_poly(fp_mul(fp_trim(std::move(pa)), fp_trim(std::move(pb)), p_));
    }
    FieldElement pow(const FieldElement& a, u64 e) const {
        FieldElement acc = one(), b = a;
        while (e > 0) {
            if (e & 1) acc = mul(acc, b);
            b = mul(b, b);
            e >>= 1;
        }
        return acc;
    }
    FieldElement inv(const FieldElement& a) const {
        if (a.is_zero()) throw std::invalid_argument("field: division by zero");
        u64 e = 1;
        for (i64 i = 0; i < f_; ++i) e *= static_cast<u64>(p_);
        return pow(a, e - 2);
    }

    i64 order_of(const FieldElement& a) const {
        if (a.is_zero()) throw std::invalid_argument("field: zero has no multiplicative order");
        FieldElement cur = a;
        i64 o = 1;
        FieldElement id = one();
        while (!(cur == id)) {
            cur = mul(cur, a);
            ++o;
        }
        return o;
    }

    static FieldCtxPtr create(i64 p, i64 m, i64 f, FpPoly modulus) {
        auto ctx = std::shared_ptr<FieldContext>(new FieldContext());
        ctx->p_ = p;
        ctx->m_ = m;
        ctx->f_ = f;
        ctx->modulus_ = std::move(modulus);
        return ctx;
    }

private:
    FieldContext() = default;
    FieldElement element(std::vector<i64> c) const {
        return FieldElement(shared_from_this(), std::move(c));
    }

    i64 p_ = 0, f_ = 0, m_ = 0;
    FpPoly modulus_;  // monic, degree f, divides Phi_m mod p
};

inline FieldElement::FieldElement(FieldCtxPtr ctx, std::vector<i64> coeffs)
    : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)) {
    if (static_cast<i64>(coeffs_.size()) != ctx_->f())
        throw std::invalid_argument("field element: coefficient vector has wrong length");
}

inline u64 FieldElement::encoded() const {
    u64 e = 0;
    for (size_t i = coeffs_.size(); i-- > 0;) {
        e = e * static_cast<u64>(ctx_->p()) + static_cast<u64>(coeffs_[i]);
    }
    return e;
}

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) { return a.ctx()->add(a, b); }
inline FieldElement operator-(const FieldElement& a, const FieldElement& b) { return a.ctx()->sub(a, b); }
inline FieldElement operator*(const FieldElement& a, const FieldElement& b) { return a.ctx()->mul(a, b); }
inline FieldElement operator-(const FieldElement& a) { return a.ctx()->neg(a); }

inline FieldElement zero_like(const FieldElement& a) { return a.ctx()->zero(); }
inline FieldElement one_like(const FieldElement& a) { return a.ctx()->one(); }
inline bool values_agree(const FieldElement& a, const FieldElement& b) { return a == b; }

// Deterministic field construction.  The primitive m-th root is pinned first
// (least base-p encoding in a reference representation), and the modulus is
// its minimal polynomial, so that zeta_m is the class of Y in the final
// representation.  Degree-1 case: zeta_m is the least integer of order m.
inline FieldCtxPtr make_field(const GroupParams& params) {
    const i64 p = params.p();
    const i64 m = params.m();
    const i64 f = params.f();
    if (f == 1) {
        i64 zeta = -1;
        for (i64 c = 1; c < p; ++c) {
            if (multiplicative_order(c, p) == m) {
                zeta = c;
                break;
            }
        }
        if (zeta < 0) throw std::runtime_error("field: no element of order m in F_p (internal)");
        FpPoly g{((p - zeta) % p + p) % p, 1};  // Y - zeta
        return FieldContext::create(p, m, 1, std::move(g));
    }

    // reference representation: first irreducible degree-f divisor of Phi_m
    // in base-p encoded order
    FpPoly phi_m = cyclotomic_mod_p(m, p);
    FpPoly g_ref;
    u64 total = 1;
    for (i64 i = 0; i < f; ++i) total *= static_cast<u64>(p);
    for (u64 enc = 0; enc < total; ++enc) {
        FpPoly cand(static_cast<size_t>(f) + 1, 0);
        u64 e = enc;
        for (i64 i = 0; i < f; ++i) {
            cand[static_cast<size_t>(i)] = static_cast<i64>(e % static_cast<u64>(p));
            e /= static_cast<u64>(p);
        }
        cand[static_cast<size_t>(f)] = 1;
        if (!fp_mod(phi_m, cand, p).empty()) continue;
        if (!fp_irreducible(cand, p)) continue;
        g_ref = std::move(cand);
        break;
    }
    if (g_ref.empty()) throw std::runtime_error("field: no degree-f factor of Phi_m found (internal)");

    auto ref = FieldContext::create(p, m, f, g_ref);
    // least-encoded element of order exactly m in the reference field
    FieldElement zeta = ref->zero();
    bool found = false;
    for (u64 enc = 1; enc < total && !found; ++enc) {
        FieldElement cand = ref->from_encoding(enc);
        bool ok = ref->pow(cand, static_cast<u64>(m)) == ref->one();
        if (ok) {
            for (i64 r : prime_factors(m)) {
                if (ref->pow(cand, static_cast<u64>(m / r)) == ref->one()) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            zeta = cand;
            found = true;
        }
    }
    if (!found) throw std::runtime_error("field: no element of order m (internal)");

    // final modulus: minimal polynomial of zeta = prod_i (Y - zeta^(p^i))
    std::vector<FieldElement> conj;
    FieldElement cur = zeta;
    for (i64 i = 0; i < f; ++i) {
        conj.push_back(cur);
        cur = ref->pow(cur, static_cast<u64>(p));
    }
    std::vector<FieldElement> poly{ref->one()};  // coefficients in the ref field
    for (const auto& root : conj) {
        std::vector<FieldElement> next(poly.size() + 1, ref->zero());
        for (size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] = next[i + 1] + poly[i];
            next[i] = next[i] - poly[i] * root;
        }
        poly = std::move(next);
    }
    FpPoly g(poly.size());
    for (size_t i = 0; i < poly.size(); ++i) {
        for (size_t j = 1; j < poly[i].coeffs().size(); ++j) {
            if (poly[i].coeffs()[j] != 0)
                throw std::runtime_error("field: minimal polynomial not over F_p (internal)");
        }
        g[i] = poly[i].coeffs()[0];
    }
    return FieldContext::create(p, m, f, fp_trim(std::move(g)));
}

// Exponent a0 in [0, m) with zeta_m^a0 = image of alpha in k0, by direct scan.
inline i64 discrete_log_a0(const FieldCtxPtr& ctx, i64 alpha) {
    FieldElement target = ctx->from_int(alpha);
    FieldElement cur = ctx->one();
    for (i64 a0 = 0; a0 < ctx->m(); ++a0) {
        if (cur == target) return a0;
        cur = cur * ctx->zeta_m();
    }
    throw std::invalid_argument("discrete_log_a0: alpha is not a power of zeta_m");
}

// ---------------------------------------------------------------------------
// dense linear algebra over k0 (vectors are columns, matrices row-major)

class ResidueMatrix {
public:
    ResidueMatrix(FieldCtxPtr ctx, int dim)
        : ctx_(std::move(ctx)), dim_(dim),
          entries_(static_cast<size_t>(dim) * static_cast<size_t>(dim), ctx_->zero()) {}

    static ResidueMatrix identity(const FieldCtxPtr& ctx, int dim) {
        ResidueMatrix M(ctx, dim);
        for (int i = 0; i < dim; ++i) M.at(i, i) = ctx->one();
        return M;
    }

    int dim() const { return dim_; }
    const FieldCtxPtr& ctx() const { return ctx_; }

    FieldElement& at(int r, int c) { return entries_[static_cast<size_t>(r) * dim_ + c]; }
    const FieldElement& at(int r, int c) const { return entries_[static_cast<size_t>(r) * dim_ + c]; }

    friend bool operator==(const ResidueMatrix& a, const ResidueMatrix& b) {
        return a.dim_ == b.dim_ && a.entries_ == b.entries_;
    }

    ResidueMatrix mul(const ResidueMatrix& o) const {
        ResidueMatrix out(ctx_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < dim_; ++k) {
                const FieldElement& aik = at(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < dim_; ++j)
                    out.at(i, j) = out.at(i, j) + aik * o.at(k, j);
            }
        return out;
    }

    ResidueMatrix pow(u64 e) const {
        ResidueMatrix acc = identity(ctx_, dim_), b = *this;
        while (e > 0) {
            if (e & 1) acc = acc.mul(b);
            b = b.mul(b);
            e >>= 1;
        }
        return acc;
    }

    std::vector<FieldElement> apply(const std::vector<FieldElement>& v) const {
        std::vector<FieldElement> out(static_cast<size_t>(dim_), ctx_->zero());
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                out[static_cast<size_t>(i)] =
                    out[static_cast<size_t>(i)] + at(i, j) * v[static_cast<size_t>(j)];
        return out;
    }

    bool is_zero() const {
        for (const auto& e : entries_)
            if (!e.is_zero()) return false;
        return true;
    }

private:
    FieldCtxPtr ctx_;
    int dim_;
    std::vector<FieldElement> entries_;
};

// Reduced row echelon form in place; returns pivot column indices.
// Pivoting is deterministic: scan columns left to right, take the first
// row with a nonzero entry.
inline std::vector<int> rref_in_place(std::vector<std::vector<FieldElement>>& rows, const FieldCtxPtr& ctx) {
    std::vector<int> pivots;
    if (rows.empty()) return pivots;
    const int ncols = static_cast<int>(rows[0].size());
    int r = 0;
    for (int c = 0; c < ncols && r < static_cast<int>(rows.size()); ++c) {
        int sel = -1;
        for (int i = r; i < static_cast<int>(rows.size()); ++i) {
            if (!rows[static_cast<size_t>(i)][static_cast<size_t>(c)].is_zero()) {
                sel = i;
                break;
            }
        }
        if (sel < 0) continue;
        std::swap(rows[static_cast<size_t>(r)], rows[static_cast<size_t>(sel)]);
        FieldElement inv = ctx->inv(rows[static_cast<size_t>(r)][static_cast<size_t>(c)]);
        for (auto& v : rows[static_cast<size_t>(r)]) v = v * inv;
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            if (i == r) continue;
            FieldElement factor = rows[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (factor.is_zero()) continue;
            for (int j = 0; j < ncols; ++j)
                rows[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    rows[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                    factor * rows[static_cast<size_t>(r)][static_cast<size_t>(j)];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

// Basis of Ker(M - eigenvalue * Id), echelon order; empty when the
// eigenvalue is absent.
inline std::vector<std::vector<FieldElement>> eigenspace_basis(const ResidueMatrix& M,
                                                               const FieldElement& eigenvalue) {
    const auto& ctx = M.ctx();
    const int n = M.dim();
    std::vector<std::vector<FieldElement>> rows(static_cast<size_t>(n),
                                                std::vector<FieldElement>(static_cast<size_t>(n), ctx->zero()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            rows[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                (i == j) ? M.at(i, j) - eigenvalue : M.at(i, j);
        }
    std::vector<int> pivots = rref_in_place(rows, ctx);
    std::vector<bool> is_pivot(static_cast<size_t>(n), false);
    for (int c : pivots) is_pivot[static_cast<size_t>(c)] = true;
    std::vector<std::vector<FieldElement>> basis;
    for (int freec = 0; freec < n; ++freec) {
        if (is_pivot[static_cast<size_t>(freec)]) continue;
        std::vector<FieldElement> v(static_cast<size_t>(n), ctx->zero());
        v[static_cast<size_t>(freec)] = ctx->one();
        for (size_t pr = 0; pr < pivots.size(); ++pr) {
            v[static_cast<size_t>(pivots[pr])] = -rows[pr][static_cast<size_t>(freec)];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

inline int rank_of(std::vector<std::vector<FieldElement>> rows, const FieldCtxPtr& ctx) {
    return static_cast<int>(rref_in_place(rows, ctx).size());
}

}  // namespace metalift
