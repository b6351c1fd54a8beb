#pragma once

// Fixed-precision exact model of the ramified local ring R in which lifts
// are constructed.  The carrier is
//
//     (Z/p^N)[y]/(g_hat) [x]/(Phi_q(x)) [t]/(t^e - (1-x)),
//
// where g_hat is a monic degree-f lift of the residue-field modulus g chosen
// so that g_hat | Y^m - 1 mod p^N (hence y is an exact m-th root of unity),
// x is an exact primitive q-th root of unity, and t is the uniformizer.
// Under the normalized valuation w:
//
//     w(t) = 1,   w(1-x) = e,   w(p) = e*phi(q),
//
// and every element is a coefficient tensor of shape f x phi(q) x e over
// Z/p^N, together with a tracked absolute precision P in pi-units: the
// element stands for a coset z + (t^P).  Equality is always "at precision";
// the unit u = (1-x)^phi(q) / p is exactly computable and its inverse makes
// division by the uniformizer an exact operation (one pi-unit of tracked
// precision is given up per division).

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "metalift/group_params.hpp"
#include "metalift/numutil.hpp"
#include "metalift/residue_field.hpp"

namespace metalift {

class RingContext;
using RingCtxPtr = std::shared_ptr<const RingContext>;

struct precision_exhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class LocalElement {
public:
    LocalElement() = default;
    LocalElement(RingCtxPtr ctx, std::vector<u64> coeffs, i64 prec)
        : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)), prec_(prec) {}

    const RingCtxPtr& ctx() const { return ctx_; }
    const std::vector<u64>& coeffs() const { return coeffs_; }
    i64 prec() const { return prec_; }

    // true when every stored coefficient is zero (the representative, not
    // merely the coset, vanishes)
    bool is_exact_zero() const {
        for (u64 v : coeffs_)
            if (v != 0) return false;
        return true;
    }

private:
    RingCtxPtr ctx_;
    std::vector<u64> coeffs_;
    i64 prec_ = 0;
};

class RingContext : public std::enable_shared_from_this<RingContext> {
public:
    const GroupParams& params() const { return params_; }
    i64 p() const { return params_.p(); }
    i64 q() const { return params_.q(); }
    i64 N() const { return N_; }
    i64 e() const { return e_; }
    i64 f() const { return f_; }
    i64 phi_q() const { return phi_; }
    i64 prec_cap() const { return prec_cap_; }
    u64 pN() const { return pN_; }
    const std::vector<u64>& g_hat() const { return g_hat_; }
    const FieldCtxPtr& residue_field() const { return residue_; }

    // ---- element factories -------------------------------------------------

    LocalElement zero() const { return make(cv_zero(), prec_cap_); }
    LocalElement one() const { return make(cv_from_int(1), prec_cap_); }
    LocalElement from_int(i64 v) const { return make(cv_from_int(v), prec_cap_); }
    LocalElement uniformizer() const {
        auto c = cv_zero();
        c[idx(1, 0, 0)] = 1;
        return make(std::move(c), prec_cap_);
    }
    // exact q-th root of unity x^(exponent mod q)
    LocalElement zeta_q(i64 exponent) const {
        i64 j = ((exponent % q()) + q()) % q();
        return make(cv_x_power(j), prec_cap_);
    }
    // exact m-th root of unity y^(exponent mod m)
    LocalElement zeta_m(i64 exponent) const {
        i64 m = params_.m();
        i64 j = ((exponent % m) + m) % m;
        auto acc = cv_from_int(1);
        for (i64 i = 0; i < j; ++i) acc = cv_mul(acc, y_class_);
        return make(std::move(acc), prec_cap_);
    }
    const LocalElement& unit_u() const { return u_; }
    const LocalElement& unit_u_inv() const { return u_inv_; }

    LocalElement element_from(std::vector<u64> coeffs, i64 prec) const {
        if (static_cast<i64>(coeffs.size()) != size_)
            throw std::invalid_argument("ring element: coefficient tensor has wrong size");
        if (prec <= 0 || prec > prec_cap_)
            throw std::invalid_argument("ring element: precision out of range");
        for (auto& c : coeffs) c %= pN_;
        return make(std::move(coeffs), prec);
    }

    // lift a residue-field element into R (constant in x and t, full precision)
    LocalElement lift_residue(const FieldElement& a) const {
        if (a.ctx().get() != residue_.get())
            throw std::invalid_argument("ring: residue element from a different field");
        auto c = cv_zero();
        for (i64 iy = 0; iy < f_; ++iy) c[idx(0, 0, iy)] = static_cast<u64>(a.coeffs()[static_cast<size_t>(iy)]);
        return make(std::move(c), prec_cap_);
    }

    // ---- arithmetic ---------------------------------------------------------

    LocalElement add(const LocalElement& a, const LocalElement& b) const {
        check_ctx(a, b);
        auto c = cv_add(a.coeffs(), b.coeffs());
        return make(std::move(c), std::min(a.prec(), b.prec()));
    }
    LocalElement sub(const LocalElement& a, const LocalElement& b) const {
        check_ctx(a, b);
        auto c = cv_sub(a.coeffs(), b.coeffs());
        return make(std::move(c), std::min(a.prec(), b.prec()));
    }
    LocalElement neg(const LocalElement& a) const {
        auto c = cv_neg(a.coeffs());
        return make(std::move(c), a.prec());
    }
    // precision: min(P1 + w(z2), P2 + w(z1)), w read as 0 when the valuation
    // is indistinguishable from zero; capped at prec_cap.  When both factors
    // are at the cap the formula returns the cap whatever the valuations are,
    // so the scans are skipped.
    LocalElement mul(const LocalElement& a, const LocalElement& b) const {
        check_ctx(a, b);
        i64 prec = prec_cap_;
        if (a.prec() != prec_cap_ || b.prec() != prec_cap_) {
            i64 wa = valuation_raw(a.coeffs(), a.prec()).value_or(0);
            i64 wb = valuation_raw(b.coeffs(), b.prec()).value_or(0);
            prec = std::min({a.prec() + wb, b.prec() + wa, prec_cap_});
        }
        return make(cv_mul(a.coeffs(), b.coeffs()), prec);
    }
    LocalElement pow(const LocalElement& a, u64 e) const {
        LocalElement acc = one(), b = a;
        while (e > 0) {
            if (e & 1) acc = mul(acc, b);
            b = mul(b, b);
            e >>= 1;
        }
        return acc;
    }

    // ---- valuation / residue / division by t --------------------------------

    FieldElement residue_of(const LocalElement& a) const {
        if (a.prec() < 1) throw std::invalid_argument("residue: element carries no precision");
        return cv_residue(a.coeffs());
    }

    // nullopt = indistinguishable from zero at the element's precision
    std::optional<i64> valuation(const LocalElement& a) const {
        return valuation_raw(a.coeffs(), a.prec());
    }

    LocalElement divide_by_t(const LocalElement& a) const {
        if (a.prec() < 2)
            throw precision_exhausted("divide_by_t: not enough precision left");
        if (!cv_residue(a.coeffs()).is_zero())
            throw std::domain_error("divide_by_t: element has nonzero residue (valuation 0)");
        return make(cv_div_t(a.coeffs()), a.prec() - 1);
    }

    struct Comparison {
        bool equal;          // equal at `precision` pi-units
        i64 precision;       // precision at which the statement holds
        i64 valuation = -1;  // valuation of the difference when unequal
    };

    Comparison compare(const LocalElement& a, const LocalElement& b) const {
        check_ctx(a, b);
        auto d = cv_sub(a.coeffs(), b.coeffs());
        i64 prec = std::min(a.prec(), b.prec());
        auto v = valuation_raw(d, prec);
        if (v) return {false, prec, *v};
        return {true, prec, -1};
    }
    Comparison compare_zero(const LocalElement& a) const {
        auto v = valuation_raw(a.coeffs(), a.prec());
        if (v) return {false, a.prec(), *v};
        return {true, a.prec(), -1};
    }

private:
    RingContext() = default;

    LocalElement make(std::vector<u64> c, i64 prec) const {
        return LocalElement(shared_from_this(), std::move(c), prec);
    }
    void check_ctx(const LocalElement& a, const LocalElement& b) const {
        if (a.ctx().get() != this || b.ctx().get() != this)
            throw std::invalid_argument("ring: elements belong to a different context");
    }

    i64 idx(i64 it, i64 ix, i64 iy) const { return (it * phi_ + ix) * f_ + iy; }

    // ---- raw coefficient-vector operations (no precision bookkeeping) ------

    std::vector<u64> cv_zero() const { return std::vector<u64>(static_cast<size_t>(size_), 0); }

    std::vector<u64> cv_from_int(i64 v) const {
        auto c = cv_zero();
        i64 r = v % static_cast<i64>(pN_);
        if (r < 0) r += static_cast<i64>(pN_);
        c[0] = static_cast<u64>(r);
        return c;
    }

    std::vector<u64> cv_add(const std::vector<u64>& a, const std::vector<u64>& b) const {
        auto c = a;
        for (size_t i = 0; i < c.size(); ++i) c[i] = (c[i] + b[i]) % pN_;
        return c;
    }
    std::vector<u64> cv_sub(const std::vector<u64>& a, const std::vector<u64>& b) const {
        auto c = a;
        for (size_t i = 0; i < c.size(); ++i) c[i] = (c[i] + pN_ - b[i]) % pN_;
        return c;
    }
    std::vector<u64> cv_neg(const std::vector<u64>& a) const {
        auto c = a;
        for (auto& v : c) v = (pN_ - v) % pN_;
        return c;
    }
    bool cv_is_zero(const std::vector<u64>& a) const {
        for (u64 v : a)
            if (v != 0) return false;
        return true;
    }

    // y-vector (length <= 2f-1) reduced mod g_hat in place to length f
    void reduce_y(std::vector<u64>& v) const {
        for (i64 j = static_cast<i64>(v.size()) - 1; j >= f_; --j) {
            u64 c = v[static_cast<size_t>(j)];
            if (c == 0) continue;
            v[static_cast<size_t>(j)] = 0;
            for (i64 i = 0; i < f_; ++i) {
                u64 s = mul_mod(c, g_hat_[static_cast<size_t>(i)], pN_);
                auto& slot = v[static_cast<size_t>(j - f_ + i)];
                slot = (slot + pN_ - s) % pN_;
            }
        }
        v.resize(static_cast<size_t>(f_));
    }

    // x-buffer of shape [width][f], reduced mod Phi_q in place to degree < phi.
    // Phi_q(x) = sum_{i=0}^{p-1} x^(i * p^(h-1)) is monic with unit coefficients.
    void reduce_x(std::vector<u64>& buf, i64 width) const {
        const i64 step = phi_ / (p() - 1);  // p^(h-1)
        for (i64 j = width - 1; j >= phi_; --j) {
            for (i64 iy = 0; iy < f_; ++iy) {
                u64 c = buf[static_cast<size_t>(j * f_ + iy)];
                if (c == 0) continue;
                buf[static_cast<size_t>(j * f_ + iy)] = 0;
                for (i64 i = 0; i <= p() - 2; ++i) {
                    auto& slot = buf[static_cast<size_t>((j - phi_ + i * step) * f_ + iy)];
                    slot = (slot + pN_ - c) % pN_;
                }
            }
        }
    }

    std::vector<u64> cv_mul(const std::vector<u64>& a, const std::vector<u64>& b) const {
        const i64 tw = 2 * e_ - 1;   // t-degree of the raw product
        const i64 xw = 2 * phi_;     // x-width after folding t^e -> (1-x)
        const i64 yw = 2 * f_ - 1;
        std::vector<u64> acc(static_cast<size_t>(tw * xw * yw), 0);
        auto aidx = [&](i64 it, i64 ix, i64 iy) { return (it * xw + ix) * yw + iy; };
        for (i64 t1 = 0; t1 < e_; ++t1)
            for (i64 x1 = 0; x1 < phi_; ++x1)
                for (i64 y1 = 0; y1 < f_; ++y1) {
                    u64 av = a[static_cast<size_t>(idx(t1, x1, y1))];
                    if (av == 0) continue;
                    for (i64 t2 = 0; t2 < e_; ++t2)
                        for (i64 x2 = 0; x2 < phi_; ++x2)
                            for (i64 y2 = 0; y2 < f_; ++y2) {
                                u64 bv = b[static_cast<size_t>(idx(t2, x2, y2))];
                                if (bv == 0) continue;
                                auto& slot = acc[static_cast<size_t>(aidx(t1 + t2, x1 + x2, y1 + y2))];
                                slot = (slot + mul_mod(av, bv, pN_)) % pN_;
                            }
                }
        // fold t^e = (1 - x)
        for (i64 it = tw - 1; it >= e_; --it) {
            for (i64 ix = 0; ix < xw - 1; ++ix)
                for (i64 iy = 0; iy < yw; ++iy) {
                    u64 v = acc[static_cast<size_t>(aidx(it, ix, iy))];
                    if (v == 0) continue;
                    auto& lo = acc[static_cast<size_t>(aidx(it - e_, ix, iy))];
                    lo = (lo + v) % pN_;
                    auto& hi = acc[static_cast<size_t>(aidx(it - e_, ix + 1, iy))];
                    hi = (hi + pN_ - v) % pN_;
                }
        }
        // reduce each surviving t-slice: y first, then x
        auto out = cv_zero();
        std::vector<u64> xbuf(static_cast<size_t>(xw * f_), 0);
        for (i64 it = 0; it < e_; ++it) {
            std::fill(xbuf.begin(), xbuf.end(), 0);
            for (i64 ix = 0; ix < xw; ++ix) {
                std::vector<u64> yv(static_cast<size_t>(yw));
                for (i64 iy = 0; iy < yw; ++iy) yv[static_cast<size_t>(iy)] = acc[static_cast<size_t>(aidx(it, ix, iy))];
                reduce_y(yv);
                for (i64 iy = 0; iy < f_; ++iy) xbuf[static_cast<size_t>(ix * f_ + iy)] = yv[static_cast<size_t>(iy)];
            }
            reduce_x(xbuf, xw);
            for (i64 ix = 0; ix < phi_; ++ix)
                for (i64 iy = 0; iy < f_; ++iy)
                    out[static_cast<size_t>(idx(it, ix, iy))] = xbuf[static_cast<size_t>(ix * f_ + iy)];
        }
        return out;
    }

    std::vector<u64> cv_x_power(i64 j) const {
        const i64 xw = 2 * phi_;
        std::vector<u64> xbuf(static_cast<size_t>(xw * f_), 0);
        xbuf[static_cast<size_t>(j * f_ + 0)] = 1;
        reduce_x(xbuf, xw);
        auto out = cv_zero();
        for (i64 ix = 0; ix < phi_; ++ix)
            for (i64 iy = 0; iy < f_; ++iy)
                out[static_cast<size_t>(idx(0, ix, iy))] = xbuf[static_cast<size_t>(ix * f_ + iy)];
        return out;
    }

    FieldElement cv_residue(const std::vector<u64>& a) const {
        // t -> 0, x -> 1, coefficients mod p, y -> class of Y
        std::vector<i64> c(static_cast<size_t>(f_), 0);
        const i64 pp = p();
        for (i64 iy = 0; iy < f_; ++iy) {
            u64 s = 0;
            for (i64 ix = 0; ix < phi_; ++ix) s = (s + a[static_cast<size_t>(idx(0, ix, iy))]) % pN_;
            c[static_cast<size_t>(iy)] = static_cast<i64>(s % static_cast<u64>(pp));
        }
        return FieldElement(residue_, std::move(c));
    }

    // z/t for z with zero residue:
    //   z = sum_{j<e} c_j(x,y) t^j,
    //   z/t = sum_{j>=1} c_j t^(j-1) + (c_0/(1-x)) t^(e-1),
    //   c_0/(1-x) = -quot + (rem/p) * (1-x)^(phi-1) * u_inv,
    // where c_0 = (x-1) quot + rem by synthetic division and rem = c_0(1,y)
    // is divisible by p exactly because residue(z) = 0.
    std::vector<u64> cv_div_t(const std::vector<u64>& a) const {
        auto out = cv_zero();
        for (i64 it = 1; it < e_; ++it)
            for (i64 ix = 0; ix < phi_; ++ix)
                for (i64 iy = 0; iy < f_; ++iy)
                    out[static_cast<size_t>(idx(it - 1, ix, iy))] = a[static_cast<size_t>(idx(it, ix, iy))];
        // synthetic division of c_0 by (x - 1): quot has degree phi-2, rem = c_0(1)
        std::vector<u64> quot(static_cast<size_t>((phi_ - 1) * f_), 0);
        std::vector<u64> carry(static_cast<size_t>(f_), 0);
        for (i64 j = phi_ - 1; j >= 1; --j) {
            for (i64 iy = 0; iy < f_; ++iy) {
                u64 qv = (carry[static_cast<size_t>(iy)] + a[static_cast<size_t>(idx(0, j, iy))]) % pN_;
                quot[static_cast<size_t>((j - 1) * f_ + iy)] = qv;
                carry[static_cast<size_t>(iy)] = qv;
            }
        }
        std::vector<u64> rem(static_cast<size_t>(f_));
        for (i64 iy = 0; iy < f_; ++iy)
            rem[static_cast<size_t>(iy)] = (carry[static_cast<size_t>(iy)] + a[static_cast<size_t>(idx(0, 0, iy))]) % pN_;
        // rem / p, exact
        const u64 pp = static_cast<u64>(p());
        for (auto& v : rem) {
            if (v % pp != 0)
                throw std::domain_error("divide_by_t: residue not divisible by p (violated precondition)");
            v /= pp;
        }
        // slice (e-1) of out gets  -quot + rem * W,  W = (1-x)^(phi-1) * u_inv
        for (i64 j = 0; j <= phi_ - 2; ++j)
            for (i64 iy = 0; iy < f_; ++iy) {
                auto& slot = out[static_cast<size_t>(idx(e_ - 1, j, iy))];
                slot = (slot + pN_ - quot[static_cast<size_t>(j * f_ + iy)]) % pN_;
            }
        // rem (a y-scalar) times the x-y element W_, accumulated into slice e-1
        for (i64 ix = 0; ix < phi_; ++ix) {
            std::vector<u64> yv(static_cast<size_t>(2 * f_ - 1), 0);
            for (i64 iy1 = 0; iy1 < f_; ++iy1) {
                u64 rv = rem[static_cast<size_t>(iy1)];
                if (rv == 0) continue;
                for (i64 iy2 = 0; iy2 < f_; ++iy2) {
                    u64 wv = W_[static_cast<size_t>(idx(0, ix, iy2))];
                    if (wv == 0) continue;
                    auto& slot = yv[static_cast<size_t>(iy1 + iy2)];
                    slot = (slot + mul_mod(rv, wv, pN_)) % pN_;
                }
            }
            reduce_y(yv);
            for (i64 iy = 0; iy < f_; ++iy) {
                auto& slot = out[static_cast<size_t>(idx(e_ - 1, ix, iy))];
                slot = (slot + yv[static_cast<size_t>(iy)]) % pN_;
            }
        }
        return out;
    }

    std::optional<i64> valuation_raw(const std::vector<u64>& a, i64 prec) const {
        if (cv_is_zero(a)) return std::nullopt;
        if (!cv_residue(a).is_zero()) return prec >= 1 ? std::optional<i64>(0) : std::nullopt;
        std::vector<u64> cur = cv_div_t(a);
        for (i64 v = 1; v < prec; ++v) {
            if (!cv_residue(cur).is_zero()) return v;
            cur = cv_div_t(cur);
        }
        return std::nullopt;
    }

    GroupParams params_{5, 1, 1, 1};  // placeholder; overwritten by create()
    FieldCtxPtr residue_;
    i64 N_ = 0, e_ = 0, f_ = 0, phi_ = 0, size_ = 0, prec_cap_ = 0;
    u64 pN_ = 0;
    std::vector<u64> g_hat_;       // monic degree-f lift of g, g_hat | Y^m - 1 mod p^N
    std::vector<u64> y_class_;     // class of Y (exact m-th root of unity)
    std::vector<u64> W_;           // (1-x)^(phi-1) * u_inv, x-y part only
    LocalElement u_, u_inv_;

    friend RingCtxPtr make_ring(const GroupParams&, i64, i64);
};

// extended euclid over F_p[Y]: returns (g, a, b) with a*x + b*y = g (g monic gcd)
inline std::tuple<FpPoly, FpPoly, FpPoly> fp_ext_gcd(FpPoly x, FpPoly y, i64 p) {
    FpPoly a0{1}, a1{}, b0{}, b1{1};
    while (!fp_trim(y).empty()) {
        i64 lead = y.back();
        i64 inv = static_cast<i64>(pow_mod(static_cast<u64>(lead), static_cast<u64>(p - 2), static_cast<u64>(p)));
        FpPoly ym = y;
        for (auto& c : ym) c = c * inv % p;
        auto [q, r] = fp_divmod(x, ym, p);
        // q is the quotient against the monic-scaled divisor; rescale
        for (auto& c : q) c = c * inv % p;
        FpPoly a2 = fp_sub(a0, fp_mul(q, a1, p), p);
        FpPoly b2 = fp_sub(b0, fp_mul(q, b1, p), p);
        x = std::move(y);
        y = std::move(r);
        a0 = std::move(a1);
        a1 = std::move(a2);
        b0 = std::move(b1);
        b1 = std::move(b2);
    }
    if (!x.empty() && x.back() != 1) {
        i64 inv = static_cast<i64>(pow_mod(static_cast<u64>(x.back()), static_cast<u64>(p - 2), static_cast<u64>(p)));
        for (auto& c : x) c = c * inv % p;
        for (auto& c : a0) c = c * inv % p;
        for (auto& c : b0) c = c * inv % p;
    }
    return {x, a0, b0};
}

inline RingCtxPtr make_ring(const GroupParams& params, i64 N, i64 e) {
    if (N < 2) throw std::invalid_argument("ring: N must be at least 2");
    if (e < 2) throw std::invalid_argument("ring: e must be at least 2 (v(a_i) = 1 < e <= v(lambda_i - lambda_j))");
    auto ctx = std::shared_ptr<RingContext>(new RingContext());
    ctx->params_ = params;
    ctx->residue_ = make_field(params);
    ctx->N_ = N;
    ctx->e_ = e;
    ctx->f_ = params.f();
    ctx->phi_ = params.phi_q();
    ctx->size_ = ctx->f_ * ctx->phi_ * ctx->e_;
    ctx->prec_cap_ = N * e * ctx->phi_;

    const i64 p = params.p();
    // coefficients are handled through mul_mod; the u-expansion needs p^(N+1)
    i64 pN_signed = checked_pow(p, N, (i64{1} << 61) / p);
    ctx->pN_ = static_cast<u64>(pN_signed);
    const u64 pN = ctx->pN_;
    const u64 pN1 = pN * static_cast<u64>(p);

    // --- Hensel lift of the factorization Y^m - 1 = g * h from mod p to mod p^N
    const i64 m = params.m();
    const i64 f = ctx->f_;
    const FpPoly g0 = ctx->residue_->modulus_poly();
    FpPoly ym1(static_cast<size_t>(m) + 1, 0);
    ym1[0] = p - 1;
    ym1[static_cast<size_t>(m)] = 1;
    auto [h0, r0] = fp_divmod(ym1, g0, p);
    if (!r0.empty()) throw std::runtime_error("ring: residue modulus does not divide Y^m - 1 (internal)");
    auto [gcd_gh, bez_a, bez_b] = fp_ext_gcd(g0, h0, p);
    if (fp_deg(gcd_gh) != 0) throw std::runtime_error("ring: g and h not coprime mod p (internal)");

    std::vector<u64> G(g0.size()), H(h0.size());
    for (size_t i = 0; i < g0.size(); ++i) G[i] = static_cast<u64>(g0[i]);
    for (size_t i = 0; i < h0.size(); ++i) H[i] = static_cast<u64>(h0[i]);
    u64 pk = static_cast<u64>(p);
    for (i64 k = 1; k < N; ++k, pk *= static_cast<u64>(p)) {
        // defect D = (Y^m - 1 - G*H) mod p^N, divisible by p^k
        std::vector<u64> GH(static_cast<size_t>(m) + 1, 0);
        for (size_t i = 0; i < G.size(); ++i)
            for (size_t j = 0; j < H.size(); ++j)
                GH[i + j] = (GH[i + j] + mul_mod(G[i], H[j], pN)) % pN;
        std::vector<u64> D(static_cast<size_t>(m) + 1, 0);
        for (size_t i = 0; i <= static_cast<size_t>(m); ++i) {
            u64 target = (i == 0) ? pN - 1 : (i == static_cast<size_t>(m) ? 1 : 0);
            D[i] = (target + pN - GH[i]) % pN;
        }
        FpPoly d(static_cast<size_t>(m) + 1, 0);
        bool nonzero = false;
        for (size_t i = 0; i <= static_cast<size_t>(m); ++i) {
            if (D[i] % pk != 0) throw std::runtime_error("ring: Hensel defect not divisible by p^k (internal)");
            d[i] = static_cast<i64>((D[i] / pk) % static_cast<u64>(p));
            nonzero = nonzero || d[i] != 0;
        }
        if (!nonzero) continue;
        d = fp_trim(std::move(d));
        // solve u*h0 + v*g0 = d over F_p with deg u < f: u = (bez_b * d) mod g0
        FpPoly u_corr = fp_mod(fp_mul(bez_b, d, p), g0, p);
        auto [v_corr, vr] = fp_divmod(fp_sub(d, fp_mul(u_corr, h0, p), p), g0, p);
        if (!vr.empty()) throw std::runtime_error("ring: Hensel correction division not exact (internal)");
        for (size_t i = 0; i < u_corr.size(); ++i)
            G[i] = (G[i] + mul_mod(pk % pN, static_cast<u64>(u_corr[i]), pN)) % pN;
        for (size_t i = 0; i < v_corr.size(); ++i)
            H[i] = (H[i] + mul_mod(pk % pN, static_cast<u64>(v_corr[i]), pN)) % pN;
    }
    ctx->g_hat_.assign(static_cast<size_t>(f) + 1, 0);
    for (size_t i = 0; i < G.size(); ++i) ctx->g_hat_[i] = G[i];
    if (ctx->g_hat_.back() != 1) throw std::runtime_error("ring: lifted modulus not monic (internal)");

    // class of Y reduced mod g_hat
    {
        std::vector<u64> yc(static_cast<size_t>(ctx->size_), 0);
        if (f == 1) {
            yc[0] = (pN - ctx->g_hat_[0]) % pN;
        } else {
            yc[1] = 1;  // position idx(0,0,1)
        }
        ctx->y_class_ = std::move(yc);
    }

    // --- the unit u = (1-x)^phi / p, computed exactly mod p^(N+1) then divided
    const i64 phi = ctx->phi_;
    std::vector<u64> expand(static_cast<size_t>(phi) + 1, 0);
    {
        // (1-x)^phi via Pascal's rule mod p^(N+1)
        std::vector<u64> row(static_cast<size_t>(phi) + 1, 0);
        row[0] = 1;
        for (i64 n = 1; n <= phi; ++n)
            for (i64 k = n; k >= 1; --k) row[static_cast<size_t>(k)] = (row[static_cast<size_t>(k)] + row[static_cast<size_t>(k - 1)]) % pN1;
        for (i64 k = 0; k <= phi; ++k) {
            u64 v = row[static_cast<size_t>(k)];
            expand[static_cast<size_t>(k)] = (k % 2 == 0) ? v : (pN1 - v) % pN1;
        }
    }
    // reduce mod Phi_q over Z/p^(N+1): top term has degree exactly phi
    {
        const i64 step = phi / (p - 1);
        u64 c = expand[static_cast<size_t>(phi)];
        expand[static_cast<size_t>(phi)] = 0;
        for (i64 i = 0; i <= p - 2; ++i) {
            auto& slot = expand[static_cast<size_t>(i * step)];
            slot = (slot + pN1 - c) % pN1;
        }
    }
    {
        auto uc = ctx->cv_zero();
        for (i64 k = 0; k < phi; ++k) {
            u64 v = expand[static_cast<size_t>(k)];
            if (v % static_cast<u64>(p) != 0)
                throw std::runtime_error("ring: (1-x)^phi not divisible by p (internal consistency)");
            uc[static_cast<size_t>(ctx->idx(0, k, 0))] = (v / static_cast<u64>(p)) % pN;
        }
        ctx->u_ = LocalElement(ctx, std::move(uc), ctx->prec_cap_);
    }

    // --- u_inv by Newton iteration z <- z(2 - u z), exact in the finite carrier
    {
        FieldElement ru = ctx->cv_residue(ctx->u_.coeffs());
        if (ru.is_zero()) throw std::runtime_error("ring: u reduces to zero (internal)");
        FieldElement ru_inv = ctx->residue_->inv(ru);
        auto z = ctx->cv_zero();
        for (i64 iy = 0; iy < f; ++iy)
            z[static_cast<size_t>(ctx->idx(0, 0, iy))] = static_cast<u64>(ru_inv.coeffs()[static_cast<size_t>(iy)]);
        auto two = ctx->cv_from_int(2);
        bool converged = false;
        for (int it = 0; it < 64; ++it) {
            auto uz = ctx->cv_mul(ctx->u_.coeffs(), z);
            if (ctx->cv_is_zero(ctx->cv_sub(uz, ctx->cv_from_int(1)))) {
                converged = true;
                break;
            }
            z = ctx->cv_mul(z, ctx->cv_sub(two, uz));
        }
        if (!converged) throw std::runtime_error("ring: Newton iteration for u^{-1} failed (internal)");
        ctx->u_inv_ = LocalElement(ctx, std::move(z), ctx->prec_cap_);
    }

    // --- W = (1-x)^(phi-1) * u_inv
    {
        auto one_minus_x = ctx->cv_from_int(1);
        auto xm = ctx->cv_x_power(1);
        one_minus_x = ctx->cv_sub(one_minus_x, xm);
        auto acc = ctx->cv_from_int(1);
        for (i64 i = 0; i < phi - 1; ++i) acc = ctx->cv_mul(acc, one_minus_x);
        ctx->W_ = ctx->cv_mul(acc, ctx->u_inv_.coeffs());
    }

    // --- creation-time invariants: exact orders of x and y
    {
        auto xe = ctx->zeta_q(1);
        auto xq = ctx->pow(xe, static_cast<u64>(ctx->q()));
        if (!ctx->cv_is_zero(ctx->cv_sub(xq.coeffs(), ctx->cv_from_int(1))))
            throw std::runtime_error("ring: x^q != 1 (internal)");
        auto xqp = ctx->pow(xe, static_cast<u64>(ctx->q() / p));
        if (ctx->cv_is_zero(ctx->cv_sub(xqp.coeffs(), ctx->cv_from_int(1))))
            throw std::runtime_error("ring: x has order smaller than q (internal)");
        auto ye = LocalElement(ctx, ctx->y_class_, ctx->prec_cap_);
        auto ym = ctx->pow(ye, static_cast<u64>(m));
        if (!ctx->cv_is_zero(ctx->cv_sub(ym.coeffs(), ctx->cv_from_int(1))))
            throw std::runtime_error("ring: y^m != 1 (internal)");
        for (i64 r : prime_factors(m)) {
            auto yr = ctx->pow(ye, static_cast<u64>(m / r));
            if (ctx->cv_is_zero(ctx->cv_sub(yr.coeffs(), ctx->cv_from_int(1))))
                throw std::runtime_error("ring: y has order smaller than m (internal)");
        }
        auto uu = ctx->cv_mul(ctx->u_.coeffs(), ctx->u_inv_.coeffs());
        if (!ctx->cv_is_zero(ctx->cv_sub(uu, ctx->cv_from_int(1))))
            throw std::runtime_error("ring: u * u_inv != 1 (internal)");
    }
    return ctx;
}

// ---- free operator / helper layer ------------------------------------------

inline LocalElement operator+(const LocalElement& a, const LocalElement& b) { return a.ctx()->add(a, b); }
inline LocalElement operator-(const LocalElement& a, const LocalElement& b) { return a.ctx()->sub(a, b); }
inline LocalElement operator*(const LocalElement& a, const LocalElement& b) { return a.ctx()->mul(a, b); }
inline LocalElement operator-(const LocalElement& a) { return a.ctx()->neg(a); }

inline LocalElement zero_like(const LocalElement& a) { return a.ctx()->zero(); }
inline LocalElement one_like(const LocalElement& a) { return a.ctx()->one(); }
inline bool values_agree(const LocalElement& a, const LocalElement& b) {
    return a.ctx()->compare(a, b).equal;
}

inline std::optional<i64> valuation(const LocalElement& a) { return a.ctx()->valuation(a); }
inline LocalElement divide_by_t(const LocalElement& a) { return a.ctx()->divide_by_t(a); }
inline FieldElement reduce(const LocalElement& a) { return a.ctx()->residue_of(a); }

// ---- dense matrices over R --------------------------------------------------

class LocalMatrix {
public:
    LocalMatrix(RingCtxPtr ctx, int dim)
        : ctx_(std::move(ctx)), dim_(dim),
          entries_(static_cast<size_t>(dim) * static_cast<size_t>(dim), ctx_->zero()) {}

    static LocalMatrix identity(const RingCtxPtr& ctx, int dim) {
        LocalMatrix M(ctx, dim);
        for (int i = 0; i < dim; ++i) M.at(i, i) = ctx->one();
        return M;
    }

    int dim() const { return dim_; }
    const RingCtxPtr& ctx() const { return ctx_; }
    LocalElement& at(int r, int c) { return entries_[static_cast<size_t>(r) * dim_ + c]; }
    const LocalElement& at(int r, int c) const { return entries_[static_cast<size_t>(r) * dim_ + c]; }

    LocalMatrix mul(const LocalMatrix& o) const {
        if (o.dim_ != dim_ || o.ctx_.get() != ctx_.get())
            throw std::invalid_argument("matrix: dimension or context mismatch");
        LocalMatrix out(ctx_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < dim_; ++k) {
                const LocalElement& aik = at(i, k);
                for (int j = 0; j < dim_; ++j)
                    out.at(i, j) = out.at(i, j) + aik * o.at(k, j);
            }
        return out;
    }

    LocalMatrix pow(u64 e) const {
        LocalMatrix acc = identity(ctx_, dim_), b = *this;
        while (e > 0) {
            if (e & 1) acc = acc.mul(b);
            b = b.mul(b);
            e >>= 1;
        }
        return acc;
    }

    std::vector<LocalElement> apply(const std::vector<LocalElement>& v) const {
        std::vector<LocalElement> out(static_cast<size_t>(dim_), ctx_->zero());
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                out[static_cast<size_t>(i)] = out[static_cast<size_t>(i)] + at(i, j) * v[static_cast<size_t>(j)];
        return out;
    }

private:
    RingCtxPtr ctx_;
    int dim_;
    std::vector<LocalElement> entries_;
};

struct MatrixComparison {
    bool equal;
    i64 precision;  // min precision over entries at which the statement holds
    int row = -1, col = -1;
    i64 valuation = -1;  // of the first offending entry when unequal
};

inline MatrixComparison matrices_equal_at_precision(const LocalMatrix& a, const LocalMatrix& b) {
    MatrixComparison rep{true, a.ctx()->prec_cap()};
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) {
            auto c = a.ctx()->compare(a.at(i, j), b.at(i, j));
            rep.precision = std::min(rep.precision, c.precision);
            if (!c.equal && rep.equal) {
                rep.equal = false;
                rep.row = i;
                rep.col = j;
                rep.valuation = c.valuation;
            }
        }
    return rep;
}

}  // namespace metalift
