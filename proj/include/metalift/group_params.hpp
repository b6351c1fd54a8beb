#pragma once

// Integer arithmetic attached to the metacyclic group G = C_q x| C_m,
// q = p^h, presented by  tau^q = 1, sigma^m = 1, sigma tau sigma^{-1} = tau^alpha.

#include <map>
#include <optional>
#include <stdexcept>

#include "metalift/numutil.hpp"

namespace metalift {

// Least o >= 1 with alpha^o = 1 mod p_power (direct iteration).
inline i64 ord_mod(i64 alpha, i64 p_power) {
    return multiplicative_order(alpha, p_power);
}

class GroupParams {
public:
    GroupParams(i64 p, i64 h, i64 m, i64 alpha)
        : p_(p), h_(h), m_(m) {
        if (p <= 0 || h <= 0 || m <= 0 || alpha <= 0)
            throw std::invalid_argument("group: p, h, m, alpha must be positive");
        if (!is_prime(p)) throw std::invalid_argument("group: p must be prime");
        q_ = checked_pow(p, h, (i64{1} << 31));
        if (gcd_i64(p, m) != 1) throw std::invalid_argument("group: gcd(p, m) must be 1");
        alpha_ = ((alpha % q_) + q_) % q_;
        if (alpha_ == 0 || gcd_i64(alpha_, p) != 1)
            throw std::invalid_argument("group: alpha must be a unit mod p");
        if (pow_mod(static_cast<u64>(alpha_), static_cast<u64>(m_), static_cast<u64>(q_)) != 1)
            throw std::invalid_argument("group: alpha^m must be 1 mod q");
        i64 pi = 1;
        faithful_ = true;
        for (i64 i = 1; i <= h_; ++i) {
            pi *= p_;
            i64 o = ord_mod(alpha_, pi);
            ord_table_[pi] = o;
            if (o != m_) faithful_ = false;
        }
        m_prime_ = m_ / ord_table_.at(q_);
        f_ = multiplicative_order(p_, m_);
    }

    i64 p() const { return p_; }
    i64 h() const { return h_; }
    i64 q() const { return q_; }
    i64 m() const { return m_; }
    i64 alpha() const { return alpha_; }
    i64 m_prime() const { return m_prime_; }
    i64 f() const { return f_; }
    bool faithful() const { return faithful_; }
    const std::map<i64, i64>& ord_table() const { return ord_table_; }
    i64 ord_at(i64 p_power) const { return ord_table_.at(p_power); }

    // a0 is the discrete log of alpha base zeta_m; it only exists once the
    // residue field (and with it zeta_m) has been fixed.
    bool has_a0() const { return a0_.has_value(); }
    i64 a0() const {
        if (!a0_) throw std::logic_error("group: a0 requested before a residue field was bound");
        return *a0_;
    }
    void bind_a0(i64 a0) {
        if (a0 < 0 || a0 >= m_) throw std::invalid_argument("group: a0 out of range");
        if (a0_ && *a0_ != a0) throw std::logic_error("group: a0 already bound to a different value");
        a0_ = a0;
    }

    i64 phi_q() const {
        i64 v = p_ - 1;
        for (i64 i = 1; i < h_; ++i) v *= p_;
        return v;
    }

private:
    i64 p_, h_, q_ = 0, m_, alpha_ = 0;
    i64 m_prime_ = 0, f_ = 0;
    bool faithful_ = false;
    std::map<i64, i64> ord_table_;
    std::optional<i64> a0_;
};

inline GroupParams new_group(i64 p, i64 h, i64 m, i64 alpha) {
    return GroupParams(p, h, m, alpha);
}

// m' = m / ord_{p^h}(alpha); the index of <tau, sigma^{ord(alpha)}> over C_q.
inline i64 centralizer_quotient(const GroupParams& g) { return g.m_prime(); }

}  // namespace metalift
