#pragma once

// Dense polynomial arithmetic over F_p, just enough to pick the residue
// field modulus: cyclotomic polynomials mod p, divisibility, irreducibility.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "metalift/numutil.hpp"

namespace metalift {

// Coefficients in [0, p), lowest degree first, no trailing zeros (zero poly = {}).
using FpPoly = std::vector<i64>;

inline FpPoly fp_trim(FpPoly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

inline int fp_deg(const FpPoly& a) { return static_cast<int>(a.size()) - 1; }

inline FpPoly fp_mul(const FpPoly& a, const FpPoly& b, i64 p) {
    if (a.empty() || b.empty()) return {};
    FpPoly c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
        }
    }
    return fp_trim(std::move(c));
}

inline FpPoly fp_sub(FpPoly a, const FpPoly& b, i64 p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) a[i] = ((a[i] - b[i]) % p + p) % p;
    return fp_trim(std::move(a));
}

// Division with remainder by a monic divisor.
inline std::pair<FpPoly, FpPoly> fp_divmod(FpPoly a, const FpPoly& g, i64 p) {
    if (g.empty() || g.back() != 1)
        throw std::invalid_argument("fp_divmod: divisor must be monic");
    const int dg = fp_deg(g);
    FpPoly q;
    if (fp_deg(a) >= dg) q.assign(a.size() - g.size() + 1, 0);
    for (int i = fp_deg(a); i >= dg; --i) {
        i64 c = a[static_cast<size_t>(i)];
        if (c == 0) continue;
        q[static_cast<size_t>(i - dg)] = c;
        for (int j = 0; j <= dg; ++j) {
            size_t k = static_cast<size_t>(i - dg + j);
            a[k] = ((a[k] - c * g[static_cast<size_t>(j)]) % p + p) % p;
        }
    }
    return {fp_trim(std::move(q)), fp_trim(std::move(a))};
}

inline FpPoly fp_mod(const FpPoly& a, const FpPoly& g, i64 p) {
    return fp_divmod(a, g, p).second;
}

// X^(p^k) mod g by k-fold p-power maps starting from X.
inline FpPoly fp_frobenius_power(const FpPoly& g, i64 p, int k) {
    FpPoly acc = fp_mod(FpPoly{0, 1}, g, p);
    for (int i = 0; i < k; ++i) {
        FpPoly r{1};
        FpPoly b = acc;
        i64 e = p;
        while (e > 0) {
            if (e & 1) r = fp_mod(fp_mul(r, b, p), g, p);
            b = fp_mod(fp_mul(b, b, p), g, p);
            e >>= 1;
        }
        acc = r;
    }
    return acc;
}

inline FpPoly fp_gcd(FpPoly a, FpPoly b, i64 p) {
    a = fp_trim(std::move(a));
    b = fp_trim(std::move(b));
    while (!b.empty()) {
        // make b monic for divmod
        i64 lead = b.back();
        i64 inv = static_cast<i64>(pow_mod(static_cast<u64>(lead), static_cast<u64>(p - 2), static_cast<u64>(p)));
        FpPoly bm = b;
        for (auto& c : bm) c = c * inv % p;
        FpPoly r = fp_mod(a, bm, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty() && a.back() != 1) {
        i64 inv = static_cast<i64>(pow_mod(static_cast<u64>(a.back()), static_cast<u64>(p - 2), static_cast<u64>(p)));
        for (auto& c : a) c = c * inv % p;
    }
    return a;
}

// Rabin test: g (monic, degree f) is irreducible over F_p iff X^(p^f) = X mod g
// and gcd(X^(p^(f/r)) - X, g) = 1 for every prime r | f.
inline bool fp_irreducible(const FpPoly& g, i64 p) {
    const int f = fp_deg(g);
    if (f <= 0) return false;
    if (f == 1) return true;
    FpPoly xq = fp_frobenius_power(g, p, f);
    FpPoly x = fp_mod(FpPoly{0, 1}, g, p);
    if (fp_sub(xq, x, p) != FpPoly{}) return false;
    for (i64 r : prime_factors(f)) {
        FpPoly xe = fp_frobenius_power(g, p, static_cast<int>(f / r));
        if (fp_gcd(fp_sub(xe, x, p), g, p).size() > 1) return false;
    }
    return true;
}

// m-th cyclotomic polynomial reduced mod p (requires gcd(p, m) = 1),
// computed as (Y^m - 1) / prod_{d | m, d < m} Phi_d.
inline FpPoly cyclotomic_mod_p(i64 m, i64 p) {
    std::vector<FpPoly> phi(static_cast<size_t>(m) + 1);
    for (i64 d = 1; d <= m; ++d) {
        if (m % d != 0) continue;
        FpPoly num(static_cast<size_t>(d) + 1, 0);
        num[0] = p - 1;
        num[static_cast<size_t>(d)] = 1;  // Y^d - 1
        for (i64 e = 1; e < d; ++e) {
            if (d % e != 0) continue;
            auto [q, r] = fp_divmod(num, phi[static_cast<size_t>(e)], p);
            if (!r.empty()) throw std::runtime_error("cyclotomic_mod_p: non-exact division (internal)");
            num = std::move(q);
        }
        phi[static_cast<size_t>(d)] = std::move(num);
    }
    return phi[static_cast<size_t>(m)];
}

}  // namespace metalift
