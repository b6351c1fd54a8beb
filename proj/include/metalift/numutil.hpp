#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace metalift {

using i64 = std::int64_t;
using u64 = std::uint64_t;

inline u64 mul_mod(u64 a, u64 b, u64 mod) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % mod);
}

inline u64 pow_mod(u64 base, u64 exp, u64 mod) {
    if (mod == 1) return 0;
    u64 acc = 1 % mod;
    base %= mod;
    while (exp > 0) {
        if (exp & 1) acc = mul_mod(acc, base, mod);
        base = mul_mod(base, base, mod);
        exp >>= 1;
    }
    return acc;
}

inline i64 gcd_i64(i64 a, i64 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Trial division; adequate for the desk-scale primes this library targets
// (p is bounded by the requirement p^N < 2^62 anyway).
inline bool is_prime(i64 n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (i64 d = 3; d * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

// Least o >= 1 with a^o = 1 mod n, by direct iteration. Requires gcd(a,n)=1.
inline i64 multiplicative_order(i64 a, i64 n) {
    if (n <= 0) throw std::invalid_argument("multiplicative_order: modulus must be positive");
    if (n == 1) return 1;
    a %= n;
    if (a < 0) a += n;
    if (gcd_i64(a, n) != 1) throw std::invalid_argument("multiplicative_order: arguments not coprime");
    u64 cur = static_cast<u64>(a);
    i64 o = 1;
    while (cur != 1) {
        cur = mul_mod(cur, static_cast<u64>(a), static_cast<u64>(n));
        ++o;
        if (o > n) throw std::runtime_error("multiplicative_order: no order found (internal)");
    }
    return o;
}

inline std::vector<i64> prime_factors(i64 n) {
    std::vector<i64> out;
    for (i64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

inline std::vector<i64> divisors_of(i64 n) {
    std::vector<i64> out;
    for (i64 d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            if (d != n / d) out.push_back(n / d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline i64 checked_pow(i64 base, i64 exp, i64 limit) {
    i64 acc = 1;
    for (i64 i = 0; i < exp; ++i) {
        if (acc > limit / base) throw std::invalid_argument("parameter overflow: power exceeds supported range");
        acc *= base;
    }
    return acc;
}

// C(n, k) mod m via Pascal's rule; n is small in every use here.
inline u64 binomial_mod(i64 n, i64 k, u64 mod) {
    if (k < 0 || k > n) return 0;
    std::vector<u64> row(static_cast<size_t>(n) + 1, 0);
    row[0] = 1 % mod;
    for (i64 i = 1; i <= n; ++i) {
        for (i64 j = i; j >= 1; --j) {
            row[static_cast<size_t>(j)] = (row[static_cast<size_t>(j)] + row[static_cast<size_t>(j - 1)]) % mod;
        }
    }
    return row[static_cast<size_t>(k)];
}

}  // namespace metalift
