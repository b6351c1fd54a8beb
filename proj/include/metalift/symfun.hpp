#pragma once

// Symmetric-function and product-bracket machinery used by the lift
// construction, generic over the coefficient ring (residue field or local
// ring).  Conventions:
//
//   h_k        complete homogeneous symmetric polynomial, h_0 = 1, h_{k<0} = 0
//   [z - l_x]_i^j = prod_{x=i..j} (z - lambda_x)      (empty product = 1)
//   [a]_i^j       = prod_{x=i..j} a_x                 (empty product = 1)
//   A(i,j) = a_i a_{i+1} ... a_{i+j}  (0 if j < 0)
//   L(k,j,v) = h_k(lambda_j, ..., lambda_{j+v})
//
// Index arguments follow the 1-based convention of these definitions.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "metalift/numutil.hpp"

namespace metalift {

template <class T>
T complete_homogeneous(i64 k, std::span<const T> xs) {
    if (xs.empty()) throw std::invalid_argument("complete_homogeneous: needs at least one variable");
    if (k < 0) return zero_like(xs[0]);
    std::vector<T> row(static_cast<size_t>(k) + 1, zero_like(xs[0]));
    row[0] = one_like(xs[0]);
    for (const T& x : xs) {
        for (i64 d = 1; d <= k; ++d)
            row[static_cast<size_t>(d)] = row[static_cast<size_t>(d)] + x * row[static_cast<size_t>(d - 1)];
    }
    return row[static_cast<size_t>(k)];
}

template <class T>
T complete_homogeneous(i64 k, const std::vector<T>& xs) {
    return complete_homogeneous(k, std::span<const T>(xs));
}

// [z - l_x]_lo^hi over the 1-based lambda list
template <class T>
T bracket_lambda(const T& z, std::span<const T> lambdas, i64 lo, i64 hi) {
    T acc = one_like(z);
    for (i64 x = lo; x <= hi; ++x) acc = acc * (z - lambdas[static_cast<size_t>(x - 1)]);
    return acc;
}

// [a]_lo^hi over the 1-based subdiagonal list
template <class T>
T bracket_subdiag(std::span<const T> subdiag, i64 lo, i64 hi) {
    if (subdiag.empty()) throw std::invalid_argument("bracket_subdiag: empty list");
    T acc = one_like(subdiag[0]);
    for (i64 x = lo; x <= hi; ++x) acc = acc * subdiag[static_cast<size_t>(x - 1)];
    return acc;
}

template <class T>
T pow_of(const T& base, u64 e) {
    T acc = one_like(base), b = base;
    while (e > 0) {
        if (e & 1) acc = acc * b;
        b = b * b;
        e >>= 1;
    }
    return acc;
}

// Entry (i,j), 1-based, of T^alpha for the lower-bidiagonal matrix with
// diagonal lambda_1..lambda_d and subdiagonal a_1..a_{d-1}:
//   lambda_i^alpha                          if i = j
//   A(j, i-j-1) * L(alpha-(i-j), j, i-j)    if j < i
//   0                                       if j > i
template <class T>
T t_alpha_entry(i64 i, i64 j, i64 alpha, std::span<const T> lambdas, std::span<const T> subdiag) {
    const i64 d = static_cast<i64>(lambdas.size());
    if (i < 1 || i > d || j < 1 || j > d) throw std::out_of_range("t_alpha_entry: index out of range");
    if (static_cast<i64>(subdiag.size()) != d - 1)
        throw std::invalid_argument("t_alpha_entry: subdiagonal length must be d-1");
    if (alpha < 1) throw std::invalid_argument("t_alpha_entry: alpha must be >= 1");
    const T& exemplar = lambdas[0];
    if (j > i) return zero_like(exemplar);
    if (i == j) return pow_of(lambdas[static_cast<size_t>(i - 1)], static_cast<u64>(alpha));
    T A = bracket_subdiag(subdiag, j, i - 1);  // A(j, i-j-1) = a_j ... a_{i-1}
    T L = complete_homogeneous(alpha - (i - j),
                               std::span<const T>(lambdas).subspan(static_cast<size_t>(j - 1),
                                                                   static_cast<size_t>(i - j + 1)));
    return A * L;
}

template <class T>
std::vector<std::vector<T>> t_alpha_matrix(i64 alpha, std::span<const T> lambdas, std::span<const T> subdiag) {
    const i64 d = static_cast<i64>(lambdas.size());
    std::vector<std::vector<T>> M(static_cast<size_t>(d),
                                  std::vector<T>(static_cast<size_t>(d), zero_like(lambdas[0])));
    for (i64 i = 1; i <= d; ++i)
        for (i64 j = 1; j <= i; ++j)
            M[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] = t_alpha_entry(i, j, alpha, lambdas, subdiag);
    return M;
}

// S_n = sum_{y=1}^n  prod_{v=y+1}^n (x_1 - x_v) * prod_{u=1}^{y-1} (z - x_u)
// must equal prod_{v=2}^n (z - x_v).
template <class T>
bool sum_prod_identity_check(const T& z, std::span<const T> xs) {
    const i64 n = static_cast<i64>(xs.size());
    if (n < 2) throw std::invalid_argument("sum_prod_identity_check: needs n >= 2");
    T sum = zero_like(z);
    for (i64 y = 1; y <= n; ++y) {
        T term = one_like(z);
        for (i64 v = y + 1; v <= n; ++v) term = term * (xs[0] - xs[static_cast<size_t>(v - 1)]);
        for (i64 u = 1; u <= y - 1; ++u) term = term * (z - xs[static_cast<size_t>(u - 1)]);
        sum = sum + term;
    }
    T rhs = one_like(z);
    for (i64 v = 2; v <= n; ++v) rhs = rhs * (z - xs[static_cast<size_t>(v - 1)]);
    return values_agree(sum, rhs);
}

// sum_{l<=y<=L} [l_a - l_x]_A^{y-1} [l_b - l_x]_{y+1}^B
//   = [l_a - l_x]_A^{l-1} [l_b - l_x]_{L+1}^B ([l_a - l_x]_l^L - [l_b - l_x]_l^L) / (l_a - l_b),
// verified in multiplied-through form so no non-unit is inverted.
template <class T>
bool ablL_identity_check(i64 a_idx, i64 b_idx, i64 A, i64 l, i64 L, i64 B, std::span<const T> lambdas) {
    if (!(A < l && l < L && L < B)) throw std::invalid_argument("ablL_identity_check: need A < l < L < B");
    const i64 d = static_cast<i64>(lambdas.size());
    if (A < 1 || B > d) throw std::out_of_range("ablL_identity_check: window out of range");
    const T& za = lambdas[static_cast<size_t>(a_idx - 1)];
    const T& zb = lambdas[static_cast<size_t>(b_idx - 1)];
    T lhs = zero_like(za);
    for (i64 y = l; y <= L; ++y) {
        T term = bracket_lambda(za, lambdas, A, y - 1) * bracket_lambda(zb, lambdas, y + 1, B);
        lhs = lhs + term;
    }
    lhs = lhs * (za - zb);
    T rhs = bracket_lambda(za, lambdas, A, l - 1) * bracket_lambda(zb, lambdas, L + 1, B) *
            (bracket_lambda(za, lambdas, l, L) - bracket_lambda(zb, lambdas, l, L));
    return values_agree(lhs, rhs);
}

// A strictly decreasing sequence mu = mu_1 > mu_2 > ... > mu_s = 1 with
// mu_1 = mu; the interior is a subset of {2, ..., mu-1}.
using MuSequence = std::vector<i64>;

// All 2^(mu-2) sequences, in lexicographic order of the interior-subset
// bitmask (bit i-2 <-> element i).
inline std::vector<MuSequence> enumerate_mu_sequences(i64 mu) {
    if (mu <= 1) throw std::invalid_argument("enumerate_mu_sequences: mu must be >= 2");
    const i64 interior = mu - 2;
    if (interior > 30) throw std::invalid_argument("enumerate_mu_sequences: mu too large");
    std::vector<MuSequence> out;
    out.reserve(static_cast<size_t>(1) << interior);
    for (u64 mask = 0; mask < (u64{1} << interior); ++mask) {
        MuSequence seq;
        seq.push_back(mu);
        for (i64 v = mu - 1; v >= 2; --v) {
            if (mask & (u64{1} << (v - 2))) seq.push_back(v);
        }
        seq.push_back(1);
        out.push_back(std::move(seq));
    }
    return out;
}

}  // namespace metalift
