#pragma once

#include <array>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "quadcorr/common.hpp"
#include "quadcorr/exactreal.hpp"

namespace quadcorr {

using Vec4 = std::array<i64, 4>;

struct ComplexValue {
    double re = 0;
    double im = 0;
    double err = 0;  // bound on the distance to the true value
    std::string method;

    bool contains(double r, double i = 0) const { return std::hypot(re - r, im - i) <= err; }
};

namespace detail {

inline u64 reduce_mod(i64 v, u64 q) {
    i64 r = v % static_cast<i64>(q);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(q) : r);
}

/// e_q(k) = exp(2πik/q) for 0 <= k < q, with the angle reduced exactly first.
inline std::pair<long double, long double> unit_root(u64 k, u64 q) {
    long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) / static_cast<long double>(q);
    return {std::cos(ang), std::sin(ang)};
}

/// Σ_k H[k]·e_q(k) with a rounding bound.
inline ComplexValue evaluate_histogram(const std::vector<u64>& H, u64 q, const char* method) {
    long double re = 0, im = 0, mass = 0;
    for (u64 k = 0; k < q; ++k) {
        if (!H[k]) continue;
        auto [c, s] = unit_root(k, q);
        re += H[k] * c;
        im += H[k] * s;
        mass += H[k];
    }
    ComplexValue v;
    v.re = static_cast<double>(re);
    v.im = static_cast<double>(im);
    v.err = static_cast<double>(mass * (q + 8) * 4 * LDBL_EPSILON) + 4 * DBL_EPSILON * std::hypot(v.re, v.im);
    v.method = method;
    return v;
}

}  // namespace detail

inline constexpr u64 kQuadBruteMax = 36;

/// S(b;q) = Σ over x mod q with q | x1²+x2²−x3²−x4² of e_q(b·x), by enumeration.
inline ComplexValue quad_sum_brute(const Vec4& b, u64 q) {
    require(q >= 1, "quad_sum needs q >= 1");
    guard(q <= kQuadBruteMax, "quad_sum_brute: q exceeds 36");
    u64 bb[4];
    for (int i = 0; i < 4; ++i) bb[i] = detail::reduce_mod(b[i], q);
    std::vector<u64> sq(q);
    for (u64 x = 0; x < q; ++x) sq[x] = x * x % q;
    std::vector<u64> H(q, 0);
    for (u64 x1 = 0; x1 < q; ++x1)
        for (u64 x2 = 0; x2 < q; ++x2) {
            u64 s12 = (sq[x1] + sq[x2]) % q;
            u64 l12 = (bb[0] * x1 + bb[1] * x2) % q;
            for (u64 x3 = 0; x3 < q; ++x3)
                for (u64 x4 = 0; x4 < q; ++x4) {
                    if ((sq[x3] + sq[x4]) % q != s12) continue;
                    ++H[(l12 + bb[2] * x3 + bb[3] * x4) % q];
                }
        }
    return detail::evaluate_histogram(H, q, "brute-force");
}

/// Closed form at an odd prime: p³+p²−p if p | b, p²−p if p | b1²+b2²−b3²−b4²
/// but p ∤ b, and −p otherwise.
inline i64 quad_sum_prime(const Vec4& b, u64 p) {
    require(p % 2 == 1 && is_prime(p), "quad_sum_prime needs an odd prime");
    guard(p < 2000000, "quad_sum_prime: p too large for 64-bit values");
    const i64 P = static_cast<i64>(p);
    bool all_zero = true;
    u64 r[4];
    for (int i = 0; i < 4; ++i) {
        r[i] = detail::reduce_mod(b[i], p);
        if (r[i]) all_zero = false;
    }
    if (all_zero) return P * P * P + P * P - P;
    u64 form = (mulmod(r[0], r[0], p) + mulmod(r[1], r[1], p) + 2 * p - mulmod(r[2], r[2], p) - mulmod(r[3], r[3], p)) % p;
    if (form == 0) return P * P - P;
    return -P;
}

/// S(b;q) as a product over coprime prime-power factors (S(b;q1q2) =
/// S(b;q1)S(b;q2)): closed form at odd primes, enumeration for 2^e and p^e,
/// e >= 2, each of which must be <= 36.
inline ComplexValue quad_sum(const Vec4& b, u64 q) {
    require(q >= 1, "quad_sum needs q >= 1");
    ComplexValue acc;
    acc.re = 1;
    acc.method = "trivial";
    auto f = factorize(q);
    for (auto [p, e] : f) {
        u64 pe = 1;
        for (unsigned i = 0; i < e; ++i) pe *= p;
        ComplexValue part;
        if (p != 2 && e == 1) {
            part.re = static_cast<double>(quad_sum_prime(b, p));
            part.method = "closed-form";
        } else {
            guard(pe <= kQuadBruteMax, "quad_sum: prime-power factor " + std::to_string(pe) + " has no closed form and exceeds 36");
            part = quad_sum_brute(b, pe);
        }
        double re = acc.re * part.re - acc.im * part.im;
        double im = acc.re * part.im + acc.im * part.re;
        double na = std::hypot(acc.re, acc.im), np = std::hypot(part.re, part.im);
        acc.err = na * part.err + np * acc.err + acc.err * part.err + 4 * DBL_EPSILON * std::hypot(re, im);
        acc.re = re;
        acc.im = im;
        acc.method = f.size() == 1 ? part.method : "product";
    }
    return acc;
}

/// T(b;N,q) = Σ_{x<=N} e_q(−bx), summed as a geometric series.
inline ComplexValue linear_sum(i64 b, u64 N, u64 q) {
    require(N >= 1 && q >= 1, "linear_sum needs N, q >= 1");
    ComplexValue v;
    v.method = "geometric";
    const u64 k = detail::reduce_mod(-b, q);
    if (k == 0) {
        v.re = static_cast<double>(N);
        return v;
    }
    // z = e_q(k); T = (z − z^{N+1}) / (1 − z)
    auto [zr, zi] = detail::unit_root(k, q);
    auto [wr, wi] = detail::unit_root(mulmod(k, (N + 1) % q, q), q);
    long double nr = zr - wr, ni = zi - wi;
    long double dr = 1 - zr, di = -zi;
    long double den = dr * dr + di * di;
    long double tr = (nr * dr + ni * di) / den;
    long double ti = (ni * dr - nr * di) / den;
    v.re = static_cast<double>(tr);
    v.im = static_cast<double>(ti);
    v.err = static_cast<double>(64 * LDBL_EPSILON / std::sqrt(den) * (1 + std::sqrt(tr * tr + ti * ti))) +
            4 * DBL_EPSILON * std::hypot(v.re, v.im);
    return v;
}

}  // namespace quadcorr
