#pragma once

// Slow reference implementations used only by the tests. They share no code
// with the library beyond the Boost number types.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Hp = boost::multiprecision::cpp_dec_float_100;
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;
using u64 = std::uint64_t;
using i64 = std::int64_t;

inline Hp hp_sqrt(u64 n) { return boost::multiprecision::sqrt(Hp(n)); }

inline Hp frac(const Hp& x) { return x - boost::multiprecision::floor(x); }
inline Hp circ(const Hp& x) {
    Hp f = frac(x);
    return f < 1 - f ? f : 1 - f;
}

inline Rat frac(const Rat& x) {
    Int q = numerator(x) / denominator(x);
    if (q * denominator(x) > numerator(x)) --q;
    return x - Rat(q);
}
inline Rat circ(const Rat& x) {
    Rat f = frac(x);
    return f < 1 - f ? f : 1 - f;
}

inline Hp to_hp(const Rat& r) { return Hp(numerator(r)) / Hp(denominator(r)); }

template <class T>
T as(const Rat& r) {
    if constexpr (std::is_same_v<T, Rat>) return r;
    else return to_hp(r);
}

inline Int floor_of(const Hp& x) { return Int(boost::multiprecision::floor(x)); }
inline Int floor_of(const Rat& x) { return numerator(x - frac(x)); }

// ---------------------------------------------------------------------------
// sequences on the circle

inline std::vector<Hp> quad_points(const Hp& alpha, std::size_t N) {
    std::vector<Hp> p;
    for (std::size_t n = 1; n <= N; ++n) p.push_back(frac(alpha * Hp(n) * Hp(n)));
    return p;
}

inline std::vector<Rat> quad_points(const Rat& alpha, std::size_t N) {
    std::vector<Rat> p;
    for (std::size_t n = 1; n <= N; ++n) p.push_back(frac(alpha * Rat(n * n)));
    return p;
}

template <class T>
u64 close_pairs(const std::vector<T>& p, const T& t) {
    u64 c = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (circ(T(p[i] - p[j])) <= t) ++c;
    return c;
}

/// R₀ from the double sum over all ordered pairs including the diagonal.
inline Rat weighted_R0(const std::vector<Rat>& p, const Rat& X) {
    const Rat N(p.size()), t = X / N;
    Rat s = 0;
    for (auto& a : p)
        for (auto& b : p) {
            Rat d = circ(Rat(a - b));
            if (d < t) s += 1 - d / t;
        }
    return s / N;
}

/// ∫L² as the sum of pairwise arc overlaps; arcs have length h <= 1.
inline Rat int_L2(const std::vector<Rat>& p, const Rat& h) {
    Rat s = 0;
    for (auto& a : p)
        for (auto& b : p) {
            Rat d = circ(Rat(a - b));
            if (h > d) s += h - d;
            if (h > 1 - d) s += h - (1 - d);
        }
    return s;
}

inline u64 L_at(const std::vector<Rat>& p, const Rat& t, const Rat& half) {
    u64 c = 0;
    for (auto& a : p)
        if (circ(Rat(a - t)) <= half) ++c;
    return c;
}

/// X + (ξ−ξ²)/X with ξ the fractional part of X.
inline Rat spaced_bound(const Rat& X) {
    Rat xi = frac(X);
    return X + (xi - xi * xi) / X;
}

// ---------------------------------------------------------------------------
// modular counts

inline std::vector<u64> A_all(u64 N, u64 q) {
    std::vector<u64> out(q, 0);
    for (u64 m = 1; m <= N; ++m)
        for (u64 n = 1; n <= N; ++n) {
            i64 d = static_cast<i64>(m * m) - static_cast<i64>(n * n);
            i64 r = d % static_cast<i64>(q);
            if (r < 0) r += static_cast<i64>(q);
            ++out[static_cast<u64>(r)];
        }
    return out;
}

inline std::vector<u64> A0_all(u64 q) { return A_all(q, q); }

inline u64 products(u64 q, u64 r) {
    u64 c = 0;
    for (u64 u = 1; u <= q; ++u)
        for (u64 v = 1; v <= q; ++v)
            if (u * v % q == r % q) ++c;
    return c;
}

/// q²·Δ*(q,c) recomputed from scratch at every M.
inline std::vector<Int> delta_star_scaled(u64 q) {
    u64 Mmax = 0;
    while ((Mmax + 1) * (Mmax + 1) * (Mmax + 1) <= q * q) ++Mmax;
    auto A0 = A0_all(q);
    std::vector<Int> best(q, 0);
    for (u64 M = 1; M <= Mmax; ++M) {
        auto A = A_all(M, q);
        for (u64 c = 0; c < q; ++c) {
            Int d = Int(A[c]) * q * q - Int(M) * M * A0[c];
            if (d < 0) d = -d;
            best[c] = std::max(best[c], d);
        }
    }
    return best;
}

inline u64 divisors(u64 n) {
    u64 c = 0;
    for (u64 d = 1; d <= n; ++d)
        if (n % d == 0) ++c;
    return c;
}

inline u64 tau_star(u64 M, u64 n) {
    u64 c = 0;
    for (u64 a = 1; a <= M && a <= n; ++a)
        if (n % a == 0 && n / a <= M) ++c;
    return c;
}

inline bool squarefree(u64 n) {
    for (u64 p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0) return false;
    return true;
}

/// Product of p^k || q over p = 2 and over p with k >= 2.
inline u64 q1(u64 q) {
    u64 out = 1, n = q;
    for (u64 p = 2; p <= n; ++p) {
        u64 pk = 1;
        unsigned k = 0;
        while (n % p == 0) {
            n /= p;
            pk *= p;
            ++k;
        }
        if (k >= 2 || (p == 2 && k >= 1)) out *= pk;
    }
    return out;
}

inline u64 inverse(u64 a, u64 q) {
    for (u64 x = 1; x < q; ++x)
        if (a * x % q == 1) return x;
    return 0;
}

// ---------------------------------------------------------------------------
// exponential sums

inline std::complex<long double> quad_sum(const std::array<i64, 4>& b, u64 q) {
    const long double tau = 2 * std::acos(-1.0L);
    std::complex<long double> s = 0;
    auto md = [&](i64 v) { return ((v % i64(q)) + i64(q)) % i64(q); };
    for (u64 x1 = 0; x1 < q; ++x1)
        for (u64 x2 = 0; x2 < q; ++x2)
            for (u64 x3 = 0; x3 < q; ++x3)
                for (u64 x4 = 0; x4 < q; ++x4) {
                    i64 form = i64(x1 * x1 + x2 * x2) - i64(x3 * x3 + x4 * x4);
                    if (md(form) != 0) continue;
                    i64 lin = md(b[0] * i64(x1) + b[1] * i64(x2) + b[2] * i64(x3) + b[3] * i64(x4));
                    s += std::polar(1.0L, tau * lin / q);
                }
    return s;
}

inline u64 quadric_points(u64 q) {
    u64 c = 0;
    for (u64 x1 = 0; x1 < q; ++x1)
        for (u64 x2 = 0; x2 < q; ++x2)
            for (u64 x3 = 0; x3 < q; ++x3)
                for (u64 x4 = 0; x4 < q; ++x4)
                    if ((x1 * x1 + x2 * x2 + 2 * q * q - x3 * x3 - x4 * x4) % q == 0) ++c;
    return c;
}

inline std::complex<long double> linear_sum(i64 b, u64 N, u64 q) {
    const long double tau = 2 * std::acos(-1.0L);
    std::complex<long double> s = 0;
    for (u64 x = 1; x <= N; ++x) {
        i64 k = ((-b * i64(x)) % i64(q) + i64(q)) % i64(q);
        s += std::polar(1.0L, tau * k / q);
    }
    return s;
}

// ---------------------------------------------------------------------------
// lattices and V counts

// Rational β keeps ties at ‖βx‖ = δ exact.
template <class T>
u64 near_multiples(u64 M, const T& beta, const Rat& delta) {
    const T d = as<T>(delta);
    u64 c = 0;
    for (u64 x = 1; x <= M; ++x)
        if (circ(T(beta * T(x))) <= d) ++c;
    return c;
}

inline double shortest(const std::array<double, 2>& u, const std::array<double, 2>& v, i64 K) {
    double best = INFINITY;
    for (i64 a = -K; a <= K; ++a)
        for (i64 b = -K; b <= K; ++b) {
            if (a == 0 && b == 0) continue;
            best = std::min(best, std::hypot(a * u[0] + b * v[0], a * u[1] + b * v[1]));
        }
    return best;
}

inline u64 gcd_z(u64 n, i64 z) { return std::gcd(n, static_cast<u64>(z < 0 ? -z : z)); }

/// Triples (a, b, z) with a <= A, b <= B, gcd(ab, z) = 1 and |α·ab − z| <= Δ.
template <class T, class Visit>
void v_triples(u64 A, u64 B, const T& alpha, const Rat& Delta, Visit visit) {
    const T D = as<T>(Delta);
    for (u64 a = 1; a <= A; ++a)
        for (u64 b = 1; b <= B; ++b) {
            T x = alpha * T(a * b);
            i64 lo = static_cast<i64>(floor_of(T(x - D)));
            for (i64 z = lo; T(z) <= x + D; ++z)
                if (abs(T(x - T(z))) <= D && gcd_z(a * b, z) == 1) visit(a, b, z);
        }
}

template <class T>
u64 v_count(u64 A, u64 B, const T& alpha, const Rat& Delta) {
    u64 c = 0;
    v_triples(A, B, alpha, Delta, [&](u64, u64, i64) { ++c; });
    return c;
}

/// Triples (u, x, y) with u <= A, x <= B, gcd(x, y) = 1 and |α·ux − y| <= Δ.
template <class T>
u64 v_star_count(u64 A, u64 B, const T& alpha, const Rat& Delta) {
    const T D = as<T>(Delta);
    u64 c = 0;
    for (u64 u = 1; u <= A; ++u)
        for (u64 x = 1; x <= B; ++x) {
            T t = alpha * T(u * x);
            i64 lo = static_cast<i64>(floor_of(T(t - D)));
            for (i64 y = lo; T(y) <= t + D; ++y)
                if (abs(T(t - T(y))) <= D && gcd_z(x, y) == 1) ++c;
        }
    return c;
}

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

/// Smallest prime in (P0, P1] dividing n, or 0.
inline u64 window_prime(u64 n, u64 P0, u64 P1) {
    for (u64 p = P0 + 1; p <= P1; ++p)
        if (n % p == 0 && is_prime(p)) return p;
    return 0;
}

inline u64 ellipse_coprime(double a, double b, double c, double level, i64 R) {
    u64 n = 0;
    for (i64 x = -R; x <= R; ++x)
        for (i64 y = -R; y <= R; ++y) {
            if (std::gcd(x < 0 ? -x : x, y < 0 ? -y : y) != 1) continue;
            Rat v = Rat(a) * x * x + 2 * Rat(b) * x * y + Rat(c) * y * y;
            if (v <= Rat(level)) ++n;
        }
    return n;
}

// ---------------------------------------------------------------------------
// interval unions

struct Span {
    Rat lo, hi;
};

/// Measure of (∪ spans) ∩ [lo, hi] by sorting and merging.
inline Rat union_measure(std::vector<Span> s, const Rat& lo, const Rat& hi) {
    for (auto& x : s) {
        x.lo = std::max(x.lo, lo);
        x.hi = std::min(x.hi, hi);
    }
    s.erase(std::remove_if(s.begin(), s.end(), [](const Span& x) { return x.hi <= x.lo; }), s.end());
    std::sort(s.begin(), s.end(), [](const Span& a, const Span& b) { return a.lo < b.lo; });
    Rat total = 0, cur_lo, cur_hi;
    bool open = false;
    for (auto& x : s) {
        if (open && x.lo <= cur_hi) {
            cur_hi = std::max(cur_hi, x.hi);
            continue;
        }
        if (open) total += cur_hi - cur_lo;
        cur_lo = x.lo;
        cur_hi = x.hi;
        open = true;
    }
    if (open) total += cur_hi - cur_lo;
    return total;
}

}  // namespace oracle
