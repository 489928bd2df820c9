#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quadcorr/common.hpp"
#include "quadcorr/exactreal.hpp"
#include "quadcorr/paircorr.hpp"

namespace quadcorr {

inline const Rational kDefaultEta{1, 200};

// ---------------------------------------------------------------------------
// A(N,q,c) and A₀(q,c)

/// A(N,q,c) for every c, by binning all N² differences m² − n² mod q.
inline std::vector<u64> count_A_all(u64 N, u64 q) {
    require(N >= 1 && q >= 1, "count_A needs N, q >= 1");
    guard(static_cast<u128>(N) * N <= 1000000000u, "count_A: N^2 exceeds 1e9");
    guard(q <= 100000000u, "count_A: q too large for array mode");
    std::vector<u64> sq(N);
    for (u64 n = 1; n <= N; ++n) sq[n - 1] = mulmod(n, n, q);
    std::vector<u64> A(q, 0);
    for (u64 m = 0; m < N; ++m) {
        const u64 a = sq[m];
        for (u64 n = 0; n < N; ++n) {
            const u64 b = sq[n];
            ++A[a >= b ? a - b : a + q - b];
        }
    }
    return A;
}

/// A(N,q,c) for one residue: sorted squares plus binary search, O(N log N).
inline u64 count_A(u64 N, u64 q, u64 c) {
    require(N >= 1 && q >= 1, "count_A needs N, q >= 1");
    guard(N <= 100000000u, "count_A: N too large");
    c %= q;
    std::vector<u64> sq(N);
    for (u64 n = 1; n <= N; ++n) sq[n - 1] = mulmod(n, n, q);
    std::vector<u64> sorted = sq;
    std::sort(sorted.begin(), sorted.end());
    u64 total = 0;
    for (u64 a : sq) {
        // n² ≡ m² − c
        u64 target = a >= c ? a - c : a + q - c;
        auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), target);
        total += static_cast<u64>(hi - lo);
    }
    return total;
}

inline constexpr u64 kA0DirectMax = 100000;

/// A₀(q,c) for every c by correlating the multiset of squares mod q.
inline std::vector<u64> count_A0_all(u64 q) {
    require(q >= 1, "count_A0 needs q >= 1");
    guard(q <= kA0DirectMax, "count_A0: direct mode limited to q <= 1e5");
    std::vector<u64> h(q, 0);
    for (u64 n = 1; n <= q; ++n) ++h[mulmod(n, n, q)];
    std::vector<u64> support;
    for (u64 s = 0; s < q; ++s)
        if (h[s]) support.push_back(s);
    std::vector<u64> A(q, 0);
    for (u64 a : support)
        for (u64 b : support) A[a >= b ? a - b : a + q - b] += h[a] * h[b];
    return A;
}

inline u64 count_A0(u64 q, u64 c) {
    return count_A0_all(q)[c % q];
}

namespace detail {

/// #{u,v mod q : uv ≡ c} for every c; for odd q this is A₀(q,·), since
/// (m,n) -> (m−n, m+n) is a bijection of (Z/q)² when 2 is invertible.
inline std::vector<u64> product_count_all(u64 q) {
    std::vector<u64> out(q, 0);
    // Σ_{d | q, d | c} d·φ(q/d)
    for (u64 d = 1; d <= q; ++d) {
        if (q % d) continue;
        u64 w = d * euler_phi(q / d);
        for (u64 c = 0; c < q; c += d) out[c] += w;
    }
    return out;
}

}  // namespace detail

/// A₀(q,·) via the multiplicative structure: tables per prime power, glued
/// by the Chinese remainder theorem.
inline std::vector<u64> count_A0_crt(u64 q) {
    require(q >= 1, "count_A0 needs q >= 1");
    guard(q <= 10000000u, "count_A0_crt: q too large");
    std::vector<u64> A(q, 1);
    for (auto [p, e] : factorize(q)) {
        u64 pe = 1;
        for (unsigned i = 0; i < e; ++i) pe *= p;
        std::vector<u64> local = p == 2 ? count_A0_all(pe) : detail::product_count_all(pe);
        for (u64 c = 0; c < q; ++c) A[c] *= local[c % pe];
    }
    return A;
}

/// #{u,v <= q0 : uv ≡ r (mod q0)} for odd squarefree q0, one u at a time.
inline u64 hyperbola_count(u64 q0, u64 r) {
    require(q0 >= 1 && q0 % 2 == 1, "hyperbola_count needs an odd modulus");
    require(is_squarefree(q0), "hyperbola_count needs a squarefree modulus");
    r %= q0;
    u64 total = 0;
    for (u64 u = 1; u <= q0; ++u) {
        u64 g = std::gcd(u, q0);
        if (r % g == 0) total += g;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Dispersion

struct CongruenceProfile {
    u64 q = 0;
    Rational eta;
    u64 M_max = 0;                     // floor(q^{2/3})
    std::vector<u64> A0;               // A₀(q,c)
    std::vector<u64> delta_star_num;   // q²·Δ*(q,c), an integer
    std::vector<u64> bad_set;          // B(q), sorted units

    double delta_star(u64 c) const {
        return static_cast<double>(delta_star_num[c]) / (static_cast<double>(q) * static_cast<double>(q));
    }
    Rational delta_star_exact(u64 c) const { return Rational(BigInt(delta_star_num[c]), BigInt(q) * q); }
};

inline constexpr u64 kProfileMaxQ = 100000;

inline void require_eta(const Rational& eta) {
    require(eta > 0 && eta <= Rational(1, 100), "eta must lie in (0, 1/100]");
}

namespace detail {

inline std::vector<u64> bad_set_of(const CongruenceProfile& pr) {
    const u64 q = pr.q;
    const u64 R = floor_power(q, Rational(1, 3) + 2 * pr.eta).convert_to<u64>();
    const Rational e = Rational(2, 3) - 2 * pr.eta;
    const BigInt q2 = BigInt(q) * q;
    std::vector<u64> out;
    for (u64 a = 0; a < q; ++a) {
        auto inv = mod_inverse(a, q);
        if (!inv || q == 1) continue;
        u128 s = 0;
        for (u64 r = 1; r <= R; ++r) s += pr.delta_star_num[mulmod(*inv, r % q, q)];
        if (compare_with_power(Rational(from_u128(s), q2), q, e) >= 0) out.push_back(a);
    }
    return out;
}

}  // namespace detail

/// Δ*(q,c) = max over integer M <= q^{2/3} of |A(M,q,c) − (M/q)²A₀(q,c)|,
/// with A(M,q,·) grown one M at a time, plus the bad set B(q).
inline CongruenceProfile delta_star_profile(u64 q, const Rational& eta = kDefaultEta) {
    require(q >= 2, "delta_star_profile needs q >= 2");
    guard(q <= kProfileMaxQ, "delta_star_profile: q exceeds 1e5");
    require_eta(eta);
    CongruenceProfile pr;
    pr.q = q;
    pr.eta = eta;
    pr.M_max = floor_power(q, Rational(2, 3)).convert_to<u64>();
    pr.A0 = count_A0_crt(q);
    pr.delta_star_num.assign(q, 0);
    const i128 q2 = static_cast<i128>(q) * q;
    std::vector<u64> sq(pr.M_max + 1);
    for (u64 n = 1; n <= pr.M_max; ++n) sq[n] = mulmod(n, n, q);
    std::vector<u64> cnt(q, 0);
    for (u64 M = 1; M <= pr.M_max; ++M) {
        // new pairs: (M,n), (n,M) for n < M, and (M,M)
        const u64 a = sq[M];
        for (u64 n = 1; n < M; ++n) {
            const u64 b = sq[n];
            ++cnt[a >= b ? a - b : a + q - b];
            ++cnt[b >= a ? b - a : b + q - a];
        }
        ++cnt[0];
        const i128 M2 = static_cast<i128>(M) * M;
        for (u64 c = 0; c < q; ++c) {
            i128 d = static_cast<i128>(cnt[c]) * q2 - M2 * static_cast<i128>(pr.A0[c]);
            if (d < 0) d = -d;
            if (static_cast<u64>(d) > pr.delta_star_num[c]) pr.delta_star_num[c] = static_cast<u64>(d);
        }
    }
    pr.bad_set = detail::bad_set_of(pr);
    return pr;
}

/// B(q): units a with Σ_{r <= q^{1/3+2η}} Δ*(q, ā r) >= q^{2/3−2η}.
inline std::vector<u64> bad_set(u64 q, const Rational& eta = kDefaultEta) {
    return delta_star_profile(q, eta).bad_set;
}

struct DispersionReport {
    u64 q = 0;
    u64 q1 = 0;
    std::optional<u64> N;        // fixed box size instead of the maximal dispersion
    Rational eta;
    BigInt sum_num = 0;          // q⁴·Σ_c Δ², exact
    double sum_delta_sq = 0;
    double bound_value = 0;      // q^{3/2+4η}q₁³ or q^{4/3+4η}q₁³
    double ratio = 0;
    std::optional<std::size_t> card_bad_set;
};

/// Σ_c Δ*(q,c)² (N absent) or Σ_c Δ(N,q,c)² (N given, N <= q^{2/3}) against
/// the corresponding bound with implied constant 1.
inline DispersionReport dispersion_report(u64 q, std::optional<u64> N, const Rational& eta = kDefaultEta) {
    require(q >= 2, "dispersion_report needs q >= 2");
    require_eta(eta);
    DispersionReport rep;
    rep.q = q;
    rep.q1 = q1_part(q);
    rep.N = N;
    rep.eta = eta;
    const long double q4 = std::pow(static_cast<long double>(q), 4.0L);
    const long double q1c = std::pow(static_cast<long double>(rep.q1), 3.0L);
    const long double e4 = 4.0L * to_long_double(eta);
    if (!N) {
        auto pr = delta_star_profile(q, eta);
        BigInt s = 0;
        for (u64 v : pr.delta_star_num) s += BigInt(v) * v;
        rep.sum_num = s;
        rep.bound_value = static_cast<double>(std::pow(static_cast<long double>(q), 1.5L + e4) * q1c);
        rep.card_bad_set = pr.bad_set.size();
    } else {
        u64 Mmax = floor_power(q, Rational(2, 3)).convert_to<u64>();
        require(*N >= 1 && *N <= Mmax, "dispersion_report: N must satisfy 1 <= N <= floor(q^(2/3))");
        auto A = count_A_all(*N, q);
        auto A0 = count_A0_crt(q);
        BigInt s = 0;
        const BigInt q2 = BigInt(q) * q, N2 = BigInt(*N) * *N;
        for (u64 c = 0; c < q; ++c) {
            BigInt d = BigInt(A[c]) * q2 - N2 * A0[c];
            s += d * d;
        }
        rep.sum_num = s;
        rep.bound_value = static_cast<double>(std::pow(static_cast<long double>(q), 4.0L / 3.0L + e4) * q1c);
    }
    rep.sum_delta_sq = static_cast<double>(to_long_double(Rational(rep.sum_num)) / q4);
    rep.ratio = rep.sum_delta_sq / rep.bound_value;
    return rep;
}

inline std::string dispersion_csv_header() {
    return "q,q1,eta,sum_delta_star_sq,bound,ratio,card_bad_set";
}

inline std::string dispersion_csv_row(const DispersionReport& r) {
    std::ostringstream os;
    os << r.q << ',' << r.q1 << ',' << to_string(r.eta) << ',' << format_double(r.sum_delta_sq) << ','
       << format_double(r.bound_value) << ',' << format_double(r.ratio) << ',';
    if (r.card_bad_set) os << *r.card_bad_set;
    return os.str();
}

// ---------------------------------------------------------------------------
// Divisor sums

inline constexpr u64 kDivisorSieveMax = 100000000;

/// d(m) for m in [lo, hi), by a segmented sieve over primes up to sqrt(hi).
inline std::vector<std::uint32_t> divisor_counts(u64 lo, u64 hi) {
    require(lo >= 1 && lo <= hi, "divisor_counts: bad range");
    std::vector<std::uint32_t> d(hi - lo, 1);
    std::vector<u64> rest(hi - lo);
    for (u64 m = lo; m < hi; ++m) rest[m - lo] = m;
    const u64 root = static_cast<u64>(std::sqrt(static_cast<long double>(hi))) + 1;
    for (std::uint32_t p : sieve_primes(static_cast<std::uint32_t>(root))) {
        u64 start = (lo + p - 1) / p * p;
        for (u64 m = start; m < hi; m += p) {
            u64& r = rest[m - lo];
            std::uint32_t e = 0;
            while (r % p == 0) {
                r /= p;
                ++e;
            }
            d[m - lo] *= e + 1;
        }
    }
    for (std::size_t i = 0; i < rest.size(); ++i)
        if (rest[i] > 1) d[i] *= 2;
    return d;
}

/// Σ d(m) over m <= M with m ≡ s (mod q).
inline u64 divisor_sum_ap(u64 M, u64 q, u64 s) {
    require(M >= 1 && q >= 1, "divisor_sum_ap needs M, q >= 1");
    guard(M <= kDivisorSieveMax, "divisor_sum_ap: M exceeds 1e8");
    s %= q;
    u64 total = 0;
    constexpr u64 kSegment = u64(1) << 20;
    for (u64 lo = 1; lo <= M; lo += kSegment) {
        u64 hi = std::min(M + 1, lo + kSegment);
        auto d = divisor_counts(lo, hi);
        u64 first = lo + (s + q - lo % q) % q;
        for (u64 m = first; m < hi; m += q) total += d[m - lo];
    }
    return total;
}

/// τ*_M(n) = #{(a,b) : a,b <= M, ab = n}.
inline u64 tau_star(u64 M, u64 n) {
    require(n >= 1 && M >= 1, "tau_star needs n, M >= 1");
    u64 c = 0;
    for (u64 a = 1; a * a <= n; ++a) {
        if (n % a) continue;
        u64 b = n / a;
        if (a <= M && b <= M) c += (a == b) ? 1 : 2;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Unit hyperbola counts against phi(q)N^2/q^2 and related diagnostics

struct HyperbolaApCount {
    u64 N = 0, q = 0, c = 0;
    u64 count = 0;
    double expected = 0;  // φ(q)N²/q²
    double ratio = 0;
};

/// #{(u,v) : u,v <= N, uv ≡ c (mod q)} for a unit c.
inline HyperbolaApCount hyperbola_ap_count(u64 N, u64 q, u64 c) {
    require(N >= 1, "hyperbola_ap_count needs N >= 1");
    require(q >= 2, "hyperbola_ap_count needs q >= 2");
    c %= q;
    require(std::gcd(c, q) == 1, "hyperbola_ap_count needs gcd(c, q) = 1");
    HyperbolaApCount out;
    out.N = N;
    out.q = q;
    out.c = c;
    for (u64 u = 1; u <= N; ++u) {
        auto inv = mod_inverse(u % q, q);
        if (!inv) continue;
        u64 v0 = mulmod(c, *inv, q);  // v ≡ c·ū, never 0 since c is a unit
        if (v0 <= N) out.count += (N - v0) / q + 1;
    }
    long double phi = static_cast<long double>(euler_phi(q));
    out.expected = static_cast<double>(phi * N * N / (static_cast<long double>(q) * q));
    out.ratio = static_cast<double>(out.count / static_cast<long double>(out.expected));
    return out;
}

inline std::string conjecture2_csv_header() {
    return "N,q,c,count,expected,ratio";
}

inline std::string conjecture2_csv_row(const HyperbolaApCount& h) {
    std::ostringstream os;
    os << h.N << ',' << h.q << ',' << h.c << ',' << h.count << ',' << format_double(h.expected) << ','
       << format_double(h.ratio);
    return os.str();
}

struct PartialA0Sum {
    u64 sum = 0;
    u64 main_term = 0;  // R·q
    u64 defect = 0;     // |sum − R·q|
};

/// Σ_{r <= R} A₀(q, ā r).
inline PartialA0Sum partial_A0_sum(u64 q, u64 a, u64 R) {
    require(q >= 1, "partial_A0_sum needs q >= 1");
    require(R >= 1 && R <= q, "partial_A0_sum needs 1 <= R <= q");
    auto inv = mod_inverse(a % q, q);
    require(inv.has_value(), "partial_A0_sum needs a unit a");
    auto A0 = count_A0_crt(q);
    PartialA0Sum out;
    for (u64 r = 1; r <= R; ++r) out.sum += A0[mulmod(*inv, r % q, q)];
    out.main_term = R * q;
    out.defect = out.sum > out.main_term ? out.sum - out.main_term : out.main_term - out.sum;
    return out;
}

struct ApproxIdentityR {
    u64 lhs_count = 0;  // N·R_α(N,X)
    u64 rhs_sum = 0;    // Σ_{1 <= r <= Xq/N} A(N,q,ā r)
    double lhs = 0, rhs = 0, gap = 0;
};

/// Both sides of R_α(N,X) ≈ N^{-1}Σ_{1<=r<=Xq/N} A(N,q,ā r) for a convergent
/// a/q. Diagnostic only: nothing ties the gap to a bound at desk scale.
inline ApproxIdentityR approx_identity_R(const RealSource& alpha, u64 N, const Rational& X, const Rational& convergent) {
    require(N >= 1, "approx_identity_R needs N >= 1");
    require(X >= 0, "approx_identity_R needs X >= 0");
    const BigInt& qb = denominator(convergent);
    require(qb < kMaxExactDenominator, "convergent denominator too large");
    const u64 q = qb.convert_to<u64>();
    const u64 a = mod_floor(numerator(convergent), qb).convert_to<u64>();
    auto inv = mod_inverse(a, q);
    require(inv.has_value() && q > 1, "approx_identity_R needs gcd(a, q) = 1 and q > 1");
    ApproxIdentityR out;
    out.lhs_count = pair_correlation(quadratic_sequence(alpha, N), X).pair_count;
    const u64 rmax = floor(X * BigInt(q) / BigInt(N)).convert_to<u64>();
    guard(rmax <= 1000000, "approx_identity_R: too many residues");
    for (u64 r = 1; r <= rmax; ++r) out.rhs_sum += count_A(N, q, mulmod(*inv, r % q, q));
    out.lhs = static_cast<double>(out.lhs_count) / N;
    out.rhs = static_cast<double>(out.rhs_sum) / N;
    out.gap = out.rhs - out.lhs;
    return out;
}

}  // namespace quadcorr
