#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quadcorr/common.hpp"
#include "quadcorr/exactreal.hpp"

namespace quadcorr {

/// R(M,β,δ) = #{x <= M : ‖βx‖ <= δ}.
inline u64 near_multiple_count(u64 M, const RealSource& beta, const Rational& delta, unsigned bits = kDefaultBits) {
    require(M >= 1, "near_multiple_count needs M >= 1");
    require(delta >= 0, "near_multiple_count needs delta >= 0");
    if (2 * delta >= 1) return M;
    FracMultiplier fm(beta.at(bits));
    const u64 s = fm.slack(M);
    const u128 T = to_u128(floor(delta * pow2(64)));
    const u128 W = u128(1) << 64;
    u64 count = 0;
    for (u64 x = 1; x <= M; ++x) {
        u64 f = fm.frac64(x);
        u128 d = std::min<u128>(f, W - f);
        if (d + s <= T)
            ++count;
        else if (d >= T + 1 + s)
            continue;
        else if (norm_le(beta, BigInt(x), Rational(0), delta, bits))
            ++count;
    }
    return count;
}

inline u64 near_multiple_count(u64 M, const FixedReal& beta, const Rational& delta) {
    return near_multiple_count(M, RealSource::fixed(beta), delta, beta.frac_bits);
}

// ---------------------------------------------------------------------------
// Lattices in the plane

using Vec2 = std::array<double, 2>;

inline double norm2(const Vec2& a) {
    return std::hypot(a[0], a[1]);
}

struct LatticeBasis2 {
    Vec2 u{1, 0}, v{0, 1};
    double det = 1;
    double lambda1 = 1;
    // columns express the current vectors in the basis this one was derived
    // from: u = t[0]·u0 + t[2]·v0, v = t[1]·u0 + t[3]·v0
    std::array<i64, 4> transform{1, 0, 0, 1};
};

namespace detail {

inline double det2(const Vec2& a, const Vec2& b) {
    return a[0] * b[1] - a[1] * b[0];
}

inline bool shorter(const Vec2& a, const Vec2& b) {
    return a[0] * a[0] + a[1] * a[1] < b[0] * b[0] + b[1] * b[1];
}

/// Lagrange reduction over exact integers, returning the unimodular matrix.
inline std::array<BigInt, 4> lagrange_exact(BigInt u0, BigInt u1, BigInt v0, BigInt v1) {
    std::array<BigInt, 4> T{1, 0, 0, 1};
    auto n2 = [](const BigInt& a, const BigInt& b) { return a * a + b * b; };
    for (int iter = 0; iter < 100000; ++iter) {
        if (n2(u0, u1) > n2(v0, v1)) {
            std::swap(u0, v0);
            std::swap(u1, v1);
            std::swap(T[0], T[1]);
            std::swap(T[2], T[3]);
        }
        BigInt num = u0 * v0 + u1 * v1, den = n2(u0, u1);
        BigInt mu = floor_div(2 * num + den, 2 * den);
        if (mu == 0) break;
        v0 -= mu * u0;
        v1 -= mu * u1;
        T[1] -= mu * T[0];
        T[3] -= mu * T[2];
    }
    return T;
}

inline Vec2 apply(const std::array<i64, 4>& T, const Vec2& u, const Vec2& v, int col) {
    const double a = static_cast<double>(T[col]), b = static_cast<double>(T[2 + col]);
    return {a * u[0] + b * v[0], a * u[1] + b * v[1]};
}

/// floor(x·2^shift) as an integer (x finite).
inline BigInt scaled_int(double x, int shift) {
    if (x == 0) return 0;
    int ex = 0;
    const double m = std::frexp(x, &ex);
    BigInt r = static_cast<long long>(std::ldexp(m, 53));
    const int sh = ex - 53 + shift;
    if (sh >= 0) return r << sh;
    return floor_div(r, BigInt(1) << -sh);
}

inline bool certify_shortest(const Vec2& u, const Vec2& v) {
    const double nu = norm2(u);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            if (b == 0) continue;
            Vec2 w{a * u[0] + b * v[0], a * u[1] + b * v[1]};
            if (norm2(w) < nu * (1 - 1e-12)) return false;
        }
    return true;
}

inline std::array<i64, 4> lagrange_double(Vec2 u, Vec2 v) {
    std::array<i64, 4> T{1, 0, 0, 1};
    for (int iter = 0; iter < 10000; ++iter) {
        if (shorter(v, u)) {
            std::swap(u, v);
            std::swap(T[0], T[1]);
            std::swap(T[2], T[3]);
        }
        const double mu = std::nearbyint((u[0] * v[0] + u[1] * v[1]) / (u[0] * u[0] + u[1] * u[1]));
        if (mu == 0) break;
        require(std::fabs(mu) < 4e18, "gauss_reduce: transform overflow");
        const i64 m = static_cast<i64>(mu);
        v[0] -= mu * u[0];
        v[1] -= mu * u[1];
        T[1] -= m * T[0];
        T[3] -= m * T[2];
    }
    return T;
}

}  // namespace detail

/// Lagrange (Gauss) reduction. The result's u is a shortest nonzero vector;
/// lambda1 is its length, checked against all coefficient pairs in [−2,2]².
/// Ill-conditioned input is reduced exactly on a scaled integer copy.
inline LatticeBasis2 gauss_reduce(const LatticeBasis2& in) {
    const double det = detail::det2(in.u, in.v);
    require(det != 0 && std::isfinite(det), "gauss_reduce: degenerate basis");
    const double big = std::max(norm2(in.u), norm2(in.v));
    std::array<i64, 4> T{1, 0, 0, 1};
    auto finish = [&](std::array<i64, 4> t, Vec2& u, Vec2& v) {
        u = detail::apply(t, in.u, in.v, 0);
        v = detail::apply(t, in.u, in.v, 1);
        if (detail::shorter(v, u)) {
            std::swap(u, v);
            std::swap(t[0], t[1]);
            std::swap(t[2], t[3]);
        }
        T = t;
        return detail::certify_shortest(u, v);
    };
    Vec2 u, v;
    bool ok = big * big / std::fabs(det) <= 1e12 && finish(detail::lagrange_double(in.u, in.v), u, v);
    if (!ok) {
        // the shortest side of a reduced basis is about |det|/big; give it ~2^60 units
        int e = 0;
        std::frexp(std::fabs(det) / big, &e);
        const int shift = 60 - e;
        auto Tb = detail::lagrange_exact(detail::scaled_int(in.u[0], shift), detail::scaled_int(in.u[1], shift),
                                         detail::scaled_int(in.v[0], shift), detail::scaled_int(in.v[1], shift));
        std::array<i64, 4> t{};
        for (int i = 0; i < 4; ++i) {
            require(abs(Tb[i]) < (BigInt(1) << 62), "gauss_reduce: transform overflow");
            t[i] = Tb[i].convert_to<i64>();
        }
        if (!finish(t, u, v)) throw PrecisionExhausted("gauss_reduce: reduced basis failed its shortest-vector check");
    }
    LatticeBasis2 out;
    out.u = u;
    out.v = v;
    out.det = detail::det2(u, v);
    out.lambda1 = norm2(u);
    const auto& P = in.transform;
    out.transform = {P[0] * T[0] + P[1] * T[2], P[0] * T[1] + P[1] * T[3], P[2] * T[0] + P[3] * T[2],
                     P[2] * T[1] + P[3] * T[3]};
    return out;
}

inline LatticeBasis2 make_lattice(const Vec2& u, const Vec2& v) {
    LatticeBasis2 b;
    b.u = u;
    b.v = v;
    b.det = detail::det2(u, v);
    require(b.det != 0, "degenerate basis");
    b.lambda1 = gauss_reduce(b).lambda1;
    return b;
}

/// The lattice generated by u = (sqrt(δ/M), β·sqrt(M/δ)) and v = (0, −sqrt(M/δ)),
/// together with the exact data needed to decide boundary points.
struct PairLattice {
    u64 M = 1;
    RealSource beta;
    Rational delta;
    LatticeBasis2 basis;
};

namespace detail {

/// x·u + y·v of the pair lattice with βx − y taken from β at full precision.
inline Vec2 pair_vector(const PairLattice& pl, i64 x, i64 y) {
    const long double d = to_long_double(pl.delta), m = static_cast<long double>(pl.M);
    const Rational t = pl.beta.at(kDefaultBits).midpoint() * x - y;
    return {static_cast<double>(x * std::sqrt(d / m)), static_cast<double>(to_long_double(t) * std::sqrt(m / d))};
}

}  // namespace detail

/// Reduced basis of a pair lattice. The double basis can be too skew to carry
/// the reduced vectors, so they are rebuilt from β and reduced once more.
inline LatticeBasis2 reduce_pair_lattice(const PairLattice& pl) {
    LatticeBasis2 first = gauss_reduce(pl.basis);
    LatticeBasis2 refined;
    const auto& t = first.transform;
    refined.u = detail::pair_vector(pl, t[0], t[2]);
    refined.v = detail::pair_vector(pl, t[1], t[3]);
    refined.det = detail::det2(refined.u, refined.v);
    refined.transform = t;
    return gauss_reduce(refined);
}

inline PairLattice pair_lattice(u64 M, const RealSource& beta, const Rational& delta) {
    require(M >= 1, "pair_lattice needs M >= 1");
    require(delta > 0 && delta < 1, "pair_lattice needs 0 < delta < 1");
    const long double d = to_long_double(delta), m = static_cast<long double>(M);
    const long double b = static_cast<long double>(beta.to_double());
    const long double a = std::sqrt(d / m), c = std::sqrt(m / d);
    PairLattice pl;
    pl.M = M;
    pl.beta = beta;
    pl.delta = delta;
    pl.basis.u = {static_cast<double>(a), static_cast<double>(b * c)};
    pl.basis.v = {0.0, static_cast<double>(-c)};
    pl.basis.det = detail::det2(pl.basis.u, pl.basis.v);
    pl.basis.lambda1 = reduce_pair_lattice(pl).lambda1;
    return pl;
}

struct SquareCount {
    u64 count = 0;
    double main = 0;         // 4S²/|det|
    double error_term = 0;   // |count − main|
    u64 boundary_checks = 0; // points decided by the exact resolver
};

/// Exact membership of the lattice point x·u + y·v (input-basis coefficients).
using PointResolver = std::function<bool(i64 x, i64 y)>;

inline constexpr u64 kSquareCountMaxCandidates = 100000000;

namespace detail {

inline SquareCount square_count_impl(const LatticeBasis2& basis, long double S, const PointResolver& resolve,
                                     const LatticeBasis2* reduced = nullptr) {
    require(S > 0, "lattice_square_count needs S > 0");
    LatticeBasis2 red = reduced ? *reduced : gauss_reduce(LatticeBasis2{basis.u, basis.v, basis.det, basis.lambda1, {1, 0, 0, 1}});
    const auto& T = red.transform;
    const long double r1[2] = {red.u[0], red.u[1]}, r2[2] = {red.v[0], red.v[1]};
    const long double dt = r1[0] * r2[1] - r1[1] * r2[0];
    // inverse of the column matrix [r1 r2]
    const long double inv[2][2] = {{r2[1] / dt, -r2[0] / dt}, {-r1[1] / dt, r1[0] / dt}};
    const long double c1lim = S * (std::fabs(inv[0][0]) + std::fabs(inv[0][1]));
    const long double c2lim = S * (std::fabs(inv[1][0]) + std::fabs(inv[1][1]));
    guard((2 * c1lim + 3) * (2 * c2lim + 3) <= kSquareCountMaxCandidates, "lattice_square_count: too many candidates");
    const i64 c1max = static_cast<i64>(std::floor(c1lim)) + 1;
    const i64 c2max = static_cast<i64>(std::floor(c2lim)) + 1;
    // coordinate tolerance: generous multiple of the rounding in the input
    // basis magnified by the largest input coefficients reachable
    const long double xmax = std::fabs(T[0]) * c1max + std::fabs(T[1]) * c2max;
    const long double ymax = std::fabs(T[2]) * c1max + std::fabs(T[3]) * c2max;
    // a reduced basis computed to full precision only carries its own rounding
    const long double tol = reduced ? 1e-12L * (c1max * norm2(red.u) + c2max * norm2(red.v) + S + 1)
                                    : 1e-12L * (xmax * norm2(basis.u) + ymax * norm2(basis.v) + S + 1);
    SquareCount out;
    for (i64 c1 = -c1max; c1 <= c1max; ++c1) {
        long double lo = -static_cast<long double>(c2max) - 1, hi = static_cast<long double>(c2max) + 1;
        long double slo = lo, shi = hi;  // sure range
        bool row_ok = true, row_unsure = false;
        for (int k = 0; k < 2; ++k) {
            const long double base = c1 * r1[k];
            if (std::fabs(r2[k]) < 1e-300L) {
                if (std::fabs(base) > S + tol) row_ok = false;
                else if (std::fabs(base) > S - tol) row_unsure = true;
                continue;
            }
            long double a = (-S - base) / r2[k], b = (S - base) / r2[k];
            if (a > b) std::swap(a, b);
            const long double tau = tol / std::fabs(r2[k]);
            lo = std::max(lo, a - tau);
            hi = std::min(hi, b + tau);
            slo = std::max(slo, a + tau);
            shi = std::min(shi, b - tau);
        }
        if (!row_ok || lo > hi) continue;
        const long double cap = static_cast<long double>(c2max) + 1;
        lo = std::max(lo, -cap);
        hi = std::min(hi, cap);
        slo = std::clamp(slo, -cap, cap);
        shi = std::clamp(shi, -cap, cap);
        const i64 clo = static_cast<i64>(std::ceil(lo)), chi = static_cast<i64>(std::floor(hi));
        i64 sure_lo = static_cast<i64>(std::ceil(slo)), sure_hi = static_cast<i64>(std::floor(shi));
        if (row_unsure) {
            sure_lo = 1;
            sure_hi = 0;
        }
        for (i64 c2 = clo; c2 <= chi; ++c2) {
            if (c2 >= sure_lo && c2 <= sure_hi) {
                ++out.count;
                continue;
            }
            const long double p0 = c1 * r1[0] + c2 * r2[0], p1 = c1 * r1[1] + c2 * r2[1];
            const long double m = std::max(std::fabs(p0), std::fabs(p1));
            if (m > S + tol) continue;
            if (m < S - tol) {
                ++out.count;
                continue;
            }
            ++out.boundary_checks;
            const i64 x = T[0] * c1 + T[1] * c2, y = T[2] * c1 + T[3] * c2;
            if (resolve(x, y)) ++out.count;
        }
    }
    out.main = static_cast<double>(4 * S * S / std::fabs(dt));
    out.error_term = std::fabs(static_cast<double>(out.count) - out.main);
    return out;
}

}  // namespace detail

/// Lattice points in [−S,S]² for a lattice given by double-valued vectors.
/// The vectors are taken as exact binary rationals; boundary points are
/// decided in exact rational arithmetic.
inline SquareCount lattice_square_count(const LatticeBasis2& basis, double S) {
    const Rational Sr(S);
    const Rational u0(basis.u[0]), u1(basis.u[1]), v0(basis.v[0]), v1(basis.v[1]);
    PointResolver exact = [&](i64 x, i64 y) {
        Rational p0 = u0 * x + v0 * y, p1 = u1 * x + v1 * y;
        return abs(p0) <= Sr && abs(p1) <= Sr;
    };
    return detail::square_count_impl(basis, S, exact);
}

/// Lattice points of a pair lattice in [−S,S]², S² given exactly (default
/// S² = Mδ, where the count equals 1 + 2R(M,β,δ) for δ < 1/2).
inline SquareCount lattice_square_count(const PairLattice& pl, std::optional<Rational> S_squared = std::nullopt) {
    const Rational S2 = S_squared ? *S_squared : pl.delta * BigInt(pl.M);
    require(S2 > 0, "lattice_square_count needs S > 0");
    const Rational& d = pl.delta;
    const BigInt M(pl.M);
    // |βx − y|·sqrt(M/δ) <= S  <=>  |βx − y|² <= S²δ/M
    const Rational bound2 = S2 * d / M;
    std::optional<Rational> bound;
    {
        // rational square root when available (always for S² = Mδ)
        BigInt n = numerator(bound2), q = denominator(bound2);
        BigInt rn = isqrt(n), rq = isqrt(q);
        if (rn * rn == n && rq * rq == q) bound = Rational(rn, rq);
    }
    PointResolver exact = [&](i64 x, i64 y) {
        // |x|·sqrt(δ/M) <= S  <=>  x²δ <= S²M
        if (Rational(BigInt(x) * x) * d > S2 * M) return false;
        if (bound) return abs_diff_le(pl.beta, BigInt(x), Rational(BigInt(y)), *bound);
        for (unsigned b = kDefaultBits;; b *= 2) {
            FixedReal f = pl.beta.at(b);
            Rational lo = f.lower() * x - y, hi = f.upper() * x - y;
            if (lo > hi) std::swap(lo, hi);
            Rational amin = (lo <= 0 && hi >= 0) ? Rational(0) : std::min(abs(lo), abs(hi));
            Rational amax = std::max(abs(lo), abs(hi));
            if (amax * amax <= bound2) return true;
            if (amin * amin > bound2) return false;
            if (!pl.beta.can_escalate() || b * 2 > kMaxBits)
                throw AmbiguousThreshold("lattice boundary point undecided");
        }
    };
    const LatticeBasis2 red = reduce_pair_lattice(pl);
    return detail::square_count_impl(pl.basis, std::sqrt(to_long_double(S2)), exact, &red);
}

inline std::string lattice_csv_header() {
    return "M,beta,delta,R,lambda1,count,main,error_term";
}

// ---------------------------------------------------------------------------
// V-family counts

struct VCountSpec {
    u64 A = 1, B = 1;
    Rational Delta{0};
    RealSource alpha;
    u64 P0 = 0, P1 = 0;  // prime window (P0, P1] for V1/V2
};

inline constexpr u64 kVCountMaxBox = 10000000;

namespace detail {

inline u64 gcd_z(u64 n, i128 z) {
    u128 az = z < 0 ? static_cast<u128>(-z) : static_cast<u128>(z);
    if (az == 0) return n;
    return std::gcd(n, static_cast<u64>(az % n));
}

/// Calls visit(z) for every z with |α·n − z| <= Δ (certified), n given by
/// its split under fm.
template <class Visit>
inline void near_integers(const RealSource& alpha, const FracMultiplier& fm, u64 slack, u64 n, u128 D64,
                          const Rational& Delta, unsigned bits, Visit&& visit) {
    auto [I, f] = fm.split(n);
    const i128 W = i128(1) << 64;
    const i128 reach = static_cast<i128>(D64) + slack + 1;
    const i128 centre = static_cast<i128>(f);
    // z − I ranges over ceil((f − reach)/W) .. floor((f + reach)/W)
    auto fdiv = [](i128 a, i128 b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    const i128 klo = -fdiv(-(centre - reach), W);
    const i128 khi = fdiv(centre + reach, W);
    for (i128 k = klo; k <= khi; ++k) {
        i128 diff = centre - k * W;  // 2^64·(αn − z), up to the slack
        i128 ad = diff < 0 ? -diff : diff;
        bool in;
        if (ad + slack <= static_cast<i128>(D64))
            in = true;
        else if (ad >= static_cast<i128>(D64) + 1 + slack)
            in = false;
        else
            in = abs_diff_le(alpha, BigInt(n), Rational(from_i128(I + k)), Delta, bits);
        if (in) visit(I + k);
    }
}

struct VSetup {
    FracMultiplier fm;
    u64 slack = 0;
    u128 D64 = 0;
    unsigned bits = kDefaultBits;
};

inline VSetup v_setup(const VCountSpec& s, u64 kmax) {
    require(s.A >= 1 && s.B >= 1, "V counts need A, B >= 1");
    require(s.Delta >= 0, "V counts need Delta >= 0");
    guard(static_cast<u128>(s.A) * s.B <= kVCountMaxBox, "V counts: A·B exceeds 1e7");
    guard(s.Delta <= 1000, "V counts: Delta too large");
    VSetup v;
    v.fm = FracMultiplier(s.alpha.at(v.bits));
    v.slack = v.fm.slack(kmax);
    v.D64 = to_u128(floor(s.Delta * pow2(64)));
    return v;
}

/// Smallest prime in (P0, P1] dividing m, for every m <= limit (0 if none).
inline std::vector<std::uint32_t> window_spf(u64 limit, u64 P0, u64 P1) {
    std::vector<std::uint32_t> spf(limit + 1, 0);
    if (P1 <= P0) return spf;
    for (std::uint32_t p : sieve_primes(static_cast<std::uint32_t>(std::min<u64>(P1, limit)))) {
        if (p <= P0) continue;
        for (u64 m = p; m <= limit; m += p)
            if (!spf[m]) spf[m] = p;
    }
    return spf;
}

}  // namespace detail

/// V(A,B;Δ) = #{(a,b,z) : a <= A, b <= B, gcd(ab,z) = 1, |α·ab − z| <= Δ}.
inline u64 v_count(const VCountSpec& s) {
    auto st = detail::v_setup(s, s.A * s.B);
    auto parts = parallel_chunks(s.A, [&](std::size_t begin, std::size_t end) {
        u64 c = 0;
        for (u64 a = begin + 1; a <= end; ++a)
            for (u64 b = 1; b <= s.B; ++b) {
                const u64 n = a * b;
                detail::near_integers(s.alpha, st.fm, st.slack, n, st.D64, s.Delta, st.bits, [&](i128 z) {
                    if (detail::gcd_z(n, z) == 1) ++c;
                });
            }
        return c;
    });
    u64 total = 0;
    for (u64 c : parts) total += c;
    return total;
}

/// V*(A,B;Δ) = #{(u,x,y) : u <= A, x <= B, gcd(x,y) = 1, |α·ux − y| <= Δ}.
inline u64 v_star_count(const VCountSpec& s) {
    auto st = detail::v_setup(s, s.A * s.B);
    auto parts = parallel_chunks(s.A, [&](std::size_t begin, std::size_t end) {
        u64 c = 0;
        for (u64 u = begin + 1; u <= end; ++u)
            for (u64 x = 1; x <= s.B; ++x) {
                detail::near_integers(s.alpha, st.fm, st.slack, u * x, st.D64, s.Delta, st.bits, [&](i128 y) {
                    if (detail::gcd_z(x, y) == 1) ++c;
                });
            }
        return c;
    });
    u64 total = 0;
    for (u64 c : parts) total += c;
    return total;
}

struct VSplit {
    u64 v1 = 0;                  // triples with ab free of primes in (P0, P1]
    std::map<u64, u64> v2;       // by dyadic P = 2^k < p <= 2P of the smallest such prime
    u64 v2_total() const {
        u64 t = 0;
        for (auto& [P, c] : v2) t += c;
        return t;
    }
};

/// Splits the V triples by the smallest prime p in (P0, P1] dividing ab.
inline VSplit v_split(const VCountSpec& s) {
    require(s.P0 >= 1 && s.P0 <= s.P1, "V1/V2 need 1 <= P0 <= P1");
    auto st = detail::v_setup(s, s.A * s.B);
    auto spf = detail::window_spf(std::max(s.A, s.B), s.P0, s.P1);
    VSplit out;
    for (u64 a = 1; a <= s.A; ++a)
        for (u64 b = 1; b <= s.B; ++b) {
            const u64 n = a * b;
            u64 p = 0;
            if (spf[a] && spf[b])
                p = std::min(spf[a], spf[b]);
            else
                p = spf[a] ? spf[a] : spf[b];
            u64 hits = 0;
            detail::near_integers(s.alpha, st.fm, st.slack, n, st.D64, s.Delta, st.bits, [&](i128 z) {
                if (detail::gcd_z(n, z) == 1) ++hits;
            });
            if (!hits) continue;
            if (p == 0) {
                out.v1 += hits;
            } else {
                u64 P = u64(1) << (std::bit_width(p - 1) - 1);
                out.v2[P] += hits;
            }
        }
    return out;
}

inline u64 v1_count(const VCountSpec& s) {
    return v_split(s).v1;
}

inline VSplit v2_count(const VCountSpec& s) {
    VSplit sp = v_split(s);
    sp.v1 = 0;
    return sp;
}

// ---------------------------------------------------------------------------
// Coprime points in ellipses

/// a·x² + 2b·xy + c·y², positive definite.
struct QuadraticForm2 {
    double a = 1, b = 0, c = 1;
    double disc() const { return a * c - b * b; }
    double area(double level) const { return std::numbers::pi * level / std::sqrt(disc()); }
};

/// Integer pairs with gcd(|x|,|y|) = 1 (gcd(x,0) = |x|) and form(x,y) <= level.
inline u64 coprime_ellipse_count(const QuadraticForm2& f, double level) {
    require(f.a > 0 && f.disc() > 0, "coprime_ellipse_count needs a positive definite form");
    require(level >= 0, "coprime_ellipse_count needs level >= 0");
    const long double A = f.a, B = f.b, C = f.c, L = level;
    const long double xr = std::sqrt(L * C / (A * C - B * B));
    const long double yr = std::sqrt(L * A / (A * C - B * B));
    guard((2 * xr + 3) * (2 * yr + 3) <= 1e8L, "coprime_ellipse_count: too many candidates");
    const Rational Ar(f.a), Br(f.b), Cr(f.c), Lr(level);
    const i64 xm = static_cast<i64>(std::floor(xr)) + 1;
    u64 count = 0;
    for (i64 x = -xm; x <= xm; ++x) {
        // C y² + 2Bx y + (A x² − L) <= 0
        long double disc = B * B * x * x - C * (A * x * x - L);
        if (disc < -1e-9L * (1 + L)) continue;
        long double r = std::sqrt(std::max(disc, 0.0L));
        i64 ylo = static_cast<i64>(std::floor((-B * x - r) / C)) - 1;
        i64 yhi = static_cast<i64>(std::ceil((-B * x + r) / C)) + 1;
        for (i64 y = ylo; y <= yhi; ++y) {
            if (std::gcd(std::llabs(x), std::llabs(y)) != 1) continue;
            long double v = A * x * x + 2 * B * x * y + C * y * y;
            bool in;
            if (std::fabs(v - L) > 1e-9L * (1 + L))
                in = v <= L;
            else
                in = Ar * (x * x) + 2 * Br * (x * y) + Cr * (y * y) <= Lr;
            if (in) ++count;
        }
    }
    return count;
}

}  // namespace quadcorr
