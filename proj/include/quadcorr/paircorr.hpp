#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "quadcorr/common.hpp"
#include "quadcorr/exactreal.hpp"

namespace quadcorr {

enum class Provenance { explicit_list, quadratic, equally_spaced };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::explicit_list: return "explicit";
        case Provenance::quadratic: return "quadratic";
        case Provenance::equally_spaced: return "equally-spaced";
    }
    return "?";
}

/// Points on the circle R/Z stored as integers modulo `modulus`.
///
/// Exact sequences keep the residues r with θ = r / D exactly (D < 2^62, or
/// D = 2^64 for sequences built from doubles). Quadratic sequences with an
/// irrational α keep floor(2^64·θ) plus a per-point error bound, and resolve
/// any comparison that falls inside that bound through the α source.
class SequenceModOne {
public:
    std::size_t size() const { return values_.size(); }
    Provenance provenance() const { return provenance_; }
    bool exact() const { return exact_; }
    u128 modulus() const { return modulus_; }
    const std::vector<u64>& values() const { return values_; }
    u64 value(std::size_t i) const { return values_[i]; }
    u64 point_slack() const { return point_slack_; }
    u64 pair_slack() const { return exact_ ? 0 : 2 * point_slack_; }
    const std::optional<RealSource>& alpha() const { return alpha_; }

    long double point(std::size_t i) const {
        return static_cast<long double>(values_[i]) / static_cast<long double>(modulus_);
    }

    Rational exact_point(std::size_t i) const {
        require(exact_, "exact_point on an approximate sequence");
        return Rational(BigInt(values_[i]), from_u128(modulus_));
    }

    /// ‖θ_i − θ_j‖ <= t, decided exactly.
    bool pair_within(std::size_t i, std::size_t j, const Rational& t) const {
        if (exact_) {
            u128 g = values_[i] >= values_[j] ? values_[i] - values_[j] : modulus_ - (values_[j] - values_[i]);
            u128 d = std::min(g, modulus_ - g);
            return BigInt(from_u128(d)) * denominator(t) <= numerator(t) * from_u128(modulus_);
        }
        BigInt ni = BigInt(i + 1), nj = BigInt(j + 1);
        BigInt k = ni * ni - nj * nj;
        return norm_le(*alpha_, abs(k), Rational(0), t, bits_);
    }

    /// ‖θ_i − c‖ <= h, decided exactly.
    bool point_within(std::size_t i, const Rational& c, const Rational& h) const {
        if (exact_) return norm_exact(exact_point(i) - c) <= h;
        BigInt n = BigInt(i + 1);
        return norm_le(*alpha_, n * n, c, h, bits_);
    }

    static SequenceModOne from_residues(std::vector<u64> residues, u128 modulus, Provenance p) {
        require(!residues.empty(), "a sequence needs at least one point");
        require(modulus >= 1, "modulus must be positive");
        for (u64 r : residues) require(r < modulus, "residue out of range");
        SequenceModOne s;
        s.values_ = std::move(residues);
        s.modulus_ = modulus;
        s.exact_ = true;
        s.provenance_ = p;
        return s;
    }

    static SequenceModOne from_approximation(std::vector<u64> values, u64 point_slack, RealSource alpha, unsigned bits) {
        SequenceModOne s;
        s.values_ = std::move(values);
        s.modulus_ = u128(1) << 64;
        s.exact_ = false;
        s.point_slack_ = point_slack;
        s.provenance_ = Provenance::quadratic;
        s.alpha_ = std::move(alpha);
        s.bits_ = bits;
        return s;
    }

private:
    std::vector<u64> values_;
    u128 modulus_ = 1;
    bool exact_ = true;
    u64 point_slack_ = 0;
    Provenance provenance_ = Provenance::explicit_list;
    std::optional<RealSource> alpha_;
    unsigned bits_ = kDefaultBits;
};

inline constexpr u64 kMaxExactDenominator = u64(1) << 62;

/// Exact sequence of rationals (reduced mod 1). The common denominator must
/// stay below 2^62.
inline SequenceModOne sequence_from_rationals(const std::vector<Rational>& pts) {
    require(!pts.empty(), "a sequence needs at least one point");
    BigInt D = 1;
    for (const auto& p : pts) {
        D = boost::multiprecision::lcm(D, denominator(p));
        require(D < kMaxExactDenominator, "common denominator of the sequence exceeds 2^62");
    }
    std::vector<u64> r;
    r.reserve(pts.size());
    for (const auto& p : pts) {
        BigInt v = mod_floor(numerator(p) * (D / denominator(p)), D);
        r.push_back(v.convert_to<u64>());
    }
    return SequenceModOne::from_residues(std::move(r), D.convert_to<u64>(), Provenance::explicit_list);
}

/// Points given as doubles in [0,1), rounded to the nearest multiple of 2^-64;
/// the rounded values are then treated as exact.
inline SequenceModOne sequence_from_doubles(const std::vector<double>& pts) {
    require(!pts.empty(), "a sequence needs at least one point");
    std::vector<u64> r;
    r.reserve(pts.size());
    for (double p : pts) {
        require(p >= 0.0 && p < 1.0, "points must lie in [0,1)");
        long double s = std::ldexp(static_cast<long double>(p), 64);
        long double f = std::floor(s + 0.5L);
        r.push_back(f >= 0x1p64L ? 0 : static_cast<u64>(f));
    }
    return SequenceModOne::from_residues(std::move(r), u128(1) << 64, Provenance::explicit_list);
}

/// θ_n = n/N for n = 1..N.
inline SequenceModOne equally_spaced_sequence(std::size_t N) {
    require(N >= 1, "N must be >= 1");
    std::vector<u64> r(N);
    for (std::size_t n = 1; n <= N; ++n) r[n - 1] = n % N;
    return SequenceModOne::from_residues(std::move(r), N, Provenance::equally_spaced);
}

/// θ_n = frac(α n²) for n = 1..N.
inline SequenceModOne quadratic_sequence(const RealSource& alpha, std::size_t N, unsigned bits = kDefaultBits) {
    require(N >= 1, "N must be >= 1");
    require(N < (u64(1) << 31), "N too large");
    if (auto r = alpha.exact(); r && denominator(*r) < kMaxExactDenominator) {
        u64 Q = denominator(*r).convert_to<u64>();
        u64 p = mod_floor(numerator(*r), Q).convert_to<u64>();
        std::vector<u64> res(N);
        for (u64 n = 1; n <= N; ++n) res[n - 1] = mulmod(p, mulmod(n, n, Q), Q);
        return SequenceModOne::from_residues(std::move(res), Q, Provenance::quadratic);
    }
    const u64 kmax = u64(N) * N;
    for (unsigned b = std::max(bits, 64u);; b *= 2) {
        FracMultiplier fm(alpha.at(b));
        u64 s = fm.slack(kmax);
        // per-point error must sit far below the 1/(2N²) point spacing scale
        bool fine = static_cast<u128>(s) * kmax * 2048 <= (u128(1) << 64);
        if (fine) {
            std::vector<u64> v(N);
            for (u64 n = 1; n <= N; ++n) v[n - 1] = fm.frac64(n * n);
            return SequenceModOne::from_approximation(std::move(v), s, alpha, b);
        }
        if (!alpha.can_escalate() || b * 2 > kMaxBits)
            throw PrecisionExhausted("quadratic_sequence: " + std::to_string(b) + " bits too few for N=" +
                                     std::to_string(N));
    }
}

inline SequenceModOne quadratic_sequence(const FixedReal& alpha, std::size_t N) {
    return quadratic_sequence(RealSource::fixed(alpha), N, alpha.frac_bits);
}

// ---------------------------------------------------------------------------

enum class Method { sorted_window, naive, uv_decomposition };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::sorted_window: return "sorted-window";
        case Method::naive: return "naive";
        case Method::uv_decomposition: return "uv-decomposition";
    }
    return "?";
}

struct PairCorrResult {
    std::size_t N = 0;
    Rational X;
    u64 pair_count = 0;  // unordered pairs m < n within X/N
    double R = 0;
    std::optional<double> R0;
    std::optional<Rational> R0_exact;
    Method method = Method::sorted_window;

    Rational R_exact() const { return Rational(BigInt(pair_count), BigInt(N)); }
};

namespace detail {

struct Threshold {
    bool all = false;  // t >= 1/2: every pair qualifies
    u128 T = 0;        // floor(t·M)
};

inline Threshold make_threshold(const Rational& t, u128 M) {
    Threshold th;
    if (2 * t >= 1) {
        th.all = true;
        return th;
    }
    th.T = to_u128(floor(t * from_u128(M)));
    return th;
}

inline Rational window(const Rational& X, std::size_t N) {
    require(X >= 0, "X must be non-negative");
    return X / BigInt(N);
}

/// Indices b in [from, n) whose sorted value lies in [lo, hi] (u128 bounds).
inline std::pair<std::size_t, std::size_t> value_range(const std::vector<u64>& w, std::size_t from, u128 lo, u128 hi) {
    auto first = std::lower_bound(w.begin() + from, w.end(), lo, [](u64 v, u128 x) { return u128(v) < x; });
    auto last = std::upper_bound(first, w.end(), hi, [](u128 x, u64 v) { return x < u128(v); });
    return {static_cast<std::size_t>(first - w.begin()), static_cast<std::size_t>(last - w.begin())};
}

struct Sorted {
    std::vector<u64> w;
    std::vector<std::uint32_t> idx;
};

inline Sorted sort_points(const SequenceModOne& seq) {
    const std::size_t N = seq.size();
    std::vector<std::uint32_t> order(N);
    std::iota(order.begin(), order.end(), 0u);
    const auto& v = seq.values();
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return v[a] != v[b] ? v[a] < v[b] : a < b;
    });
    Sorted s;
    s.w.resize(N);
    for (std::size_t i = 0; i < N; ++i) s.w[i] = v[order[i]];
    s.idx = std::move(order);
    return s;
}

/// Classifies a circular gap d against T with slack ps: +1 in, -1 out, 0 unsure.
inline int classify(u128 d, u128 T, u128 ps) {
    if (d + ps <= T) return 1;
    if (d >= T + 1 + ps) return -1;
    return 0;
}

}  // namespace detail

/// N·R(N,X): unordered pairs with ‖θ_m − θ_n‖ <= X/N. Sort plus banded
/// binary search, O(N log N) plus exact resolution of borderline pairs.
inline u64 count_close_pairs(const SequenceModOne& seq, const Rational& t) {
    const std::size_t N = seq.size();
    if (N < 2) return 0;
    const u128 M = seq.modulus();
    auto th = detail::make_threshold(t, M);
    if (th.all) return u64(N) * (N - 1) / 2;
    const u128 ps = seq.pair_slack();
    const u128 T = th.T;
    auto sorted = detail::sort_points(seq);
    const auto& w = sorted.w;

    const bool has_in = T >= ps;
    const u128 Tin = has_in ? T - ps : 0;
    // unsure gaps: (Tin, T+ps] and [M-T-ps, M-Tin)
    const u128 a_lo = has_in ? Tin + 1 : 0;
    const u128 a_hi = T + ps;
    const u128 b_lo = M > T + ps ? M - T - ps : 0;
    const u128 b_hi = has_in ? M - Tin - 1 : M - 1;
    const bool unsure = ps > 0;

    auto parts = parallel_chunks(N, [&](std::size_t begin, std::size_t end) {
        u64 count = 0;
        for (std::size_t a = begin; a < end; ++a) {
            const u128 base = w[a];
            if (has_in) {
                auto [f, l] = detail::value_range(w, a + 1, base, base + Tin);
                count += l - f;
                auto [f2, l2] = detail::value_range(w, a + 1, base + M - Tin, M - 1);
                count += l2 - f2;
            }
            if (!unsure) continue;
            auto resolve = [&](u128 glo, u128 ghi) {
                if (glo > ghi) return;
                auto [f, l] = detail::value_range(w, a + 1, base + glo, std::min<u128>(base + ghi, M - 1));
                for (std::size_t b = f; b < l; ++b)
                    if (seq.pair_within(sorted.idx[a], sorted.idx[b], t)) ++count;
            };
            if (b_lo <= a_hi + 1) {
                resolve(a_lo, b_hi);
            } else {
                resolve(a_lo, a_hi);
                resolve(b_lo, b_hi);
            }
        }
        return count;
    });
    u64 total = 0;
    for (u64 c : parts) total += c;
    return total;
}

inline PairCorrResult pair_correlation(const SequenceModOne& seq, const Rational& X) {
    auto t = detail::window(X, seq.size());
    PairCorrResult r;
    r.N = seq.size();
    r.X = X;
    r.pair_count = count_close_pairs(seq, t);
    r.R = static_cast<double>(r.pair_count) / static_cast<double>(r.N);
    r.method = Method::sorted_window;
    return r;
}

inline constexpr std::size_t kNaiveMaxN = 5000;

/// Direct O(N²) evaluation of the definition.
inline PairCorrResult pair_correlation_naive(const SequenceModOne& seq, const Rational& X) {
    const std::size_t N = seq.size();
    guard(N <= kNaiveMaxN, "pair_correlation_naive: N exceeds 5000");
    auto t = detail::window(X, N);
    const u128 M = seq.modulus();
    auto th = detail::make_threshold(t, M);
    const u128 ps = seq.pair_slack();
    u64 count = 0;
    const auto& v = seq.values();
    for (std::size_t m = 0; m < N; ++m) {
        for (std::size_t n = m + 1; n < N; ++n) {
            if (th.all) {
                ++count;
                continue;
            }
            u128 g = v[m] >= v[n] ? u128(v[m] - v[n]) : M - (v[n] - v[m]);
            u128 d = std::min(g, M - g);
            int c = detail::classify(d, th.T, ps);
            if (c > 0 || (c == 0 && seq.pair_within(m, n, t))) ++count;
        }
    }
    PairCorrResult r;
    r.N = N;
    r.X = X;
    r.pair_count = count;
    r.R = static_cast<double>(count) / static_cast<double>(N);
    r.method = Method::naive;
    return r;
}

/// N·R via n − m = u, n + m = v: count v ≡ u (mod 2), u < v <= 2N − u with
/// ‖α·u·v‖ <= X/N.
inline PairCorrResult pair_correlation_uv(const RealSource& alpha, std::size_t N, const Rational& X,
                                          unsigned bits = kDefaultBits) {
    require(N >= 1, "N must be >= 1");
    require(N < (u64(1) << 31), "N too large");
    auto t = detail::window(X, N);
    PairCorrResult r;
    r.N = N;
    r.X = X;
    r.method = Method::uv_decomposition;
    const u64 kmax = u64(2) * N * N;

    u64 count = 0;
    if (auto ex = alpha.exact(); ex && denominator(*ex) < kMaxExactDenominator) {
        const u64 Q = denominator(*ex).convert_to<u64>();
        const u64 p = mod_floor(numerator(*ex), Q).convert_to<u64>();
        auto th = detail::make_threshold(t, Q);
        auto parts = parallel_chunks(N, [&](std::size_t begin, std::size_t end) {
            u64 c = 0;
            for (u64 u = std::max<u64>(begin, 1); u < end; ++u) {
                for (u64 v = u + 2; v <= 2 * N - u; v += 2) {
                    if (th.all) {
                        ++c;
                        continue;
                    }
                    u64 val = mulmod(p, u * v % Q, Q);
                    u64 d = std::min(val, Q - val);
                    if (d <= th.T) ++c;
                }
            }
            return c;
        });
        for (u64 c : parts) count += c;
    } else {
        FracMultiplier fm;
        u64 s = 0;
        unsigned b = bits;
        for (;; b *= 2) {
            fm = FracMultiplier(alpha.at(b));
            s = fm.slack(kmax);
            if (static_cast<u128>(s) * kmax * 2048 <= (u128(1) << 64)) break;
            if (!alpha.can_escalate() || b * 2 > kMaxBits)
                throw PrecisionExhausted("pair_correlation_uv: precision too low for N=" + std::to_string(N));
        }
        const u128 M = u128(1) << 64;
        auto th = detail::make_threshold(t, M);
        auto parts = parallel_chunks(N, [&](std::size_t begin, std::size_t end) {
            u64 c = 0;
            for (u64 u = std::max<u64>(begin, 1); u < end; ++u) {
                for (u64 v = u + 2; v <= 2 * N - u; v += 2) {
                    if (th.all) {
                        ++c;
                        continue;
                    }
                    u64 f = fm.frac64(u * v);
                    u128 d = std::min<u128>(f, M - f);
                    int cl = detail::classify(d, th.T, s);
                    if (cl > 0 || (cl == 0 && norm_le(alpha, BigInt(u) * v, Rational(0), t, b))) ++c;
                }
            }
            return c;
        });
        for (u64 c : parts) count += c;
    }
    r.pair_count = count;
    r.R = static_cast<double>(count) / static_cast<double>(N);
    return r;
}

inline PairCorrResult pair_correlation_uv(const FixedReal& alpha, std::size_t N, const Rational& X) {
    return pair_correlation_uv(RealSource::fixed(alpha), N, X, alpha.frac_bits);
}

// ---------------------------------------------------------------------------
// Weighted pair correlation

namespace detail {

/// Over unordered pairs with circular gap d <= T (no slack): count and Σ d.
struct GapSums {
    u64 count = 0;
    u128 sum_d = 0;
};

inline GapSums gap_sums(const SequenceModOne& seq, u128 T) {
    const std::size_t N = seq.size();
    GapSums out;
    if (N < 2) return out;
    const u128 M = seq.modulus();
    auto sorted = sort_points(seq);
    const auto& w = sorted.w;
    std::vector<u128> prefix(N + 1, 0);
    for (std::size_t i = 0; i < N; ++i) prefix[i + 1] = prefix[i] + w[i];
    const u128 half = M / 2;
    const u128 lin_hi = std::min(T, half);
    const u128 wrap_lo = std::max(M > T ? M - T : u128(0), half + 1);
    auto parts = parallel_chunks(N, [&](std::size_t begin, std::size_t end) {
        GapSums g;
        for (std::size_t a = begin; a < end; ++a) {
            const u128 base = w[a];
            auto [f, l] = value_range(w, a + 1, base, base + lin_hi);
            u64 c1 = l - f;
            g.count += c1;
            g.sum_d += (prefix[l] - prefix[f]) - base * c1;
            if (wrap_lo <= M - 1) {
                auto [f2, l2] = value_range(w, a + 1, base + wrap_lo, M - 1);
                u64 c2 = l2 - f2;
                g.count += c2;
                // d = M - (w[b] - base)
                g.sum_d += (M + base) * c2 - (prefix[l2] - prefix[f2]);
            }
        }
        return g;
    });
    for (const auto& p : parts) {
        out.count += p.count;
        out.sum_d += p.sum_d;
    }
    return out;
}

}  // namespace detail

/// R₀(N,X;θ): Σ over all ordered pairs (diagonal included) of (1 − ‖θ_m−θ_n‖N/X)^+, over N.
/// Exact rational arithmetic for exact sequences.
inline PairCorrResult weighted_pair_correlation(const SequenceModOne& seq, const Rational& X) {
    require(X > 0, "weighted pair correlation needs X > 0");
    const std::size_t N = seq.size();
    const u128 M = seq.modulus();
    const Rational t = X / BigInt(N);
    // every pair with d <= floor(t·M) has non-negative weight; equality weighs 0
    u128 T;
    if (t * from_u128(M) >= from_u128(M)) {
        T = M;
    } else {
        T = to_u128(floor(t * from_u128(M)));
    }
    auto g = detail::gap_sums(seq, T);
    PairCorrResult r;
    r.N = N;
    r.X = X;
    r.method = Method::sorted_window;
    const BigInt xn = numerator(X), xd = denominator(X);
    const BigInt Mb = from_u128(M);
    if (seq.exact()) {
        // R₀ = [N·xn·M + 2(cnt·xn·M − N·xd·Σd)] / (N·xn·M)
        BigInt den = BigInt(N) * xn * Mb;
        BigInt num = den + 2 * (BigInt(g.count) * xn * Mb - BigInt(N) * xd * from_u128(g.sum_d));
        Rational R0(num, den);
        r.R0_exact = R0;
        r.R0 = to_double(R0);
    } else {
        long double scale = static_cast<long double>(N) / (to_long_double(X) * static_cast<long double>(M));
        long double s = static_cast<long double>(g.count) - scale * static_cast<long double>(g.sum_d);
        r.R0 = static_cast<double>(1.0L + 2.0L * s / static_cast<long double>(N));
    }
    return r;
}

/// L(t,X) = #{n : ‖θ_n − t‖ <= X/(2N)}.
inline u64 window_function_L(const SequenceModOne& seq, const Rational& t, const Rational& X) {
    require(X > 0, "L(t,X) needs X > 0");
    const std::size_t N = seq.size();
    const Rational h = X / (2 * BigInt(N));
    if (2 * h >= 1) return N;
    u64 c = 0;
    for (std::size_t i = 0; i < N; ++i)
        if (seq.point_within(i, t, h)) ++c;
    return c;
}

/// X + (ξ − ξ²)/X with ξ = X − floor(X).
inline Rational equally_spaced_reference(const Rational& X) {
    require(X > 0, "reference value needs X > 0");
    Rational xi = X - Rational(floor(X));
    return X + (xi - xi * xi) / X;
}

// ---------------------------------------------------------------------------
// Integral identities

struct IdentityReport {
    Rational X;
    bool exact = true;
    std::optional<Rational> int_L, int_L2, R0, R_integral;
    double int_L_f = 0, int_L2_f = 0, R0_f = 0, R_integral_f = 0;
    bool int_L_ok = false;   // ∫L = X
    bool g_ok = false;       // ∫L² = X·R₀
    bool g_in_range = false; // X <= N/2, where ∫L² = X·R₀ holds at finite N
    bool add_ok = false;     // R₀ = 1 + (2/X)∫₀^X R(N,t) dt

    bool ok() const { return int_L_ok && add_ok && (!g_in_range || g_ok); }
};

namespace detail {

/// Exact ∫L and ∫L² over the circle in units of 1/W, where point n sits at
/// P_n and arcs have half-width H (all integers, 2H < W).
inline std::pair<BigInt, BigInt> arc_sweep(const std::vector<u128>& P, u128 H, u128 W) {
    std::vector<std::pair<u128, int>> ev;
    ev.reserve(2 * P.size());
    long base = 0;
    for (u128 p : P) {
        u128 s = p >= H ? p - H : p + W - H;
        u128 e = p + H < W ? p + H : p + H - W;
        if (s > e) ++base;  // arc wraps through 0
        ev.emplace_back(s, +1);
        ev.emplace_back(e, -1);
    }
    std::sort(ev.begin(), ev.end());
    BigInt s1 = 0, s2 = 0;
    long L = base;
    u128 prev = 0;
    for (auto [x, d] : ev) {
        if (x > prev) {
            BigInt len = from_u128(x - prev);
            s1 += len * L;
            s2 += len * L * L;
            prev = x;
        }
        L += d;
    }
    if (W > prev) {
        BigInt len = from_u128(W - prev);
        s1 += len * L;
        s2 += len * L * L;
    }
    return {s1, s2};
}

/// All circular gaps d <= T (units of 1/M) over unordered pairs, ascending.
inline std::vector<u128> close_gaps(const SequenceModOne& seq, u128 T) {
    const std::size_t N = seq.size();
    const u128 M = seq.modulus();
    auto sorted = sort_points(seq);
    const auto& w = sorted.w;
    const u128 half = M / 2;
    const u128 lin_hi = std::min(T, half);
    const u128 wrap_lo = std::max(M > T ? M - T : u128(0), half + 1);
    std::vector<u128> out;
    for (std::size_t a = 0; a < N; ++a) {
        const u128 base = w[a];
        auto [f, l] = value_range(w, a + 1, base, base + lin_hi);
        for (std::size_t b = f; b < l; ++b) out.push_back(w[b] - base);
        if (wrap_lo <= M - 1) {
            auto [f2, l2] = value_range(w, a + 1, base + wrap_lo, M - 1);
            for (std::size_t b = f2; b < l2; ++b) out.push_back(M - (w[b] - base));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

inline constexpr std::size_t kIdentityMaxN = 200000;

/// Checks ∫L = X, ∫L² = X·R₀ and R₀ = 1 + (2/X)∫₀^X R dt by exact sweeps.
/// Accepts 0 < X <= N. The ∫L² identity is asserted only for X <= N/2: past
/// that, arcs of neighbouring points overlap across the far side of the circle
/// and the identity genuinely fails at finite N.
inline IdentityReport verify_integral_identities(const SequenceModOne& seq, const Rational& X) {
    const std::size_t N = seq.size();
    require(X > 0, "identity check needs X > 0");
    require(X <= BigInt(N), "identity check needs X <= N");
    guard(N <= kIdentityMaxN, "identity check: N too large");
    IdentityReport rep;
    rep.X = X;
    rep.exact = seq.exact();
    rep.g_in_range = 2 * X <= BigInt(N);
    auto w = weighted_pair_correlation(seq, X);
    const Rational t = X / BigInt(N);
    const u128 M = seq.modulus();
    const BigInt xn = numerator(X), xd = denominator(X);

    if (seq.exact()) {
        // Circle in units of 1/W with W = 2·N·xd·M; arc half-width is xn·M.
        BigInt Wb = 2 * BigInt(N) * xd * from_u128(M);
        guard(msb_or_zero(Wb) < 120, "identity check: common denominator too large");
        const u128 W = to_u128(Wb);
        const u128 scale = to_u128(2 * BigInt(N) * xd);
        const u128 H = to_u128(xn * from_u128(M));
        std::vector<u128> P;
        P.reserve(N);
        for (u64 v : seq.values()) P.push_back(u128(v) * scale);
        Rational intL, intL2;
        if (2 * H >= W) {
            intL = BigInt(N);
            intL2 = BigInt(N) * BigInt(N);
        } else {
            auto [s1, s2] = detail::arc_sweep(P, H, W);
            intL = Rational(s1, Wb);
            intL2 = Rational(s2, Wb);
        }
        // ∫₀^X R(N,s) ds, R a step function jumping by 1/N at s_k = N·d_k/M.
        // Units of 1/(xd·M): s_k -> N·xd·d_k, X -> xn·M.
        u128 T = 2 * t >= 1 ? M : to_u128(floor(t * from_u128(M)));
        auto gaps = detail::close_gaps(seq, T);
        BigInt acc = 0;
        BigInt end = xn * from_u128(M);
        for (std::size_t j = 0; j < gaps.size(); ++j) {
            BigInt sj = BigInt(N) * xd * from_u128(gaps[j]);
            BigInt next = j + 1 < gaps.size() ? BigInt(N) * xd * from_u128(gaps[j + 1]) : end;
            acc += BigInt(j + 1) * (next - sj);
        }
        Rational intR(acc, BigInt(N) * xd * from_u128(M));
        rep.int_L = intL;
        rep.int_L2 = intL2;
        rep.R0 = *w.R0_exact;
        rep.R_integral = intR;
        rep.int_L_ok = intL == X;
        rep.g_ok = intL2 == X * *w.R0_exact;
        rep.add_ok = *w.R0_exact == 1 + 2 * intR / X;
        rep.int_L_f = to_double(intL);
        rep.int_L2_f = to_double(intL2);
        rep.R0_f = to_double(*w.R0_exact);
        rep.R_integral_f = to_double(intR);
        return rep;
    }

    // float mode: positions as long doubles
    const long double Xf = to_long_double(X);
    const long double h = Xf / (2.0L * N);
    std::vector<std::pair<long double, int>> ev;
    long base = 0;
    for (std::size_t i = 0; i < N; ++i) {
        long double p = seq.point(i);
        long double s = p - h, e = p + h;
        if (s < 0) {
            s += 1;
            ++base;
        } else if (e >= 1) {
            e -= 1;
            ++base;
        }
        ev.emplace_back(s, +1);
        ev.emplace_back(e, -1);
    }
    std::sort(ev.begin(), ev.end());
    long double s1 = 0, s2 = 0, prev = 0;
    long L = base;
    for (auto [x, d] : ev) {
        s1 += (x - prev) * L;
        s2 += (x - prev) * L * L;
        prev = x;
        L += d;
    }
    s1 += (1 - prev) * L;
    s2 += (1 - prev) * L * L;
    if (2 * h >= 1) {
        s1 = N;
        s2 = static_cast<long double>(N) * N;
    }
    u128 T = 2 * t >= 1 ? M : to_u128(floor(t * from_u128(M)));
    auto gaps = detail::close_gaps(seq, T);
    long double acc = 0;
    for (u128 g : gaps) acc += Xf - N * (static_cast<long double>(g) / static_cast<long double>(M));
    long double intR = acc / N;
    const long double R0 = *w.R0;
    const long double tol = 1e-12L;
    auto close = [&](long double a, long double b) { return std::fabs(a - b) <= tol * std::max(1.0L, std::fabs(b)); };
    rep.int_L_f = static_cast<double>(s1);
    rep.int_L2_f = static_cast<double>(s2);
    rep.R0_f = static_cast<double>(R0);
    rep.R_integral_f = static_cast<double>(intR);
    rep.int_L_ok = close(s1, Xf);
    rep.g_ok = close(s2, Xf * R0);
    rep.add_ok = close(R0, 1 + 2 * intR / Xf);
    return rep;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string paircorr_csv_header() {
    return "alpha,N,X,R,R0,method";
}

inline std::string paircorr_csv_row(const std::string& alpha, const PairCorrResult& r) {
    std::ostringstream os;
    os << alpha << ',' << r.N << ',' << format_double(to_double(r.X)) << ',' << format_double(r.R) << ',';
    if (r.R0) os << format_double(*r.R0);
    os << ',' << to_string(r.method);
    return os.str();
}

}  // namespace quadcorr
