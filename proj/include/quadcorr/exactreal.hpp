#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quadcorr/common.hpp"

namespace quadcorr {

inline constexpr unsigned kDefaultBits = 192;
inline constexpr unsigned kMaxBits = 1024;

inline BigInt pow2(unsigned b) {
    return BigInt(1) << b;
}

inline BigInt isqrt(const BigInt& n) {
    require(n >= 0, "isqrt of a negative number");
    return boost::multiprecision::sqrt(n);
}

inline bool is_perfect_square(const BigInt& n) {
    if (n < 0) return false;
    BigInt r = isqrt(n);
    return r * r == n;
}

// ---------------------------------------------------------------------------
// FixedReal

/// x with |x - mantissa / 2^frac_bits| <= err_ulp / 2^frac_bits.
struct FixedReal {
    BigInt mantissa = 0;
    unsigned frac_bits = kDefaultBits;
    BigInt err_ulp = 0;

    FixedReal() = default;
    FixedReal(BigInt m, unsigned bits, BigInt err) : mantissa(std::move(m)), frac_bits(bits), err_ulp(std::move(err)) {
        require(frac_bits >= 64, "FixedReal needs at least 64 fractional bits");
        require(err_ulp >= 0, "negative error radius");
    }

    bool is_exact() const { return err_ulp == 0; }
    Rational midpoint() const { return Rational(mantissa, pow2(frac_bits)); }
    Rational lower() const { return Rational(mantissa - err_ulp, pow2(frac_bits)); }
    Rational upper() const { return Rational(mantissa + err_ulp, pow2(frac_bits)); }
    double to_double() const { return quadcorr::to_double(midpoint()); }

    /// k·x with the error radius scaled by |k|.
    FixedReal scaled(const BigInt& k) const { return FixedReal(mantissa * k, frac_bits, err_ulp * abs(k)); }

    /// Same value with more fractional bits (exact shift, no new information).
    FixedReal widened(unsigned bits) const {
        if (bits <= frac_bits) return *this;
        unsigned s = bits - frac_bits;
        return FixedReal(mantissa << s, bits, err_ulp << s);
    }
};

inline FixedReal fixed_from_rational(const Rational& r, unsigned bits = kDefaultBits) {
    require(bits >= 64, "need at least 64 fractional bits");
    BigInt scaled = numerator(r) << bits;
    const BigInt& d = denominator(r);
    // round half up: floor((2·scaled + d) / (2d))
    BigInt m = floor_div(2 * scaled + d, 2 * d);
    BigInt err = (scaled % d == 0) ? 0 : 1;
    return FixedReal(m, bits, err);
}

/// Signed decimal with optional fractional part, rounded to nearest.
inline FixedReal fixed_from_decimal(std::string_view s, unsigned bits = kDefaultBits) {
    require(bits >= 64, "need at least 64 fractional bits");
    require(s.find('/') == std::string_view::npos, "malformed decimal '" + std::string(s) + "'");
    return fixed_from_rational(parse_rational(s), bits);
}

inline FixedReal sqrt_fixed(const BigInt& n, unsigned bits = kDefaultBits) {
    require(n >= 1, "sqrt_fixed needs n >= 1");
    require(bits >= 64, "need at least 64 fractional bits");
    BigInt target = n << (2 * bits);
    BigInt r = isqrt(target);
    return FixedReal(r, bits, r * r == target ? 0 : 1);
}

// ---------------------------------------------------------------------------
// RealSource: a real number that can be re-evaluated at any precision.

class RealSource {
public:
    enum class Kind { rational, quadratic, fixed };

    RealSource() = default;

    static RealSource rational(const Rational& r, std::string label = {}) {
        RealSource s;
        s.kind_ = Kind::rational;
        s.exact_ = r;
        s.label_ = label.empty() ? "rat:" + to_string(r) : std::move(label);
        return s;
    }

    /// (u + sign·sqrt(n)) / v. Perfect squares collapse to a rational.
    static RealSource quadratic(BigInt u, int sign, BigInt n, BigInt v, std::string label = {}) {
        require(v != 0, "zero denominator in quadratic form");
        require(n >= 0, "negative radicand");
        require(sign == 1 || sign == -1, "sign must be +1 or -1");
        if (label.empty()) label = "ratio:(" + u.str() + (sign > 0 ? "+" : "-") + "sqrt:" + n.str() + ")/" + v.str();
        if (is_perfect_square(n)) return rational(Rational(u + sign * isqrt(n), v), std::move(label));
        if (v < 0) {
            v = -v;
            u = -u;
            sign = -sign;
        }
        RealSource s;
        s.kind_ = Kind::quadratic;
        s.u_ = std::move(u);
        s.sign_ = sign;
        s.n_ = std::move(n);
        s.v_ = std::move(v);
        s.label_ = std::move(label);
        return s;
    }

    /// A value known only to a fixed precision; no escalation possible.
    static RealSource fixed(const FixedReal& x, std::string label = {}) {
        if (x.is_exact()) return rational(x.midpoint(), std::move(label));
        RealSource s;
        s.kind_ = Kind::fixed;
        s.fixed_ = x;
        s.label_ = label.empty() ? "fixed" : std::move(label);
        return s;
    }

    static RealSource parse(std::string_view spec);

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    std::optional<Rational> exact() const {
        if (kind_ == Kind::rational) return exact_;
        return std::nullopt;
    }
    bool can_escalate() const { return kind_ != Kind::fixed; }
    unsigned native_bits() const { return kind_ == Kind::fixed ? fixed_.frac_bits : kMaxBits; }

    FixedReal at(unsigned bits) const {
        require(bits >= 64, "need at least 64 fractional bits");
        switch (kind_) {
            case Kind::rational:
                return fixed_from_rational(exact_, bits);
            case Kind::fixed:
                if (bits > fixed_.frac_bits)
                    throw PrecisionExhausted("value '" + label_ + "' is only known to " +
                                             std::to_string(fixed_.frac_bits) + " bits");
                return FixedReal(floor_div(fixed_.mantissa, pow2(fixed_.frac_bits - bits)), bits,
                                 floor_div(fixed_.err_ulp, pow2(fixed_.frac_bits - bits)) + 1);
            case Kind::quadratic: {
                unsigned guard_bits = 8 + msb_or_zero(v_);
                unsigned b = bits + guard_bits;
                BigInt s = isqrt(n_ << (2 * b));
                BigInt num = (u_ << b) + sign_ * s;
                BigInt den = v_ << guard_bits;
                // num/den is within 1/(v·2^guard) ulp of the value; rounding adds 1/2
                BigInt m = floor_div(2 * num + den, 2 * den);
                return FixedReal(m, bits, 1);
            }
        }
        return {};
    }

    /// k·x as a new source.
    RealSource times(const BigInt& k) const {
        switch (kind_) {
            case Kind::rational:
                return rational(exact_ * k, label_ + "*" + k.str());
            case Kind::fixed:
                return fixed(fixed_.scaled(k), label_ + "*" + k.str());
            case Kind::quadratic: {
                int sg = k < 0 ? -sign_ : sign_;
                return quadratic(u_ * k, sg, n_ * k * k, v_, label_ + "*" + k.str());
            }
        }
        return {};
    }

    double to_double() const { return at(128).to_double(); }

private:
    Kind kind_ = Kind::rational;
    Rational exact_{0};
    BigInt u_, n_, v_;
    int sign_ = 1;
    FixedReal fixed_;
    std::string label_ = "rat:0";
};

// ---------------------------------------------------------------------------
// Continued fractions

struct ContinuedFraction {
    std::vector<BigInt> partial_quotients;
    std::vector<Rational> convergents;
    bool rational = false;  // expansion terminated: x is exactly the last convergent
};

namespace detail {

inline std::vector<Rational> convergents_of(const std::vector<BigInt>& a) {
    std::vector<Rational> out;
    BigInt p2 = 0, p1 = 1, q2 = 1, q1 = 0;
    for (const auto& ak : a) {
        BigInt p = ak * p1 + p2, q = ak * q1 + q2;
        out.emplace_back(p, q);
        p2 = p1;
        p1 = p;
        q2 = q1;
        q1 = q;
    }
    return out;
}

/// Rewrites a terminating expansion into the even-length form.
inline void make_even_length(std::vector<BigInt>& a) {
    if (a.size() % 2 == 0) return;
    if (a.size() == 1) {
        a[0] -= 1;
        a.push_back(1);
    } else if (a.back() == 1) {
        a.pop_back();
        a.back() += 1;
    } else {
        a.back() -= 1;
        a.push_back(1);
    }
}

}  // namespace detail

/// Partial quotients of every real in the certified interval of x, up to depth
/// terms. Throws PrecisionExhausted once the interval no longer pins a quotient.
inline ContinuedFraction continued_fraction(const FixedReal& x, std::size_t depth) {
    ContinuedFraction cf;
    Rational lo = x.lower(), hi = x.upper();
    const bool exact = x.is_exact();
    while (cf.partial_quotients.size() < depth) {
        BigInt a = floor(lo);
        if (!exact && floor(hi) != a)
            throw PrecisionExhausted("continued fraction: interval straddles an integer after " +
                                     std::to_string(cf.partial_quotients.size()) + " quotients");
        cf.partial_quotients.push_back(a);
        Rational flo = lo - a, fhi = hi - a;
        if (exact && flo == 0) {
            cf.rational = true;
            break;
        }
        if (flo == 0)
            throw PrecisionExhausted("continued fraction: interval touches an integer after " +
                                     std::to_string(cf.partial_quotients.size()) + " quotients");
        lo = 1 / fhi;
        hi = 1 / flo;
    }
    if (cf.rational) detail::make_even_length(cf.partial_quotients);
    cf.convergents = detail::convergents_of(cf.partial_quotients);
    return cf;
}

/// Convergents p/q of src with q <= q_max, plus the first one past q_max.
/// Escalates precision through src until the expansion is certified.
inline ContinuedFraction convergents_until(const RealSource& src, const BigInt& q_max, unsigned bits = kDefaultBits) {
    for (unsigned b = bits;; b *= 2) {
        FixedReal x = src.at(b);
        std::size_t depth = 8;
        try {
            while (true) {
                ContinuedFraction cf = continued_fraction(x, depth);
                if (cf.rational || denominator(cf.convergents.back()) > q_max) return cf;
                depth *= 2;
            }
        } catch (const PrecisionExhausted&) {
            if (!src.can_escalate() || b * 2 > kMaxBits) throw;
        }
    }
}

// ---------------------------------------------------------------------------
// Exact power comparisons

/// Largest r >= 0 with r^den <= q^num, i.e. floor(q^e) for e = num/den >= 0.
inline BigInt floor_power(u64 q, const Rational& e) {
    require(e >= 0, "floor_power needs a non-negative exponent");
    require(q >= 1, "floor_power needs q >= 1");
    const BigInt& num = numerator(e);
    const BigInt& den = denominator(e);
    require(num <= 100000 && den <= 100000, "exponent too complex for exact evaluation");
    unsigned n = num.convert_to<unsigned>(), d = den.convert_to<unsigned>();
    BigInt target = boost::multiprecision::pow(BigInt(q), n);
    long double est = std::pow(static_cast<long double>(q), to_long_double(e));
    BigInt r = est < 1e30L ? BigInt(static_cast<u64>(std::floor(std::min(est, 1.8e19L)))) : BigInt(1);
    if (est >= 1.8e19L) {
        // rare large case: bisection
        BigInt lo = 0, hi = BigInt(1) << (msb_or_zero(target) / d + 2);
        while (lo < hi) {
            BigInt mid = (lo + hi + 1) / 2;
            if (boost::multiprecision::pow(mid, d) <= target)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }
    while (r > 0 && boost::multiprecision::pow(r, d) > target) --r;
    while (boost::multiprecision::pow(BigInt(r + 1), d) <= target) ++r;
    return r;
}

/// Sign of s - q^e for s >= 0, exact. A float estimate settles clear cases.
inline int compare_with_power(const Rational& s, u64 q, const Rational& e) {
    require(s >= 0 && e >= 0 && q >= 1, "compare_with_power: domain");
    if (s == 0) return -1;
    long double ls = std::log(to_long_double(s));
    long double lp = to_long_double(e) * std::log(static_cast<long double>(q));
    if (ls - lp > 1e-9L * (1 + std::fabs(lp))) return 1;
    if (lp - ls > 1e-9L * (1 + std::fabs(lp))) return -1;
    const BigInt& en = numerator(e);
    const BigInt& ed = denominator(e);
    require(en <= 100000 && ed <= 100000, "exponent too complex for exact evaluation");
    unsigned n = en.convert_to<unsigned>(), d = ed.convert_to<unsigned>();
    // s^d vs q^n  <=>  num^d vs q^n · den^d
    BigInt lhs = boost::multiprecision::pow(numerator(s), d);
    BigInt rhs = boost::multiprecision::pow(BigInt(q), n) * boost::multiprecision::pow(denominator(s), d);
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

// ---------------------------------------------------------------------------
// Elementary number theory on 64-bit integers

inline u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

inline std::vector<std::uint32_t> sieve_primes(std::uint32_t limit) {
    std::vector<bool> composite(limit + 1, false);
    std::vector<std::uint32_t> primes;
    for (std::uint32_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (u64 j = u64(i) * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> table = sieve_primes(1000000);
    return table;
}

using Factorization = std::vector<std::pair<u64, unsigned>>;

/// Trial division by primes below 10^6, then a primality test on the cofactor.
/// Exact for every n <= 10^12; larger n with two big prime factors are refused.
inline Factorization factorize(u64 n) {
    require(n >= 1, "factorize needs n >= 1");
    Factorization f;
    for (std::uint32_t p : small_primes()) {
        if (u64(p) * p > n) break;
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.emplace_back(p, e);
    }
    if (n > 1) {
        guard(is_prime(n), "factorize: cofactor " + std::to_string(n) + " beyond trial-division range");
        f.emplace_back(n, 1);
    }
    return f;
}

/// 2-part times every prime power with exponent > 1.
inline u64 q1_part(u64 q) {
    u64 out = 1;
    for (auto [p, e] : factorize(q)) {
        if (p == 2 || e > 1) {
            for (unsigned i = 0; i < e; ++i) out *= p;
        }
    }
    return out;
}

inline bool is_squarefree(u64 n) {
    for (auto [p, e] : factorize(n))
        if (e > 1) return false;
    return true;
}

inline u64 euler_phi(u64 n) {
    u64 r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

/// Inverse of a modulo m, or nullopt when gcd(a, m) > 1.
inline std::optional<u64> mod_inverse(u64 a, u64 m) {
    if (m == 1) return 0;
    i128 r0 = m, r1 = a % m, s0 = 0, s1 = 1;
    while (r1 != 0) {
        i128 t = r0 / r1;
        i128 r2 = r0 - t * r1;
        r0 = r1;
        r1 = r2;
        i128 s2 = s0 - t * s1;
        s0 = s1;
        s1 = s2;
    }
    if (r0 != 1) return std::nullopt;
    i128 inv = s0 % static_cast<i128>(m);
    if (inv < 0) inv += m;
    return static_cast<u64>(inv);
}

// ---------------------------------------------------------------------------
// Certified distance to the nearest integer

struct CertifiedNorm {
    Rational lower;
    Rational upper;
    bool contains(const Rational& v) const { return lower <= v && v <= upper; }
};

namespace detail {

/// ‖y/U‖ over all integers y in [c - w, c + w], as numerators over U.
/// Requires 4w < U.
inline std::pair<BigInt, BigInt> tent_range(const BigInt& c, const BigInt& w, const BigInt& U) {
    BigInt f = mod_floor(c, U);
    BigInt a = f - w, b = f + w;
    auto dist = [&](const BigInt& y) {
        BigInt r = mod_floor(y, U);
        BigInt s = U - r;
        return r < s ? r : s;
    };
    BigInt da = dist(a), db = dist(b);
    BigInt lower = (a <= 0 || b >= U) ? BigInt(0) : (da < db ? da : db);
    BigInt upper;
    if (2 * a <= U && U <= 2 * b)
        upper = U / 2;  // U even in every caller; exact midpoint
    else
        upper = da > db ? da : db;
    return {lower, upper};
}

}  // namespace detail

/// ‖k·x - t‖ for the real x certified by the FixedReal.
inline CertifiedNorm norm_offset(const FixedReal& x, const BigInt& k, const Rational& t) {
    const BigInt& td = denominator(t);
    BigInt U = pow2(x.frac_bits) * td * 2;
    BigInt c = 2 * (k * x.mantissa * td - numerator(t) * pow2(x.frac_bits));
    BigInt w = 2 * abs(k) * x.err_ulp * td;
    if (4 * w >= U)
        throw PrecisionExhausted("frac_norm: |k|·err exceeds the guard band; raise the bit count");
    auto [lo, hi] = detail::tent_range(c, w, U);
    return {Rational(lo, U), Rational(hi, U)};
}

inline CertifiedNorm frac_norm_mul(const FixedReal& x, const BigInt& k) {
    return norm_offset(x, k, Rational(0));
}

/// Exact ‖r‖ for a rational.
inline Rational norm_exact(const Rational& r) {
    Rational f = r - Rational(floor(r));
    Rational g = 1 - f;
    return f < g ? f : g;
}

/// Decides ‖k·x - t‖ <= bound, escalating precision through src.
inline bool norm_le(const RealSource& src, const BigInt& k, const Rational& t, const Rational& bound,
                    unsigned bits = kDefaultBits) {
    if (auto r = src.exact()) return norm_exact(*r * k - t) <= bound;
    if (k == 0) return norm_exact(-t) <= bound;
    for (unsigned b = bits;; b *= 2) {
        try {
            CertifiedNorm n = norm_offset(src.at(b), k, t);
            if (n.upper <= bound) return true;
            if (n.lower > bound) return false;
        } catch (const PrecisionExhausted&) {
            if (!src.can_escalate()) throw;
        }
        if (!src.can_escalate() || b * 2 > std::max(kMaxBits, src.native_bits()))
            throw AmbiguousThreshold("norm comparison undecided at " + std::to_string(b) + " bits for k=" + k.str());
    }
}

/// Sign of k·x - c, escalating precision through src.
inline int sign_of_kx_minus(const RealSource& src, const BigInt& k, const Rational& c, unsigned bits = kDefaultBits) {
    auto sgn = [](const Rational& v) { return v < 0 ? -1 : (v > 0 ? 1 : 0); };
    if (auto r = src.exact()) return sgn(*r * k - c);
    if (k == 0) return sgn(-c);
    for (unsigned b = bits;; b *= 2) {
        FixedReal x = src.at(b);
        Rational lo = x.lower() * k, hi = x.upper() * k;
        if (k < 0) std::swap(lo, hi);
        if (lo > c) return 1;
        if (hi < c) return -1;
        if (!src.can_escalate() || b * 2 > std::max(kMaxBits, src.native_bits()))
            throw AmbiguousThreshold("sign undecided at " + std::to_string(b) + " bits for k=" + k.str());
    }
}

/// Decides |k·x - z| <= bound.
inline bool abs_diff_le(const RealSource& src, const BigInt& k, const Rational& z, const Rational& bound,
                        unsigned bits = kDefaultBits) {
    return sign_of_kx_minus(src, k, z - bound, bits) >= 0 && sign_of_kx_minus(src, k, z + bound, bits) <= 0;
}

// ---------------------------------------------------------------------------
// Diophantine margin

struct DiophantineMargin {
    double margin = 0;
    Rational witness;
};

/// min over convergents p/q with q <= q_max of q^e·|x - p/q|.
inline DiophantineMargin diophantine_margin(const FixedReal& x, const BigInt& q_max, const Rational& e) {
    require(q_max >= 1, "q_max must be >= 1");
    ContinuedFraction cf = convergents_until(RealSource::fixed(x), q_max, x.frac_bits);
    DiophantineMargin best;
    bool have = false;
    const Rational mid = x.midpoint();
    for (const auto& c : cf.convergents) {
        const BigInt& q = denominator(c);
        if (q > q_max) break;
        Rational gap = mid - c;
        if (gap < 0) gap = -gap;
        if (x.is_exact() && gap == 0)
            throw InvalidArgument("diophantine_margin: x is the rational " + to_string(c) + "; margin is 0");
        long double v = std::pow(static_cast<long double>(q.convert_to<double>()), to_long_double(e)) *
                        to_long_double(gap);
        if (!have || v < best.margin) {
            best.margin = static_cast<double>(v);
            best.witness = c;
            have = true;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Fast fractional-part kernel for the hot loops

/// Precomputed limbs of frac(x) so that frac(k·x)·2^64 for 64-bit k costs a
/// handful of word multiplies.
class FracMultiplier {
public:
    FracMultiplier() = default;

    explicit FracMultiplier(const FixedReal& x) {
        unsigned bits = (x.frac_bits + 63) / 64 * 64;
        FixedReal w = x.widened(bits);
        BigInt U = pow2(bits);
        BigInt f = mod_floor(w.mantissa, U);
        int_part_ = (w.mantissa - f) / U;
        limbs_.resize(bits / 64);
        for (auto& l : limbs_) {
            l = static_cast<u64>(f & BigInt(~u64(0)));
            f >>= 64;
        }
        err_ = w.err_ulp;
        bits_ = bits;
        int_small_ = abs(int_part_) < (BigInt(1) << 60);
        if (int_small_) int64_part_ = int_part_.convert_to<i64>();
    }

    /// floor(2^64·frac(k·m)) where m is the midpoint.
    u64 frac64(u64 k) const {
        u64 carry = 0, top = 0;
        for (u64 l : limbs_) {
            u128 p = static_cast<u128>(l) * k + carry;
            top = static_cast<u64>(p);
            carry = static_cast<u64>(p >> 64);
        }
        return top;
    }

    /// floor(k·m) and floor(2^64·frac(k·m)).
    std::pair<i128, u64> split(u64 k) const {
        u64 carry = 0, top = 0;
        for (u64 l : limbs_) {
            u128 p = static_cast<u128>(l) * k + carry;
            top = static_cast<u64>(p);
            carry = static_cast<u64>(p >> 64);
        }
        require(int_small_, "FracMultiplier::split: integer part too large");
        return {static_cast<i128>(int64_part_) * static_cast<i128>(k) + carry, top};
    }

    /// Strict bound, in units of 2^-64, on |2^64·(k·x mod 1) - frac64(k)| for
    /// every k <= k_max (modulo wrap-around).
    u64 slack(u64 k_max) const {
        if (err_ == 0) return 1;
        BigInt e = err_ * k_max;
        unsigned sh = bits_ - 64;
        BigInt c = (e + pow2(sh) - 1) >> sh;
        guard(c < (BigInt(1) << 40), "FracMultiplier: precision too low for multipliers this large");
        return 1 + c.convert_to<u64>();
    }

    unsigned bits() const { return bits_; }

private:
    std::vector<u64> limbs_;
    BigInt int_part_ = 0;
    BigInt err_ = 0;
    unsigned bits_ = 0;
    bool int_small_ = true;
    i64 int64_part_ = 0;
};

// ---------------------------------------------------------------------------
// Alpha mini-language

namespace detail {

inline std::vector<BigInt> parse_int_list(std::string_view s) {
    std::vector<BigInt> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        std::string_view tok = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        out.push_back(parse_integer(tok));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// [a0; prefix..., (period...)] as (U + W·sqrt(D)) / V.
inline RealSource periodic_cf(const BigInt& a0, const std::vector<BigInt>& prefix, const std::vector<BigInt>& period,
                              std::string label) {
    require(!period.empty(), "cf: empty repeating block");
    for (const auto& b : prefix) require(b >= 1, "cf: partial quotients after a0 must be >= 1");
    for (const auto& b : period) require(b >= 1, "cf: partial quotients after a0 must be >= 1");
    // purely periodic tail y = [b1; ..., bk, y]
    BigInt P1 = 1, P2 = 0, Q1 = 0, Q2 = 1;  // P_{k}, P_{k-1}
    for (const auto& b : period) {
        BigInt p = b * P1 + P2, q = b * Q1 + Q2;
        P2 = P1;
        P1 = p;
        Q2 = Q1;
        Q1 = q;
    }
    // Q_k y^2 + (Q_{k-1} - P_k) y - P_{k-1} = 0, positive root
    BigInt A = P1 - Q2;
    BigInt D = (Q2 - P1) * (Q2 - P1) + 4 * P2 * Q1;
    BigInt C = 2 * Q1;
    // x = [a0; prefix, y] = (p_m y + p_{m-1}) / (q_m y + q_{m-1})
    std::vector<BigInt> head{a0};
    head.insert(head.end(), prefix.begin(), prefix.end());
    BigInt p1 = 1, p2 = 0, q1 = 0, q2 = 1;
    for (const auto& a : head) {
        BigInt p = a * p1 + p2, q = a * q1 + q2;
        p2 = p1;
        p1 = p;
        q2 = q1;
        q1 = q;
    }
    BigInt al = p1 * A + p2 * C, be = q1 * A + q2 * C;
    // (al + p1·sqrtD) / (be + q1·sqrtD), rationalised
    BigInt U = al * be - p1 * q1 * D;
    BigInt W = p1 * be - al * q1;
    BigInt V = be * be - q1 * q1 * D;
    int sign = W < 0 ? -1 : 1;
    return RealSource::quadratic(U, sign, W * W * D, V, std::move(label));
}

}  // namespace detail

/// dec:<decimal> | sqrt:<n> | ratio:(u±sqrt:n)/v | rat:<p>/<q> |
/// cf:<a0>;<a1>,...,<ak>   (ak repeats forever)
/// cf:<a0>;<a1>,...,[<b1>,...,<bm>]   (the bracketed block repeats)
inline RealSource RealSource::parse(std::string_view spec) {
    const std::string label(spec);
    auto bad = [&](const std::string& why) { return InvalidArgument("alpha spec '" + label + "': " + why); };
    auto starts = [&](std::string_view p) { return spec.substr(0, p.size()) == p; };
    try {
        if (starts("dec:")) {
            std::string_view body = spec.substr(4);
            if (body.find('/') != std::string_view::npos) throw bad("decimal expected");
            return rational(parse_rational(body), label);
        }
        if (starts("rat:")) {
            std::string_view body = spec.substr(4);
            auto slash = body.find('/');
            if (slash == std::string_view::npos) return rational(Rational(parse_integer(body)), label);
            BigInt p = parse_integer(body.substr(0, slash)), q = parse_integer(body.substr(slash + 1));
            if (q == 0) throw bad("zero denominator");
            return rational(Rational(p, q), label);
        }
        if (starts("sqrt:")) {
            BigInt n = parse_integer(spec.substr(5));
            if (n < 0) throw bad("negative radicand");
            return quadratic(0, 1, n, 1, label);
        }
        if (starts("ratio:")) {
            // (u±sqrt:n)/v
            std::string_view body = spec.substr(6);
            if (body.empty() || body.front() != '(') throw bad("expected '(' after ratio:");
            auto close = body.find(')');
            if (close == std::string_view::npos) throw bad("missing ')'");
            std::string_view inner = body.substr(1, close - 1);
            std::string_view rest = body.substr(close + 1);
            if (rest.empty() || rest.front() != '/') throw bad("expected '/v' after ')'");
            BigInt v = parse_integer(rest.substr(1));
            if (v == 0) throw bad("zero denominator");
            auto sq = inner.find("sqrt:");
            if (sq == std::string_view::npos || sq == 0) throw bad("expected u+sqrt:n or u-sqrt:n");
            char op = inner[sq - 1];
            if (op != '+' && op != '-') throw bad("expected '+' or '-' before sqrt:");
            BigInt u = parse_integer(inner.substr(0, sq - 1));
            BigInt n = parse_integer(inner.substr(sq + 5));
            if (n < 0) throw bad("negative radicand");
            return quadratic(u, op == '+' ? 1 : -1, n, v, label);
        }
        if (starts("cf:")) {
            std::string_view body = spec.substr(3);
            auto semi = body.find(';');
            if (semi == std::string_view::npos) throw bad("expected a0;a1,...");
            BigInt a0 = parse_integer(body.substr(0, semi));
            std::string_view tail = body.substr(semi + 1);
            std::vector<BigInt> prefix, period;
            if (auto lb = tail.find('['); lb != std::string_view::npos) {
                if (tail.back() != ']') throw bad("repeating block must close the spec");
                std::string_view head = tail.substr(0, lb);
                if (!head.empty()) {
                    if (head.back() != ',') throw bad("expected ',' before '['");
                    head.remove_suffix(1);
                    prefix = detail::parse_int_list(head);
                }
                period = detail::parse_int_list(tail.substr(lb + 1, tail.size() - lb - 2));
            } else {
                prefix = detail::parse_int_list(tail);
                period.push_back(prefix.back());
                prefix.pop_back();
            }
            return detail::periodic_cf(a0, prefix, period, label);
        }
    } catch (const InvalidArgument& e) {
        std::string what = e.what();
        if (what.rfind("alpha spec", 0) == 0) throw;
        throw bad(what);
    }
    throw bad("unknown form; expected dec:, sqrt:, ratio:, rat: or cf:");
}

}  // namespace quadcorr
