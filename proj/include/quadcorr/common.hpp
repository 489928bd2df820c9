#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace quadcorr {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed strings, out-of-domain parameters, violated preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The certified error interval of a fixed-point value is too wide for the
/// requested decision. Callers may retry with more fractional bits.
class PrecisionExhausted : public Error {
public:
    using Error::Error;
};

/// A threshold comparison stayed undecided at the maximum working precision.
class AmbiguousThreshold : public Error {
public:
    using Error::Error;
};

/// The requested computation exceeds a documented size guard.
class CostGuard : public Error {
public:
    using Error::Error;
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

inline void guard(bool ok, const std::string& msg) {
    if (!ok) throw CostGuard(msg);
}

// ---------------------------------------------------------------------------
// Rational helpers

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    BigInt r = a - q * b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline BigInt floor(const Rational& x) {
    return floor_div(numerator(x), denominator(x));
}

inline BigInt ceil(const Rational& x) {
    return -floor_div(-numerator(x), denominator(x));
}

/// Euclidean remainder, always in [0, m).
inline BigInt mod_floor(const BigInt& a, const BigInt& m) {
    BigInt r = a % m;
    if (r < 0) r += m;
    return r;
}

inline double to_double(const Rational& x) {
    return x.convert_to<double>();
}

inline long double to_long_double(const Rational& x) {
    // cpp_rational -> long double goes through a correctly rounded path
    return x.convert_to<long double>();
}

inline std::string to_string(const Rational& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

inline BigInt parse_integer(std::string_view s) {
    require(!s.empty(), "empty integer");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    require(i < s.size(), "malformed integer '" + std::string(s) + "'");
    BigInt v = 0;
    for (; i < s.size(); ++i) {
        require(s[i] >= '0' && s[i] <= '9', "malformed integer '" + std::string(s) + "'");
        v = v * 10 + (s[i] - '0');
    }
    return neg ? BigInt(-v) : v;
}

/// Parses "p/q", "-12", or a plain decimal such as "0.25" / "-3.5" into an
/// exact rational. Locale independent; the period is the only separator.
inline Rational parse_rational(std::string_view s) {
    auto trim = [](std::string_view v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
        return v;
    };
    s = trim(s);
    require(!s.empty(), "empty number");
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        BigInt p = parse_integer(trim(s.substr(0, slash)));
        BigInt q = parse_integer(trim(s.substr(slash + 1)));
        require(q != 0, "zero denominator in '" + std::string(s) + "'");
        return Rational(p, q);
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    BigInt num = 0, den = 1;
    bool seen_digit = false, seen_point = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            require(!seen_point, "malformed decimal '" + std::string(s) + "'");
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            num = num * 10 + (c - '0');
            if (seen_point) den *= 10;
            seen_digit = true;
        } else {
            throw InvalidArgument("malformed decimal '" + std::string(s) + "'");
        }
    }
    require(seen_digit, "malformed decimal '" + std::string(s) + "'");
    return Rational(neg ? BigInt(-num) : num, den);
}

inline unsigned msb_or_zero(const BigInt& v) {
    return v == 0 ? 0u : static_cast<unsigned>(boost::multiprecision::msb(abs(v)));
}

inline u64 to_u64(const BigInt& v) {
    require(v >= 0 && v <= BigInt(std::numeric_limits<u64>::max()), "integer out of 64-bit range");
    return v.convert_to<u64>();
}

inline u128 to_u128(const BigInt& v) {
    require(v >= 0 && msb_or_zero(v) < 128, "integer out of 128-bit range");
    u128 out = 0;
    BigInt t = v;
    for (int shift = 0; shift < 128 && t != 0; shift += 64) {
        out |= u128(static_cast<u64>(t & BigInt(~u64(0)))) << shift;
        t >>= 64;
    }
    return out;
}

inline BigInt from_u128(u128 v) {
    BigInt hi = static_cast<u64>(v >> 64);
    return (hi << 64) | BigInt(static_cast<u64>(v));
}

inline BigInt from_i128(i128 v) {
    return v < 0 ? BigInt(-from_u128(static_cast<u128>(-v))) : from_u128(static_cast<u128>(v));
}

// ---------------------------------------------------------------------------
// Number formatting: 17 significant digits, locale independent.

inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Deterministic randomness. std::uniform_*_distribution is implementation
// defined, so all sampling goes through these.

using Rng = std::mt19937_64;

inline u64 uniform_below(Rng& rng, u64 n) {
    if (n <= 1) return 0;
    const u64 limit = std::numeric_limits<u64>::max() - std::numeric_limits<u64>::max() % n;
    u64 x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inline u64 uniform_in(Rng& rng, u64 lo, u64 hi) {
    return lo + uniform_below(rng, hi - lo + 1);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Worker pool sizing. Zero means "use the hardware concurrency".

inline unsigned& thread_setting() {
    static unsigned threads = [] {
        if (const char* env = std::getenv("PAIRCORR_THREADS")) {
            unsigned v = 0;
            auto [p, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), v);
            if (ec == std::errc()) return v;
        }
        return 0u;
    }();
    return threads;
}

inline unsigned worker_count() {
    unsigned t = thread_setting();
    if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
    return t;
}

/// Splits [0, n) into contiguous chunks of at least `grain` items, runs
/// fn(begin, end) for each on its own thread and returns the per-chunk results
/// in chunk order. Callers merge in that order, so results never depend on the
/// worker count. The first exception thrown by a chunk is rethrown.
template <class Fn>
auto parallel_chunks(std::size_t n, Fn fn, std::size_t grain = 1024)
    -> std::vector<decltype(fn(std::size_t{}, std::size_t{}))> {
    using R = decltype(fn(std::size_t{}, std::size_t{}));
    const std::size_t workers =
        std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, grain)));
    std::vector<R> out(std::max<std::size_t>(1, workers));
    if (workers <= 1) {
        out[0] = fn(0, n);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t b = n * w / workers, e = n * (w + 1) / workers;
        pool.emplace_back([&, w, b, e] {
            try {
                out[w] = fn(b, e);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace quadcorr
