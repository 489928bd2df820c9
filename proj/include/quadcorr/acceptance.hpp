#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quadcorr/common.hpp"
#include "quadcorr/constructor.hpp"
#include "quadcorr/demo.hpp"
#include "quadcorr/expsum.hpp"
#include "quadcorr/exactreal.hpp"
#include "quadcorr/latcount.hpp"
#include "quadcorr/modcount.hpp"
#include "quadcorr/paircorr.hpp"

namespace quadcorr {

enum class SuiteLevel { smoke, desk };

inline SuiteLevel parse_level(std::string_view s) {
    if (s == "desk") return SuiteLevel::desk;
    if (s == "smoke") return SuiteLevel::smoke;
    throw InvalidArgument("unknown suite level '" + std::string(s) + "' (expected desk or smoke)");
}

struct SuiteOptions {
    SuiteLevel level = SuiteLevel::desk;
    u64 seed = 20240601;
    std::optional<std::string> golden_path;  // certificate for the A9 golden window
};

struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = false;
    double seconds = 0;
    double time_limit = 0;
    std::vector<std::string> notes;     // reported values
    std::vector<std::string> failures;  // violating instances
};

namespace detail {

class Criterion {
public:
    Criterion(std::string id, std::string title, double limit) {
        r_.id = std::move(id);
        r_.title = std::move(title);
        r_.time_limit = limit;
        start_ = std::chrono::steady_clock::now();
    }

    void note(std::string s) { r_.notes.push_back(std::move(s)); }

    /// Records a violation; only the first few are kept verbatim.
    bool expect(bool ok, const std::function<std::string()>& what) {
        if (ok) return true;
        ++fail_count_;
        if (r_.failures.size() < 20) r_.failures.push_back(what());
        return false;
    }

    CriterionResult finish() {
        r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        expect(r_.seconds < r_.time_limit, [&] {
            return "runtime " + format_double(r_.seconds) + " s exceeds " + format_double(r_.time_limit) + " s";
        });
        if (fail_count_ > r_.failures.size())
            r_.failures.push_back("... " + std::to_string(fail_count_ - r_.failures.size()) + " more");
        r_.passed = fail_count_ == 0;
        return r_;
    }

private:
    CriterionResult r_;
    std::size_t fail_count_ = 0;
    std::chrono::steady_clock::time_point start_;
};

inline std::size_t scaled(SuiteLevel level, std::size_t desk, std::size_t smoke) {
    return level == SuiteLevel::desk ? desk : smoke;
}

inline u64 random_nonsquare(Rng& rng, u64 lo, u64 hi) {
    for (;;) {
        u64 n = uniform_in(rng, lo, hi);
        if (!is_perfect_square(BigInt(n))) return n;
    }
}

/// Quadratic irrationals, rationals and decimals in roughly equal shares.
inline RealSource random_alpha(Rng& rng) {
    switch (uniform_below(rng, 3)) {
        case 0: {
            i64 u = static_cast<i64>(uniform_below(rng, 101)) - 50;
            u64 n = random_nonsquare(rng, 2, 1000), v = uniform_in(rng, 1, 100);
            return RealSource::quadratic(BigInt(u), uniform_below(rng, 2) ? 1 : -1, BigInt(n), BigInt(v));
        }
        case 1: {
            u64 q = uniform_in(rng, 2, 1000000);
            return RealSource::rational(Rational(BigInt(uniform_below(rng, q)), BigInt(q)));
        }
        default: {
            std::string s = "dec:0.";
            for (int i = 0; i < 30; ++i) s += static_cast<char>('0' + uniform_below(rng, 10));
            return RealSource::parse(s);
        }
    }
}

/// Explicit sequences: random rationals (sometimes with repeated points),
/// doubles, or quadratic sequences.
inline SequenceModOne random_sequence(Rng& rng, std::size_t N) {
    switch (uniform_below(rng, 4)) {
        case 0: {
            u64 D = uniform_in(rng, 2, 1000000);
            std::vector<u64> r(N);
            for (auto& x : r) x = uniform_below(rng, D);
            return SequenceModOne::from_residues(std::move(r), D, Provenance::explicit_list);
        }
        case 1: {
            // few distinct values, so coincidences and exact-threshold ties occur
            u64 D = uniform_in(rng, 2, 3 * N + 2);
            std::vector<u64> r(N);
            for (auto& x : r) x = uniform_below(rng, D);
            return SequenceModOne::from_residues(std::move(r), D, Provenance::explicit_list);
        }
        case 2: {
            std::vector<double> d(N);
            for (auto& x : d) x = uniform_unit(rng);
            return sequence_from_doubles(d);
        }
        default:
            return quadratic_sequence(random_alpha(rng), N);
    }
}

inline Rational random_X(Rng& rng, u64 N) {
    static const u64 dens[] = {1, 2, 3, 7, 16};
    u64 den = dens[uniform_below(rng, 5)];
    return Rational(BigInt(uniform_in(rng, 1, N * den)), BigInt(den));
}

/// Δ*(q,c)·q² recomputed from scratch for every M.
inline std::vector<u64> delta_star_direct(u64 q) {
    const u64 Mmax = floor_power(q, Rational(2, 3)).convert_to<u64>();
    auto A0 = count_A0_all(q);
    std::vector<u64> out(q, 0);
    for (u64 M = 1; M <= Mmax; ++M) {
        auto A = count_A_all(M, q);
        for (u64 c = 0; c < q; ++c) {
            i128 d = static_cast<i128>(A[c]) * q * q - static_cast<i128>(M) * M * A0[c];
            u64 a = static_cast<u64>(d < 0 ? -d : d);
            out[c] = std::max(out[c], a);
        }
    }
    return out;
}

/// Shortest vector by enumeration over a Cramer-rule coefficient box.
inline std::optional<double> lambda1_brute(const Vec2& u, const Vec2& v) {
    const double det = std::fabs(det2(u, v));
    const double r = std::min(norm2(u), norm2(v));
    const double k1 = std::ceil(r * norm2(v) / det), k2 = std::ceil(r * norm2(u) / det);
    if (k1 > 2000 || k2 > 2000) return std::nullopt;
    double best = r;
    for (i64 a = -static_cast<i64>(k1); a <= static_cast<i64>(k1); ++a)
        for (i64 b = -static_cast<i64>(k2); b <= static_cast<i64>(k2); ++b) {
            if (a == 0 && b == 0) continue;
            best = std::min(best, std::hypot(a * u[0] + b * v[0], a * u[1] + b * v[1]));
        }
    return best;
}

inline std::string str(const Rational& r) {
    return to_string(r);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CriterionResult criterion_A1(const SuiteOptions& o) {
    detail::Criterion c("A1", "sorted-window and uv-decomposition counts match direct counts", 30);
    Rng rng(o.seed ^ 0xA1);
    const Rational Xs[] = {Rational(0), Rational(1, 2), Rational(1), Rational(3)};
    const std::size_t seqs = detail::scaled(o.level, 200, 20);
    for (std::size_t i = 0; i < seqs; ++i) {
        std::size_t N = uniform_in(rng, 1, 1000);
        auto seq = detail::random_sequence(rng, N);
        for (auto& X : Xs) {
            u64 fast = pair_correlation(seq, X).pair_count, slow = pair_correlation_naive(seq, X).pair_count;
            c.expect(fast == slow, [&] {
                return "sequence " + std::to_string(i) + " (" + to_string(seq.provenance()) + ", N=" + std::to_string(N) +
                       ") X=" + detail::str(X) + ": sorted " + std::to_string(fast) + " vs naive " + std::to_string(slow);
            });
        }
    }
    c.note(std::to_string(seqs) + " sequences x 4 windows compared");
    const std::size_t alphas = detail::scaled(o.level, 50, 8);
    for (std::size_t i = 0; i < alphas; ++i) {
        auto alpha = detail::random_alpha(rng);
        std::size_t N = uniform_in(rng, 1, 2000);
        auto seq = quadratic_sequence(alpha, N);
        for (auto& X : Xs) {
            u64 uv = pair_correlation_uv(alpha, N, X).pair_count, direct = pair_correlation(seq, X).pair_count;
            c.expect(uv == direct, [&] {
                return "alpha " + alpha.label() + " N=" + std::to_string(N) + " X=" + detail::str(X) + ": uv " +
                       std::to_string(uv) + " vs direct " + std::to_string(direct);
            });
        }
    }
    c.note(std::to_string(alphas) + " alphas x 4 windows compared");
    return c.finish();
}

inline CriterionResult criterion_A2(const SuiteOptions& o) {
    detail::Criterion c("A2", "weighted pair correlation lower bounds, subadditivity and integral identities", 60);
    Rng rng(o.seed ^ 0xA2);
    // violations split by whether the window wraps past half the circle (2X > N)
    std::map<std::string, std::array<std::size_t, 2>> tally;
    auto check = [&](const std::string& kind, bool wraps, bool ok, const std::function<std::string()>& what) {
        auto& t = tally[kind];
        if (!ok) ++t[wraps ? 1 : 0];
        c.expect(ok, what);
    };
    const std::size_t seqs = detail::scaled(o.level, 200, 20);
    for (std::size_t i = 0; i < seqs; ++i) {
        std::size_t N = uniform_in(rng, 1, 300);
        auto seq = detail::random_sequence(rng, N);
        const Rational X = detail::random_X(rng, N);
        const bool wraps = 2 * X > BigInt(N);
        const auto w = weighted_pair_correlation(seq, X);
        const Rational xi = X - floor(X);
        auto where = [&] {
            return "sequence " + std::to_string(i) + " (" + to_string(seq.provenance()) + ", N=" + std::to_string(N) +
                   ") X=" + detail::str(X);
        };
        // exact sequences compare rationals; approximate ones compare to 1e-12
        auto at_least = [&](const PairCorrResult& r, const Rational& bound) {
            if (r.R0_exact) return *r.R0_exact >= bound;
            return *r.R0 >= to_double(bound) - 1e-12 * std::max(1.0, to_double(bound));
        };
        auto shown = [](const PairCorrResult& r) { return r.R0_exact ? detail::str(*r.R0_exact) : format_double(*r.R0); };
        check("R0 >= max(1,X)", wraps, at_least(w, std::max(Rational(1), X)),
              [&] { return where() + ": R0 = " + shown(w) + " < max(1, X)"; });
        check("R0 >= X+(xi-xi^2)/X", wraps, at_least(w, X + (xi - xi * xi) / X),
              [&] { return where() + ": R0 = " + shown(w) + " < X + (xi - xi^2)/X"; });
        // subadditivity with a second window, keeping X + Y <= N
        if (X < BigInt(N)) {
            Rational Y = detail::random_X(rng, N);
            if (X + Y > BigInt(N)) Y = BigInt(N) - X;
            auto a = weighted_pair_correlation(seq, X + Y), b = weighted_pair_correlation(seq, Y);
            bool ok = w.R0_exact ? *a.R0_exact <= *w.R0_exact + *b.R0_exact
                                 : *a.R0 <= *w.R0 + *b.R0 + 1e-12 * (*w.R0 + *b.R0);
            check("subadditivity", 2 * (X + Y) > BigInt(N), ok,
                  [&] { return where() + " Y=" + detail::str(Y) + ": R0(X+Y) = " + shown(a) + " > R0(X) + R0(Y)"; });
        }
        const auto id = verify_integral_identities(seq, X);
        check("int L = X", wraps, id.int_L_ok, [&] { return where() + ": int L != X"; });
        check("X R0 = int L^2", wraps, id.g_ok, [&] { return where() + ": X R0 != int L^2"; });
        check("R0 = 1 + (2/X) int R", wraps, id.add_ok, [&] { return where() + ": R0 != 1 + (2/X) int R"; });
    }
    {
        auto r = weighted_pair_correlation(equally_spaced_sequence(100), Rational(3, 2));
        c.expect(*r.R0_exact == Rational(5, 3), [&] { return "equally spaced N=100 X=3/2: R0 = " + detail::str(*r.R0_exact); });
        c.expect(std::fabs(*r.R0 - 5.0 / 3.0) <= 1e-12, [&] { return "equally spaced N=100 X=3/2: float R0 off"; });
        c.note("equally spaced N=100, X=3/2: R0 = " + detail::str(*r.R0_exact));
    }
    const std::size_t eq = detail::scaled(o.level, 100, 10);
    for (std::size_t i = 0; i < eq; ++i) {
        std::size_t N = uniform_in(rng, 2, 200);
        Rational X = detail::random_X(rng, N);
        auto r = weighted_pair_correlation(equally_spaced_sequence(N), X);
        const Rational want = equally_spaced_reference(X);
        check("equally spaced equality", 2 * X > BigInt(N),
              *r.R0_exact == want && std::fabs(*r.R0 - to_double(want)) <= 1e-12 * to_double(want), [&] {
                  return "equally spaced N=" + std::to_string(N) + " X=" + detail::str(X) + ": R0 = " +
                         detail::str(*r.R0_exact) + " vs " + detail::str(want);
              });
    }
    for (auto& [kind, t] : tally)
        c.note(kind + ": violations with 2X <= N: " + std::to_string(t[0]) + ", with 2X > N: " + std::to_string(t[1]));
    return c.finish();
}

inline CriterionResult criterion_A3(const SuiteOptions& o) {
    detail::Criterion c("A3", "quadratic exponential sums, A0 totals and the hyperbola count", 60);
    Rng rng(o.seed ^ 0xA3);
    auto vec_str = [](const Vec4& b) {
        return "(" + std::to_string(b[0]) + "," + std::to_string(b[1]) + "," + std::to_string(b[2]) + "," +
               std::to_string(b[3]) + ")";
    };
    const std::size_t per = detail::scaled(o.level, 64, 8);
    for (u64 p : {3, 5, 7, 11, 13}) {
        for (std::size_t i = 0; i < per; ++i) {
            Vec4 b;
            for (auto& x : b) x = static_cast<i64>(uniform_below(rng, 3 * p)) - static_cast<i64>(p);
            const i64 closed = quad_sum_prime(b, p);
            const auto brute = quad_sum_brute(b, p);
            c.expect(brute.contains(static_cast<double>(closed)) && std::fabs(brute.im) <= brute.err + 1e-9, [&] {
                return "p=" + std::to_string(p) + " b=" + vec_str(b) + ": closed " + std::to_string(closed) + " vs brute " +
                       format_double(brute.re);
            });
        }
    }
    // the three closed-form cases at p = 3
    const std::pair<Vec4, i64> cases[] = {{{0, 0, 0, 0}, 33}, {{1, 0, 1, 0}, 6}, {{1, 0, 0, 0}, -3}};
    for (auto& [b, want] : cases) {
        i64 got = quad_sum_prime(b, 3);
        auto brute = quad_sum_brute(b, 3);
        c.expect(got == want && brute.contains(static_cast<double>(want)), [&] {
            return "p=3 b=" + vec_str(b) + ": closed " + std::to_string(got) + ", brute " + format_double(brute.re) +
                   ", expected " + std::to_string(want);
        });
    }
    for (u64 q : {15, 21, 35}) {
        for (std::size_t i = 0; i < per; ++i) {
            Vec4 b;
            for (auto& x : b) x = static_cast<i64>(uniform_below(rng, q));
            auto prod = quad_sum(b, q);
            auto brute = quad_sum_brute(b, q);
            c.expect(std::hypot(prod.re - brute.re, prod.im - brute.im) <= prod.err + brute.err, [&] {
                return "q=" + std::to_string(q) + " b=" + vec_str(b) + ": product " + format_double(prod.re) + " vs brute " +
                       format_double(brute.re);
            });
        }
    }
    const u64 qmax = detail::scaled(o.level, 500, 100);
    for (u64 q = 1; q <= qmax; ++q) {
        auto A0 = count_A0_crt(q);
        u64 total = 0;
        for (u64 v : A0) total += v;
        c.expect(total == q * q, [&] { return "q=" + std::to_string(q) + ": sum_r A0 = " + std::to_string(total); });
        auto direct = count_A0_all(q);
        c.expect(A0 == direct, [&] { return "q=" + std::to_string(q) + ": multiplicative A0 differs from direct"; });
    }
    c.note("sum_r A0(q,r) = q^2 checked for q <= " + std::to_string(qmax));
    u64 hyper = 0;
    for (u64 q = 3; q <= 200; q += 2) {
        if (!is_squarefree(q)) continue;
        auto A0 = count_A0_crt(q);
        for (u64 r = 0; r < q; ++r) {
            u64 h = hyperbola_count(q, r);
            c.expect(h == A0[r], [&] {
                return "q=" + std::to_string(q) + " r=" + std::to_string(r) + ": hyperbola " + std::to_string(h) + " vs A0 " +
                       std::to_string(A0[r]);
            });
        }
        ++hyper;
    }
    c.note("hyperbola count = A0 on " + std::to_string(hyper) + " odd squarefree moduli <= 200");
    return c.finish();
}

/// Moduli for the dispersion sweep: primes, squarefree composites, prime powers.
inline const std::vector<u64>& dispersion_moduli() {
    static const std::vector<u64> m = {
        101,  211,  401,  601,  809,  1009, 1201, 1409, 1511, 1801, 2003, 2503, 2801, 2999,  // primes
        105,  385,  455,  1001, 1155, 1365, 1505, 1995, 2001, 2415, 2431, 2805,              // squarefree
        121,  125,  128,  243,  343,  729,  1024, 1331, 1681, 2048, 2187, 2197, 2401, 1849,  // prime powers
    };
    return m;
}

inline CriterionResult criterion_A4(const SuiteOptions& o) {
    detail::Criterion c("A4", "incremental dispersion maxima and the calibrated dispersion ratio", 600);
    const u64 qdirect = detail::scaled(o.level, 100, 40);
    for (u64 q = 2; q <= qdirect; ++q) {
        auto inc = delta_star_profile(q).delta_star_num;
        auto dir = detail::delta_star_direct(q);
        c.expect(inc == dir, [&] { return "q=" + std::to_string(q) + ": incremental Delta* differs from direct"; });
    }
    c.note("Delta* incremental = direct for 2 <= q <= " + std::to_string(qdirect));
    double lower = 0, upper = 0;
    std::vector<u64> moduli = dispersion_moduli();
    if (o.level == SuiteLevel::smoke) moduli = {101, 105, 121, 1009, 1024, 1801, 2001, 2187};
    for (u64 q : moduli) {
        auto rep = dispersion_report(q, std::nullopt);
        c.note("q=" + std::to_string(q) + " q1=" + std::to_string(rep.q1) + " ratio=" + format_double(rep.ratio) +
               " |B(q)|=" + std::to_string(*rep.card_bad_set));
        if (q >= 100 && q < 1500) lower = std::max(lower, rep.ratio);
        if (q >= 1500 && q <= 3000) upper = std::max(upper, rep.ratio);
    }
    c.note("max ratio on [100,1500) = " + format_double(lower) + ", on [1500,3000] = " + format_double(upper));
    c.expect(upper <= 2 * lower, [&] {
        return "max ratio over [1500,3000] " + format_double(upper) + " exceeds twice the max over [100,1500) " +
               format_double(lower);
    });
    return c.finish();
}

inline CriterionResult criterion_A5(const SuiteOptions& o) {
    detail::Criterion c("A5", "hyperbola counts in residue classes", 30);
    Rng rng(o.seed ^ 0xA5);
    {
        auto h = hyperbola_ap_count(10, 7, 1);
        c.expect(h.count == 13 && std::fabs(h.expected - 600.0 / 49.0) < 1e-9, [&] {
            return "N=10 q=7 c=1: count " + std::to_string(h.count) + " expected " + format_double(h.expected);
        });
    }
    const std::size_t samples = detail::scaled(o.level, 50, 10);
    const u64 N = 3000;
    for (u64 q : {101, 1009}) {
        double sum = 0, lo = 1e300, hi = 0;
        for (std::size_t i = 0; i < samples; ++i) {
            u64 cc;
            do cc = uniform_in(rng, 1, q - 1);
            while (std::gcd(cc, q) != 1);
            auto h = hyperbola_ap_count(N, q, cc);
            sum += h.ratio;
            lo = std::min(lo, h.ratio);
            hi = std::max(hi, h.ratio);
            c.expect(h.ratio >= 0.2 && h.ratio <= 10, [&] {
                return "q=" + std::to_string(q) + " c=" + std::to_string(cc) + ": ratio " + format_double(h.ratio);
            });
        }
        const double mean = sum / static_cast<double>(samples);
        c.note("q=" + std::to_string(q) + ": ratio min " + format_double(lo) + " max " + format_double(hi) + " mean " +
               format_double(mean));
        c.expect(mean >= 0.8 && mean <= 1.3, [&] { return "q=" + std::to_string(q) + ": mean ratio " + format_double(mean); });
    }
    return c.finish();
}

inline CriterionResult criterion_A6(const SuiteOptions& o) {
    detail::Criterion c("A6", "lattice counts, shortest vectors and V-family bounds", 120);
    Rng rng(o.seed ^ 0xA6);
    double worst_lat0 = 0;
    const std::size_t inst = detail::scaled(o.level, 100, 15);
    for (std::size_t i = 0; i < inst; ++i) {
        const u64 M = uniform_in(rng, 1, 3000);
        const RealSource beta = detail::random_alpha(rng);
        const u64 den = uniform_in(rng, 3, 5000);
        const Rational delta(BigInt(uniform_in(rng, 1, (den - 1) / 2)), BigInt(den));  // 0 < delta < 1/2
        auto pl = pair_lattice(M, beta, delta);
        auto sc = lattice_square_count(pl);
        const u64 R = near_multiple_count(M, beta, delta);
        c.expect(sc.count == 1 + 2 * R, [&] {
            return "M=" + std::to_string(M) + " beta=" + beta.label() + " delta=" + detail::str(delta) + ": square count " +
                   std::to_string(sc.count) + " vs 1+2R = " + std::to_string(1 + 2 * R);
        });
        const double S = std::sqrt(to_double(delta * BigInt(M)));
        const double dev = std::fabs(static_cast<double>(sc.count) - 4 * to_double(delta * BigInt(M)));
        const double cap = 32 * (S / pl.basis.lambda1 + 1);
        worst_lat0 = std::max(worst_lat0, dev / cap);
        c.expect(dev <= cap, [&] { return "pair lattice M=" + std::to_string(M) + ": deviation " + format_double(dev); });
    }
    const std::size_t bases = detail::scaled(o.level, 500, 50);
    std::size_t compared = 0;
    for (std::size_t i = 0; i < bases; ++i) {
        Vec2 u{uniform_unit(rng) * 20 - 10, uniform_unit(rng) * 20 - 10};
        Vec2 v{uniform_unit(rng) * 20 - 10, uniform_unit(rng) * 20 - 10};
        if (std::fabs(detail::det2(u, v)) < 0.5) continue;
        auto brute = detail::lambda1_brute(u, v);
        if (!brute) continue;
        ++compared;
        auto red = gauss_reduce(LatticeBasis2{u, v, detail::det2(u, v), 0, {1, 0, 0, 1}});
        c.expect(std::fabs(red.lambda1 - *brute) <= 1e-9 * *brute, [&] {
            return "basis " + std::to_string(i) + ": reduced " + format_double(red.lambda1) + " vs brute " + format_double(*brute);
        });
        const double S = 1 + uniform_unit(rng) * 40;
        auto sc = lattice_square_count(make_lattice(u, v), S);
        const double dev = std::fabs(static_cast<double>(sc.count) - sc.main);
        const double cap = 32 * (S / red.lambda1 + 1);
        worst_lat0 = std::max(worst_lat0, dev / cap);
        c.expect(dev <= cap, [&] { return "basis " + std::to_string(i) + " S=" + format_double(S) + ": deviation " + format_double(dev); });
    }
    c.note("shortest vectors compared on " + std::to_string(compared) + " bases");
    c.note("max lattice deviation / (32(S/lambda1 + 1)) = " + format_double(worst_lat0));
    double r_simp = 0, r_v1 = 0, r_v2 = 0;
    const std::size_t vin = detail::scaled(o.level, 40, 6);
    for (std::size_t i = 0; i < vin; ++i) {
        VCountSpec s;
        s.A = uniform_in(rng, 2, 300);
        s.B = uniform_in(rng, s.A, 600);
        const u64 den = uniform_in(rng, 2, 100000);
        s.Delta = Rational(BigInt(uniform_in(rng, 1, den / 2)), BigInt(den));
        s.alpha = RealSource::quadratic(BigInt(0), 1, BigInt(detail::random_nonsquare(rng, 2, 500)),
                                        BigInt(uniform_in(rng, 1, 20)));
        s.P0 = uniform_in(rng, 2, std::max<u64>(2, s.A / 4));
        s.P1 = uniform_in(rng, s.P0, s.A);
        const u64 V = v_count(s);
        const VSplit sp = v_split(s);
        auto where = [&] {
            return "A=" + std::to_string(s.A) + " B=" + std::to_string(s.B) + " Delta=" + detail::str(s.Delta) + " alpha=" +
                   s.alpha.label() + " P0=" + std::to_string(s.P0) + " P1=" + std::to_string(s.P1);
        };
        c.expect(V == sp.v1 + sp.v2_total(), [&] {
            return where() + ": V = " + std::to_string(V) + " but V1 + sum V2(P) = " + std::to_string(sp.v1 + sp.v2_total());
        });
        const double ABD = static_cast<double>(s.A) * static_cast<double>(s.B) * to_double(s.Delta);
        const double simp = 8 * (ABD + static_cast<double>(std::min(s.A, s.B)));
        const double v1b = 32 * (ABD + static_cast<double>(s.A) * std::log(static_cast<double>(s.P0)) /
                                           std::log(static_cast<double>(s.P1)));
        const double v2b = 32 * (ABD * std::log(static_cast<double>(s.P1)) + static_cast<double>(s.B) / static_cast<double>(s.P0));
        r_simp = std::max(r_simp, V / simp);
        r_v1 = std::max(r_v1, sp.v1 / v1b);
        r_v2 = std::max(r_v2, sp.v2_total() / v2b);
        c.expect(V <= simp, [&] { return where() + ": V = " + std::to_string(V) + " above 8(AB Delta + min(A,B))"; });
        c.expect(sp.v1 <= v1b, [&] { return where() + ": V1 = " + std::to_string(sp.v1) + " above its ceiling"; });
        c.expect(sp.v2_total() <= v2b, [&] { return where() + ": V2 = " + std::to_string(sp.v2_total()) + " above its ceiling"; });
    }
    c.note("max V/ceiling " + format_double(r_simp) + ", V1/ceiling " + format_double(r_v1) + ", V2/ceiling " +
           format_double(r_v2));
    return c.finish();
}

inline CriterionResult criterion_A7(const SuiteOptions& o) {
    detail::Criterion c("A7", "pair correlation of quadratic sequences against X", 120);
    const std::size_t N = detail::scaled(o.level, 100000, 20000);
    const Rational Xs[] = {Rational(1, 2), Rational(1), Rational(2), Rational(4), Rational(8), Rational(16)};
    for (const char* spec : {"sqrt:2", "ratio:(1+sqrt:5)/2"}) {
        auto alpha = RealSource::parse(spec);
        auto seq = quadratic_sequence(alpha, N);
        std::string row = std::string(spec) + " N=" + std::to_string(N) + ":";
        for (auto& X : Xs) {
            const double R = pair_correlation(seq, X).R, x = to_double(X);
            const double cap = std::max(0.2, 2 * std::pow(x, 7.0 / 8.0));
            row += " R(" + detail::str(X) + ")=" + format_double(R);
            c.expect(std::fabs(R - x) <= cap, [&] {
                return std::string(spec) + " X=" + detail::str(X) + ": R = " + format_double(R) + ", |R-X| above " +
                       format_double(cap);
            });
        }
        c.note(row);
    }
    // the constructor's output for I = [1/3, 2/5], q from 10 to 2000
    const RationalInterval I(Rational(1, 3), Rational(2, 5));
    try {
        auto res = construct_alpha(I, 10, 2000);
        auto seq = quadratic_sequence(RealSource::rational(res.final_value), N);
        const double R = pair_correlation(seq, Rational(1)).R;
        c.note("constructed alpha " + detail::str(res.final_value) + ": R(1) = " + format_double(R));
        c.expect(std::fabs(R - 1) <= 0.15, [&] { return "constructed alpha: |R(1) - 1| = " + format_double(std::fabs(R - 1)); });
    } catch (const Error& e) {
        c.expect(false, [&] { return std::string("constructor on [1/3, 2/5] with q in [10, 2000]: ") + e.what(); });
        try {
            ConstructOptions opt;
            opt.enforce_budget = false;
            construct_alpha(I, 10, 2000, kDefaultEta, opt);
        } catch (const EmptyFeasibleSet& e2) {
            c.note(std::string("without the budget check: ") + e2.what());
        }
    }
    return c.finish();
}

inline CriterionResult criterion_A8(const SuiteOptions& o) {
    (void)o;
    detail::Criterion c("A8", "rational counterexample family", 5);
    const Rational X(3, 10);
    {
        auto r = demo_counterexample(1009, X, o.seed);
        c.note("q=1009 a=" + std::to_string(r.a) + ": R = " + format_double(r.result.R) + ", family pairs " +
               std::to_string(r.family_pairs));
        c.expect(r.result.R >= 0.49, [&] { return "q=1009: R = " + format_double(r.result.R); });
        c.expect(r.family_pairs == 504, [&] { return "q=1009: family pairs " + std::to_string(r.family_pairs); });
    }
    {
        auto r = demo_counterexample(13, X, o.seed);
        c.note("q=13 a=" + std::to_string(r.a) + ": R = " + detail::str(r.result.R_exact()));
        c.expect(r.result.R_exact() >= Rational(6, 13), [&] { return "q=13: R = " + detail::str(r.result.R_exact()); });
    }
    return c.finish();
}

/// Window used by the A9 golden certificate.
inline constexpr u64 kGoldenQStart = 200, kGoldenQMax = 220;

inline std::string golden_certificate_text() {
    const RationalInterval I(Rational(1, 3), Rational(2, 5));
    return certificate_json(construct_alpha(I, kGoldenQStart, kGoldenQMax)).dump(2) + "\n";
}

inline CriterionResult criterion_A9(const SuiteOptions& o) {
    detail::Criterion c("A9", "constructor integrity and certificate determinism", 120);
    const RationalInterval I(Rational(1, 3), Rational(2, 5));
    const u64 qs = detail::scaled(o.level, 1800, 400), qm = detail::scaled(o.level, 2000, 440);
    std::vector<RationalInterval> prev;
    Rational prev_r = -1;
    std::size_t steps = 0;
    ConstructOptions opt;
    opt.on_step = [&](u64 k, const IntervalSet& F) {
        ++steps;
        auto cur = F.intervals();
        const Rational r = cur.front().lo;
        c.expect(r >= prev_r, [&] { return "k=" + std::to_string(k) + ": r_k decreased"; });
        c.expect(I.contains(r) && F.contains(r), [&] { return "k=" + std::to_string(k) + ": r_k outside I or F_k"; });
        // nesting: every part of F_k sits inside a part of F_{k-1}
        std::size_t j = 0;
        bool nested = true;
        for (auto& p : cur) {
            while (j < prev.size() && prev[j].hi < p.lo) ++j;
            if (!prev.empty() && (j == prev.size() || !(prev[j].contains(p.lo) && prev[j].contains(p.hi)))) nested = false;
        }
        c.expect(nested, [&] { return "k=" + std::to_string(k) + ": F_k not inside F_{k-1}"; });
        prev = std::move(cur);
        prev_r = r;
    };
    try {
        auto res = construct_alpha(I, qs, qm, kDefaultEta, opt);
        c.expect(!res.final_set.empty(), [] { return std::string("final set empty"); });
        c.expect(res.violations.empty(), [&] { return std::to_string(res.violations.size()) + " violations for final"; });
        auto again = verify_avoidance(res.final_value, qs, qm);
        c.expect(again.empty(), [&] { return "verify_avoidance(final) lists " + std::to_string(again.size()) + " intervals"; });
        c.note("q in [" + std::to_string(qs) + ", " + std::to_string(qm) + "]: " + std::to_string(steps) +
               " steps, final = " + detail::str(res.final_value) + ", " + std::to_string(res.final_set.size()) +
               " parts, bad measure " + format_double(to_double(res.measures.total())));
    } catch (const Error& e) {
        c.expect(false, [&] { return std::string("construct_alpha: ") + e.what(); });
    }
    const std::string a = golden_certificate_text(), b = golden_certificate_text();
    c.expect(a == b, [] { return std::string("two certificate runs differ"); });
    if (o.golden_path) {
        std::ifstream in(*o.golden_path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        c.expect(in.good() || in.eof(), [&] { return "cannot read golden certificate " + *o.golden_path; });
        c.expect(ss.str() == a, [&] { return "certificate differs from " + *o.golden_path; });
        c.note("golden certificate matched byte for byte");
    } else {
        c.note("no golden file given; compared two runs only");
    }
    return c.finish();
}

// ---------------------------------------------------------------------------

using CriterionFn = CriterionResult (*)(const SuiteOptions&);

inline const std::vector<std::pair<std::string, CriterionFn>>& criteria() {
    static const std::vector<std::pair<std::string, CriterionFn>> all = {
        {"A1", criterion_A1}, {"A2", criterion_A2}, {"A3", criterion_A3}, {"A4", criterion_A4}, {"A5", criterion_A5},
        {"A6", criterion_A6}, {"A7", criterion_A7}, {"A8", criterion_A8}, {"A9", criterion_A9},
    };
    return all;
}

/// Runs the selected criteria (all when `only` is empty), streaming a block
/// per criterion to `out`.
inline std::vector<CriterionResult> run_suite(const SuiteOptions& o, const std::vector<std::string>& only,
                                              std::ostream& out) {
    for (auto& id : only) {
        bool known = std::any_of(criteria().begin(), criteria().end(), [&](auto& p) { return p.first == id; });
        require(known, "unknown criterion '" + id + "'");
    }
    std::vector<CriterionResult> results;
    for (auto& [id, fn] : criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        CriterionResult r;
        try {
            r = fn(o);
        } catch (const std::exception& e) {
            r.id = id;
            r.title = "aborted";
            r.failures.push_back(std::string("exception: ") + e.what());
        }
        for (auto& n : r.notes) out << "  " << r.id << "  " << n << "\n";
        for (auto& f : r.failures) out << "  " << r.id << "  violation: " << f << "\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", r.seconds);
        out << r.id << " " << (r.passed ? "PASS" : "FAIL") << "  " << r.title << "  (" << buf << " s)\n";
        out.flush();
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace quadcorr
