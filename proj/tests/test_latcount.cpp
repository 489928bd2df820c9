#include <gtest/gtest.h>

#include "oracles.hpp"
#include "quadcorr/latcount.hpp"

#include <variant>

using namespace quadcorr;

namespace {

struct Alpha {
    RealSource src;
    std::variant<oracle::Rat, oracle::Hp> value;
};

Alpha random_alpha(Rng& rng) {
    if (uniform_below(rng, 3) == 0) {
        u64 q = uniform_in(rng, 2, 40), a = uniform_below(rng, q);
        return {RealSource::rational(Rational(BigInt(a), BigInt(q))), oracle::Rat(a, q)};
    }
    u64 n = uniform_in(rng, 2, 999);
    if (is_perfect_square(n)) ++n;
    return {RealSource::parse("sqrt:" + std::to_string(n)), oracle::hp_sqrt(n)};
}

Rational random_delta(Rng& rng, u64 max_den) {
    u64 d = uniform_in(rng, 3, max_den);
    return Rational(BigInt(uniform_in(rng, 1, (d - 1) / 2)), BigInt(d));
}

}  // namespace

TEST(NearMultiples, HandValues) {
    EXPECT_EQ(near_multiple_count(10, RealSource::rational(Rational(1, 2)), Rational(1, 5)), 5u);
    EXPECT_EQ(near_multiple_count(10, RealSource::rational(Rational(1, 3)), Rational(1, 10)), 3u);
    EXPECT_EQ(near_multiple_count(37, RealSource::rational(0), 0), 37u);
    EXPECT_EQ(near_multiple_count(1000, RealSource::parse("sqrt:2"), Rational(1, 100)), 19u);
}

TEST(NearMultiples, DecimalOracle) {
    Rng rng(41);
    for (int it = 0; it < 60; ++it) {
        auto a = random_alpha(rng);
        u64 M = uniform_in(rng, 1, 2000);
        Rational d = random_delta(rng, 300);
        ASSERT_EQ(near_multiple_count(M, a.src, d), std::visit([&](auto& b) { return oracle::near_multiples(M, b, d); }, a.value)) << a.src.label() << " " << M;
    }
}

TEST(PairLattice, ExplicitBases) {
    auto pl = pair_lattice(4, RealSource::rational(0), Rational(1, 4));
    EXPECT_DOUBLE_EQ(pl.basis.u[0], 0.25);
    EXPECT_DOUBLE_EQ(pl.basis.u[1], 0);
    EXPECT_DOUBLE_EQ(pl.basis.v[0], 0);
    EXPECT_DOUBLE_EQ(pl.basis.v[1], -4);
    EXPECT_DOUBLE_EQ(pl.basis.det, -1);

    auto q = pair_lattice(1, RealSource::rational(Rational(1, 2)), Rational(1, 2));
    EXPECT_NEAR(q.basis.u[0], std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(q.basis.u[1], std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(q.basis.v[1], -std::sqrt(2.0), 1e-15);

    Rng rng(42);
    for (int it = 0; it < 200; ++it) {
        auto a = random_alpha(rng);
        auto p = pair_lattice(uniform_in(rng, 1, 1000000), a.src, random_delta(rng, 100000));
        ASSERT_NEAR(std::fabs(p.basis.det), 1.0, 1e-12);
        ASSERT_LE(p.basis.lambda1 * p.basis.lambda1, std::sqrt(4.0 / 3.0) * std::fabs(p.basis.det) * (1 + 1e-12));
        ASSERT_LE(p.basis.lambda1, std::min(norm2(p.basis.u), norm2(p.basis.v)) * (1 + 1e-12));
    }
    EXPECT_THROW(pair_lattice(4, RealSource::rational(0), 1), InvalidArgument);
}

TEST(GaussReduce, SmallExamples) {
    EXPECT_DOUBLE_EQ(gauss_reduce(make_lattice({1, 0}, {0, 1})).lambda1, 1);
    EXPECT_NEAR(gauss_reduce(make_lattice({3, 0}, {4, 1})).lambda1, std::sqrt(2.0), 1e-15);
    // shortest vector 2v − u = (0, 0.002), found by a [−10,10]² scan
    EXPECT_NEAR(gauss_reduce(make_lattice({1, 0}, {0.5, 1e-3})).lambda1, 0.002, 1e-15);
}

TEST(GaussReduce, BruteForceBox) {
    Rng rng(43);
    int checked = 0;
    while (checked < 500) {
        Vec2 u{uniform_unit(rng) * 2 - 1, uniform_unit(rng) * 2 - 1}, v{uniform_unit(rng) * 2 - 1, uniform_unit(rng) * 2 - 1};
        double det = std::fabs(u[0] * v[1] - u[1] * v[0]);
        if (det == 0 || norm2(u) * norm2(v) / det > 20) continue;
        auto r = gauss_reduce(make_lattice(u, v));
        double want = oracle::shortest(u, v, 50);
        ASSERT_NEAR(r.lambda1, want, 1e-9 * want);
        ASSERT_NEAR(std::fabs(r.det), det, 1e-9 * det);
        ASSERT_LE(r.lambda1 * r.lambda1, std::sqrt(4.0 / 3.0) * det * (1 + 1e-12));
        // the transform maps the input basis onto the reduced one
        auto& t = r.transform;
        ASSERT_NEAR(t[0] * u[0] + t[2] * v[0], r.u[0], 1e-12);
        ASSERT_NEAR(t[0] * u[1] + t[2] * v[1], r.u[1], 1e-12);
        ASSERT_EQ(std::llabs(t[0] * t[3] - t[1] * t[2]), 1);
        ++checked;
    }
}

TEST(GaussReduce, IllConditionedPairLattice) {
    // condition number M/δ = 10¹³; λ₁ from a scan of x with y = round(βx)
    const u64 M = 100000;
    const Rational delta(1, 100000000);
    auto pl = pair_lattice(M, RealSource::parse("sqrt:2"), delta);
    auto r = reduce_pair_lattice(pl);
    EXPECT_NEAR(std::fabs(r.det), 1.0, 1e-9);
    const long double b = std::sqrt(2.0L), d = 1e-8L, m = M;
    // coarse scan in long double, then the best few rescored at 100 digits
    std::vector<std::pair<long double, i64>> top;
    const i64 X = static_cast<i64>(1.08L * std::sqrt(m / d));
    for (i64 x = 1; x <= X; ++x) {
        long double e = b * x - std::nearbyint(b * x);
        long double len = x * x * d / m + e * e * m / d;
        if (len > 1.2L) continue;
        top.push_back({len, x});
    }
    std::sort(top.begin(), top.end());
    top.resize(std::min<std::size_t>(top.size(), 8));
    oracle::Hp best = 1;  // (0, ±1) has length sqrt(M/δ) > 1
    for (auto [len, x] : top) {
        oracle::Hp t = oracle::hp_sqrt(2) * x;
        oracle::Hp e = t - boost::multiprecision::round(t);
        oracle::Hp l = oracle::Hp(x) * x / oracle::Hp(10000000000000) + e * e * oracle::Hp(10000000000000);
        best = std::min(best, l);
    }
    EXPECT_NEAR(r.lambda1, static_cast<double>(boost::multiprecision::sqrt(best)), 1e-12);
    EXPECT_DOUBLE_EQ(pl.basis.lambda1, r.lambda1);
    EXPECT_LE(r.lambda1 * r.lambda1, std::sqrt(4.0 / 3.0) * (1 + 1e-9));
}

TEST(SquareCount, IdentityLattice) {
    auto b = make_lattice({1, 0}, {0, 1});
    auto c = lattice_square_count(b, 2.5);
    EXPECT_EQ(c.count, 25u);
    EXPECT_DOUBLE_EQ(c.main, 25);
    EXPECT_DOUBLE_EQ(c.error_term, 0);
    c = lattice_square_count(b, 2);
    EXPECT_EQ(c.count, 25u);
    EXPECT_DOUBLE_EQ(c.main, 16);
    EXPECT_DOUBLE_EQ(c.error_term, 9);
    EXPECT_LE(c.error_term, 8 * (2 / b.lambda1 + 1));
}

TEST(SquareCount, OnePlusTwoR) {
    EXPECT_EQ(lattice_square_count(pair_lattice(100, RealSource::parse("sqrt:2"), Rational(3, 10))).count,
              1 + 2 * near_multiple_count(100, RealSource::parse("sqrt:2"), Rational(3, 10)));
    Rng rng(44);
    for (int it = 0; it < 100; ++it) {
        auto a = random_alpha(rng);
        u64 M = uniform_in(rng, 1, 1000);
        Rational d = random_delta(rng, 200);
        auto pl = pair_lattice(M, a.src, d);
        ASSERT_EQ(lattice_square_count(pl).count, 1 + 2 * std::visit([&](auto& b) { return oracle::near_multiples(M, b, d); }, a.value)) << a.src.label() << " " << M << " " << d;
    }
}

TEST(SquareCount, GeneralSquaresAgainstEnumeration) {
    Rng rng(45);
    for (int it = 0; it < 50; ++it) {
        Vec2 u{uniform_unit(rng) * 2 - 1, uniform_unit(rng) * 2 - 1}, v{uniform_unit(rng) * 2 - 1, uniform_unit(rng) * 2 - 1};
        double det = std::fabs(u[0] * v[1] - u[1] * v[0]);
        if (det < 0.05) continue;
        double S = 0.5 + 4 * uniform_unit(rng);
        auto b = make_lattice(u, v);
        const i64 K = static_cast<i64>(S * 2 * (norm2(u) + norm2(v)) / det) + 2;
        u64 want = 0;
        for (i64 x = -K; x <= K; ++x)
            for (i64 y = -K; y <= K; ++y) {
                double m = std::max(std::fabs(u[0] * x + v[0] * y), std::fabs(u[1] * x + v[1] * y));
                if (m < S - 1e-9) {
                    ++want;
                } else if (m <= S + 1e-9) {
                    oracle::Rat p0 = oracle::Rat(u[0]) * x + oracle::Rat(v[0]) * y, p1 = oracle::Rat(u[1]) * x + oracle::Rat(v[1]) * y;
                    if (abs(p0) <= oracle::Rat(S) && abs(p1) <= oracle::Rat(S)) ++want;
                }
            }
        auto c = lattice_square_count(b, S);
        ASSERT_EQ(c.count, want);
        ASSERT_NEAR(c.main, 4 * S * S / det, 1e-9 * c.main);
    }
}

TEST(VCounts, HandValues) {
    VCountSpec s;
    s.A = 1;
    s.B = 2;
    s.Delta = Rational(1, 2);
    s.alpha = RealSource::rational(Rational(1, 2));
    EXPECT_EQ(v_count(s), 3u);
    s.A = 30;
    s.B = 30;
    s.Delta = 0;
    s.alpha = RealSource::parse("sqrt:7");
    EXPECT_EQ(v_count(s), 0u);
}

TEST(VCounts, ExhaustiveOracle) {
    Rng rng(46);
    for (int it = 0; it < 20; ++it) {
        auto a = random_alpha(rng);
        VCountSpec s;
        s.A = uniform_in(rng, 1, 25);
        s.B = uniform_in(rng, 1, 25);
        s.Delta = random_delta(rng, 60);
        s.alpha = a.src;
        s.P0 = uniform_in(rng, 1, 10);
        s.P1 = s.P0 + uniform_below(rng, 20);
        ASSERT_EQ(v_count(s), std::visit([&](auto& b) { return oracle::v_count(s.A, s.B, b, s.Delta); }, a.value));
        ASSERT_EQ(v_star_count(s), std::visit([&](auto& b) { return oracle::v_star_count(s.A, s.B, b, s.Delta); }, a.value));

        u64 v1 = 0;
        std::map<u64, u64> v2;
        auto tally = [&](u64 x, u64 y, i64) {
            u64 p = oracle::window_prime(x * y, s.P0, s.P1);
            if (!p) {
                ++v1;
                return;
            }
            u64 P = 1;
            while (2 * P < p) P *= 2;
            ++v2[P];
        };
        std::visit([&](auto& b) { oracle::v_triples(s.A, s.B, b, s.Delta, tally); }, a.value);
        auto sp = v_split(s);
        ASSERT_EQ(sp.v1, v1);
        ASSERT_EQ(sp.v2, v2);
        ASSERT_EQ(v1_count(s) + v2_count(s).v2_total(), v_count(s));
    }
}

TEST(VCounts, ShapeBounds) {
    Rng rng(47);
    for (int it = 0; it < 200; ++it) {
        VCountSpec s;
        s.A = uniform_in(rng, 1, 120);
        s.B = uniform_in(rng, 1, 120);
        s.Delta = Rational(BigInt(uniform_in(rng, 1, 100)), BigInt(uniform_in(rng, 200, 20000)));
        s.alpha = random_alpha(rng).src;
        if (s.alpha.exact()) continue;
        const double A = s.A, B = s.B, D = to_double(s.Delta);
        ASSERT_LE(v_count(s), 8 * (A * B * D + std::min(A, B)));
        if (s.A >= 4) {
            s.P0 = uniform_in(rng, 2, s.A / 2);
            s.P1 = uniform_in(rng, s.P0 + 1, s.A);
            const double lp = std::log(double(s.P0)) / std::log(double(s.P1));
            ASSERT_LE(v1_count(s), 32 * (A * B * D + A * lp));
            if (s.A <= s.B) {
                ASSERT_LE(v2_count(s).v2_total(), 32 * (A * B * D * std::log(double(s.P1)) + B / s.P0));
            }
        }
    }
}

TEST(CoprimeEllipse, Values) {
    EXPECT_EQ(coprime_ellipse_count({1, 0, 1}, 6.25), 16u);
    EXPECT_EQ(coprime_ellipse_count({1, 0, 1}, 0.25), 0u);
    EXPECT_THROW(coprime_ellipse_count({1, 2, 1}, 1), InvalidArgument);
    Rng rng(48);
    for (int it = 0; it < 60; ++it) {
        double a = 0.2 + 3 * uniform_unit(rng), c = 0.2 + 3 * uniform_unit(rng);
        double b = (2 * uniform_unit(rng) - 1) * std::sqrt(a * c) * 0.95, level = 20 * uniform_unit(rng);
        ASSERT_EQ(coprime_ellipse_count({a, b, c}, level), oracle::ellipse_coprime(a, b, c, level, 60));
    }
}

TEST(CoprimeEllipse, AreaBound) {
    Rng rng(49);
    for (int it = 0; it < 1000; ++it) {
        double a = std::exp(6 * uniform_unit(rng) - 3), c = std::exp(6 * uniform_unit(rng) - 3);
        double b = (2 * uniform_unit(rng) - 1) * std::sqrt(a * c) * 0.999;
        QuadraticForm2 f{a, b, c};
        double level = 50 * uniform_unit(rng);
        if (f.area(level) > 5000) continue;
        ASSERT_LE(double(coprime_ellipse_count(f, level)), 16 * (1 + f.area(level)));
    }
}
