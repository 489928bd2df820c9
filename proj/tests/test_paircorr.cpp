#include <gtest/gtest.h>

#include "oracles.hpp"
#include "quadcorr/paircorr.hpp"

using namespace quadcorr;

namespace {

struct Sample {
    std::vector<Rational> pts;
    SequenceModOne seq;
};

// Small common denominators so that ties at the window edge are frequent.
Sample random_rational_sequence(Rng& rng, std::size_t N) {
    static const u64 dens[] = {2, 7, 12, 30, 64, 1000};
    u64 D = dens[uniform_below(rng, 6)];
    Sample s;
    for (std::size_t i = 0; i < N; ++i) s.pts.push_back(Rational(BigInt(uniform_below(rng, D)), BigInt(D)));
    s.seq = sequence_from_rationals(s.pts);
    return s;
}

Rational random_window(Rng& rng, std::size_t N) {
    static const u64 dens[] = {1, 2, 3, 7, 16};
    u64 d = dens[uniform_below(rng, 5)];
    return Rational(BigInt(uniform_in(rng, 1, N * d)), BigInt(d));
}

}  // namespace

TEST(QuadraticSequence, ExactRationals) {
    auto s = quadratic_sequence(RealSource::rational(Rational(1, 2)), 4);
    std::vector<Rational> want{Rational(1, 2), 0, Rational(1, 2), 0};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(s.exact_point(i), want[i]);
    s = quadratic_sequence(RealSource::rational(Rational(1, 3)), 3);
    EXPECT_EQ(s.exact_point(0), Rational(1, 3));
    EXPECT_EQ(s.exact_point(1), Rational(1, 3));
    EXPECT_EQ(s.exact_point(2), 0);
}

TEST(QuadraticSequence, SqrtTwoMatchesDecimalOracle) {
    const std::size_t N = 100000;
    auto s = quadratic_sequence(RealSource::parse("sqrt:2"), N);
    oracle::Hp r2 = oracle::hp_sqrt(2);
    for (std::size_t n = 1; n <= N; n += 97) {
        double want = static_cast<double>(oracle::frac(oracle::Hp(r2 * n * n)));
        EXPECT_EQ(static_cast<double>(s.point(n - 1)), want) << n;
    }
}

TEST(PairCorrelation, HandExamples) {
    auto one = sequence_from_rationals({Rational(1, 2), Rational(1, 2)});
    EXPECT_EQ(pair_correlation(one, 1).R_exact(), Rational(1, 2));
    EXPECT_EQ(pair_correlation_naive(one, 0).R_exact(), Rational(1, 2));

    auto three = sequence_from_rationals({Rational(1, 10), Rational(2, 10), Rational(5, 10)});
    EXPECT_EQ(pair_correlation(three, Rational(6, 10)).R_exact(), Rational(1, 3));
    EXPECT_EQ(pair_correlation_naive(three, Rational(6, 10)).R_exact(), Rational(1, 3));
    EXPECT_EQ(pair_correlation(three, 0).pair_count, 0u);

    EXPECT_EQ(pair_correlation_naive(equally_spaced_sequence(10), 1).R_exact(), 1);
}

TEST(PairCorrelation, UvHandExamples) {
    auto r = pair_correlation_uv(RealSource::rational(Rational(1, 2)), 4, Rational(4, 10));
    EXPECT_EQ(r.R_exact(), Rational(2, 4));
    EXPECT_EQ(pair_correlation_uv(RealSource::parse("sqrt:3"), 300, 0).pair_count, 0u);
    auto a = RealSource::parse("sqrt:2");
    EXPECT_EQ(pair_correlation_uv(a, 500, 1).pair_count, pair_correlation(quadratic_sequence(a, 500), 1).pair_count);
}

TEST(PairCorrelation, MatchesRationalOracle) {
    Rng rng(11);
    for (int it = 0; it < 60; ++it) {
        auto s = random_rational_sequence(rng, uniform_in(rng, 1, 60));
        const std::size_t N = s.pts.size();
        Rational X = random_window(rng, N);
        u64 want = oracle::close_pairs(s.pts, Rational(X / BigInt(N)));
        ASSERT_EQ(pair_correlation(s.seq, X).pair_count, want);
        ASSERT_EQ(pair_correlation_naive(s.seq, X).pair_count, want);
    }
}

TEST(PairCorrelation, SortedEqualsNaive) {
    Rng rng(12);
    for (int it = 0; it < 200; ++it) {
        std::size_t N = uniform_in(rng, 1, 1000);
        SequenceModOne seq;
        if (it % 2) {
            seq = random_rational_sequence(rng, N).seq;
        } else {
            std::vector<double> p(N);
            for (auto& x : p) x = uniform_unit(rng);
            seq = sequence_from_doubles(p);
        }
        Rational X = random_window(rng, N);
        ASSERT_EQ(pair_correlation(seq, X).pair_count, pair_correlation_naive(seq, X).pair_count) << it;
    }
}

TEST(PairCorrelation, IrrationalMatchesDecimalOracle) {
    for (u64 r : {2u, 3u, 11u}) {
        auto a = RealSource::parse("sqrt:" + std::to_string(r));
        auto pts = oracle::quad_points(oracle::hp_sqrt(r), 150);
        for (Rational X : {Rational(3, 10), Rational(1), Rational(3)}) {
            u64 want = oracle::close_pairs(pts, oracle::to_hp(X / 150));
            EXPECT_EQ(pair_correlation(quadratic_sequence(a, 150), X).pair_count, want);
            EXPECT_EQ(pair_correlation_uv(a, 150, X).pair_count, want);
        }
    }
}

TEST(PairCorrelation, UvEqualsSortedWindow) {
    Rng rng(13);
    for (int it = 0; it < 50; ++it) {
        u64 n = uniform_in(rng, 2, 10000);
        if (is_perfect_square(n)) ++n;
        auto a = RealSource::parse("sqrt:" + std::to_string(n));
        std::size_t N = uniform_in(rng, 1, 2000);
        auto seq = quadratic_sequence(a, N);
        for (Rational X : {Rational(3, 10), Rational(1), Rational(3)})
            ASSERT_EQ(pair_correlation_uv(a, N, X).pair_count, pair_correlation(seq, X).pair_count) << n << " " << N;
    }
}

TEST(PairCorrelation, MonotoneInXAndTwoRPlusOne) {
    Rng rng(14);
    for (int it = 0; it < 40; ++it) {
        std::vector<double> p(uniform_in(rng, 2, 300));
        for (auto& x : p) x = uniform_unit(rng);
        auto seq = sequence_from_doubles(p);
        const std::size_t N = p.size();
        u64 prev = 0;
        for (u64 k = 1; k <= 4 * N; ++k) {
            Rational X(BigInt(k), 4);
            u64 c = pair_correlation(seq, X).pair_count;
            ASSERT_GE(c, prev);
            prev = c;
        }
        // ordered pairs including the diagonal
        Rational X(BigInt(uniform_in(rng, 1, N)), 1), t = X / BigInt(N);
        u64 ordered = 0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (seq.pair_within(i, j, t) || i == j) ++ordered;
        ASSERT_EQ(2 * pair_correlation(seq, X).pair_count + N, ordered);
    }
}

TEST(WeightedPairCorrelation, HandExamples) {
    EXPECT_EQ(*weighted_pair_correlation(equally_spaced_sequence(4), 1).R0_exact, 1);
    EXPECT_EQ(*weighted_pair_correlation(equally_spaced_sequence(4), Rational(3, 2)).R0_exact, Rational(5, 3));
    EXPECT_EQ(*weighted_pair_correlation(sequence_from_rationals({Rational(1, 3)}), Rational(7, 2)).R0_exact, 1);
    EXPECT_EQ(*weighted_pair_correlation(equally_spaced_sequence(100), Rational(3, 2)).R0_exact, Rational(5, 3));
}

TEST(WeightedPairCorrelation, MatchesRationalOracle) {
    Rng rng(15);
    for (int it = 0; it < 80; ++it) {
        auto s = random_rational_sequence(rng, uniform_in(rng, 1, 40));
        Rational X = random_window(rng, s.pts.size());
        ASSERT_EQ(*weighted_pair_correlation(s.seq, X).R0_exact, oracle::weighted_R0(s.pts, X));
    }
}

TEST(WeightedPairCorrelation, EquallySpacedAttainsReference) {
    for (std::size_t N : {1u, 5u, 37u, 100u})
        for (u64 k = 1; k <= 2 * N; ++k) {
            Rational X(BigInt(k), 2);
            if (2 * X > BigInt(N)) break;
            ASSERT_EQ(*weighted_pair_correlation(equally_spaced_sequence(N), X).R0_exact, equally_spaced_reference(X))
                << N << " " << X;
        }
}

// Lower bounds and subadditivity hold while arcs cannot meet across the far
// side of the circle, i.e. for 2X <= N.
TEST(WeightedPairCorrelation, BoundsAndSubadditivity) {
    Rng rng(16);
    for (int it = 0; it < 150; ++it) {
        auto s = random_rational_sequence(rng, uniform_in(rng, 2, 80));
        const std::size_t N = s.pts.size();
        Rational X = random_window(rng, N / 2 == 0 ? 1 : N / 2);
        if (2 * X > BigInt(N)) continue;
        Rational R0 = *weighted_pair_correlation(s.seq, X).R0_exact;
        ASSERT_GE(R0, std::max(Rational(1), X));
        ASSERT_GE(R0, oracle::spaced_bound(X));
        Rational Y = random_window(rng, N);
        if (X + Y <= BigInt(N)) {
            Rational RY = *weighted_pair_correlation(s.seq, Y).R0_exact;
            Rational RXY = *weighted_pair_correlation(s.seq, X + Y).R0_exact;
            ASSERT_LE(RXY, R0 + RY);
        }
        Rational R = pair_correlation(s.seq, X).R_exact();
        ASSERT_LE((R0 - 1) / 2, R);
        ASSERT_LE(R, *weighted_pair_correlation(s.seq, 2 * X).R0_exact - 1);
    }
}

TEST(WeightedPairCorrelation, LowerBoundFailsPastHalfN) {
    // two antipodal points, X = N = 2
    auto seq = sequence_from_rationals({0, Rational(1, 2)});
    EXPECT_EQ(*weighted_pair_correlation(seq, 2).R0_exact, Rational(3, 2));
}

TEST(WindowFunction, Examples) {
    auto s = sequence_from_rationals({Rational(1, 4), Rational(1, 2), Rational(3, 4), 1});
    EXPECT_EQ(window_function_L(s, Rational(1, 2), 1), 1u);
    EXPECT_GE(window_function_L(s, Rational(3, 4), Rational(1, 10)), 1u);
    EXPECT_EQ(window_function_L(s, Rational(1, 7), 4), 4u);

    Rng rng(17);
    for (int it = 0; it < 50; ++it) {
        auto r = random_rational_sequence(rng, uniform_in(rng, 1, 50));
        Rational X = random_window(rng, r.pts.size()), t(BigInt(uniform_below(rng, 997)), 997);
        ASSERT_EQ(window_function_L(r.seq, t, X), oracle::L_at(r.pts, t, X / (2 * BigInt(r.pts.size()))));
    }
}

TEST(EquallySpacedReference, Values) {
    EXPECT_EQ(equally_spaced_reference(Rational(3, 2)), Rational(5, 3));
    EXPECT_EQ(equally_spaced_reference(2), 2);
    EXPECT_EQ(equally_spaced_reference(Rational(1, 2)), 1);
}

TEST(IntegralIdentities, HandExamples) {
    auto one = verify_integral_identities(sequence_from_rationals({Rational(1, 5)}), Rational(1, 2));
    EXPECT_EQ(*one.int_L, Rational(1, 2));
    EXPECT_EQ(*one.int_L2, Rational(1, 2));
    EXPECT_EQ(*one.R0, 1);
    auto four = verify_integral_identities(equally_spaced_sequence(4), Rational(3, 2));
    EXPECT_EQ(*four.int_L2, Rational(5, 2));
    EXPECT_TRUE(four.ok());
    auto full = verify_integral_identities(equally_spaced_sequence(7), 7);
    EXPECT_EQ(*full.int_L, 7);
}

TEST(IntegralIdentities, MatchArcOverlapOracle) {
    Rng rng(18);
    for (int it = 0; it < 80; ++it) {
        auto s = random_rational_sequence(rng, uniform_in(rng, 1, 40));
        const std::size_t N = s.pts.size();
        Rational X = random_window(rng, N);
        auto rep = verify_integral_identities(s.seq, X);
        ASSERT_TRUE(rep.exact);
        ASSERT_EQ(*rep.int_L, X);
        ASSERT_EQ(*rep.int_L2, oracle::int_L2(s.pts, X / BigInt(N))) << N << " " << X;
        ASSERT_EQ(*rep.R0, oracle::weighted_R0(s.pts, X));
        ASSERT_TRUE(rep.int_L_ok);
        ASSERT_TRUE(rep.add_ok);
        if (rep.g_in_range) {
            ASSERT_TRUE(rep.g_ok);
        }
    }
}

TEST(IntegralIdentities, RejectsOutOfRange) {
    EXPECT_THROW(verify_integral_identities(equally_spaced_sequence(3), 4), InvalidArgument);
    EXPECT_THROW(verify_integral_identities(equally_spaced_sequence(3), 0), InvalidArgument);
}
