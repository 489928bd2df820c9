#include <gtest/gtest.h>

#include "oracles.hpp"
#include "quadcorr/constructor.hpp"

#include <fstream>

using namespace quadcorr;

namespace {

Rational random_rational(Rng& rng, u64 den) {
    u64 d = uniform_in(rng, 1, den);
    return Rational(BigInt(uniform_below(rng, d + 1)), BigInt(d));
}

RationalInterval random_interval(Rng& rng) {
    Rational a = random_rational(rng, 12), b = random_rational(rng, 12);
    if (b < a) std::swap(a, b);
    if (a == b) return {a, b};
    return {a, b, uniform_below(rng, 2) == 0, uniform_below(rng, 2) == 0};
}

// largest r with r^den <= q^num
u64 floor_root(u64 q, u64 num, u64 den) {
    oracle::Int target = boost::multiprecision::pow(oracle::Int(q), static_cast<unsigned>(num));
    u64 r = static_cast<u64>(std::pow(double(q), double(num) / double(den)));
    while (boost::multiprecision::pow(oracle::Int(r + 1), static_cast<unsigned>(den)) <= target) ++r;
    while (boost::multiprecision::pow(oracle::Int(r), static_cast<unsigned>(den)) > target) --r;
    return r;
}

}  // namespace

TEST(IntervalSet, SubtractHandExamples) {
    IntervalSet F(RationalInterval(0, 1));
    F.subtract(RationalInterval::open(Rational(1, 4), Rational(3, 4)));
    std::vector<RationalInterval> want{{0, Rational(1, 4)}, {Rational(3, 4), 1}};
    EXPECT_EQ(F.intervals(), want);
    EXPECT_EQ(F.measure(), Rational(1, 2));
    EXPECT_TRUE(F.contains(Rational(1, 4)));
    EXPECT_FALSE(F.contains(Rational(1, 2)));

    F.subtract(RationalInterval(-1, 2));
    EXPECT_TRUE(F.empty());

    // removing an open interval from a point leaves the point
    IntervalSet P(RationalInterval(Rational(1, 3), Rational(1, 3)));
    P.subtract(RationalInterval::open(0, Rational(1, 3)));
    EXPECT_EQ(P.size(), 1u);
    P.subtract(RationalInterval(Rational(1, 3), 1));
    EXPECT_TRUE(P.empty());

    auto G = subtract(RationalInterval(0, 1), {RationalInterval::open(0, Rational(1, 2))});
    std::vector<RationalInterval> g{{0, 0}, {Rational(1, 2), 1}};
    EXPECT_EQ(G.intervals(), g);
}

TEST(IntervalSet, MembershipOracle) {
    Rng rng(51);
    for (int it = 0; it < 300; ++it) {
        RationalInterval I(random_rational(rng, 6), 1);
        std::vector<RationalInterval> cut;
        for (int j = 0, n = static_cast<int>(uniform_in(rng, 0, 6)); j < n; ++j) cut.push_back(random_interval(rng));
        IntervalSet F = subtract(I, cut);
        Rational m = 0;
        for (auto& p : F.intervals()) m += p.length();
        ASSERT_EQ(F.measure(), m);
        for (int k = 0; k < 40; ++k) {
            Rational x = random_rational(rng, 24);
            bool want = I.contains(x);
            for (auto& J : cut) want = want && !J.contains(x);
            ASSERT_EQ(F.contains(x), want) << I.str() << " " << x;
        }
    }
}

TEST(IntervalSet, MeasureMatchesMergedUnion) {
    const RationalInterval I(Rational(1, 3), Rational(2, 5));
    std::vector<RationalInterval> cut;
    std::vector<oracle::Span> spans;
    for (u64 q = 2; q <= 20; ++q) {
        const u64 den = floor_root(q, 401, 200);
        for (u64 a = 0; a <= q; ++a) {
            cut.push_back(RationalInterval::open(Rational(a, q) - Rational(1, den), Rational(a, q) + Rational(1, den)));
            spans.push_back({oracle::Rat(a, q) - oracle::Rat(1, den), oracle::Rat(a, q) + oracle::Rat(1, den)});
        }
    }
    IntervalSet F = subtract(I, cut);
    oracle::Rat removed = oracle::union_measure(spans, oracle::Rat(1, 3), oracle::Rat(2, 5));
    EXPECT_EQ(I.length() - F.measure(), Rational(removed.str()));
}

TEST(BadIntervals, ModulusFive) {
    auto bad = enumerate_bad_intervals(5, 5);
    ASSERT_EQ(bad.size(), 6u);
    for (u64 a = 0; a <= 5; ++a) {
        EXPECT_EQ(bad[a].a, a);
        EXPECT_EQ(bad[a].cls, 1);
        EXPECT_EQ(bad[a].radius_den, 25u);
    }
    EXPECT_FALSE(is_class2_modulus(5, kDefaultEta));
    EXPECT_TRUE(is_class2_modulus(4, kDefaultEta));
    auto four = enumerate_bad_intervals(4, 4);
    EXPECT_EQ(std::count_if(four.begin(), four.end(), [](auto& b) { return b.cls == 2; }), 5);
}

TEST(BadIntervals, RadiusAndClassesAgainstOracle) {
    for (u64 q = 2; q <= 400; ++q) {
        ASSERT_EQ(class1_radius_den(q, kDefaultEta), floor_root(q, 401, 200)) << q;
        // class 2 iff q1^200 >= q^2
        const u64 a = oracle::q1(q);
        bool c2 = boost::multiprecision::pow(oracle::Int(a), 200) >= oracle::Int(q) * q;
        ASSERT_EQ(is_class2_modulus(q, kDefaultEta), c2) << q;
    }
}

TEST(BadIntervals, RestrictedEnumerationIsTheMeetingSubset) {
    const RationalInterval I(Rational(1, 3), Rational(2, 5));
    auto all = enumerate_bad_intervals(10, 120);
    auto some = enumerate_bad_intervals(I, 10, 120);
    std::vector<BadInterval> want;
    for (auto& b : all) {
        auto J = b.interval();
        if (J.hi > I.lo && J.lo < I.hi) want.push_back(b);
    }
    EXPECT_EQ(some, want);
    for (std::size_t i = 1; i < all.size(); ++i) ASSERT_LE(all[i - 1].q, all[i].q);
    for (auto& b : all) {
        ASSERT_TRUE(b.contains(b.center()));
        ASSERT_FALSE(b.contains(b.center() + b.radius()));
        if (b.cls == 3) {
            ASSERT_EQ(std::gcd(b.a, b.q), 1u);
        }
    }
}

TEST(TailBudget, DirectSums) {
    auto t = tail_budget(10, 100);
    Rational c1 = 0, c2 = 0, c3 = 0;
    for (u64 q = 10; q <= 100; ++q) {
        c1 += Rational(2 * (q + 1), floor_root(q, 401, 200));
        if (is_class2_modulus(q, kDefaultEta)) c2 += Rational(2 * (q + 1), q * q);
        c3 += Rational(2 * bad_set(q).size(), q * q);
    }
    EXPECT_EQ(t.class1_sum, c1);
    EXPECT_EQ(t.class2_sum, c2);
    EXPECT_EQ(t.class3_sum, c3);
    EXPECT_EQ(t.total, c1 + c2 + c3);
    EXPECT_GT(t.class1_tail, 0);
    EXPECT_FALSE(t.class23_tail.has_value());
    EXPECT_TRUE(tail_budget(10, 100, kDefaultEta, 1.0).class23_tail.has_value());

    auto five = tail_budget(5, 5);
    EXPECT_EQ(five.class3_sum, 0);
    EXPECT_EQ(five.class1_sum, Rational(12, 25));
    EXPECT_THROW(tail_budget(10, 9), InvalidArgument);
    EXPECT_THROW(tail_budget(10, 3001), CostGuard);
}

TEST(Construct, NestedSetsAndMonotoneEndpoints) {
    const RationalInterval I(Rational(1, 3), Rational(2, 5));
    auto bad = enumerate_bad_intervals(I, 200, 220);
    std::vector<Rational> seen;
    Rational prev_measure = I.length();
    ConstructOptions opt;
    opt.on_step = [&](u64 k, const IntervalSet& F) {
        ASSERT_FALSE(F.empty());
        ASSERT_LE(F.measure(), prev_measure);
        prev_measure = F.measure();
        const Rational r = F.front().lo;
        ASSERT_TRUE(F.contains(r));
        if (!seen.empty()) {
            ASSERT_GE(r, seen.back());
        }
        seen.push_back(r);
        for (auto& b : bad) {
            if (b.q <= k) {
                ASSERT_FALSE(b.contains(r)) << k;
            }
        }
    };
    auto res = construct_alpha(I, 200, 220, kDefaultEta, opt);
    EXPECT_EQ(res.r_sequence, seen);
    EXPECT_EQ(res.r_sequence.size(), 21u);
    EXPECT_EQ(res.final_value, seen.back());
    EXPECT_TRUE(res.violations.empty());
    EXPECT_TRUE(verify_avoidance(res.final_value, 200, 220).empty());
    EXPECT_EQ(res.final_value, Rational(41489, 124458));
    EXPECT_LT(2 * res.measures.total(), I.length());
}

TEST(Construct, SingleStepAndErrors) {
    const RationalInterval I(Rational(1, 3), Rational(2, 5));
    auto one = construct_alpha(I, 300, 300);
    EXPECT_EQ(one.r_sequence.size(), 1u);
    EXPECT_TRUE(one.violations.empty());

    EXPECT_THROW(construct_alpha(I, 10, 200), BudgetError);

    // (1/4, 3/4) from q = 2 swallows a short interval around 1/2
    const RationalInterval J(Rational(499, 1000), Rational(501, 1000));
    EXPECT_THROW(construct_alpha(J, 2, 2), BudgetError);
    ConstructOptions loose;
    loose.enforce_budget = false;
    EXPECT_THROW(construct_alpha(J, 2, 2, kDefaultEta, loose), EmptyFeasibleSet);

    EXPECT_THROW(construct_alpha(RationalInterval(0, 2), 10, 20), InvalidArgument);
    EXPECT_THROW(construct_alpha(RationalInterval::open(0, 1), 10, 20), InvalidArgument);
}

TEST(VerifyAvoidance, SqrtTwoMinusOneHits) {
    // √2 − 1 = [0; 2, 2, ...]; it sits inside intervals centred at its convergents
    auto hits = verify_avoidance(RealSource::parse("cf:0;[2]"), 10, 500);
    std::vector<std::array<u64, 3>> got, want{{12, 5, 1},   {12, 5, 2},   {17, 7, 1},   {29, 12, 1},  {41, 17, 1},
                                              {70, 29, 1},  {70, 29, 2},  {99, 41, 1},  {99, 41, 2},  {169, 70, 1},
                                              {169, 70, 2}, {239, 99, 1}, {408, 169, 1}, {408, 169, 2}};
    for (auto& h : hits) got.push_back({h.q, h.a, static_cast<u64>(h.cls)});
    EXPECT_EQ(got, want);

    // classes 1 and 2 recomputed at 100 digits
    const oracle::Hp x = oracle::hp_sqrt(2) - 1;
    std::vector<std::array<u64, 3>> oracle_hits;
    for (u64 q = 10; q <= 500; ++q) {
        const u64 a = static_cast<u64>(boost::multiprecision::round(x * q).convert_to<long long>());
        const oracle::Hp gap = boost::multiprecision::abs(x - oracle::Hp(a) / q);
        if (gap < oracle::Hp(1) / floor_root(q, 401, 200)) oracle_hits.push_back({q, a, 1});
        if (is_class2_modulus(q, kDefaultEta) && gap < oracle::Hp(1) / (q * q)) oracle_hits.push_back({q, a, 2});
    }
    EXPECT_EQ(got, oracle_hits);
}

TEST(VerifyAvoidance, RationalAndFixedAgree) {
    const Rational x(41489, 124458);
    EXPECT_TRUE(verify_avoidance(x, 200, 220).empty());
    EXPECT_TRUE(verify_avoidance(RealSource::rational(x), 200, 220).empty());
    // a centre is always caught
    auto h = verify_avoidance(Rational(7, 20), 20, 20);
    ASSERT_FALSE(h.empty());
    EXPECT_EQ(h.front().q, 20u);
    EXPECT_EQ(h.front().a, 7u);
    FixedReal r2 = sqrt_fixed(2, 192);
    auto f = verify_avoidance(FixedReal(r2.mantissa - pow2(192), 192, r2.err_ulp), 10, 500);
    auto s = verify_avoidance(RealSource::parse("cf:0;[2]"), 10, 500);
    EXPECT_EQ(f.size(), 14u);
    EXPECT_EQ(f, s);
}

TEST(Certificate, GoldenFile) {
    const RationalInterval I(Rational(1, 3), Rational(2, 5));
    auto res = construct_alpha(I, 200, 220);
    std::ifstream in(std::string(QUADCORR_TEST_DATA) + "/golden/certificate_200_220.json");
    ASSERT_TRUE(in.good());
    auto golden = nlohmann::ordered_json::parse(in);
    EXPECT_EQ(certificate_json(res), golden);
}
