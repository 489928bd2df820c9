#pragma once

#include <string>

#include "quadcorr/common.hpp"
#include "quadcorr/exactreal.hpp"
#include "quadcorr/paircorr.hpp"

namespace quadcorr {

struct CounterexampleReport {
    u64 q = 0;
    u64 a = 0;
    Rational alpha;      // a/q + 1/(4q³)
    Rational X;
    PairCorrResult result;
    u64 family_pairs = 0;  // pairs (m, q−m), m < q/2, found within X/N
    Rational family_bound() const { return Rational(BigInt(family_pairs), BigInt(q)); }
};

/// α = a/q + 1/(4q³) with a random unit a and N = q. Every pair (m, q−m)
/// has ‖α(m² − n²)‖ <= 1/(4q) < X/N, so R >= ⌊q/2⌋/q.
inline CounterexampleReport demo_counterexample(u64 q, const Rational& X, u64 seed = 1) {
    require(q >= 3 && is_prime(q), "counterexample needs an odd prime q");
    require(X > Rational(1, 4) && X < Rational(1, 2), "counterexample needs 1/4 < X < 1/2");
    guard(q <= 1000000, "counterexample: q exceeds 1e6");
    Rng rng(seed);
    CounterexampleReport rep;
    rep.q = q;
    rep.a = uniform_in(rng, 1, q - 1);
    const BigInt Q(q);
    rep.alpha = Rational(BigInt(rep.a), Q) + Rational(BigInt(1), 4 * Q * Q * Q);
    rep.X = X;
    auto seq = quadratic_sequence(RealSource::rational(rep.alpha), q);
    rep.result = pair_correlation(seq, X);
    const Rational t = X / Q;
    for (u64 m = 1; 2 * m < q; ++m)
        if (seq.pair_within(m - 1, q - m - 1, t)) ++rep.family_pairs;
    return rep;
}

}  // namespace quadcorr
