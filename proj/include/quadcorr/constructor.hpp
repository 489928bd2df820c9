#pragma once

#include <cmath>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quadcorr/common.hpp"
#include "quadcorr/exactreal.hpp"
#include "quadcorr/modcount.hpp"

namespace quadcorr {

class BudgetError : public Error {
public:
    using Error::Error;
};

class EmptyFeasibleSet : public Error {
public:
    using Error::Error;
};

struct RationalInterval {
    Rational lo, hi;
    bool lo_closed = true, hi_closed = true;

    RationalInterval() = default;
    RationalInterval(Rational l, Rational h, bool lc = true, bool hc = true)
        : lo(std::move(l)), hi(std::move(h)), lo_closed(lc), hi_closed(hc) {
        require(lo <= hi, "interval needs lo <= hi");
        require(lo < hi || (lo_closed && hi_closed), "a degenerate interval must be closed");
    }

    static RationalInterval open(Rational l, Rational h) { return {std::move(l), std::move(h), false, false}; }

    Rational length() const { return hi - lo; }
    bool contains(const Rational& x) const {
        return (lo < x || (lo_closed && lo == x)) && (x < hi || (hi_closed && hi == x));
    }
    std::string str() const {
        return std::string(lo_closed ? "[" : "(") + to_string(lo) + ", " + to_string(hi) + (hi_closed ? "]" : ")");
    }
    friend bool operator==(const RationalInterval&, const RationalInterval&) = default;
};

/// "lo:hi" as a closed interval.
inline RationalInterval parse_interval(std::string_view s) {
    auto colon = s.find(':');
    require(colon != std::string_view::npos, "interval '" + std::string(s) + "' must look like lo:hi");
    Rational lo = parse_rational(s.substr(0, colon)), hi = parse_rational(s.substr(colon + 1));
    require(lo <= hi, "interval '" + std::string(s) + "' has lo > hi");
    return {lo, hi};
}

/// Sorted, pairwise-disjoint intervals keyed by left end.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(const RationalInterval& i) { parts_.emplace(i.lo, i); }

    bool empty() const { return parts_.empty(); }
    std::size_t size() const { return parts_.size(); }

    std::vector<RationalInterval> intervals() const {
        std::vector<RationalInterval> out;
        out.reserve(parts_.size());
        for (auto& [k, v] : parts_) out.push_back(v);
        return out;
    }

    const RationalInterval& front() const {
        require(!empty(), "empty interval set");
        return parts_.begin()->second;
    }

    Rational measure() const {
        Rational m = 0;
        for (auto& [k, v] : parts_) m += v.length();
        return m;
    }

    bool contains(const Rational& x) const {
        auto it = parts_.upper_bound(x);
        if (it == parts_.begin()) return false;
        return std::prev(it)->second.contains(x);
    }

    /// Removes J from the set.
    void subtract(const RationalInterval& J) {
        auto it = parts_.upper_bound(J.hi);
        if (it == parts_.begin()) return;
        --it;
        std::vector<RationalInterval> keep;
        for (;;) {
            const RationalInterval P = it->second;
            bool stop = it == parts_.begin();
            if (P.hi < J.lo || (P.hi == J.lo && !(P.hi_closed && J.lo_closed))) break;
            if (!(J.hi < P.lo || (J.hi == P.lo && !(J.hi_closed && P.lo_closed)))) {
                auto cur = it;
                if (!stop) --it;
                parts_.erase(cur);
                // left remainder: P ∩ (−∞, J.lo)
                if (P.lo < J.lo || (P.lo == J.lo && P.lo_closed && !J.lo_closed))
                    keep.emplace_back(P.lo, J.lo, P.lo_closed, !J.lo_closed);
                // right remainder: P ∩ (J.hi, ∞)
                if (J.hi < P.hi || (J.hi == P.hi && P.hi_closed && !J.hi_closed))
                    keep.emplace_back(J.hi, P.hi, !J.hi_closed, P.hi_closed);
                if (stop) break;
                continue;
            }
            if (stop) break;
            --it;
        }
        for (auto& k : keep) parts_.emplace(k.lo, k);
    }

    bool operator==(const IntervalSet& o) const { return intervals() == o.intervals(); }

private:
    std::map<Rational, RationalInterval> parts_;
};

inline IntervalSet subtract(const RationalInterval& I, const std::vector<RationalInterval>& bad) {
    IntervalSet F(I);
    for (auto& b : bad) F.subtract(b);
    return F;
}

// ---------------------------------------------------------------------------
// Bad intervals

struct BadInterval {
    u64 q = 0;
    u64 a = 0;
    int cls = 1;
    u64 radius_den = 1;  // radius = 1/radius_den

    Rational center() const { return Rational(BigInt(a), BigInt(q)); }
    Rational radius() const { return Rational(1, radius_den); }
    RationalInterval interval() const { return RationalInterval::open(center() - radius(), center() + radius()); }
    bool contains(const Rational& x) const { return abs(x - center()) < radius(); }
    friend bool operator==(const BadInterval&, const BadInterval&) = default;
};

inline constexpr u64 kBadIntervalMaxQ = 3000;

/// floor(q^{2+η}).
inline u64 class1_radius_den(u64 q, const Rational& eta) {
    return floor_power(q, 2 + eta).convert_to<u64>();
}

/// q₁ >= q^{2η}.
inline bool is_class2_modulus(u64 q, const Rational& eta) {
    // q₁^{den} >= q^{2·num}
    const BigInt num = numerator(eta), den = denominator(eta);
    BigInt l = 1, r = 1;
    const BigInt q1 = q1_part(q);
    for (BigInt i = 0; i < den; ++i) l *= q1;
    for (BigInt i = 0; i < 2 * num; ++i) r *= q;
    return l >= r;
}

namespace detail {

inline void check_range(u64 q_lo, u64 q_hi, const Rational& eta) {
    require(q_lo >= 2 && q_lo <= q_hi, "q range needs 2 <= q_lo <= q_hi");
    guard(q_hi <= kBadIntervalMaxQ, "q_hi exceeds 3000");
    require_eta(eta);
}

/// B(q) for every q in the range.
inline std::vector<std::vector<u64>> bad_sets(u64 q_lo, u64 q_hi, const Rational& eta) {
    std::vector<std::vector<u64>> out(q_hi - q_lo + 1);
    auto parts = parallel_chunks(out.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = bad_set(q_lo + i, eta);
        return 0;
    }, 8);
    (void)parts;
    return out;
}

/// Intervals of modulus q, optionally only those meeting `within`.
inline void intervals_of(u64 q, const Rational& eta, const std::vector<u64>& B, const RationalInterval* within,
                         std::vector<BadInterval>& out) {
    u64 a_lo = 0, a_hi = q;
    const u64 d1 = class1_radius_den(q, eta), d2 = q * q;
    if (within) {
        // a/q ± 1/q² meets [lo, hi] only if a lies in this range
        BigInt lo = floor((within->lo - Rational(1, d2)) * q), hi = ceil((within->hi + Rational(1, d2)) * q);
        a_lo = lo < 0 ? 0 : std::min<u64>(q + 1, lo.convert_to<u64>());
        a_hi = hi < 0 ? 0 : std::min<u64>(q, hi.convert_to<u64>());
        if (hi < 0) return;
    }
    auto meets = [&](const BadInterval& b) {
        if (!within) return true;
        RationalInterval J = b.interval();
        return J.hi > within->lo && J.lo < within->hi;
    };
    for (u64 a = a_lo; a <= a_hi && a <= q; ++a) {
        BadInterval b{q, a, 1, d1};
        if (meets(b)) out.push_back(b);
    }
    if (is_class2_modulus(q, eta))
        for (u64 a = a_lo; a <= a_hi && a <= q; ++a) {
            BadInterval b{q, a, 2, d2};
            if (meets(b)) out.push_back(b);
        }
    for (u64 a : B) {
        if (a < a_lo || a > a_hi) continue;
        BadInterval b{q, a, 3, d2};
        if (meets(b)) out.push_back(b);
    }
}

}  // namespace detail

/// All intervals with q in [q_lo, q_hi], ordered by q, then class, then a.
inline std::vector<BadInterval> enumerate_bad_intervals(u64 q_lo, u64 q_hi, const Rational& eta = kDefaultEta) {
    detail::check_range(q_lo, q_hi, eta);
    auto B = detail::bad_sets(q_lo, q_hi, eta);
    std::vector<BadInterval> out;
    for (u64 q = q_lo; q <= q_hi; ++q) detail::intervals_of(q, eta, B[q - q_lo], nullptr, out);
    return out;
}

/// Same, restricted to intervals meeting I.
inline std::vector<BadInterval> enumerate_bad_intervals(const RationalInterval& I, u64 q_lo, u64 q_hi,
                                                        const Rational& eta = kDefaultEta) {
    detail::check_range(q_lo, q_hi, eta);
    auto B = detail::bad_sets(q_lo, q_hi, eta);
    std::vector<BadInterval> out;
    for (u64 q = q_lo; q <= q_hi; ++q) detail::intervals_of(q, eta, B[q - q_lo], &I, out);
    return out;
}

// ---------------------------------------------------------------------------
// Budgets

struct ClassMeasures {
    std::array<u64, 3> count{};
    std::array<Rational, 3> measure{};
    Rational total() const { return measure[0] + measure[1] + measure[2]; }
};

inline Rational clipped_measure(const BadInterval& b, const RationalInterval& I) {
    RationalInterval J = b.interval();
    Rational lo = std::max(J.lo, I.lo), hi = std::min(J.hi, I.hi);
    return hi > lo ? hi - lo : Rational(0);
}

/// Σ meas(I_n ∩ I) per class.
inline ClassMeasures clipped_measures(const std::vector<BadInterval>& bad, const RationalInterval& I) {
    ClassMeasures m;
    // group by radius so each group sums over a single denominator
    std::map<std::pair<int, u64>, Rational> groups;
    for (auto& b : bad) {
        ++m.count[b.cls - 1];
        groups[{b.cls, b.radius_den}] += clipped_measure(b, I);
    }
    for (auto& [k, v] : groups) m.measure[k.first - 1] += v;
    return m;
}

struct TailBudget {
    Rational class1_sum, class2_sum, class3_sum, total;
    double class1_tail = 0;                 // analytic bound for q > q_hi
    std::optional<double> class23_tail;     // only under a supplied lemma2_constant
};

/// Exact Σ meas(I_n) for q in [q_start, q_hi], with tail bounds beyond q_hi.
inline TailBudget tail_budget(u64 q_start, u64 q_hi, const Rational& eta = kDefaultEta,
                              std::optional<double> lemma2_constant = std::nullopt) {
    detail::check_range(q_start, q_hi, eta);
    TailBudget t;
    auto B = detail::bad_sets(q_start, q_hi, eta);
    for (u64 q = q_start; q <= q_hi; ++q) {
        t.class1_sum += Rational(2 * (q + 1), class1_radius_den(q, eta));
        if (is_class2_modulus(q, eta)) t.class2_sum += Rational(2 * (q + 1), q * q);
        t.class3_sum += Rational(2 * B[q - q_start].size(), q * q);
    }
    t.total = t.class1_sum + t.class2_sum + t.class3_sum;
    // (q+1)/floor(q^{2+η}) <= κ·q^{−1−η} for q > Q, and Σ_{q>Q} q^{−1−η} <= Q^{−η}/η
    const double Q = static_cast<double>(q_hi), e = to_double(eta);
    const double kappa = (1 + 1 / (Q + 1)) / (1 - std::pow(Q + 1, -2 - e));
    t.class1_tail = 2 * kappa * std::pow(Q, -e) / e;
    if (lemma2_constant) {
        const double g = 1.0 / 12 - 9 * e;
        t.class23_tail = *lemma2_constant * 2 * (1 + 1 / Q) * (std::pow(Q, -e) / e + std::pow(Q, -g) / g);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Construction

struct ConstructOptions {
    bool enforce_budget = true;
    double lemma2_constant = 1;
    // called after each step with k and F_k
    std::function<void(u64, const IntervalSet&)> on_step;
};

struct ConstructResult {
    RationalInterval interval;
    u64 q_start = 0, q_max = 0;
    Rational eta;
    std::vector<Rational> r_sequence;
    Rational final_value;
    IntervalSet final_set;
    ClassMeasures measures;
    std::vector<BadInterval> violations;
    double lemma2_constant = 1;
};

inline std::vector<BadInterval> verify_avoidance(const Rational& x, u64 q_start, u64 q_max,
                                                 const Rational& eta = kDefaultEta);

/// r_k = smallest end point of F_k = I ∖ ∪ I_n over q_start <= q(I_n) <= k.
inline ConstructResult construct_alpha(const RationalInterval& I, u64 q_start, u64 q_max,
                                       const Rational& eta = kDefaultEta, const ConstructOptions& opt = {}) {
    require(I.lo >= 0 && I.hi <= 1 && I.lo < I.hi, "construct needs I ⊆ [0,1] of positive length");
    require(I.lo_closed && I.hi_closed, "construct needs a closed interval");
    detail::check_range(q_start, q_max, eta);
    ConstructResult res;
    res.interval = I;
    res.q_start = q_start;
    res.q_max = q_max;
    res.eta = eta;
    res.lemma2_constant = opt.lemma2_constant;

    const Rational L = I.length();
    auto over_budget = [&](const ClassMeasures& m) {
        if (opt.enforce_budget && 2 * m.total() >= L)
            throw BudgetError("bad measure " + format_double(to_double(m.total())) + " over q in [" +
                              std::to_string(q_start) + ", " + std::to_string(q_max) + "] is not below L/2 = " +
                              format_double(to_double(L / 2)));
    };
    {
        // classes 1 and 2 alone are cheap; fail early when they already exceed the budget
        std::vector<BadInterval> first;
        for (u64 q = q_start; q <= q_max; ++q) detail::intervals_of(q, eta, {}, &I, first);
        over_budget(clipped_measures(first, I));
    }
    auto bad = enumerate_bad_intervals(I, q_start, q_max, eta);
    res.measures = clipped_measures(bad, I);
    over_budget(res.measures);

    IntervalSet F(I);
    std::size_t next = 0;
    for (u64 k = q_start; k <= q_max; ++k) {
        for (; next < bad.size() && bad[next].q == k; ++next) F.subtract(bad[next].interval());
        if (F.empty()) throw EmptyFeasibleSet("F_k is empty at k = " + std::to_string(k));
        res.r_sequence.push_back(F.front().lo);
        if (opt.on_step) opt.on_step(k, F);
    }
    res.final_value = res.r_sequence.back();
    res.final_set = std::move(F);
    res.violations = verify_avoidance(res.final_value, q_start, q_max, eta);
    return res;
}

// ---------------------------------------------------------------------------
// Avoidance

namespace detail {

/// Decides x < c − r, x inside (c − r, c + r), x > c + r for an approximate x;
/// membership is tested through `inside`, which returns nullopt when undecided.
template <class Inside>
inline std::vector<BadInterval> scan_avoidance(const Rational& approx, u64 q_start, u64 q_max, const Rational& eta,
                                               Inside&& inside) {
    check_range(q_start, q_max, eta);
    std::vector<BadInterval> out;
    for (u64 q = q_start; q <= q_max; ++q) {
        const u64 d1 = class1_radius_den(q, eta), d2 = q * q;
        const bool c2 = is_class2_modulus(q, eta);
        std::optional<std::vector<u64>> B;
        const BigInt f = floor(approx * q);
        for (BigInt ab = f - 1; ab <= f + 2; ++ab) {
            if (ab < 0 || ab > q) continue;
            const u64 a = ab.convert_to<u64>();
            for (int cls = 1; cls <= 3; ++cls) {
                if (cls == 2 && !c2) continue;
                BadInterval b{q, a, cls, cls == 1 ? d1 : d2};
                if (!inside(b)) continue;
                if (cls == 3) {
                    if (!B) B = bad_set(q, eta);
                    if (!std::binary_search(B->begin(), B->end(), a)) continue;
                }
                out.push_back(b);
            }
        }
    }
    return out;
}

}  // namespace detail

/// Every enumerated interval containing x; empty means certified avoidance.
inline std::vector<BadInterval> verify_avoidance(const Rational& x, u64 q_start, u64 q_max, const Rational& eta) {
    return detail::scan_avoidance(x, q_start, q_max, eta, [&](const BadInterval& b) { return b.contains(x); });
}

inline std::vector<BadInterval> verify_avoidance(const RealSource& x, u64 q_start, u64 q_max,
                                                 const Rational& eta = kDefaultEta, unsigned bits = kDefaultBits) {
    if (auto r = x.exact()) return verify_avoidance(*r, q_start, q_max, eta);
    const Rational approx = x.at(bits).midpoint();
    return detail::scan_avoidance(approx, q_start, q_max, eta, [&](const BadInterval& b) {
        // |x − a/q| < r  <=>  |1·x − a/q| < r, decided with escalation
        const Rational c = b.center(), r = b.radius();
        for (unsigned bb = bits;; bb *= 2) {
            FixedReal f = x.at(bb);
            Rational lo = f.lower() - c, hi = f.upper() - c;
            if (lo > -r && hi < r) return true;
            if (lo >= r || hi <= -r) return false;
            if (!x.can_escalate() || bb * 2 > kMaxBits)
                throw AmbiguousThreshold("cannot decide whether x lies in " + b.interval().str());
        }
    });
}

inline std::vector<BadInterval> verify_avoidance(const FixedReal& x, u64 q_start, u64 q_max,
                                                 const Rational& eta = kDefaultEta) {
    return verify_avoidance(RealSource::fixed(x), q_start, q_max, eta, x.frac_bits);
}

// ---------------------------------------------------------------------------
// Certificate

inline nlohmann::ordered_json bad_interval_json(const BadInterval& b) {
    nlohmann::ordered_json j;
    j["q"] = b.q;
    j["a"] = b.a;
    j["class"] = b.cls;
    j["radius"] = to_string(b.radius());
    return j;
}

inline nlohmann::ordered_json certificate_json(const ConstructResult& r) {
    nlohmann::ordered_json j;
    j["interval"] = to_string(r.interval.lo) + ":" + to_string(r.interval.hi);
    j["q_start"] = r.q_start;
    j["q_max"] = r.q_max;
    j["eta"] = to_string(r.eta);
    j["lemma2_constant"] = r.lemma2_constant;
    j["conditional_on_lemma2_constant"] = true;
    auto seq = nlohmann::ordered_json::array();
    for (auto& x : r.r_sequence) seq.push_back(to_string(x));
    j["r_sequence"] = seq;
    j["final"] = to_string(r.final_value);
    nlohmann::ordered_json cm;
    for (int c = 0; c < 3; ++c) {
        nlohmann::ordered_json e;
        e["count"] = r.measures.count[c];
        e["clipped_measure"] = format_double(to_double(r.measures.measure[c]));
        cm["class" + std::to_string(c + 1)] = e;
    }
    cm["total"] = format_double(to_double(r.measures.total()));
    cm["half_length"] = format_double(to_double(r.interval.length() / 2));
    j["class_measures"] = cm;
    auto v = nlohmann::ordered_json::array();
    for (auto& b : r.violations) v.push_back(bad_interval_json(b));
    j["violations"] = v;
    return j;
}

}  // namespace quadcorr
