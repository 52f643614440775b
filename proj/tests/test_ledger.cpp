#include <gtest/gtest.h>

#include <robba/ledger.hpp>

#include "support.hpp"

using namespace robba;

namespace {

using Entries = std::vector<std::pair<int, int>>;

Rational line_min(const Entries& es, int d, const Rational& e) {
    Rational best = Rational(es[0].second) + Rational(es[0].first - d) * e;
    for (auto [m, v] : es) best = min(best, Rational(v) + Rational(m - d) * e);
    return best;
}

// sup over e in [0,1] of min_entries (v + (m - d) e), by scanning every
// rational with denominator <= 24. Breakpoints of the lower envelope have
// denominators |m1 - m2| <= 16 here, so the scan hits them.
int brute_floor(const Entries& es, int d) {
    Rational sup = line_min(es, d, Rational(0));
    for (int den = 1; den <= 24; ++den)
        for (int num = 0; num <= den; ++num) sup = max(sup, line_min(es, d, Rational(num, den)));
    return static_cast<int>(sup.ceil());
}

Entries gen_entries(rt::Rng& g, int n) {
    Entries es;
    for (int i = 0; i < n; ++i) es.emplace_back(rt::irand(g, -8, 8), rt::irand(g, 0, 9));
    return es;
}

}  // namespace

TEST(Ledger, EmptyLedgerBoundsNothing) {
    ErrorLedger led;
    EXPECT_TRUE(led.empty());
    EXPECT_FALSE(led.exponent_at(Rational(1, 2)).has_value());
    EXPECT_EQ(led.coefficient_floor(0), PadicScalar::kInfinite);
}

TEST(Ledger, SingleEntryFloor) {
    ErrorLedger led;
    led.add_inside(7, 0);
    // (7, 0) at degree 6: best bound (7 - 6) e at e = 1.
    EXPECT_EQ(led.coefficient_floor(6), 1);
    EXPECT_EQ(led.coefficient_floor(0), 7);
    EXPECT_EQ(led.coefficient_floor(8), 0);
    EXPECT_EQ(*led.exponent_at(Rational(1, 2)), Rational(7, 2));
}

TEST(Ledger, OutsideContentDoesNotLimitCoefficients) {
    ErrorLedger led;
    led.add_outside(7, 0);
    EXPECT_EQ(led.coefficient_floor(6), PadicScalar::kInfinite);
    EXPECT_EQ(led.coefficient_floor(6, true), 1);
    EXPECT_EQ(*led.exponent_at(Rational(1, 3)), Rational(7, 3));
}

TEST(Ledger, FloorMatchesEnvelopeScan) {
    rt::Rng g(21);
    for (int i = 0; i < 3000; ++i) {
        Entries es = gen_entries(g, rt::irand(g, 1, 5));
        ErrorLedger led;
        for (auto [m, v] : es) led.add_inside(m, v);
        int d = rt::irand(g, -8, 8);
        ASSERT_EQ(led.coefficient_floor(d), brute_floor(es, d));
    }
}

TEST(Ledger, DominatedEntriesDoNotChangeBounds) {
    rt::Rng g(22);
    for (int i = 0; i < 2000; ++i) {
        Entries es = gen_entries(g, rt::irand(g, 1, 6));
        ErrorLedger led;
        for (auto [m, v] : es) led.add_inside(m, v);
        EXPECT_LE(led.inside().size(), es.size());
        for (int k = 0; k <= 12; ++k) {
            Rational e(k, 12);
            Rational want = line_min(es, 0, e);
            ASSERT_EQ(*led.exponent_at(e), want);
        }
    }
}

TEST(Ledger, ShiftAndAbsorbKeepTheSplit) {
    ErrorLedger a;
    a.add_inside(2, 1);
    a.add_outside(7, 0);
    ErrorLedger s = a.shifted(-3, 2);
    EXPECT_EQ(s.inside(), (DegreeProfile{{-1, 3}}));
    EXPECT_EQ(s.outside(), (DegreeProfile{{4, 2}}));
    ErrorLedger b;
    b.absorb(a, 1, 1);
    EXPECT_EQ(b.inside(), (DegreeProfile{{3, 2}}));
    EXPECT_EQ(b.outside(), (DegreeProfile{{8, 1}}));
    ErrorLedger c;
    c.absorb_inside(a.all());
    EXPECT_TRUE(c.outside().empty());
    EXPECT_EQ(c.inside().size(), 2u);
}

TEST(Ledger, ProfileProductIsMinPlus) {
    rt::Rng g(23);
    for (int i = 0; i < 500; ++i) {
        DegreeProfile a, b;
        for (auto [m, v] : gen_entries(g, 3)) profile_insert(a, m, v);
        for (auto [m, v] : gen_entries(g, 3)) profile_insert(b, m, v);
        DegreeProfile ab = profile_product(a, b);
        for (int k = 0; k <= 6; ++k) {
            Rational e(k, 6);
            EXPECT_EQ(*profile_exponent(ab, e), *profile_exponent(a, e) + *profile_exponent(b, e));
        }
    }
}
