#include <gtest/gtest.h>

#include <robba/group.hpp>

#include "support.hpp"

using namespace robba;

namespace {

std::vector<BigInt> gen_point(rt::Rng& g, int d, int range) {
    std::vector<BigInt> x(d);
    for (auto& c : x) c = rt::irand(g, -range, range);
    return x;
}

std::map<Monomial, BigInt> binomial_oracle(const std::vector<BigInt>& x, int D) {
    const int d = static_cast<int>(x.size());
    std::map<Monomial, BigInt> r;
    Monomial a(d, 0);
    std::function<void(int, int, BigInt)> rec = [&](int i, int left, BigInt c) {
        if (i == d) {
            if (c != 0) r[a] = c;
            return;
        }
        for (int k = 0; k <= left; ++k) {
            a[i] = k;
            rec(i + 1, left - k, c * rt::choose(x[i], k));
        }
        a[i] = 0;
    };
    rec(0, D, BigInt(1));
    return r;
}

}  // namespace

TEST(Group, HeisenbergLawMatchesMatrices) {
    for (int p : {3, 5, 7}) {
        GroupChart h = heisenberg_chart(p);
        rt::Rng g(p);
        for (int i = 0; i < 2000; ++i) {
            auto x = gen_point(g, 3, 1000), y = gen_point(g, 3, 1000);
            ASSERT_EQ(h.law_int(x, y), rt::heis_law(p, x, y));
        }
    }
}

TEST(Group, AbelianLawAdds) {
    GroupChart a = abelian_chart(4, 5);
    rt::Rng g(4);
    for (int i = 0; i < 500; ++i) {
        auto x = gen_point(g, 4, 100), y = gen_point(g, 4, 100);
        auto z = a.law_int(x, y);
        for (int k = 0; k < 4; ++k) EXPECT_EQ(z[k], x[k] + y[k]);
    }
}

TEST(Group, PadicLawAgreesWithIntegerLaw) {
    GroupChart h = heisenberg_chart(3);
    rt::Rng g(9);
    for (int i = 0; i < 300; ++i) {
        auto x = gen_point(g, 3, 500), y = gen_point(g, 3, 500);
        std::vector<PadicScalar> px, py;
        for (auto& c : x) px.push_back(c == 0 ? PadicScalar::zero(3) : PadicScalar::from_int(3, c, 12));
        for (auto& c : y) py.push_back(c == 0 ? PadicScalar::zero(3) : PadicScalar::from_int(3, c, 12));
        auto zi = h.law_int(x, y);
        auto zp = h.law_padic(px, py);
        for (int k = 0; k < 3; ++k) EXPECT_TRUE(rt::agrees(zp[k], zi[k]));
    }
}

TEST(Group, SelfTestAcceptsBuiltInCharts) {
    EXPECT_NO_THROW(heisenberg_chart(3).self_test());
    EXPECT_NO_THROW(heisenberg_chart(11).self_test());
    EXPECT_NO_THROW(abelian_chart(3, 5).self_test());
}

TEST(Group, SelfTestRejectsBadLaws) {
    // x3 + y3 - y1 x2: a group law whose commutators are not divisible by p.
    PolynomialLaw nonuniform{3, {}};
    nonuniform.coords.push_back({law_term(3, 1, 0, {1, 0, 0}, {}), law_term(3, 1, 0, {}, {1, 0, 0})});
    nonuniform.coords.push_back({law_term(3, 1, 0, {0, 1, 0}, {}), law_term(3, 1, 0, {}, {0, 1, 0})});
    nonuniform.coords.push_back({law_term(3, 1, 0, {0, 0, 1}, {}), law_term(3, 1, 0, {}, {0, 0, 1}),
                                 law_term(3, -1, 0, {0, 1, 0}, {1, 0, 0})});
    EXPECT_THROW(GroupChart("bad", 3, nonuniform).self_test(), ChartError);

    // x + y + x y^2 is not associative.
    PolynomialLaw nonassoc{1, {{law_term(1, 1, 0, {1}, {}), law_term(1, 1, 0, {}, {1}), law_term(1, 3, 0, {1}, {2})}}};
    EXPECT_THROW(GroupChart("bad", 3, nonassoc).self_test(), ChartError);
}

TEST(Group, DiracTermsAreBinomialProducts) {
    rt::Rng g(12);
    for (int i = 0; i < 300; ++i) {
        auto x = gen_point(g, 3, 30);
        auto ex = exact_dirac_terms(x, 6);
        EXPECT_EQ(ex.terms, binomial_oracle(x, 6));
        bool neg = std::any_of(x.begin(), x.end(), [](const BigInt& c) { return c < 0; });
        BigInt total = 0;
        for (auto& c : x) total += c;
        EXPECT_EQ(ex.has_tail, neg || total > 6);
    }
}

TEST(Group, DiracExpansionLedger) {
    TruncationPolicy pol;
    GroupChart h = heisenberg_chart(3);
    auto e = dirac_expand(h, {1, 2, 0}, pol);
    EXPECT_TRUE(e.exact());
    EXPECT_EQ(e.terms().size(), 6u);
    auto t = dirac_expand(h, {-1, 0, 0}, pol);
    EXPECT_EQ(t.ledger().outside(), (DegreeProfile{{7, 0}}));
    EXPECT_TRUE(t.ledger().inside().empty());
}

TEST(Group, HeisenbergCommutatorFromGroupRing) {
    for (int p : {3, 5}) {
        GroupChart h = heisenberg_chart(p);
        auto law = [&](const std::vector<BigInt>& x, const std::vector<BigInt>& y) { return rt::heis_law(p, x, y); };
        const int D = 8;
        auto left = rt::group_ring_product(3, {0, 1, 0}, {1, 0, 0}, D, law);
        auto right = rt::group_ring_product(3, {1, 0, 0}, {0, 1, 0}, D, law);
        for (auto& [a, c] : right) left[a] -= c;
        for (auto it = left.begin(); it != left.end();) it = it->second == 0 ? left.erase(it) : std::next(it);
        auto ex = exact_commutator(h, 1, 0, D);
        EXPECT_EQ(ex.terms, left);
        EXPECT_TRUE(ex.has_tail);
        EXPECT_EQ(ex.terms.at(Monomial{0, 0, 1}), BigInt(-p));
        BigInt top = ex.terms.at(Monomial{0, 0, p});
        EXPECT_NE(top % p, 0);
        EXPECT_TRUE(exact_commutator(h, 2, 0, D).terms.empty());
        EXPECT_TRUE(exact_commutator(h, 2, 1, D).terms.empty());
    }
}

TEST(Group, CommutatorSeriesTruncates) {
    TruncationPolicy pol;
    auto c = commutator_series(heisenberg_chart(3), 2, 1, pol);
    EXPECT_EQ(c.coefficient({0, 0, 1}), PadicScalar::from_int(3, -3, pol.N));
    EXPECT_EQ(c.ledger().outside(), (DegreeProfile{{7, 0}}));
    EXPECT_THROW(commutator_series(heisenberg_chart(3), 1, 2, pol), std::invalid_argument);
}
