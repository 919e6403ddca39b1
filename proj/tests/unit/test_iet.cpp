#include <doctest.h>

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "shiftgamma/errors.hpp"
#include "shiftgamma/iet.hpp"

using namespace shiftgamma;

namespace {

using Q = QuadraticFieldElement;

Q rat(long num, long den) { return Q{mpq_class(num, den), 0, 0, 0}; }

} // namespace

TEST_CASE("field arithmetic is exact") {
    const Q r2 = Q::sqrt2();
    const Q r3 = Q::sqrt3();
    const Q r6 = Q::sqrt6();
    CHECK(r2 * r2 == Q(2));
    CHECK(r3 * r3 == Q(3));
    CHECK(r6 * r6 == Q(6));
    CHECK(r2 * r3 == r6);
    CHECK(r2 * r6 == Q(2) * r3);
    CHECK(r3 * r6 == Q(3) * r2);
    // (1+sqrt2)(1+sqrt3) expands with no rounding anywhere.
    CHECK((Q(1) + r2) * (Q(1) + r3) == Q(1) + r2 + r3 + r6);
    CHECK(-(r2 - r3) == r3 - r2);
    CHECK(Q(7) - Q(7) == Q(0));
}

TEST_CASE("signs are certified exactly") {
    const Q r2 = Q::sqrt2();
    const Q r3 = Q::sqrt3();
    const Q r6 = Q::sqrt6();
    CHECK(Q(0).sign() == 0);
    CHECK((r2 * r3 - r6).sign() == 0);
    CHECK(Q(-3).sign() == -1);
    CHECK(r2.sign() == 1);
    CHECK((-r6).sign() == -1);
    // Mixed-sign comparisons that need one and two squaring levels.
    CHECK((Q(3) * r3 - rat(26, 5)).sign() == -1); // 3*sqrt3 = 5.196... < 5.2
    CHECK((Q(3) * r3 - rat(26, 6)).sign() == 1);
    CHECK((r2 + r3 - r6 - rat(1, 2)).sign() == 1);  // 3.146... vs 2.949...
    CHECK((r2 + r3 - r6 - rat(1, 5)).sign() == 1);
    // r2 + r3 - r6 = 0.69678..., so these brackets pin it tightly.
    CHECK((r2 + r3 - r6 - rat(7, 10)).sign() == -1);
    CHECK((r2 + r3 - r6 - rat(697, 1000)).sign() < 0);
    CHECK((r2 + r3 - r6 - rat(696, 1000)).sign() > 0);
    // Ordering operators ride on sign().
    CHECK(r2 < r3);
    CHECK(r6 > r2 + rat(1, 1));
    CHECK(rat(99, 70) > r2); // classic continued-fraction bound
    CHECK(rat(140, 99) < r2);
}

TEST_CASE("field elements parse and render") {
    CHECK(parse_field_element("-1+1*sqrt2") == Q::sqrt2() - Q(1));
    CHECK(parse_field_element("1/3") == rat(1, 3));
    CHECK(parse_field_element("2-1/2*sqrt6") == Q(2) - rat(1, 2) * Q::sqrt6());
    CHECK(parse_field_element("sqrt3") == Q::sqrt3());
    CHECK(parse_field_element("-sqrt3") == -Q::sqrt3());
    CHECK(parse_field_element(" 1 + 2*sqrt2 ") == Q(1) + Q(2) * Q::sqrt2());
    CHECK(parse_field_element("1+1*sqrt2-1*sqrt2") == Q(1));
    CHECK(parse_field_element("0") == Q(0));

    CHECK_THROWS_AS(parse_field_element(""), ParseError);
    CHECK_THROWS_AS(parse_field_element("1+"), ParseError);
    CHECK_THROWS_AS(parse_field_element("1*sqrt5"), ParseError);
    CHECK_THROWS_AS(parse_field_element("x+2"), ParseError);
    CHECK_THROWS_AS(parse_field_element("1/0"), ParseError);
    CHECK_THROWS_AS(parse_field_element("1//2"), ParseError);

    // str() round-trips through the parser.
    for (const Q& v : {Q::sqrt2() - Q(1), rat(-7, 3) + rat(1, 2) * Q::sqrt6(), Q(0),
                       -Q::sqrt3() + Q::sqrt2()}) {
        CHECK(parse_field_element(v.str()) == v);
    }
    CHECK(Q(0).str() == "0");
    CHECK((Q::sqrt2() - Q(1)).str() == "-1+1*sqrt2");
}

TEST_CASE("the default instance applies its branches exactly") {
    const IetSystem sys;
    const Q one(1);
    const Q a = Q::sqrt2() - one; // 0.4142...
    const Q b = Q::sqrt3() - one; // 0.7320...
    CHECK(sys.a == a);
    CHECK(sys.b == b);
    CHECK_FALSE(sys.degenerate());

    CHECK(iet_apply(sys, Q(0)) == Q(2) - Q::sqrt2());
    // Left endpoint of the middle branch lands on 1-b; the right interval's
    // left endpoint goes to 0.
    CHECK(iet_apply(sys, a) == Q(2) - Q::sqrt3());
    CHECK(iet_apply(sys, b) == Q(0));
    CHECK(iet_apply(sys, Q(2) - Q::sqrt2()) == Q(5) - Q(2) * Q::sqrt2() - Q::sqrt3());

    CHECK_THROWS_AS(iet_apply(sys, Q(1)), DomainError);
    CHECK_THROWS_AS(iet_apply(sys, -rat(1, 2)), DomainError);
    CHECK_THROWS_AS(iet_apply(sys, rat(3, 2)), DomainError);
}

TEST_CASE("images of the three branches tile the interval") {
    const IetSystem sys;
    const Q one(1);
    // [0, 1-b), [1-b, 1-a), [1-a, 1) in increasing order.
    CHECK(Q(0) < one - sys.b);
    CHECK(one - sys.b < one - sys.a);
    CHECK(one - sys.a < one);
    // Inverse composes to the identity on both sides.
    std::vector<Q> samples = {Q(0), rat(1, 7), sys.a, rat(1, 2), sys.b, rat(9, 10),
                              one - sys.b, one - sys.a, Q(2) - Q::sqrt2()};
    for (const Q& x : samples) {
        CHECK(iet_inverse(sys, iet_apply(sys, x)) == x);
        CHECK(iet_apply(sys, iet_inverse(sys, x)) == x);
    }
}

TEST_CASE("itineraries read the coding partition") {
    const IetSystem sys;
    const ItineraryWord w = itinerary(sys, Q(0), 0, 2);
    REQUIRE(w.symbols.size() == 3);
    CHECK(w.at(0) == 0);
    CHECK(w.at(1) == 1);
    CHECK(w.at(2) == 1);

    CHECK(itinerary(sys, sys.b, 0, 0).at(0) == 2);

    // Backward symbols agree with stepping the inverse by hand.
    const Q x = rat(1, 2);
    const ItineraryWord win = itinerary(sys, x, -6, 6);
    Q cur = x;
    for (long k = -1; k >= -6; --k) {
        cur = iet_inverse(sys, cur);
        CHECK(win.at(k) == iet_symbol(sys, cur));
    }
    cur = x;
    for (long k = 1; k <= 6; ++k) {
        cur = iet_apply(sys, cur);
        CHECK(win.at(k) == iet_symbol(sys, cur));
    }

    CHECK_THROWS_AS(itinerary(sys, Q(2), 0, 1), DomainError);
    CHECK_THROWS_AS(itinerary(sys, Q(0), 3, 1), DomainError);
}

TEST_CASE("the coding commutes with the shift") {
    const IetSystem sys;
    for (const Q& x : {Q(0), Q::sqrt2() - Q(1), rat(1, 2), rat(22, 101), Q::sqrt3() - Q(1)}) {
        const ItineraryWord of_x = itinerary(sys, x, 0, 101);
        const ItineraryWord of_tx = itinerary(sys, iet_apply(sys, x), 0, 100);
        for (long k = 0; k <= 100; ++k) CHECK(of_tx.at(k) == of_x.at(k + 1));
    }
}

TEST_CASE("language grows by two words per length") {
    const IetSystem sys;
    const std::vector<std::string> l1 = iet_language(sys, 1);
    CHECK(l1 == std::vector<std::string>{"0", "1", "2"});
    const std::vector<std::string> l2 = iet_language(sys, 2);
    CHECK(l2 == std::vector<std::string>{"01", "02", "10", "11", "20"});

    const std::vector<long> p = iet_complexity(sys, 30);
    REQUIRE(p.size() == 30);
    for (long n = 1; n <= 30; ++n) CHECK(p[static_cast<size_t>(n - 1)] == 2 * n + 1);
    CHECK(static_cast<long>(iet_language(sys, 30).size()) == 61);
}

TEST_CASE("the language is factor closed") {
    const IetSystem sys;
    for (long n = 2; n <= 8; ++n) {
        const auto shorter = iet_language(sys, n - 1);
        const std::set<std::string> prev(shorter.begin(), shorter.end());
        for (const std::string& w : iet_language(sys, n)) {
            CHECK(prev.count(w.substr(0, static_cast<size_t>(n - 1))) == 1);
            CHECK(prev.count(w.substr(1)) == 1);
        }
    }
}

TEST_CASE("rational parameters degenerate to a periodic coding") {
    const IetSystem sys(rat(1, 3), rat(2, 3));
    CHECK(sys.degenerate());
    // Swap of the outer thirds: languages stop growing at length 2.
    const std::vector<long> p = iet_complexity(sys, 6);
    CHECK(p == std::vector<long>{3, 3, 3, 3, 3, 3});
    CHECK(iet_language(sys, 2) == std::vector<std::string>{"02", "11", "20"});

    // Proportional irrational parts also count as degenerate.
    const IetSystem prop(rat(1, 4) * Q::sqrt2(), rat(1, 2) * Q::sqrt2());
    CHECK(prop.degenerate());
    // And mixed independent parts do not.
    const IetSystem indep(rat(1, 4) * Q::sqrt2(), rat(1, 4) * Q::sqrt6());
    CHECK_FALSE(indep.degenerate());

    CHECK_THROWS_AS(IetSystem(rat(2, 3), rat(1, 3)), DomainError);
    CHECK_THROWS_AS(IetSystem(Q(0), rat(1, 2)), DomainError);
    CHECK_THROWS_AS(IetSystem(rat(1, 3), Q(1)), DomainError);
}

TEST_CASE("the origin's orbit never revisits a point") {
    const IetSystem sys;
    std::set<std::tuple<mpq_class, mpq_class, mpq_class, mpq_class>> seen;
    Q cur(0);
    for (int k = 0; k <= 1000; ++k) {
        CHECK(seen.emplace(cur.p, cur.q, cur.r, cur.s).second);
        cur = iet_apply(sys, cur);
    }
    CHECK(seen.size() == 1001);
}
