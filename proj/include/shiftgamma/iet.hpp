#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "shiftgamma/errors.hpp"

namespace shiftgamma {

// Element of Q(sqrt2, sqrt3): p + q*sqrt2 + r*sqrt3 + s*sqrt6 with rational
// coefficients. {1, sqrt2, sqrt3, sqrt6} is a Q-basis, so equality is
// coefficient-wise and sign() is decided exactly by two levels of squaring,
// never by floating point.
struct QuadraticFieldElement {
    mpq_class p, q, r, s;

    QuadraticFieldElement() : p(0), q(0), r(0), s(0) {}
    QuadraticFieldElement(long v) : p(v), q(0), r(0), s(0) {}
    QuadraticFieldElement(mpq_class p_, mpq_class q_, mpq_class r_, mpq_class s_)
        : p(std::move(p_)), q(std::move(q_)), r(std::move(r_)), s(std::move(s_)) {}

    static QuadraticFieldElement sqrt2() { return {0, 1, 0, 0}; }
    static QuadraticFieldElement sqrt3() { return {0, 0, 1, 0}; }
    static QuadraticFieldElement sqrt6() { return {0, 0, 0, 1}; }

    QuadraticFieldElement operator+(const QuadraticFieldElement& o) const;
    QuadraticFieldElement operator-(const QuadraticFieldElement& o) const;
    QuadraticFieldElement operator*(const QuadraticFieldElement& o) const;
    QuadraticFieldElement operator-() const;
    bool operator==(const QuadraticFieldElement& o) const;
    bool operator!=(const QuadraticFieldElement& o) const { return !(*this == o); }

    // -1, 0, +1, certified by exact rational arithmetic.
    int sign() const;
    bool operator<(const QuadraticFieldElement& o) const { return (*this - o).sign() < 0; }
    bool operator<=(const QuadraticFieldElement& o) const { return (*this - o).sign() <= 0; }
    bool operator>(const QuadraticFieldElement& o) const { return (*this - o).sign() > 0; }
    bool operator>=(const QuadraticFieldElement& o) const { return (*this - o).sign() >= 0; }

    double approx() const;
    // Canonical rendering, e.g. "-1+1*sqrt2"; parse_field_element inverts it.
    std::string str() const;
};

// Accepts sums of rational terms with optional *sqrt2 / *sqrt3 / *sqrt6
// factors: "-1+1*sqrt2", "1/3", "2-1/2*sqrt6", "sqrt3". Throws ParseError.
QuadraticFieldElement parse_field_element(const std::string& text);

// The three-interval exchange on [0,1) with cut points a < b: translates
// [0,a) up by 1-a, [a,b) by 1-a-b, [b,1) by -b. The images tile [0,1) in
// reversed order, so the map is an exact bijection.
struct IetSystem {
    QuadraticFieldElement a, b;

    // Default instance: a = sqrt2 - 1, b = sqrt3 - 1.
    IetSystem();
    IetSystem(QuadraticFieldElement a_, QuadraticFieldElement b_);

    // True when {1, a, b} has a rational dependence, i.e. the irrational
    // parts of a and b are proportional over Q (including both rational).
    // The coding then degenerates to an eventually periodic language.
    bool degenerate() const;
};

// T(x); x must lie in [0,1), else DomainError.
QuadraticFieldElement iet_apply(const IetSystem& sys, const QuadraticFieldElement& x);
// T^{-1}(y); y must lie in [0,1), else DomainError.
QuadraticFieldElement iet_inverse(const IetSystem& sys, const QuadraticFieldElement& y);
// 0, 1, 2 for x in [0,a), [a,b), [b,1).
int iet_symbol(const IetSystem& sys, const QuadraticFieldElement& x);

// Itinerary symbols of T^k(x) for k in [k_lo, k_hi], negative k through the
// inverse branches.
struct ItineraryWord {
    long base = 0;
    std::vector<int> symbols;

    int at(long k) const { return symbols[static_cast<size_t>(k - base)]; }
};
ItineraryWord itinerary(const IetSystem& sys, const QuadraticFieldElement& x, long k_lo,
                        long k_hi);

// Exact length-n language of the coded subshift, as sorted words over
// {'0','1','2'}: one word per nonempty cell of the n-step refinement of the
// coding partition, tracked with exact interval endpoints.
std::vector<std::string> iet_language(const IetSystem& sys, long n);

// p(1..n_max) where p(n) is the number of length-n words.
std::vector<long> iet_complexity(const IetSystem& sys, long n_max);

} // namespace shiftgamma
