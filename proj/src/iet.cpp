#include "shiftgamma/iet.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>

namespace shiftgamma {

namespace {

// sign of u + v*sqrt(d) for rational u, v and square-free d > 1
int sign_quadratic(const mpq_class& u, const mpq_class& v, int d) {
    const int su = sgn(u);
    const int sv = sgn(v);
    if (sv == 0) return su;
    if (su == 0 || su == sv) return sv;
    // opposite signs: |u| vs |v|*sqrt(d) decided by squaring
    const mpq_class diff = u * u - d * v * v;
    const int sd = sgn(diff);
    assert(sd != 0 && "sqrt(d) is irrational");
    return sd > 0 ? su : sv;
}

} // namespace

QuadraticFieldElement QuadraticFieldElement::operator+(const QuadraticFieldElement& o) const {
    return {p + o.p, q + o.q, r + o.r, s + o.s};
}

QuadraticFieldElement QuadraticFieldElement::operator-(const QuadraticFieldElement& o) const {
    return {p - o.p, q - o.q, r - o.r, s - o.s};
}

QuadraticFieldElement QuadraticFieldElement::operator*(const QuadraticFieldElement& o) const {
    // (sqrt2)(sqrt3) = sqrt6, (sqrt2)(sqrt6) = 2 sqrt3, (sqrt3)(sqrt6) = 3 sqrt2
    return {p * o.p + 2 * (q * o.q) + 3 * (r * o.r) + 6 * (s * o.s),
            p * o.q + q * o.p + 3 * (r * o.s + s * o.r),
            p * o.r + r * o.p + 2 * (q * o.s + s * o.q),
            p * o.s + s * o.p + q * o.r + r * o.q};
}

QuadraticFieldElement QuadraticFieldElement::operator-() const { return {-p, -q, -r, -s}; }

bool QuadraticFieldElement::operator==(const QuadraticFieldElement& o) const {
    return p == o.p && q == o.q && r == o.r && s == o.s;
}

int QuadraticFieldElement::sign() const {
    // Write the element as A + B*sqrt3 with A = p + q*sqrt2, B = r + s*sqrt2.
    const int sa = sign_quadratic(p, q, 2);
    const int sb = sign_quadratic(r, s, 2);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // A^2 - 3B^2 lies in Q(sqrt2); it cannot vanish since A/B = ±sqrt3 is
    // impossible there.
    const mpq_class u = p * p + 2 * q * q - 3 * (r * r + 2 * s * s);
    const mpq_class v = 2 * (p * q - 3 * (r * s));
    const int sd = sign_quadratic(u, v, 2);
    assert(sd != 0 && "sqrt3 is not in Q(sqrt2)");
    return sd > 0 ? sa : sb;
}

double QuadraticFieldElement::approx() const {
    return p.get_d() + q.get_d() * std::sqrt(2.0) + r.get_d() * std::sqrt(3.0) +
           s.get_d() * std::sqrt(6.0);
}

namespace {

void append_term(std::string& out, const mpq_class& c, const char* root) {
    if (c == 0) return;
    std::string coeff = c.get_str();
    if (out.empty()) {
        out = coeff;
    } else if (coeff[0] == '-') {
        out += "-" + coeff.substr(1);
    } else {
        out += "+" + coeff;
    }
    if (root[0] != '\0') out += std::string("*") + root;
}

} // namespace

std::string QuadraticFieldElement::str() const {
    std::string out;
    append_term(out, p, "");
    append_term(out, q, "sqrt2");
    append_term(out, r, "sqrt3");
    append_term(out, s, "sqrt6");
    if (out.empty()) out = "0";
    return out;
}

namespace {

mpq_class parse_rational(const std::string& tok, const std::string& full) {
    if (tok.empty()) throw ParseError("empty coefficient", full);
    for (size_t i = 0; i < tok.size(); ++i) {
        const char c = tok[i];
        const bool ok = (c >= '0' && c <= '9') || c == '/' || (i == 0 && (c == '-' || c == '+'));
        if (!ok) throw ParseError("bad rational '" + tok + "'", full);
    }
    const size_t slash = tok.find('/');
    if (slash != std::string::npos) {
        if (tok.find('/', slash + 1) != std::string::npos || slash + 1 == tok.size() ||
            slash == 0 || ((tok[0] == '-' || tok[0] == '+') && slash == 1))
            throw ParseError("bad rational '" + tok + "'", full);
    }
    try {
        mpq_class v(tok);
        if (v.get_den() == 0) throw ParseError("zero denominator in '" + tok + "'", full);
        v.canonicalize();
        return v;
    } catch (const std::invalid_argument&) {
        throw ParseError("bad rational '" + tok + "'", full);
    }
}

} // namespace

QuadraticFieldElement parse_field_element(const std::string& text) {
    std::string t;
    for (char c : text)
        if (c != ' ' && c != '\t') t += c;
    if (t.empty()) throw ParseError("empty field element", text);

    QuadraticFieldElement out;
    size_t i = 0;
    while (i < t.size()) {
        size_t j = i + 1; // keep a leading sign with its term
        while (j < t.size() && t[j] != '+' && t[j] != '-') ++j;
        std::string term = t.substr(i, j - i);
        i = j;

        mpq_class sign_v(1);
        if (term[0] == '+') {
            term.erase(0, 1);
        } else if (term[0] == '-') {
            sign_v = -1;
            term.erase(0, 1);
        }
        if (term.empty()) throw ParseError("dangling sign", text);

        mpq_class* slot = &out.p;
        const size_t star = term.find('*');
        std::string coeff = term;
        std::string root;
        if (star != std::string::npos) {
            coeff = term.substr(0, star);
            root = term.substr(star + 1);
        } else if (term.rfind("sqrt", 0) == 0) {
            coeff = "1";
            root = term;
        }
        if (!root.empty()) {
            if (root == "sqrt2")
                slot = &out.q;
            else if (root == "sqrt3")
                slot = &out.r;
            else if (root == "sqrt6")
                slot = &out.s;
            else
                throw ParseError("unknown root '" + root + "'", text);
        }
        *slot += sign_v * parse_rational(coeff, text);
    }
    return out;
}

IetSystem::IetSystem()
    : IetSystem(QuadraticFieldElement::sqrt2() - QuadraticFieldElement(1),
                QuadraticFieldElement::sqrt3() - QuadraticFieldElement(1)) {}

IetSystem::IetSystem(QuadraticFieldElement a_, QuadraticFieldElement b_)
    : a(std::move(a_)), b(std::move(b_)) {
    if (!(QuadraticFieldElement(0) < a && a < b && b < QuadraticFieldElement(1)))
        throw DomainError("interval exchange requires 0 < a < b < 1");
}

bool IetSystem::degenerate() const {
    // {1, a, b} is rationally dependent iff (q,r,s)(a) and (q,r,s)(b) are
    // parallel: the constant coordinate can always be matched.
    const mpq_class m1 = a.q * b.r - a.r * b.q;
    const mpq_class m2 = a.q * b.s - a.s * b.q;
    const mpq_class m3 = a.r * b.s - a.s * b.r;
    return m1 == 0 && m2 == 0 && m3 == 0;
}

namespace {

void require_unit_range(const QuadraticFieldElement& x, const char* who) {
    if (x.sign() < 0 || x >= QuadraticFieldElement(1))
        throw DomainError(std::string(who) + " requires a point in [0,1)");
}

} // namespace

QuadraticFieldElement iet_apply(const IetSystem& sys, const QuadraticFieldElement& x) {
    require_unit_range(x, "iet_apply");
    const QuadraticFieldElement one(1);
    if (x < sys.a) return x + one - sys.a;
    if (x < sys.b) return x - sys.a + one - sys.b;
    return x - sys.b;
}

QuadraticFieldElement iet_inverse(const IetSystem& sys, const QuadraticFieldElement& y) {
    require_unit_range(y, "iet_inverse");
    const QuadraticFieldElement one(1);
    const QuadraticFieldElement img_a = one - sys.a; // T[0,a) = [1-a, 1)
    const QuadraticFieldElement img_b = one - sys.b; // T[a,b) = [1-b, 1-a)
    if (y >= img_a) return y - img_a;
    if (y >= img_b) return y + sys.a + sys.b - one;
    return y + sys.b;
}

int iet_symbol(const IetSystem& sys, const QuadraticFieldElement& x) {
    require_unit_range(x, "iet_symbol");
    if (x < sys.a) return 0;
    if (x < sys.b) return 1;
    return 2;
}

ItineraryWord itinerary(const IetSystem& sys, const QuadraticFieldElement& x, long k_lo,
                        long k_hi) {
    require_unit_range(x, "itinerary");
    if (k_lo > k_hi) throw DomainError("itinerary requires k_lo <= k_hi");
    ItineraryWord w;
    w.base = k_lo;
    w.symbols.resize(static_cast<size_t>(k_hi - k_lo + 1));
    QuadraticFieldElement cur = x;
    for (long k = 0; k <= k_hi; ++k) {
        if (k >= k_lo) w.symbols[static_cast<size_t>(k - k_lo)] = iet_symbol(sys, cur);
        if (k < k_hi) cur = iet_apply(sys, cur);
    }
    cur = x;
    for (long k = -1; k >= k_lo; --k) {
        cur = iet_inverse(sys, cur);
        if (k <= k_hi) w.symbols[static_cast<size_t>(k - k_lo)] = iet_symbol(sys, cur);
    }
    return w;
}

namespace {

// A refinement cell: the points of [lo, hi) share the itinerary prefix
// `word`, and T^|word| acts on the cell as x -> x + offset.
struct Cell {
    QuadraticFieldElement lo, hi, offset;
    std::string word;
};

std::vector<Cell> initial_cells(const IetSystem& sys) {
    const QuadraticFieldElement zero(0), one(1);
    const QuadraticFieldElement t0 = one - sys.a;
    const QuadraticFieldElement t1 = one - sys.a - sys.b;
    const QuadraticFieldElement t2 = -sys.b;
    return {{zero, sys.a, t0, "0"}, {sys.a, sys.b, t1, "1"}, {sys.b, one, t2, "2"}};
}

std::vector<Cell> refine_once(const IetSystem& sys, const std::vector<Cell>& cells) {
    const QuadraticFieldElement one(1);
    const QuadraticFieldElement t0 = one - sys.a;
    const QuadraticFieldElement t1 = one - sys.a - sys.b;
    const QuadraticFieldElement t2 = -sys.b;
    std::vector<Cell> out;
    out.reserve(cells.size() + 2);
    for (const Cell& c : cells) {
        // T^k maps the cell to [lo+offset, hi+offset); split it at a and b.
        const QuadraticFieldElement cut_a = sys.a - c.offset;
        const QuadraticFieldElement cut_b = sys.b - c.offset;
        auto emit = [&](const QuadraticFieldElement& lo, const QuadraticFieldElement& hi,
                        char sym, const QuadraticFieldElement& step) {
            if (lo < hi) out.push_back({lo, hi, c.offset + step, c.word + sym});
        };
        emit(c.lo, std::min(c.hi, cut_a), '0', t0);
        emit(std::max(c.lo, cut_a), std::min(c.hi, cut_b), '1', t1);
        emit(std::max(c.lo, cut_b), c.hi, '2', t2);
    }
    return out;
}

} // namespace

std::vector<std::string> iet_language(const IetSystem& sys, long n) {
    if (n < 1) throw DomainError("language length must be positive");
    std::vector<Cell> cells = initial_cells(sys);
    for (long k = 1; k < n; ++k) cells = refine_once(sys, cells);
    std::vector<std::string> words;
    words.reserve(cells.size());
    for (const Cell& c : cells) words.push_back(c.word);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return words;
}

std::vector<long> iet_complexity(const IetSystem& sys, long n_max) {
    if (n_max < 1) throw DomainError("complexity range must be positive");
    std::vector<long> p;
    p.reserve(static_cast<size_t>(n_max));
    std::vector<Cell> cells = initial_cells(sys);
    auto distinct_words = [](const std::vector<Cell>& cs) {
        std::vector<std::string> w;
        w.reserve(cs.size());
        for (const Cell& c : cs) w.push_back(c.word);
        std::sort(w.begin(), w.end());
        w.erase(std::unique(w.begin(), w.end()), w.end());
        return static_cast<long>(w.size());
    };
    p.push_back(distinct_words(cells));
    for (long n = 2; n <= n_max; ++n) {
        cells = refine_once(sys, cells);
        p.push_back(distinct_words(cells));
    }
    return p;
}

} // namespace shiftgamma
