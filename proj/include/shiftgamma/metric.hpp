#pragma once

#include <string>
#include <vector>

#include "shiftgamma/errors.hpp"

namespace shiftgamma {

// Symbols are kept as strings so edge ids and letters share one representation.
using Alphabet = std::vector<std::string>;

// A finite window x[lo..hi] (inclusive) of a bi-infinite sequence. Cells hold
// indices into `alphabet`. Windows always carry their own alphabet so that
// distance computations can refuse cross-alphabet comparisons.
struct FiniteConfiguration {
    Alphabet alphabet;
    long lo = 0;
    long hi = -1;
    std::vector<int> cells; // size hi - lo + 1

    long length() const { return hi - lo + 1; }
    bool contains(long i) const { return i >= lo && i <= hi; }
    int at(long i) const { return cells[static_cast<size_t>(i - lo)]; }
    int& at(long i) { return cells[static_cast<size_t>(i - lo)]; }
};

FiniteConfiguration make_configuration(Alphabet alphabet, long lo, std::vector<int> cells);

// Distance between two points seen through finite windows, as a lambda-exponent.
//   Exact(e):        d(x,y) is precisely lambda^-e
//   BoundedAbove(e): d(x,y) <= lambda^-e (all visible cells constrain no further)
// All comparisons happen on the integer exponent; no floating point is involved
// until a caller asks for a decimal rendering.
struct DistanceValue {
    enum class Kind { Exact, BoundedAbove };
    Kind kind = Kind::BoundedAbove;
    long exponent = 0;

    static DistanceValue exact(long e) { return {Kind::Exact, e}; }
    static DistanceValue bounded_above(long e) { return {Kind::BoundedAbove, e}; }
    bool is_exact() const { return kind == Kind::Exact; }
    double decimal(double lambda) const;
    bool operator==(const DistanceValue&) const = default;
};

// The metric d(x,y) = lambda^{-min{|i| : x_i != y_i}} on a two-sided shift.
// Scaling by lambda under the shift holds exactly at or below the threshold
// c = 1/lambda, which is why the threshold is derived rather than stored.
struct SelfSimilarShiftMetric {
    double lambda;

    explicit SelfSimilarShiftMetric(double lambda_ = 2.0) : lambda(lambda_) {
        if (!(lambda > 1.0))
            throw DomainError("metric requires lambda > 1");
    }
    double threshold_c() const { return 1.0 / lambda; }
};

// Distance of the pair as seen after n synchronous shifts; windows are index
// translated, never copied. Convention: position p of (sigma^n x) reads x at
// p + n, so a disagreement of the original pair at index j is seen at j - n.
DistanceValue shifted_distance(const FiniteConfiguration& x, const FiniteConfiguration& y, long n);

inline DistanceValue distance(const FiniteConfiguration& x, const FiniteConfiguration& y,
                              const SelfSimilarShiftMetric&) {
    return shifted_distance(x, y, 0);
}

// Entry k holds shifted_distance(x, y, n_lo + k). Every requested shift must
// keep index 0 inside the translated window.
std::vector<DistanceValue> orbit_distance_profile(const FiniteConfiguration& x,
                                                  const FiniteConfiguration& y,
                                                  const SelfSimilarShiftMetric&, long n_lo,
                                                  long n_hi);

// True iff max(d(sigma x, sigma y), d(sigma^-1 x, sigma^-1 y)) == lambda * d(x,y).
// Requires d(x,y) to be Exact with exponent >= 1 (strictly inside the threshold).
bool check_self_similar_identity(const FiniteConfiguration& x, const FiniteConfiguration& y,
                                 const SelfSimilarShiftMetric&);

// Checks exponent(n) >= exponent(0) + n over a forward profile (entries are the
// certified exponents; a BoundedAbove entry certifies `>= exponent`). Entry 0
// must be within the threshold, i.e. have exponent >= 1.
bool contraction_check(const std::vector<DistanceValue>& profile, const SelfSimilarShiftMetric&);

} // namespace shiftgamma
