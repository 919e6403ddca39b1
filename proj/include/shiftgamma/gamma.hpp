#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shiftgamma/metric.hpp"
#include "shiftgamma/sft.hpp"

namespace shiftgamma {

// Two eventually periodic paths whose emitted symbols disagree somewhere, but
// never within a forbidden radius of the multiples of a period. Produced by
// the constrained pair searches below.
struct GammaWitness {
    PathPoint x;
    PathPoint y;
};

// Decides whether two points of the shift can disagree only at positions
// whose circular distance from the multiples of n is at least m. Internally
// builds the pair graph synchronized with a phase counter mod n; a transition
// leaving phase p writes cell p, and phases within m-1 of 0 (circularly)
// force equal emitted symbols. Returns the first witness in scan order over
// (vertex, vertex, phase, edge, edge) when feasible.
// Throws DomainError unless 0 <= m <= n/2.
std::pair<bool, std::optional<GammaWitness>>
constrained_pair_exists(const EdgeSft& s, long n, long m);

// Largest m for which constrained_pair_exists holds; scans downward from
// floor(n/2). Throws DegenerateSystemError unless the shift is classified
// Infinite (for finite systems the defining supremum ranges over no usable
// pairs).
long m_of(const EdgeSft& s, long n);

// Validates witness legality and returns the minimum over all k of the
// circular distance from n*k to the emitted-symbol disagreement set. Throws
// PreconditionError if a path is illegal or the points are equal.
long gamma_witness_radius(const EdgeSft& s, const GammaWitness& w, long n);

struct GammaResult {
    long n = 1;
    long m = 0; // separation exponent, gamma(shift^n) = lambda^(-m)
    double lambda = 2.0;
    std::optional<GammaWitness> witness;

    double gamma() const;
};

// Computes m and gamma(shift^n) = lambda^(-m) with a witness whose
// disagreement set realizes the separation radius m exactly.
GammaResult gamma_exact(const EdgeSft& s, long n, const SelfSimilarShiftMetric& metric);

struct MtFitResult {
    double lambda = 2.0;
    long n_max = 1;
    std::vector<GammaResult> per_n; // N = 1..n_max, witnesses omitted
    // Exponents of gamma(shift^N) * lambda^(N/2) in half-steps of log lambda:
    // entry N-1 holds N - 2*m(N). Kept as integers so product comparisons are
    // exact.
    std::vector<long> product_half_exponents;
    long c_min_half_exponent = 0;
    // True when no N in the upper half of the range sets a new maximum
    // product exponent; a report about the computed range, not a limit claim.
    bool decaying = false;

    double c_min() const;
};

// Tabulates gamma(shift^N) * lambda^(N/2) for N up to n_max as exact
// half-integer powers of lambda.
MtFitResult mt_fit(const EdgeSft& s, const SelfSimilarShiftMetric& metric, long n_max);

nlohmann::ordered_json gamma_witness_to_json(const EdgeSft& s, const GammaWitness& w);
GammaWitness gamma_witness_from_json(const EdgeSft& s, const nlohmann::ordered_json& j);

} // namespace shiftgamma
