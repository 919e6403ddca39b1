#include "shiftgamma/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace shiftgamma {

double DistanceValue::decimal(double lambda) const {
    return std::pow(lambda, static_cast<double>(-exponent));
}

FiniteConfiguration make_configuration(Alphabet alphabet, long lo, std::vector<int> cells) {
    FiniteConfiguration c;
    c.alphabet = std::move(alphabet);
    c.lo = lo;
    c.hi = lo + static_cast<long>(cells.size()) - 1;
    c.cells = std::move(cells);
    for (int v : c.cells)
        if (v < 0 || v >= static_cast<int>(c.alphabet.size()))
            throw DomainError("configuration cell outside alphabet");
    return c;
}

static void require_comparable(const FiniteConfiguration& x, const FiniteConfiguration& y) {
    if (x.lo != y.lo || x.hi != y.hi)
        throw DomainError("configurations live on different index intervals");
    if (x.alphabet != y.alphabet)
        throw DomainError("configurations use different alphabets");
    if (x.length() <= 0)
        throw DomainError("empty configuration window");
}

DistanceValue shifted_distance(const FiniteConfiguration& x, const FiniteConfiguration& y, long n) {
    require_comparable(x, y);
    // The shifted pair is defined on [lo-n, hi-n]; it must still contain 0.
    if (n < x.lo || n > x.hi)
        throw DomainError("shift amount moves index 0 outside the window");

    long best = -1; // min |j - n| over disagreement positions j
    for (long j = x.lo; j <= x.hi; ++j) {
        if (x.at(j) != y.at(j)) {
            long d = std::labs(j - n);
            if (best < 0 || d < best) best = d;
            if (best == 0) break;
        }
    }
    // Radius of certainty: positions within [-R, R] of the shifted pair are visible.
    long R = std::min(n - x.lo, x.hi - n);
    if (best >= 0 && best <= R + 1) return DistanceValue::exact(best);
    return DistanceValue::bounded_above(R + 1);
}

std::vector<DistanceValue> orbit_distance_profile(const FiniteConfiguration& x,
                                                  const FiniteConfiguration& y,
                                                  const SelfSimilarShiftMetric&, long n_lo,
                                                  long n_hi) {
    require_comparable(x, y);
    if (n_lo > n_hi)
        throw DomainError("empty shift range");
    if (n_lo < x.lo || n_hi > x.hi)
        throw DomainError("profile horizon exceeds the configuration window");
    std::vector<DistanceValue> out;
    out.reserve(static_cast<size_t>(n_hi - n_lo + 1));
    for (long n = n_lo; n <= n_hi; ++n)
        out.push_back(shifted_distance(x, y, n));
    return out;
}

bool check_self_similar_identity(const FiniteConfiguration& x, const FiniteConfiguration& y,
                                 const SelfSimilarShiftMetric& m) {
    DistanceValue d0 = distance(x, y, m);
    if (!d0.is_exact() || d0.exponent < 1)
        throw PreconditionError(
            "self-similar identity requires an exact distance strictly inside the threshold");
    if (x.lo > -1 || x.hi < 1)
        throw DomainError("window too small to evaluate both one-step shifts");

    DistanceValue fwd = shifted_distance(x, y, 1);
    DistanceValue bwd = shifted_distance(x, y, -1);
    long target = d0.exponent - 1;

    // max distance == lambda^-target iff one shift is exactly at `target` and
    // the other is certifiably no larger.
    auto at_most = [target](const DistanceValue& d) { return d.exponent >= target; };
    bool attained = (fwd.is_exact() && fwd.exponent == target) ||
                    (bwd.is_exact() && bwd.exponent == target);
    return attained && at_most(fwd) && at_most(bwd);
}

bool contraction_check(const std::vector<DistanceValue>& profile, const SelfSimilarShiftMetric&) {
    if (profile.empty())
        throw DomainError("empty profile");
    if (profile.front().exponent < 1)
        throw PreconditionError("contraction check requires the pair to start within the threshold");
    long e0 = profile.front().exponent;
    for (size_t n = 0; n < profile.size(); ++n)
        if (profile[n].exponent < e0 + static_cast<long>(n)) return false;
    return true;
}

} // namespace shiftgamma
