#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shiftgamma/errors.hpp"
#include "shiftgamma/iet.hpp"
#include "shiftgamma/metric.hpp"
#include "shiftgamma/sft.hpp"

namespace shiftgamma {

// Exact word-set access to a subshift's language, with the provenance kept
// around because it decides what can be certified (graph paths extend to
// points; raw word files only witness what they show).
class LanguageOracle {
  public:
    enum class Provenance { Sft, Iet, File };

    // Optional external cache hooks (used by the CLI's on-disk word cache):
    // load(n) may return a previously stored sorted word list, store(n, w)
    // persists one. Results must round-trip exactly.
    using WordLoad = std::function<std::optional<std::vector<std::string>>(long)>;
    using WordStore = std::function<void(long, const std::vector<std::string>&)>;

    static LanguageOracle from_sft(EdgeSft s);
    static LanguageOracle from_iet(IetSystem sys, WordLoad load = nullptr,
                                   WordStore store = nullptr);
    // First line: alphabet symbols separated by spaces. Every further
    // non-empty line one word, symbols space-separated (concatenation
    // accepted when all symbols are single characters). All words must share
    // one length, the oracle's maximum queryable length.
    static LanguageOracle from_words(const std::string& text, const std::string& source_name);

    Provenance provenance() const { return prov_; }
    const Alphabet& alphabet() const { return alphabet_; }
    // Exact sorted language at length n. Words are rendered concatenated
    // when all symbols are single characters, space-separated otherwise.
    // Throws DomainError beyond a file oracle's stored length or when an
    // SFT language is too large to enumerate.
    std::vector<std::string> words(long n) const;
    // Whole-word membership, exact for every provenance.
    bool is_legal(const std::vector<int>& word) const;
    // Largest queryable length; -1 means unbounded.
    long max_query() const { return max_query_; }

    const EdgeSft* sft() const { return sft_ ? &*sft_ : nullptr; }
    const IetSystem* iet() const { return iet_ ? &*iet_ : nullptr; }

  private:
    LanguageOracle() = default;
    Provenance prov_ = Provenance::File;
    Alphabet alphabet_;
    std::optional<EdgeSft> sft_;
    std::optional<IetSystem> iet_;
    std::vector<std::vector<int>> file_words_;
    long max_query_ = -1;
    WordLoad load_;
    WordStore store_;
    mutable std::map<long, std::vector<std::string>> memo_;
};

// Horizon-limited bracket on the separation exponent: m(N) is certainly at
// most m_upper; m_lower comes with a witness pair and is certified exactly
// when that pair is known to extend to genuine points.
struct EmpiricalGammaBounds {
    long n = 0;
    long k = 0;
    long m_lower = 0;
    long m_upper = 0;
    bool lower_certified = false;
    std::optional<std::pair<FiniteConfiguration, FiniteConfiguration>> witness;
};

// Largest m <= floor(n/2) such that two distinct legal words of length 2k+1
// (positions -k..k) agree at every position within circular distance < m of
// a visible multiple of n. Genuine point pairs satisfy strictly more
// constraints, so the result upper-bounds m(n). Throws DomainError for
// k < n or when the language holds fewer than two words at this length.
long m_upper_at_horizon(const LanguageOracle& o, long n, long k);

// Minimum over visible multiples of n in [-k, k] of the distance to the
// pair's visible disagreements, capped at floor(n/2). Uses every multiple
// in the window (not only fully-covered ones) so the value never exceeds
// m_upper_at_horizon for the same k. Windows must cover [-k, k] and be
// legal; equal windows or illegal factors raise PreconditionError.
long m_lower_from_witness(const LanguageOracle& o, long n, long k, const FiniteConfiguration& x,
                          const FiniteConfiguration& y);

struct DecayRow {
    EmpiricalGammaBounds bounds;
    std::optional<long> exact_m; // filled from the exact search for SFT oracles
};

struct DecayReport {
    double lambda = 2.0;
    std::string oracle_tag;
    std::vector<DecayRow> rows;
};

// One row per N <= n_max. SFT oracles certify m_lower through an exact
// witness (and carry exact_m when the system is infinite); IET oracles
// probe orbit pairs of the origin; file oracles report m_lower = 0.
// Requires k >= n_max.
DecayReport decay_report(const LanguageOracle& o, const SelfSimilarShiftMetric& metric,
                         long n_max, long k);

std::string decay_report_csv(const DecayReport& r);

} // namespace shiftgamma
