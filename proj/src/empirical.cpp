#include "shiftgamma/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "shiftgamma/gamma.hpp"

namespace shiftgamma {

namespace {

bool single_char_alphabet(const Alphabet& a) {
    for (const auto& s : a)
        if (s.size() != 1)
            return false;
    return true;
}

std::string render_word(const Alphabet& a, const std::vector<int>& w) {
    std::string out;
    bool compact = single_char_alphabet(a);
    for (size_t i = 0; i != w.size(); ++i) {
        if (!compact && i)
            out += ' ';
        out += a[static_cast<size_t>(w[i])];
    }
    return out;
}

std::vector<int> decode_word(const Alphabet& a, const std::string& text) {
    std::vector<int> out;
    auto index_of = [&](const std::string& sym) {
        for (size_t i = 0; i != a.size(); ++i)
            if (a[i] == sym)
                return static_cast<int>(i);
        throw DomainError("unknown symbol in word: " + sym);
    };
    if (text.find(' ') == std::string::npos && single_char_alphabet(a)) {
        for (char c : text)
            out.push_back(index_of(std::string(1, c)));
        return out;
    }
    std::string cur;
    for (char c : text) {
        if (c == ' ') {
            if (!cur.empty())
                out.push_back(index_of(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(index_of(cur));
    return out;
}

// Distance from position i to the nearest multiple of n inside [-k, k]. When
// n divides k this equals the true distance to n*Z for every position of the
// window; otherwise boundary positions see fewer multiples and the distance
// can only grow, which keeps the derived bounds one-sided.
long visible_multiple_distance(long i, long n, long k) {
    long j_top = k / n;
    long j_floor = i >= 0 ? i / n : -((-i + n - 1) / n);
    long best = -1;
    for (long j : {j_floor, j_floor + 1}) {
        long jc = std::clamp(j, -j_top, j_top);
        long d = std::labs(i - n * jc);
        if (best < 0 || d < best)
            best = d;
    }
    return best;
}

std::vector<std::string> sft_words(const EdgeSft& s, long n) {
    // Subset construction over word prefixes; the map key set is exactly the
    // length-i language, so the budget bounds the final answer too.
    std::map<std::vector<int>, std::vector<char>> cur;
    if (s.vertex_count() > 0)
        cur[{}] = std::vector<char>(static_cast<size_t>(s.vertex_count()), 1);
    for (long step = 0; step != n; ++step) {
        std::map<std::vector<int>, std::vector<char>> nxt;
        for (const auto& [word, ends] : cur) {
            for (int v = 0; v != s.vertex_count(); ++v) {
                if (!ends[static_cast<size_t>(v)])
                    continue;
                for (int e : s.out_edges()[static_cast<size_t>(v)]) {
                    const SftEdge& edge = s.edges()[static_cast<size_t>(e)];
                    std::vector<int> w = word;
                    w.push_back(edge.symbol);
                    auto& slot = nxt[std::move(w)];
                    if (slot.empty())
                        slot.assign(static_cast<size_t>(s.vertex_count()), 0);
                    slot[static_cast<size_t>(edge.to)] = 1;
                }
            }
        }
        if (nxt.size() > 500000)
            throw DomainError("language too large to enumerate");
        cur = std::move(nxt);
    }
    std::vector<std::string> out;
    out.reserve(cur.size());
    for (const auto& [word, ends] : cur)
        out.push_back(render_word(s.alphabet(), word));
    std::sort(out.begin(), out.end());
    return out;
}

// Level l holds one transition list per node: sorted (symbol, child) pairs,
// children indexing level l+1. Built as a trie over the sorted word list and
// merged bottom-up, so equal futures share a node and ids are canonical.
struct LeveledDfa {
    std::vector<std::vector<std::vector<std::pair<int, int>>>> levels;
};

LeveledDfa build_leveled_dfa(const std::vector<std::vector<int>>& ws) {
    size_t len = ws[0].size();
    struct Range {
        size_t lo, hi;
    };
    std::vector<std::vector<Range>> ranges(len + 1);
    std::vector<std::vector<std::vector<std::pair<int, int>>>> raw(len);
    ranges[0].push_back({0, ws.size()});
    for (size_t l = 0; l != len; ++l) {
        raw[l].resize(ranges[l].size());
        for (size_t node = 0; node != ranges[l].size(); ++node) {
            Range r = ranges[l][node];
            size_t at = r.lo;
            while (at != r.hi) {
                int sym = ws[at][l];
                size_t end = at;
                while (end != r.hi && ws[end][l] == sym)
                    ++end;
                raw[l][node].push_back({sym, static_cast<int>(ranges[l + 1].size())});
                ranges[l + 1].push_back({at, end});
                at = end;
            }
        }
    }
    LeveledDfa dfa;
    dfa.levels.resize(len);
    std::vector<int> child_class(ranges[len].size(), 0);
    for (size_t l = len; l-- > 0;) {
        std::map<std::vector<std::pair<int, int>>, int> seen;
        std::vector<int> klass(raw[l].size());
        std::vector<std::vector<std::pair<int, int>>> merged;
        for (size_t node = 0; node != raw[l].size(); ++node) {
            std::vector<std::pair<int, int>> sig = raw[l][node];
            for (auto& t : sig)
                t.second = child_class[static_cast<size_t>(t.second)];
            auto it = seen.find(sig);
            if (it == seen.end()) {
                it = seen.emplace(sig, static_cast<int>(merged.size())).first;
                merged.push_back(sig);
            }
            klass[node] = it->second;
        }
        dfa.levels[l] = std::move(merged);
        child_class = std::move(klass);
    }
    return dfa;
}

bool dfa_pair_feasible(const LeveledDfa& dfa, long n, long k, long m) {
    size_t len = dfa.levels.size();
    size_t w = dfa.levels[0].size();
    std::vector<char> cur(w * w * 2, 0);
    cur[1] = 0;
    cur[0] = 1;
    for (size_t l = 0; l != len; ++l) {
        bool locked = visible_multiple_distance(-k + static_cast<long>(l), n, k) < m;
        size_t wl = dfa.levels[l].size();
        size_t wn = l + 1 == len ? 1 : dfa.levels[l + 1].size();
        std::vector<char> nxt(wn * wn * 2, 0);
        bool alive = false;
        for (size_t a = 0; a != wl; ++a) {
            for (size_t b = 0; b != wl; ++b) {
                for (int d = 0; d != 2; ++d) {
                    if (!cur[(a * wl + b) * 2 + static_cast<size_t>(d)])
                        continue;
                    for (const auto& [sa, ca] : dfa.levels[l][a]) {
                        for (const auto& [sb, cb] : dfa.levels[l][b]) {
                            bool eq = sa == sb;
                            if (locked && !eq)
                                continue;
                            size_t cn = static_cast<size_t>(ca) * wn + static_cast<size_t>(cb);
                            nxt[cn * 2 + static_cast<size_t>(d | (eq ? 0 : 1))] = 1;
                            alive = true;
                        }
                    }
                }
            }
        }
        if (!alive)
            return false;
        cur = std::move(nxt);
    }
    return cur[1] != 0;
}

bool sft_pair_feasible(const EdgeSft& s, long n, long k, long m) {
    size_t nv = static_cast<size_t>(s.vertex_count());
    if (nv == 0)
        return false;
    std::vector<char> cur(nv * nv * 2, 0), nxt(cur.size());
    for (size_t u = 0; u != nv; ++u)
        for (size_t v = 0; v != nv; ++v)
            cur[(u * nv + v) * 2] = 1;
    for (long i = -k; i <= k; ++i) {
        bool locked = visible_multiple_distance(i, n, k) < m;
        std::fill(nxt.begin(), nxt.end(), 0);
        bool alive = false;
        for (size_t u = 0; u != nv; ++u) {
            for (size_t v = 0; v != nv; ++v) {
                for (int d = 0; d != 2; ++d) {
                    if (!cur[(u * nv + v) * 2 + static_cast<size_t>(d)])
                        continue;
                    for (int e : s.out_edges()[u]) {
                        const SftEdge& ee = s.edges()[static_cast<size_t>(e)];
                        for (int g : s.out_edges()[v]) {
                            const SftEdge& ge = s.edges()[static_cast<size_t>(g)];
                            bool eq = ee.symbol == ge.symbol;
                            if (locked && !eq)
                                continue;
                            size_t t = (static_cast<size_t>(ee.to) * nv + static_cast<size_t>(ge.to)) * 2;
                            nxt[t + static_cast<size_t>(d | (eq ? 0 : 1))] = 1;
                            alive = true;
                        }
                    }
                }
            }
        }
        if (!alive)
            return false;
        cur.swap(nxt);
    }
    for (size_t uv = 0; uv != nv * nv; ++uv)
        if (cur[uv * 2 + 1])
            return true;
    return false;
}

std::vector<std::vector<int>> decode_words(const LanguageOracle& o, long n) {
    std::vector<std::vector<int>> out;
    for (const auto& w : o.words(n))
        out.push_back(decode_word(o.alphabet(), w));
    return out;
}

const char* provenance_tag(LanguageOracle::Provenance p) {
    switch (p) {
    case LanguageOracle::Provenance::Sft:
        return "sft";
    case LanguageOracle::Provenance::Iet:
        return "iet";
    default:
        return "file";
    }
}

} // namespace

LanguageOracle LanguageOracle::from_sft(EdgeSft s) {
    LanguageOracle o;
    o.prov_ = Provenance::Sft;
    o.alphabet_ = s.alphabet();
    o.sft_ = std::move(s);
    return o;
}

LanguageOracle LanguageOracle::from_iet(IetSystem sys, WordLoad load, WordStore store) {
    LanguageOracle o;
    o.prov_ = Provenance::Iet;
    o.alphabet_ = {"0", "1", "2"};
    o.iet_ = std::move(sys);
    o.load_ = std::move(load);
    o.store_ = std::move(store);
    return o;
}

LanguageOracle LanguageOracle::from_words(const std::string& text, const std::string& source_name) {
    LanguageOracle o;
    o.prov_ = Provenance::File;
    std::map<std::string, int> index;
    bool have_alphabet = false;
    size_t lineno = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string line =
            text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        start = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty())
            continue;
        std::string where = source_name + ": line " + std::to_string(lineno);
        if (!have_alphabet) {
            std::string cur;
            for (char c : line + " ") {
                if (c == ' ') {
                    if (cur.empty())
                        continue;
                    if (index.count(cur))
                        throw ParseError("duplicate alphabet symbol '" + cur + "'", where);
                    index[cur] = static_cast<int>(o.alphabet_.size());
                    o.alphabet_.push_back(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            if (o.alphabet_.empty())
                throw ParseError("empty alphabet line", where);
            have_alphabet = true;
            continue;
        }
        std::vector<int> word;
        bool compact = line.find(' ') == std::string::npos && single_char_alphabet(o.alphabet_);
        if (compact) {
            for (char c : line) {
                auto it = index.find(std::string(1, c));
                if (it == index.end())
                    throw ParseError("unknown symbol '" + std::string(1, c) + "'", where);
                word.push_back(it->second);
            }
        } else {
            std::string cur;
            for (char c : line + " ") {
                if (c == ' ') {
                    if (cur.empty())
                        continue;
                    auto it = index.find(cur);
                    if (it == index.end())
                        throw ParseError("unknown symbol '" + cur + "'", where);
                    word.push_back(it->second);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
        }
        if (word.empty())
            throw ParseError("empty word", where);
        if (!o.file_words_.empty() && word.size() != o.file_words_.front().size())
            throw ParseError("words must share one length", where);
        o.file_words_.push_back(std::move(word));
    }
    if (!have_alphabet)
        throw ParseError("missing alphabet line", source_name);
    if (o.file_words_.empty())
        throw ParseError("no words listed", source_name);
    std::sort(o.file_words_.begin(), o.file_words_.end());
    o.file_words_.erase(std::unique(o.file_words_.begin(), o.file_words_.end()),
                        o.file_words_.end());
    o.max_query_ = static_cast<long>(o.file_words_.front().size());
    return o;
}

std::vector<std::string> LanguageOracle::words(long n) const {
    if (n < 1)
        throw DomainError("word length must be positive");
    if (auto it = memo_.find(n); it != memo_.end())
        return it->second;
    std::vector<std::string> out;
    switch (prov_) {
    case Provenance::Sft:
        out = sft_words(*sft_, n);
        break;
    case Provenance::Iet: {
        if (load_) {
            auto cached = load_(n);
            if (cached && std::is_sorted(cached->begin(), cached->end()) && !cached->empty()) {
                memo_[n] = *cached;
                return *cached;
            }
        }
        out = iet_language(*iet_, n);
        if (store_)
            store_(n, out);
        break;
    }
    case Provenance::File: {
        if (n > max_query_)
            throw DomainError("length beyond the stored horizon");
        if (n == max_query_) {
            for (const auto& w : file_words_)
                out.push_back(render_word(alphabet_, w));
        } else {
            std::set<std::vector<int>> factors;
            for (const auto& w : file_words_)
                for (size_t at = 0; at + static_cast<size_t>(n) <= w.size(); ++at)
                    factors.insert(std::vector<int>(w.begin() + static_cast<long>(at),
                                                    w.begin() + static_cast<long>(at) + n));
            for (const auto& w : factors)
                out.push_back(render_word(alphabet_, w));
        }
        std::sort(out.begin(), out.end());
        break;
    }
    }
    memo_[n] = out;
    return out;
}

bool LanguageOracle::is_legal(const std::vector<int>& word) const {
    for (int c : word)
        if (c < 0 || c >= static_cast<int>(alphabet_.size()))
            return false;
    if (word.empty())
        return true;
    switch (prov_) {
    case Provenance::Sft: {
        std::vector<char> reach(static_cast<size_t>(sft_->vertex_count()), 1);
        for (int c : word) {
            std::vector<char> nxt(reach.size(), 0);
            bool alive = false;
            for (const SftEdge& e : sft_->edges()) {
                if (e.symbol != c || !reach[static_cast<size_t>(e.from)])
                    continue;
                nxt[static_cast<size_t>(e.to)] = 1;
                alive = true;
            }
            if (!alive)
                return false;
            reach.swap(nxt);
        }
        return true;
    }
    case Provenance::Iet: {
        // The word's refinement cell is an interval; walk it with the affine
        // offset accumulated from the branch translations.
        const IetSystem& sys = *iet_;
        QuadraticFieldElement zero(0), one(1);
        auto cell_lo = [&](int c) { return c == 0 ? zero : c == 1 ? sys.a : sys.b; };
        auto cell_hi = [&](int c) { return c == 0 ? sys.a : c == 1 ? sys.b : one; };
        auto step_of = [&](int c) {
            return c == 0 ? one - sys.a : c == 1 ? one - sys.a - sys.b : -sys.b;
        };
        QuadraticFieldElement lo = cell_lo(word[0]);
        QuadraticFieldElement hi = cell_hi(word[0]);
        QuadraticFieldElement offset = step_of(word[0]);
        for (size_t i = 1; i != word.size(); ++i) {
            int c = word[i];
            QuadraticFieldElement lo2 = cell_lo(c) - offset;
            QuadraticFieldElement hi2 = cell_hi(c) - offset;
            if (lo2 > lo)
                lo = lo2;
            if (hi2 < hi)
                hi = hi2;
            if (!(lo < hi))
                return false;
            offset = offset + step_of(c);
        }
        return true;
    }
    default: {
        long len = static_cast<long>(word.size());
        if (len > max_query_)
            throw DomainError("length beyond the stored horizon");
        if (len == max_query_)
            return std::binary_search(file_words_.begin(), file_words_.end(), word);
        for (const auto& w : file_words_)
            for (size_t at = 0; at + word.size() <= w.size(); ++at)
                if (std::equal(word.begin(), word.end(), w.begin() + static_cast<long>(at)))
                    return true;
        return false;
    }
    }
}

long m_upper_at_horizon(const LanguageOracle& o, long n, long k) {
    if (n < 1)
        throw DomainError("period must be positive");
    if (k < n)
        throw DomainError("horizon must be at least the period");
    long half = n / 2;
    if (o.sft()) {
        for (long m = half; m >= 0; --m)
            if (sft_pair_feasible(*o.sft(), n, k, m))
                return m;
        throw DomainError("fewer than two words at this horizon");
    }
    auto ws = decode_words(o, 2 * k + 1);
    if (ws.size() < 2)
        throw DomainError("fewer than two words at this horizon");
    LeveledDfa dfa = build_leveled_dfa(ws);
    for (long m = half; m >= 1; --m)
        if (dfa_pair_feasible(dfa, n, k, m))
            return m;
    return 0;
}

long m_lower_from_witness(const LanguageOracle& o, long n, long k, const FiniteConfiguration& x,
                          const FiniteConfiguration& y) {
    if (n < 1)
        throw DomainError("period must be positive");
    if (k < n)
        throw DomainError("horizon must be at least the period");
    if (x.alphabet != o.alphabet() || y.alphabet != o.alphabet())
        throw DomainError("witness alphabet does not match the oracle");
    if (!(x.contains(-k) && x.contains(k) && y.contains(-k) && y.contains(k)))
        throw DomainError("witness windows must cover [-k, k]");
    std::vector<int> xw, yw;
    std::vector<long> diffs;
    for (long i = -k; i <= k; ++i) {
        xw.push_back(x.at(i));
        yw.push_back(y.at(i));
        if (x.at(i) != y.at(i))
            diffs.push_back(i);
    }
    if (!o.is_legal(xw) || !o.is_legal(yw))
        throw PreconditionError("witness rejected: illegal factor");
    if (diffs.empty())
        throw PreconditionError("witness rejected: the windows agree everywhere");
    long best = n / 2;
    for (long j = -(k / n); j <= k / n; ++j) {
        long c = n * j;
        long dmin = -1;
        for (long d : diffs) {
            long dist = std::labs(c - d);
            if (dmin < 0 || dist < dmin)
                dmin = dist;
        }
        if (dmin < best)
            best = dmin;
    }
    return best;
}

DecayReport decay_report(const LanguageOracle& o, const SelfSimilarShiftMetric& metric,
                         long n_max, long k) {
    if (n_max < 1)
        throw DomainError("period range must be positive");
    if (k < n_max)
        throw DomainError("horizon must cover the period range");
    DecayReport rep;
    rep.lambda = metric.lambda;
    rep.oracle_tag = provenance_tag(o.provenance());

    // Orbit probes for IET oracles: windows of T^i(0). Their pairwise
    // disagreement sets do not depend on N, so collect them once.
    constexpr int kOrbitProbes = 12;
    struct Probe {
        size_t i, j;
        std::vector<long> diffs;
    };
    std::vector<ItineraryWord> orbit;
    std::vector<Probe> probes;
    if (o.iet()) {
        QuadraticFieldElement x(0);
        for (int i = 0; i <= kOrbitProbes; ++i) {
            orbit.push_back(itinerary(*o.iet(), x, -k, k));
            x = iet_apply(*o.iet(), x);
        }
        for (size_t i = 0; i != orbit.size(); ++i) {
            for (size_t j = i + 1; j != orbit.size(); ++j) {
                Probe p{i, j, {}};
                for (long at = -k; at <= k; ++at)
                    if (orbit[i].at(at) != orbit[j].at(at))
                        p.diffs.push_back(at);
                if (!p.diffs.empty())
                    probes.push_back(std::move(p));
            }
        }
    }

    for (long n = 1; n <= n_max; ++n) {
        DecayRow row;
        row.bounds.n = n;
        row.bounds.k = k;
        row.bounds.m_upper = m_upper_at_horizon(o, n, k);
        if (o.sft()) {
            try {
                GammaResult g = gamma_exact(*o.sft(), n, metric);
                row.exact_m = g.m;
                row.bounds.m_lower = g.m;
                row.bounds.lower_certified = true;
                if (g.witness)
                    row.bounds.witness = {symbol_window(*o.sft(), g.witness->x, -k, k),
                                          symbol_window(*o.sft(), g.witness->y, -k, k)};
            } catch (const DegenerateSystemError&) {
                row.bounds.m_lower = 0;
            }
        } else if (o.iet()) {
            long best = -1;
            const Probe* best_probe = nullptr;
            for (const Probe& p : probes) {
                long v = n / 2;
                for (long j = -(k / n); j <= k / n; ++j) {
                    long c = n * j;
                    long dmin = -1;
                    for (long d : p.diffs) {
                        long dist = std::labs(c - d);
                        if (dmin < 0 || dist < dmin)
                            dmin = dist;
                    }
                    if (dmin < v)
                        v = dmin;
                }
                if (v > best) {
                    best = v;
                    best_probe = &p;
                }
            }
            if (best_probe) {
                row.bounds.m_lower = best;
                row.bounds.lower_certified = true;
                auto config_of = [&](const ItineraryWord& w) {
                    return make_configuration(o.alphabet(), -k, std::vector<int>(w.symbols));
                };
                row.bounds.witness = {config_of(orbit[best_probe->i]),
                                      config_of(orbit[best_probe->j])};
            }
        }
        if (row.bounds.m_lower > row.bounds.m_upper)
            throw PreconditionError("bracket violation: lower bound exceeds upper bound");
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

std::string decay_report_csv(const DecayReport& r) {
    std::string out = "N,m_lower,m_upper,gamma_lower,gamma_upper,product_lower_log_lambda,"
                      "product_upper_log_lambda,exact_m,K,oracle_tag\n";
    char buf[256];
    for (const DecayRow& row : r.rows) {
        const EmpiricalGammaBounds& b = row.bounds;
        double gamma_lower = std::pow(r.lambda, static_cast<double>(-b.m_upper));
        double gamma_upper = std::pow(r.lambda, static_cast<double>(-b.m_lower));
        double product_lower = static_cast<double>(b.n - 2 * b.m_upper) / 2.0;
        double product_upper = static_cast<double>(b.n - 2 * b.m_lower) / 2.0;
        std::string exact = row.exact_m ? std::to_string(*row.exact_m) : "";
        std::snprintf(buf, sizeof buf, "%ld,%ld,%ld,%.12g,%.12g,%.1f,%.1f,%s,%ld,%s\n", b.n,
                      b.m_lower, b.m_upper, gamma_lower, gamma_upper, product_lower,
                      product_upper, exact.c_str(), b.k, r.oracle_tag.c_str());
        out += buf;
    }
    return out;
}

} // namespace shiftgamma
