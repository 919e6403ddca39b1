#include "shiftgamma/sft.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "internal/scc.hpp"
#include "shiftgamma/errors.hpp"

namespace shiftgamma {

namespace {

int mod_index(long off, size_t len) {
    long l = static_cast<long>(len);
    long r = off % l;
    if (r < 0) r += l;
    return static_cast<int>(r);
}

std::vector<std::vector<int>> vertex_adjacency(const EdgeSft& s) {
    std::vector<std::vector<int>> adj(s.vertex_count());
    for (const auto& e : s.edges()) adj[e.from].push_back(e.to);
    return adj;
}

} // namespace

EdgeSft::EdgeSft(std::vector<std::string> vertices, std::vector<SftEdge> edges, Alphabet alphabet)
    : alphabet_(std::move(alphabet)) {
    {
        std::set<std::string> seen;
        for (const auto& v : vertices) {
            if (v.empty()) throw DomainError("vertex names must be nonempty");
            if (!seen.insert(v).second) throw DomainError("duplicate vertex name: " + v);
        }
        seen.clear();
        for (const auto& e : edges) {
            if (e.id.empty()) throw DomainError("edge ids must be nonempty");
            if (!seen.insert(e.id).second) throw DomainError("duplicate edge id: " + e.id);
        }
    }
    std::vector<int> perm(vertices.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](int a, int b) { return vertices[a] < vertices[b]; });
    std::vector<int> where(vertices.size());
    vertices_.resize(vertices.size());
    for (size_t i = 0; i < perm.size(); ++i) {
        vertices_[i] = vertices[perm[i]];
        where[perm[i]] = static_cast<int>(i);
    }
    const int nv = vertex_count();
    const int na = static_cast<int>(alphabet_.size());
    for (auto& e : edges) {
        if (e.from < 0 || e.from >= nv || e.to < 0 || e.to >= nv)
            throw DomainError("edge endpoint out of range for edge " + e.id);
        if (e.symbol < 0 || e.symbol >= na)
            throw DomainError("edge symbol out of range for edge " + e.id);
        e.from = where[e.from];
        e.to = where[e.to];
    }
    std::sort(edges.begin(), edges.end(),
              [](const SftEdge& a, const SftEdge& b) { return a.id < b.id; });
    edges_ = std::move(edges);
    out_.assign(nv, {});
    in_.assign(nv, {});
    for (int i = 0; i < edge_count(); ++i) {
        out_[edges_[i].from].push_back(i);
        in_[edges_[i].to].push_back(i);
    }
}

int EdgeSft::vertex_index(const std::string& name) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), name);
    if (it == vertices_.end() || *it != name) return -1;
    return static_cast<int>(it - vertices_.begin());
}

EdgeSft essentialize(const EdgeSft& s) {
    const int nv = s.vertex_count();
    std::vector<char> keep_v(nv, 1);
    std::vector<char> keep_e(s.edge_count(), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> indeg(nv, 0), outdeg(nv, 0);
        for (int i = 0; i < s.edge_count(); ++i) {
            if (!keep_e[i]) continue;
            outdeg[s.edges()[i].from]++;
            indeg[s.edges()[i].to]++;
        }
        for (int v = 0; v < nv; ++v) {
            if (keep_v[v] && (indeg[v] == 0 || outdeg[v] == 0)) {
                keep_v[v] = 0;
                changed = true;
            }
        }
        for (int i = 0; i < s.edge_count(); ++i) {
            if (keep_e[i] && (!keep_v[s.edges()[i].from] || !keep_v[s.edges()[i].to])) {
                keep_e[i] = 0;
            }
        }
    }
    std::vector<std::string> verts;
    std::vector<int> remap(nv, -1);
    for (int v = 0; v < nv; ++v) {
        if (keep_v[v]) {
            remap[v] = static_cast<int>(verts.size());
            verts.push_back(s.vertices()[v]);
        }
    }
    std::vector<SftEdge> edges;
    for (int i = 0; i < s.edge_count(); ++i) {
        if (!keep_e[i]) continue;
        SftEdge e = s.edges()[i];
        e.from = remap[e.from];
        e.to = remap[e.to];
        edges.push_back(std::move(e));
    }
    return EdgeSft(std::move(verts), std::move(edges), s.alphabet());
}

EdgeSft make_edge_sft(const std::vector<std::string>& vertices,
                      const std::vector<std::tuple<std::string, std::string, std::string>>& edges) {
    std::unordered_map<std::string, int> vidx;
    for (size_t i = 0; i < vertices.size(); ++i) {
        if (!vidx.emplace(vertices[i], static_cast<int>(i)).second)
            throw DomainError("duplicate vertex name: " + vertices[i]);
    }
    Alphabet ids;
    for (const auto& [id, from, to] : edges) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw DomainError("duplicate edge id");
    std::vector<SftEdge> es;
    for (const auto& [id, from, to] : edges) {
        auto f = vidx.find(from);
        auto t = vidx.find(to);
        if (f == vidx.end()) throw DomainError("unknown vertex in edge " + id + ": " + from);
        if (t == vidx.end()) throw DomainError("unknown vertex in edge " + id + ": " + to);
        int sym = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
        es.push_back({id, f->second, t->second, sym});
    }
    return essentialize(EdgeSft(vertices, std::move(es), std::move(ids)));
}

EdgeSft higher_block(const Alphabet& alphabet, const std::vector<std::string>& forbidden) {
    if (alphabet.empty()) throw DomainError("alphabet is empty");
    {
        std::set<std::string> seen;
        for (const auto& a : alphabet) {
            if (a.size() != 1) throw DomainError("alphabet letters must be single characters: " + a);
            if (!seen.insert(a).second) throw DomainError("duplicate alphabet letter: " + a);
        }
    }
    std::unordered_set<char> letters;
    for (const auto& a : alphabet) letters.insert(a[0]);
    for (const auto& w : forbidden) {
        if (w.empty()) throw DomainError("forbidden words must be nonempty");
        for (char c : w) {
            if (!letters.count(c))
                throw DomainError(std::string("forbidden word uses a letter outside the alphabet: ") + c);
        }
    }

    // Letters forbidden outright shrink the alphabet; words mentioning them
    // can never occur and are dropped.
    std::unordered_set<char> banned;
    for (const auto& w : forbidden)
        if (w.size() == 1) banned.insert(w[0]);
    Alphabet alpha;
    for (const auto& a : alphabet)
        if (!banned.count(a[0])) alpha.push_back(a);
    if (alpha.empty()) throw DomainError("empty subshift: every letter is forbidden");

    std::vector<std::string> words;
    for (const auto& w : forbidden) {
        if (w.size() < 2) continue;
        bool dead = false;
        for (char c : w)
            if (banned.count(c)) dead = true;
        if (!dead) words.push_back(w);
    }

    const int k = static_cast<int>(alpha.size());
    std::unordered_map<char, int> sym_of;
    for (int i = 0; i < k; ++i) sym_of[alpha[i][0]] = i;

    if (words.empty()) {
        std::vector<SftEdge> es;
        for (int i = 0; i < k; ++i) es.push_back({alpha[i], 0, 0, i});
        return EdgeSft({"."}, std::move(es), alpha);
    }

    size_t L = 0;
    for (const auto& w : words) L = std::max(L, w.size());
    {
        double count = 1;
        for (size_t i = 0; i < L; ++i) count *= k;
        if (count > (1 << 20)) throw DomainError("recoding window too large for this forbidden word set");
    }

    std::unordered_set<std::string> bad(words.begin(), words.end());
    std::set<size_t> bad_lengths;
    for (const auto& w : words) bad_lengths.insert(w.size());
    auto allowed = [&](const std::string& w) {
        for (size_t len : bad_lengths) {
            if (len > w.size()) break;
            for (size_t i = 0; i + len <= w.size(); ++i)
                if (bad.count(w.substr(i, len))) return false;
        }
        return true;
    };

    std::vector<std::string> blocks;
    std::string cur;
    auto enumerate = [&](auto&& self, size_t depth, size_t target) -> void {
        if (depth == target) {
            if (allowed(cur)) blocks.push_back(cur);
            return;
        }
        for (int i = 0; i < k; ++i) {
            cur.push_back(alpha[i][0]);
            self(self, depth + 1, target);
            cur.pop_back();
        }
    };
    std::vector<std::string> verts;
    enumerate(enumerate, 0, L - 1);
    verts = std::move(blocks);
    blocks.clear();
    enumerate(enumerate, 0, L);

    std::unordered_map<std::string, int> vidx;
    for (size_t i = 0; i < verts.size(); ++i) vidx[verts[i]] = static_cast<int>(i);
    std::vector<SftEdge> es;
    for (const auto& w : blocks) {
        auto f = vidx.find(w.substr(0, L - 1));
        auto t = vidx.find(w.substr(1));
        if (f == vidx.end() || t == vidx.end()) continue;
        es.push_back({w, f->second, t->second, sym_of[w[0]]});
    }
    EdgeSft result = essentialize(EdgeSft(verts, std::move(es), alpha));
    if (result.empty()) throw DomainError("empty subshift: the forbidden words exclude every configuration");
    return result;
}

namespace {

std::string json_scalar_to_name(const nlohmann::json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw ParseError("expected a string or integer", path);
}

EdgeSft parse_json_graph(const nlohmann::json& j, const std::string& source) {
    if (!j.at("vertices").is_array()) throw ParseError("\"vertices\" must be an array", source);
    if (!j.at("edges").is_array()) throw ParseError("\"edges\" must be an array", source);
    std::vector<std::string> verts;
    for (size_t i = 0; i < j["vertices"].size(); ++i)
        verts.push_back(json_scalar_to_name(j["vertices"][i], source + ": vertices[" + std::to_string(i) + "]"));
    std::vector<std::tuple<std::string, std::string, std::string>> edges;
    for (size_t i = 0; i < j["edges"].size(); ++i) {
        const auto& e = j["edges"][i];
        const std::string where = source + ": edges[" + std::to_string(i) + "]";
        if (!e.is_object()) throw ParseError("edge entries must be objects", where);
        for (const char* key : {"id", "from", "to"})
            if (!e.contains(key)) throw ParseError(std::string("missing \"") + key + "\"", where);
        edges.emplace_back(json_scalar_to_name(e["id"], where + ".id"),
                           json_scalar_to_name(e["from"], where + ".from"),
                           json_scalar_to_name(e["to"], where + ".to"));
    }
    EdgeSft s;
    try {
        s = make_edge_sft(verts, edges);
    } catch (const DomainError& err) {
        throw ParseError(err.what(), source);
    }
    if (s.empty()) throw ParseError("graph has no essential part", source);
    return s;
}

EdgeSft parse_json_words(const nlohmann::json& j, const std::string& source) {
    if (!j.at("alphabet").is_array()) throw ParseError("\"alphabet\" must be an array", source);
    if (!j.at("forbidden").is_array()) throw ParseError("\"forbidden\" must be an array", source);
    Alphabet alpha;
    for (size_t i = 0; i < j["alphabet"].size(); ++i)
        alpha.push_back(json_scalar_to_name(j["alphabet"][i], source + ": alphabet[" + std::to_string(i) + "]"));
    std::vector<std::string> words;
    for (size_t i = 0; i < j["forbidden"].size(); ++i) {
        const auto& w = j["forbidden"][i];
        if (!w.is_string())
            throw ParseError("forbidden words must be strings", source + ": forbidden[" + std::to_string(i) + "]");
        words.push_back(w.get<std::string>());
    }
    try {
        return higher_block(alpha, words);
    } catch (const DomainError& err) {
        throw ParseError(err.what(), source);
    }
}

EdgeSft parse_text_words(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    Alphabet alpha;
    std::vector<std::string> words;
    bool have_alpha = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line = line.substr(start);
        if (!have_alpha) {
            std::istringstream toks(line);
            std::string t;
            while (toks >> t) alpha.push_back(t);
            have_alpha = true;
        } else {
            std::istringstream toks(line);
            std::string t;
            int count = 0;
            while (toks >> t) {
                words.push_back(t);
                ++count;
            }
            if (count != 1)
                throw ParseError("expected one forbidden word per line",
                                 source + ":" + std::to_string(lineno));
        }
    }
    if (!have_alpha) throw ParseError("input is empty", source);
    try {
        return higher_block(alpha, words);
    } catch (const DomainError& err) {
        throw ParseError(err.what(), source);
    }
}

} // namespace

EdgeSft parse_sft(const std::string& text, const std::string& source_name) {
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ParseError("input is empty", source_name);
    if (text[first] != '{') return parse_text_words(text, source_name);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(err.what(), source_name);
    }
    if (j.contains("vertices") && j.contains("edges")) return parse_json_graph(j, source_name);
    if (j.contains("alphabet") && j.contains("forbidden")) return parse_json_words(j, source_name);
    throw ParseError("expected either vertices/edges or alphabet/forbidden keys", source_name);
}

double entropy(const EdgeSft& s, double tol) {
    if (s.empty()) throw DomainError("entropy of the empty shift is undefined");
    int ncomp = 0;
    auto comp = detail::scc_ids(s.vertex_count(), vertex_adjacency(s), &ncomp);
    std::vector<std::vector<int>> members(ncomp);
    for (int v = 0; v < s.vertex_count(); ++v) members[comp[v]].push_back(v);
    std::vector<int> internal_edges(ncomp, 0);
    for (const auto& e : s.edges())
        if (comp[e.from] == comp[e.to]) internal_edges[comp[e.from]]++;

    double best = 0.0;
    for (int c = 0; c < ncomp; ++c) {
        const int m = static_cast<int>(members[c].size());
        const int ec = internal_edges[c];
        if (ec == 0) continue;
        double sr;
        if (m == 1) {
            sr = ec;
        } else if (ec == m) {
            sr = 1.0;
        } else {
            std::vector<int> local(s.vertex_count(), -1);
            for (int i = 0; i < m; ++i) local[members[c][i]] = i;
            std::vector<double> a(static_cast<size_t>(m) * m, 0.0);
            for (const auto& e : s.edges())
                if (comp[e.from] == c && comp[e.to] == c)
                    a[static_cast<size_t>(local[e.from]) * m + local[e.to]] += 1.0;
            std::vector<double> x(m, 1.0), y(m, 0.0);
            double lo = 0.0, hi = std::numeric_limits<double>::infinity();
            for (int iter = 0; iter < 1000000; ++iter) {
                for (int i = 0; i < m; ++i) {
                    double acc = x[i];
                    for (int jv = 0; jv < m; ++jv) acc += a[static_cast<size_t>(i) * m + jv] * x[jv];
                    y[i] = acc;
                }
                lo = std::numeric_limits<double>::infinity();
                hi = 0.0;
                double norm = 0.0;
                for (int i = 0; i < m; ++i) {
                    double q = y[i] / x[i];
                    lo = std::min(lo, q);
                    hi = std::max(hi, q);
                    norm = std::max(norm, y[i]);
                }
                if (hi - lo < tol) break;
                for (int i = 0; i < m; ++i) x[i] = y[i] / norm;
            }
            sr = 0.5 * (lo + hi) - 1.0;
        }
        best = std::max(best, sr);
    }
    return std::log(best);
}

PointCountClass classify_point_count(const EdgeSft& s, int max_period) {
    if (max_period < 1) throw DomainError("max_period must be positive");
    if (s.empty()) return {PointCountClass::Kind::Empty, 0};
    int ncomp = 0;
    auto comp = detail::scc_ids(s.vertex_count(), vertex_adjacency(s), &ncomp);
    std::vector<int> verts(ncomp, 0), edges(ncomp, 0);
    for (int v = 0; v < s.vertex_count(); ++v) verts[comp[v]]++;
    for (const auto& e : s.edges())
        if (comp[e.from] == comp[e.to]) edges[comp[e.from]]++;
    long orbits = 0;
    for (int c = 0; c < ncomp; ++c) {
        if (edges[c] > verts[c]) return {PointCountClass::Kind::Infinite, 0};
        if (edges[c] == verts[c] && verts[c] <= max_period) ++orbits;
    }
    return {PointCountClass::Kind::Finite, orbits};
}

int PathPoint::edge_at(long i) const {
    const long ms = middle_start;
    const long me = ms + static_cast<long>(middle.size());
    if (i < ms) return left_cycle[mod_index(i - ms, left_cycle.size())];
    if (i < me) return middle[static_cast<size_t>(i - ms)];
    return right_cycle[mod_index(i - me, right_cycle.size())];
}

void validate_point(const EdgeSft& s, const PathPoint& p) {
    if (p.left_cycle.empty() || p.right_cycle.empty())
        throw PreconditionError("tail cycles must be nonempty");
    auto edge = [&](int i) -> const SftEdge& {
        if (i < 0 || i >= s.edge_count()) throw PreconditionError("edge index out of range");
        return s.edges()[i];
    };
    auto check_chain = [&](const std::vector<int>& seq) {
        for (size_t i = 0; i + 1 < seq.size(); ++i)
            if (edge(seq[i]).to != edge(seq[i + 1]).from)
                throw PreconditionError("consecutive edges do not chain");
    };
    check_chain(p.left_cycle);
    check_chain(p.middle);
    check_chain(p.right_cycle);
    if (edge(p.left_cycle.back()).to != edge(p.left_cycle.front()).from)
        throw PreconditionError("left cycle is not closed");
    if (edge(p.right_cycle.back()).to != edge(p.right_cycle.front()).from)
        throw PreconditionError("right cycle is not closed");
    const int after_left = p.middle.empty() ? edge(p.right_cycle.front()).from
                                            : edge(p.middle.front()).from;
    if (edge(p.left_cycle.back()).to != after_left)
        throw PreconditionError("left tail does not chain into the middle");
    if (!p.middle.empty() && edge(p.middle.back()).to != edge(p.right_cycle.front()).from)
        throw PreconditionError("middle does not chain into the right tail");
}

FiniteConfiguration symbol_window(const EdgeSft& s, const PathPoint& p, long lo, long hi) {
    if (lo > hi) throw DomainError("empty window");
    std::vector<int> cells;
    cells.reserve(static_cast<size_t>(hi - lo + 1));
    for (long i = lo; i <= hi; ++i) cells.push_back(s.edges()[p.edge_at(i)].symbol);
    return make_configuration(s.alphabet(), lo, std::move(cells));
}

namespace {

std::vector<long> symbol_diffs(const EdgeSft& s, const PairWitness& w, long lo, long hi) {
    std::vector<long> out;
    for (long i = lo; i <= hi; ++i) {
        if (s.edges()[w.x.edge_at(i)].symbol != s.edges()[w.y.edge_at(i)].symbol)
            out.push_back(i);
    }
    return out;
}

} // namespace

void validate_witness(const EdgeSft& s, const PairWitness& w) {
    validate_point(s, w.x);
    validate_point(s, w.y);
    const long pl = std::lcm(static_cast<long>(w.x.left_cycle.size()),
                             static_cast<long>(w.y.left_cycle.size()));
    const long pr = std::lcm(static_cast<long>(w.x.right_cycle.size()),
                             static_cast<long>(w.y.right_cycle.size()));
    const long m0 = std::min(w.x.middle_start, w.y.middle_start);
    const long m1 = std::max(w.x.middle_start + static_cast<long>(w.x.middle.size()),
                             w.y.middle_start + static_cast<long>(w.y.middle.size()));
    long wl = std::min(m0, w.disagreement_lo) - pl;
    long wr = std::max(m1, w.disagreement_hi + 1) + pr - 1;
    auto diffs = symbol_diffs(s, w, wl, wr);
    if (diffs.empty()) throw PreconditionError("witness points are equal");
    switch (w.kind) {
        case PairWitness::Kind::Homoclinic:
            if (w.disagreement_lo > w.disagreement_hi)
                throw PreconditionError("empty disagreement window");
            if (diffs.front() != w.disagreement_lo || diffs.back() != w.disagreement_hi)
                throw PreconditionError("disagreements do not match the declared window");
            break;
        case PairWitness::Kind::ForwardAsymptotic:
            if (diffs.back() != w.disagreement_hi)
                throw PreconditionError("points do not merge after the declared position");
            break;
        case PairWitness::Kind::BackwardAsymptotic:
            if (diffs.front() != w.disagreement_lo)
                throw PreconditionError("points do not merge before the declared position");
            break;
    }
}

namespace {

using PairLink = std::array<int, 3>; // {state, edge for x, edge for y}

struct PairGraph {
    int nv = 0;
    std::vector<std::vector<PairLink>> adj;  // state -> (target, e, g)
    std::vector<std::vector<PairLink>> radj; // state -> (source, e, g)
};

PairGraph build_pair_graph(const EdgeSft& s) {
    PairGraph pg;
    pg.nv = s.vertex_count();
    const int n = pg.nv * pg.nv;
    pg.adj.assign(n, {});
    pg.radj.assign(n, {});
    for (int u = 0; u < pg.nv; ++u) {
        for (int v = 0; v < pg.nv; ++v) {
            const int st = u * pg.nv + v;
            for (int e : s.out_edges()[u]) {
                for (int g : s.out_edges()[v]) {
                    const int t = s.edges()[e].to * pg.nv + s.edges()[g].to;
                    pg.adj[st].push_back({t, e, g});
                    pg.radj[t].push_back({st, e, g});
                }
            }
        }
    }
    return pg;
}

// BFS over the given adjacency from the seeds, recording for each reached
// state the link used to discover it.
void pair_bfs(const std::vector<std::vector<PairLink>>& adj, const std::vector<int>& seeds,
              std::vector<int>& dist, std::vector<PairLink>& link) {
    dist.assign(adj.size(), -1);
    link.assign(adj.size(), {-1, -1, -1});
    std::queue<int> q;
    for (int sd : seeds) {
        if (dist[sd] != 0) {
            dist[sd] = 0;
            q.push(sd);
        }
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& [t, e, g] : adj[v]) {
            if (dist[t] == -1) {
                dist[t] = dist[v] + 1;
                link[t] = {v, e, g};
                q.push(t);
            }
        }
    }
}

std::vector<int> diagonal_states(int nv) {
    std::vector<int> out;
    for (int v = 0; v < nv; ++v) out.push_back(v * nv + v);
    return out;
}

// Follows discovery links from `st` to a seed and returns the transitions in
// chronological order plus the seed state. Predecessor links are collected
// newest first and need a flip; successor links come out chronological.
std::pair<std::vector<std::pair<int, int>>, int>
unwind(const std::vector<PairLink>& link, const std::vector<int>& dist, int st, bool flip) {
    std::vector<std::pair<int, int>> path;
    int cur = st;
    while (dist[cur] > 0) {
        auto [nxt, e, g] = link[cur];
        path.push_back({e, g});
        cur = nxt;
    }
    if (flip) std::reverse(path.begin(), path.end());
    return {path, cur};
}

std::vector<char> base_on_cycle(const EdgeSft& s) {
    int ncomp = 0;
    auto comp = detail::scc_ids(s.vertex_count(), vertex_adjacency(s), &ncomp);
    std::vector<char> comp_has_edge(ncomp, 0);
    for (const auto& e : s.edges())
        if (comp[e.from] == comp[e.to]) comp_has_edge[comp[e.from]] = 1;
    std::vector<char> on(s.vertex_count(), 0);
    for (int v = 0; v < s.vertex_count(); ++v) on[v] = comp_has_edge[comp[v]];
    return on;
}

// Shortest path from some cycle vertex into `a` (edges in forward order),
// found by a backward search.
std::pair<std::vector<int>, int> connector_into(const EdgeSft& s, const std::vector<char>& on_cycle, int a) {
    if (on_cycle[a]) return {{}, a};
    std::vector<int> next_edge(s.vertex_count(), -1);
    std::vector<char> seen(s.vertex_count(), 0);
    seen[a] = 1;
    std::queue<int> q;
    q.push(a);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int e : s.in_edges()[v]) {
            int u = s.edges()[e].from;
            if (seen[u]) continue;
            seen[u] = 1;
            next_edge[u] = e;
            if (on_cycle[u]) {
                std::vector<int> path;
                int cur = u;
                while (cur != a) {
                    path.push_back(next_edge[cur]);
                    cur = s.edges()[next_edge[cur]].to;
                }
                return {path, u};
            }
            q.push(u);
        }
    }
    throw PreconditionError("vertex is not reachable from any cycle");
}

// Shortest path from `b` out to some cycle vertex.
std::pair<std::vector<int>, int> connector_out_of(const EdgeSft& s, const std::vector<char>& on_cycle, int b) {
    if (on_cycle[b]) return {{}, b};
    std::vector<int> prev_edge(s.vertex_count(), -1);
    std::vector<char> seen(s.vertex_count(), 0);
    seen[b] = 1;
    std::queue<int> q;
    q.push(b);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int e : s.out_edges()[v]) {
            int u = s.edges()[e].to;
            if (seen[u]) continue;
            seen[u] = 1;
            prev_edge[u] = e;
            if (on_cycle[u]) {
                std::vector<int> path;
                int cur = u;
                while (cur != b) {
                    path.push_back(prev_edge[cur]);
                    cur = s.edges()[prev_edge[cur]].from;
                }
                std::reverse(path.begin(), path.end());
                return {path, u};
            }
            q.push(u);
        }
    }
    throw PreconditionError("vertex cannot reach any cycle");
}

std::vector<int> shortest_cycle_at(const EdgeSft& s, int w) {
    std::vector<int> prev_edge(s.vertex_count(), -1);
    std::vector<int> dist(s.vertex_count(), -1);
    dist[w] = 0;
    std::queue<int> q;
    q.push(w);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int e : s.out_edges()[v]) {
            int u = s.edges()[e].to;
            if (dist[u] != -1) continue;
            dist[u] = dist[v] + 1;
            prev_edge[u] = e;
            q.push(u);
        }
    }
    int best_edge = -1, best_len = -1;
    for (int e : s.in_edges()[w]) {
        int u = s.edges()[e].from;
        if (dist[u] == -1) continue;
        int len = dist[u] + 1;
        if (best_edge == -1 || len < best_len) {
            best_edge = e;
            best_len = len;
        }
    }
    if (best_edge == -1) throw PreconditionError("vertex lies on no cycle");
    std::vector<int> path;
    int cur = s.edges()[best_edge].from;
    while (cur != w) {
        path.push_back(prev_edge[cur]);
        cur = s.edges()[prev_edge[cur]].from;
    }
    std::reverse(path.begin(), path.end());
    path.push_back(best_edge);
    return path;
}

std::vector<char> pair_on_cycle(const PairGraph& pg) {
    const int n = static_cast<int>(pg.adj.size());
    std::vector<std::vector<int>> adj(n);
    for (int st = 0; st < n; ++st)
        for (const auto& [t, e, g] : pg.adj[st]) adj[st].push_back(t);
    int ncomp = 0;
    auto comp = detail::scc_ids(n, adj, &ncomp);
    std::vector<char> comp_has_edge(ncomp, 0);
    for (int st = 0; st < n; ++st)
        for (int t : adj[st])
            if (comp[st] == comp[t]) comp_has_edge[comp[st]] = 1;
    std::vector<char> on(n, 0);
    for (int st = 0; st < n; ++st) on[st] = comp_has_edge[comp[st]];
    return on;
}

std::pair<std::vector<std::pair<int, int>>, int>
pair_connector_into(const PairGraph& pg, const std::vector<char>& on_cycle, int target) {
    if (on_cycle[target]) return {{}, target};
    const int n = static_cast<int>(pg.adj.size());
    std::vector<PairLink> next(n, {-1, -1, -1});
    std::vector<char> seen(n, 0);
    seen[target] = 1;
    std::queue<int> q;
    q.push(target);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& [u, e, g] : pg.radj[v]) {
            if (seen[u]) continue;
            seen[u] = 1;
            next[u] = {v, e, g};
            if (on_cycle[u]) {
                std::vector<std::pair<int, int>> path;
                int cur = u;
                while (cur != target) {
                    auto [nx, pe, pgx] = next[cur];
                    path.push_back({pe, pgx});
                    cur = nx;
                }
                return {path, u};
            }
            q.push(u);
        }
    }
    throw PreconditionError("pair state is not reachable from any cycle");
}

std::vector<std::pair<int, int>> pair_shortest_cycle_at(const PairGraph& pg, int w) {
    const int n = static_cast<int>(pg.adj.size());
    std::vector<PairLink> prev(n, {-1, -1, -1});
    std::vector<int> dist(n, -1);
    dist[w] = 0;
    std::queue<int> q;
    q.push(w);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& [t, e, g] : pg.adj[v]) {
            if (dist[t] != -1) continue;
            dist[t] = dist[v] + 1;
            prev[t] = {v, e, g};
            q.push(t);
        }
    }
    int best_src = -1, best_e = -1, best_g = -1, best_len = -1;
    for (const auto& [u, e, g] : pg.radj[w]) {
        if (dist[u] == -1) continue;
        int len = dist[u] + 1;
        if (best_src == -1 || len < best_len) {
            best_src = u;
            best_e = e;
            best_g = g;
            best_len = len;
        }
    }
    if (best_src == -1) throw PreconditionError("pair state lies on no cycle");
    std::vector<std::pair<int, int>> path;
    int cur = best_src;
    while (cur != w) {
        auto [p, e, g] = prev[cur];
        path.push_back({e, g});
        cur = p;
    }
    std::reverse(path.begin(), path.end());
    path.push_back({best_e, best_g});
    return path;
}

std::vector<long> middle_diff_offsets(const EdgeSft& s, const std::vector<int>& mx,
                                      const std::vector<int>& my) {
    std::vector<long> out;
    for (size_t i = 0; i < mx.size(); ++i)
        if (s.edges()[mx[i]].symbol != s.edges()[my[i]].symbol)
            out.push_back(static_cast<long>(i));
    return out;
}

EdgeSft reversed(const EdgeSft& s) {
    std::vector<SftEdge> es;
    for (const auto& e : s.edges()) es.push_back({e.id, e.to, e.from, e.symbol});
    return EdgeSft(s.vertices(), std::move(es), s.alphabet());
}

PathPoint reverse_point(const PathPoint& p) {
    PathPoint q;
    q.left_cycle.assign(p.right_cycle.rbegin(), p.right_cycle.rend());
    q.right_cycle.assign(p.left_cycle.rbegin(), p.left_cycle.rend());
    q.middle.assign(p.middle.rbegin(), p.middle.rend());
    q.middle_start = -p.middle_start - static_cast<long>(p.middle.size());
    return q;
}

} // namespace

std::optional<PairWitness> find_homoclinic_pair(const EdgeSft& s) {
    if (s.empty()) return std::nullopt;
    const PairGraph pg = build_pair_graph(s);
    const auto diag = diagonal_states(pg.nv);
    std::vector<int> dist_from, dist_to;
    std::vector<PairLink> pred, succ;
    pair_bfs(pg.adj, diag, dist_from, pred);
    pair_bfs(pg.radj, diag, dist_to, succ);

    long best_cost = -1;
    int best_state = -1, best_e = -1, best_g = -1;
    for (int u = 0; u < pg.nv; ++u) {
        for (int v = 0; v < pg.nv; ++v) {
            const int st = u * pg.nv + v;
            if (dist_from[st] < 0) continue;
            for (int e : s.out_edges()[u]) {
                for (int g : s.out_edges()[v]) {
                    if (s.edges()[e].symbol == s.edges()[g].symbol) continue;
                    const int t = s.edges()[e].to * pg.nv + s.edges()[g].to;
                    if (dist_to[t] < 0) continue;
                    const long cost = dist_from[st] + 1 + dist_to[t];
                    if (best_cost < 0 || cost < best_cost) {
                        best_cost = cost;
                        best_state = st;
                        best_e = e;
                        best_g = g;
                    }
                }
            }
        }
    }
    if (best_state < 0) return std::nullopt;

    const int t = s.edges()[best_e].to * pg.nv + s.edges()[best_g].to;
    auto [path_in, d1] = unwind(pred, dist_from, best_state, true);
    auto [path_out, d2] = unwind(succ, dist_to, t, false);
    const int a = d1 % pg.nv;
    const int b = d2 % pg.nv;

    const auto on_cycle = base_on_cycle(s);
    auto [conn_in, cl] = connector_into(s, on_cycle, a);
    auto [conn_out, cr] = connector_out_of(s, on_cycle, b);

    PairWitness w;
    w.kind = PairWitness::Kind::Homoclinic;
    auto push_equal = [&](const std::vector<int>& seq) {
        for (int e : seq) {
            w.x.middle.push_back(e);
            w.y.middle.push_back(e);
        }
    };
    auto push_pairs = [&](const std::vector<std::pair<int, int>>& seq) {
        for (const auto& [e, g] : seq) {
            w.x.middle.push_back(e);
            w.y.middle.push_back(g);
        }
    };
    push_equal(conn_in);
    push_pairs(path_in);
    w.x.middle.push_back(best_e);
    w.y.middle.push_back(best_g);
    push_pairs(path_out);
    push_equal(conn_out);
    w.x.left_cycle = w.y.left_cycle = shortest_cycle_at(s, cl);
    w.x.right_cycle = w.y.right_cycle = shortest_cycle_at(s, cr);

    const auto offs = middle_diff_offsets(s, w.x.middle, w.y.middle);
    w.x.middle_start = w.y.middle_start = -offs.front();
    w.disagreement_lo = 0;
    w.disagreement_hi = offs.back() - offs.front();
    validate_witness(s, w);
    return w;
}

namespace {

PairWitness find_forward_asymptotic(const EdgeSft& s) {
    const PairGraph pg = build_pair_graph(s);
    const auto diag = diagonal_states(pg.nv);
    std::vector<int> dist_to;
    std::vector<PairLink> succ;
    pair_bfs(pg.radj, diag, dist_to, succ);

    long best_cost = -1;
    int best_state = -1, best_e = -1, best_g = -1;
    for (int u = 0; u < pg.nv; ++u) {
        for (int v = 0; v < pg.nv; ++v) {
            const int st = u * pg.nv + v;
            for (int e : s.out_edges()[u]) {
                for (int g : s.out_edges()[v]) {
                    if (s.edges()[e].symbol == s.edges()[g].symbol) continue;
                    const int t = s.edges()[e].to * pg.nv + s.edges()[g].to;
                    if (dist_to[t] < 0) continue;
                    const long cost = dist_to[t];
                    if (best_cost < 0 || cost < best_cost) {
                        best_cost = cost;
                        best_state = st;
                        best_e = e;
                        best_g = g;
                    }
                }
            }
        }
    }
    if (best_state < 0)
        throw DomainError("the shift supports no forward asymptotic pair");

    const int t = s.edges()[best_e].to * pg.nv + s.edges()[best_g].to;
    const auto on_pair_cycle = pair_on_cycle(pg);
    auto [pair_conn, h] = pair_connector_into(pg, on_pair_cycle, best_state);
    const auto pair_cyc = pair_shortest_cycle_at(pg, h);
    auto [path_out, d2] = unwind(succ, dist_to, t, false);
    const int b = d2 % pg.nv;
    const auto on_cycle = base_on_cycle(s);
    auto [conn_out, cr] = connector_out_of(s, on_cycle, b);

    PairWitness w;
    w.kind = PairWitness::Kind::ForwardAsymptotic;
    for (const auto& [e, g] : pair_cyc) {
        w.x.left_cycle.push_back(e);
        w.y.left_cycle.push_back(g);
    }
    auto push_pairs = [&](const std::vector<std::pair<int, int>>& seq) {
        for (const auto& [e, g] : seq) {
            w.x.middle.push_back(e);
            w.y.middle.push_back(g);
        }
    };
    push_pairs(pair_conn);
    w.x.middle.push_back(best_e);
    w.y.middle.push_back(best_g);
    push_pairs(path_out);
    for (int e : conn_out) {
        w.x.middle.push_back(e);
        w.y.middle.push_back(e);
    }
    w.x.right_cycle = w.y.right_cycle = shortest_cycle_at(s, cr);

    const auto offs = middle_diff_offsets(s, w.x.middle, w.y.middle);
    w.x.middle_start = w.y.middle_start = -offs.back();
    w.disagreement_hi = 0;
    w.disagreement_lo = offs.front() - offs.back();
    validate_witness(s, w);
    return w;
}

} // namespace

PairWitness find_asymptotic_pair(const EdgeSft& s, AsymptoticDirection dir) {
    if (classify_point_count(s, 1).kind != PointCountClass::Kind::Infinite)
        throw DomainError("asymptotic pair search requires an infinite subshift");
    if (dir == AsymptoticDirection::Forward) return find_forward_asymptotic(s);
    PairWitness rev = find_forward_asymptotic(reversed(s));
    PairWitness w;
    w.kind = PairWitness::Kind::BackwardAsymptotic;
    w.x = reverse_point(rev.x);
    w.y = reverse_point(rev.y);
    const auto offs = middle_diff_offsets(s, w.x.middle, w.y.middle);
    const long delta = -(w.x.middle_start + offs.front());
    w.x.middle_start += delta;
    w.y.middle_start += delta;
    w.disagreement_lo = 0;
    w.disagreement_hi = offs.back() - offs.front();
    validate_witness(s, w);
    return w;
}

nlohmann::ordered_json path_point_to_json(const EdgeSft& s, const PathPoint& p) {
    auto ids = [&](const std::vector<int>& seq) {
        std::vector<std::string> out;
        for (int e : seq) out.push_back(s.edges()[e].id);
        return out;
    };
    nlohmann::ordered_json j;
    j["left_cycle"] = ids(p.left_cycle);
    j["middle"] = ids(p.middle);
    j["middle_start"] = p.middle_start;
    j["right_cycle"] = ids(p.right_cycle);
    return j;
}

PathPoint path_point_from_json(const EdgeSft& s, const nlohmann::ordered_json& j) {
    std::unordered_map<std::string, int> idx;
    for (int i = 0; i < s.edge_count(); ++i) idx[s.edges()[i].id] = i;
    auto seq = [&](const nlohmann::ordered_json& arr, const char* where) {
        std::vector<int> out;
        if (!arr.is_array()) throw ParseError("expected an array of edge ids", where);
        for (const auto& v : arr) {
            if (!v.is_string()) throw ParseError("edge ids must be strings", where);
            auto it = idx.find(v.get<std::string>());
            if (it == idx.end())
                throw ParseError("unknown edge id: " + v.get<std::string>(), where);
            out.push_back(it->second);
        }
        return out;
    };
    PathPoint p;
    p.left_cycle = seq(j.at("left_cycle"), "left_cycle");
    p.middle = seq(j.at("middle"), "middle");
    p.right_cycle = seq(j.at("right_cycle"), "right_cycle");
    p.middle_start = j.at("middle_start").get<long>();
    return p;
}

nlohmann::ordered_json witness_to_json(const EdgeSft& s, const PairWitness& w) {
    nlohmann::ordered_json j;
    switch (w.kind) {
        case PairWitness::Kind::Homoclinic: j["kind"] = "homoclinic"; break;
        case PairWitness::Kind::ForwardAsymptotic: j["kind"] = "forward_asymptotic"; break;
        case PairWitness::Kind::BackwardAsymptotic: j["kind"] = "backward_asymptotic"; break;
    }
    j["x"] = path_point_to_json(s, w.x);
    j["y"] = path_point_to_json(s, w.y);
    j["disagreement_lo"] = w.disagreement_lo;
    j["disagreement_hi"] = w.disagreement_hi;
    return j;
}

PairWitness witness_from_json(const EdgeSft& s, const nlohmann::ordered_json& j) {
    PairWitness w;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "homoclinic") {
        w.kind = PairWitness::Kind::Homoclinic;
    } else if (kind == "forward_asymptotic") {
        w.kind = PairWitness::Kind::ForwardAsymptotic;
    } else if (kind == "backward_asymptotic") {
        w.kind = PairWitness::Kind::BackwardAsymptotic;
    } else {
        throw ParseError("unknown witness kind: " + kind, "witness");
    }
    w.x = path_point_from_json(s, j.at("x"));
    w.y = path_point_from_json(s, j.at("y"));
    w.disagreement_lo = j.at("disagreement_lo").get<long>();
    w.disagreement_hi = j.at("disagreement_hi").get<long>();
    return w;
}

} // namespace shiftgamma
