#include "shiftgamma/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <vector>

#include "internal/scc.hpp"
#include "shiftgamma/errors.hpp"

namespace shiftgamma {

namespace {

long circ_dist(long residue, long n) { return std::min(residue, n - residue); }

struct CTrans {
    int target;
    int e;
    int g;
};

// Pair graph synchronized with a phase counter mod n. A transition leaving
// phase p writes cell p; phases within m-1 of 0 admit only transitions whose
// two edges emit the same symbol.
struct ConstrainedGraph {
    int nv = 0;
    long n = 1;
    int nstates = 0;
    std::vector<std::vector<CTrans>> adj;
    std::vector<std::vector<CTrans>> radj;

    int state(int u, int v, long phase) const {
        return static_cast<int>((static_cast<long>(u) * nv + v) * n + phase);
    }
};

ConstrainedGraph build_constrained(const EdgeSft& s, long n, long m) {
    ConstrainedGraph cg;
    cg.nv = s.vertex_count();
    cg.n = n;
    cg.nstates = static_cast<int>(static_cast<long>(cg.nv) * cg.nv * n);
    cg.adj.assign(cg.nstates, {});
    cg.radj.assign(cg.nstates, {});
    for (int u = 0; u < cg.nv; ++u) {
        for (int v = 0; v < cg.nv; ++v) {
            for (long phase = 0; phase < n; ++phase) {
                const bool locked = circ_dist(phase, n) <= m - 1;
                const int st = cg.state(u, v, phase);
                for (int e : s.out_edges()[u]) {
                    for (int g : s.out_edges()[v]) {
                        if (locked && s.edges()[e].symbol != s.edges()[g].symbol) continue;
                        const int t = cg.state(s.edges()[e].to, s.edges()[g].to, (phase + 1) % n);
                        cg.adj[st].push_back({t, e, g});
                        cg.radj[t].push_back({st, e, g});
                    }
                }
            }
        }
    }
    return cg;
}

std::vector<char> on_cycle_states(const ConstrainedGraph& cg) {
    std::vector<std::vector<int>> adj(cg.nstates);
    for (int st = 0; st < cg.nstates; ++st)
        for (const auto& tr : cg.adj[st]) adj[st].push_back(tr.target);
    int ncomp = 0;
    auto comp = detail::scc_ids(cg.nstates, adj, &ncomp);
    std::vector<char> comp_cyclic(ncomp, 0);
    for (int st = 0; st < cg.nstates; ++st)
        for (int t : adj[st])
            if (comp[st] == comp[t]) comp_cyclic[comp[st]] = 1;
    std::vector<char> on(cg.nstates, 0);
    for (int st = 0; st < cg.nstates; ++st) on[st] = comp_cyclic[comp[st]];
    return on;
}

std::vector<char> grow_reach(const std::vector<std::vector<CTrans>>& adj, const std::vector<char>& seed) {
    std::vector<char> seen = seed;
    std::queue<int> q;
    for (size_t st = 0; st < seen.size(); ++st)
        if (seen[st]) q.push(static_cast<int>(st));
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& tr : adj[v]) {
            if (!seen[tr.target]) {
                seen[tr.target] = 1;
                q.push(tr.target);
            }
        }
    }
    return seen;
}

// BFS over the reversed graph from `src` until a cycle state; returns the
// connecting transitions in chronological order plus the cycle state.
std::pair<std::vector<std::pair<int, int>>, int>
connector_from_cycle(const ConstrainedGraph& cg, const std::vector<char>& on_cycle, int src) {
    if (on_cycle[src]) return {{}, src};
    std::vector<CTrans> next(cg.nstates, {-1, -1, -1});
    std::vector<char> seen(cg.nstates, 0);
    seen[src] = 1;
    std::queue<int> q;
    q.push(src);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& tr : cg.radj[v]) {
            if (seen[tr.target]) continue;
            seen[tr.target] = 1;
            next[tr.target] = {v, tr.e, tr.g};
            if (on_cycle[tr.target]) {
                std::vector<std::pair<int, int>> path;
                int cur = tr.target;
                while (cur != src) {
                    path.push_back({next[cur].e, next[cur].g});
                    cur = next[cur].target;
                }
                return {path, tr.target};
            }
            q.push(tr.target);
        }
    }
    throw PreconditionError("constrained state unreachable from any cycle");
}

std::pair<std::vector<std::pair<int, int>>, int>
connector_to_cycle(const ConstrainedGraph& cg, const std::vector<char>& on_cycle, int tgt) {
    if (on_cycle[tgt]) return {{}, tgt};
    std::vector<CTrans> prev(cg.nstates, {-1, -1, -1});
    std::vector<char> seen(cg.nstates, 0);
    seen[tgt] = 1;
    std::queue<int> q;
    q.push(tgt);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& tr : cg.adj[v]) {
            if (seen[tr.target]) continue;
            seen[tr.target] = 1;
            prev[tr.target] = {v, tr.e, tr.g};
            if (on_cycle[tr.target]) {
                std::vector<std::pair<int, int>> path;
                int cur = tr.target;
                while (cur != tgt) {
                    path.push_back({prev[cur].e, prev[cur].g});
                    cur = prev[cur].target;
                }
                std::reverse(path.begin(), path.end());
                return {path, tr.target};
            }
            q.push(tr.target);
        }
    }
    throw PreconditionError("constrained state reaches no cycle");
}

std::vector<std::pair<int, int>> cycle_through(const ConstrainedGraph& cg, int w) {
    std::vector<CTrans> prev(cg.nstates, {-1, -1, -1});
    std::vector<int> dist(cg.nstates, -1);
    dist[w] = 0;
    std::queue<int> q;
    q.push(w);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& tr : cg.adj[v]) {
            if (dist[tr.target] != -1) continue;
            dist[tr.target] = dist[v] + 1;
            prev[tr.target] = {v, tr.e, tr.g};
            q.push(tr.target);
        }
    }
    int best_src = -1, best_e = -1, best_g = -1, best_len = -1;
    for (const auto& tr : cg.radj[w]) {
        if (dist[tr.target] == -1) continue;
        int len = dist[tr.target] + 1;
        if (best_src == -1 || len < best_len) {
            best_src = tr.target;
            best_e = tr.e;
            best_g = tr.g;
            best_len = len;
        }
    }
    if (best_src == -1) throw PreconditionError("constrained state lies on no cycle");
    std::vector<std::pair<int, int>> path;
    int cur = best_src;
    while (cur != w) {
        path.push_back({prev[cur].e, prev[cur].g});
        cur = prev[cur].target;
    }
    std::reverse(path.begin(), path.end());
    path.push_back({best_e, best_g});
    return path;
}

} // namespace

std::pair<bool, std::optional<GammaWitness>>
constrained_pair_exists(const EdgeSft& s, long n, long m) {
    if (n < 1) throw DomainError("period must be positive");
    if (m < 0 || m > n / 2) throw DomainError("separation radius must lie in [0, n/2]");
    if (s.empty()) return {false, std::nullopt};

    const ConstrainedGraph cg = build_constrained(s, n, m);
    const auto on_cycle = on_cycle_states(cg);
    const auto from_cycle = grow_reach(cg.adj, on_cycle);
    const auto to_cycle = grow_reach(cg.radj, on_cycle);

    int src = -1, tgt = -1, de = -1, dg = -1;
    for (int u = 0; u < cg.nv && src < 0; ++u) {
        for (int v = 0; v < cg.nv && src < 0; ++v) {
            for (long phase = 0; phase < n && src < 0; ++phase) {
                if (circ_dist(phase, n) <= m - 1) continue;
                const int st = cg.state(u, v, phase);
                if (!from_cycle[st]) continue;
                for (int e : s.out_edges()[u]) {
                    for (int g : s.out_edges()[v]) {
                        if (s.edges()[e].symbol == s.edges()[g].symbol) continue;
                        const int t = cg.state(s.edges()[e].to, s.edges()[g].to, (phase + 1) % n);
                        if (!to_cycle[t]) continue;
                        src = st;
                        tgt = t;
                        de = e;
                        dg = g;
                        break;
                    }
                    if (src >= 0) break;
                }
            }
        }
    }
    if (src < 0) return {false, std::nullopt};

    auto [conn_in, h] = connector_from_cycle(cg, on_cycle, src);
    auto [conn_out, h2] = connector_to_cycle(cg, on_cycle, tgt);
    const auto cyc_left = cycle_through(cg, h);
    const auto cyc_right = cycle_through(cg, h2);

    GammaWitness w;
    for (const auto& [e, g] : cyc_left) {
        w.x.left_cycle.push_back(e);
        w.y.left_cycle.push_back(g);
    }
    auto push = [&](const std::vector<std::pair<int, int>>& seq) {
        for (const auto& [e, g] : seq) {
            w.x.middle.push_back(e);
            w.y.middle.push_back(g);
        }
    };
    push(conn_in);
    w.x.middle.push_back(de);
    w.y.middle.push_back(dg);
    push(conn_out);
    for (const auto& [e, g] : cyc_right) {
        w.x.right_cycle.push_back(e);
        w.y.right_cycle.push_back(g);
    }
    // Anchor positions so each transition's cell index matches its phase; the
    // found disagreement then sits at the phase of its source state.
    w.x.middle_start = w.y.middle_start = (src % n) - static_cast<long>(conn_in.size());

    if (gamma_witness_radius(s, w, n) < m)
        throw PreconditionError("internal error: constrained witness violates its radius");
    return {true, std::move(w)};
}

long gamma_witness_radius(const EdgeSft& s, const GammaWitness& w, long n) {
    if (n < 1) throw DomainError("period must be positive");
    validate_point(s, w.x);
    validate_point(s, w.y);
    const long pl = std::lcm(std::lcm(static_cast<long>(w.x.left_cycle.size()),
                                      static_cast<long>(w.y.left_cycle.size())),
                             n);
    const long pr = std::lcm(std::lcm(static_cast<long>(w.x.right_cycle.size()),
                                      static_cast<long>(w.y.right_cycle.size())),
                             n);
    const long m0 = std::min(w.x.middle_start, w.y.middle_start);
    const long m1 = std::max(w.x.middle_start + static_cast<long>(w.x.middle.size()),
                             w.y.middle_start + static_cast<long>(w.y.middle.size()));
    long best = -1;
    for (long i = m0 - pl; i < m1 + pr; ++i) {
        if (s.edges()[w.x.edge_at(i)].symbol == s.edges()[w.y.edge_at(i)].symbol) continue;
        const long residue = ((i % n) + n) % n;
        const long d = circ_dist(residue, n);
        if (best < 0 || d < best) best = d;
    }
    if (best < 0) throw PreconditionError("witness points are equal");
    return best;
}

long m_of(const EdgeSft& s, long n) {
    if (n < 1) throw DomainError("period must be positive");
    if (classify_point_count(s, 1).kind != PointCountClass::Kind::Infinite)
        throw DegenerateSystemError("separation exponent requires an infinite subshift");
    for (long m = n / 2; m >= 0; --m)
        if (constrained_pair_exists(s, n, m).first) return m;
    throw PreconditionError("internal error: no feasible separation radius on an infinite shift");
}

double GammaResult::gamma() const { return std::pow(lambda, -static_cast<double>(m)); }

GammaResult gamma_exact(const EdgeSft& s, long n, const SelfSimilarShiftMetric& metric) {
    GammaResult r;
    r.n = n;
    r.lambda = metric.lambda;
    r.m = m_of(s, n);
    auto [ok, w] = constrained_pair_exists(s, n, r.m);
    if (!ok || !w)
        throw PreconditionError("internal error: feasibility lost at the chosen radius");
    // Maximality pins the witness radius: a larger radius would contradict
    // the downward scan, and n/2 caps it from above.
    if (gamma_witness_radius(s, *w, n) != r.m)
        throw PreconditionError("internal error: witness radius does not match the exponent");
    r.witness = std::move(w);
    return r;
}

double MtFitResult::c_min() const {
    return std::pow(lambda, static_cast<double>(c_min_half_exponent) / 2.0);
}

MtFitResult mt_fit(const EdgeSft& s, const SelfSimilarShiftMetric& metric, long n_max) {
    if (n_max < 1) throw DomainError("n_max must be positive");
    MtFitResult r;
    r.lambda = metric.lambda;
    r.n_max = n_max;
    for (long n = 1; n <= n_max; ++n) {
        GammaResult gr;
        gr.n = n;
        gr.lambda = metric.lambda;
        gr.m = m_of(s, n);
        r.per_n.push_back(gr);
        r.product_half_exponents.push_back(n - 2 * gr.m);
    }
    r.c_min_half_exponent = *std::max_element(r.product_half_exponents.begin(),
                                              r.product_half_exponents.end());
    const long half_range = (n_max + 1) / 2;
    long early_max = r.product_half_exponents[0];
    for (long n = 1; n <= half_range; ++n)
        early_max = std::max(early_max, r.product_half_exponents[static_cast<size_t>(n - 1)]);
    r.decaying = (early_max == r.c_min_half_exponent);
    return r;
}

nlohmann::ordered_json gamma_witness_to_json(const EdgeSft& s, const GammaWitness& w) {
    nlohmann::ordered_json j;
    j["x"] = path_point_to_json(s, w.x);
    j["y"] = path_point_to_json(s, w.y);
    return j;
}

GammaWitness gamma_witness_from_json(const EdgeSft& s, const nlohmann::ordered_json& j) {
    GammaWitness w;
    w.x = path_point_from_json(s, j.at("x"));
    w.y = path_point_from_json(s, j.at("y"));
    return w;
}

} // namespace shiftgamma
