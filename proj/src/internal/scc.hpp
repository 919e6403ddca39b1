#pragma once

#include <vector>

namespace shiftgamma::detail {

// Iterative Tarjan. Returns component id per node; ids are assigned in reverse
// topological order (a component's id is larger than those it can reach).
// Deterministic for a fixed adjacency layout.
inline std::vector<int> scc_ids(int n, const std::vector<std::vector<int>>& adj, int* count_out) {
    std::vector<int> comp(n, -1), low(n, 0), disc(n, -1), stk;
    std::vector<char> on_stack(n, 0);
    std::vector<std::pair<int, size_t>> frame;
    int timer = 0, comps = 0;

    for (int root = 0; root < n; ++root) {
        if (disc[root] != -1) continue;
        frame.push_back({root, 0});
        while (!frame.empty()) {
            auto& [v, ei] = frame.back();
            if (ei == 0) {
                disc[v] = low[v] = timer++;
                stk.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (ei < adj[v].size()) {
                int w = adj[v][ei++];
                if (disc[w] == -1) {
                    frame.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w] && disc[w] < low[v]) low[v] = disc[w];
            }
            if (descended) continue;
            if (low[v] == disc[v]) {
                while (true) {
                    int w = stk.back();
                    stk.pop_back();
                    on_stack[w] = 0;
                    comp[w] = comps;
                    if (w == v) break;
                }
                ++comps;
            }
            int parent_low = low[v];
            frame.pop_back();
            if (!frame.empty()) {
                int p = frame.back().first;
                if (parent_low < low[p]) low[p] = parent_low;
            }
        }
    }
    if (count_out) *count_out = comps;
    return comp;
}

} // namespace shiftgamma::detail
