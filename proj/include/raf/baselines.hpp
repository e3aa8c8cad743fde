#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <vector>

#include "raf/diffusion.hpp"
#include "raf/errors.hpp"
#include "raf/graph.hpp"
#include "raf/rng.hpp"

namespace raf {

enum class Strategy { HD, SP };

struct BaselineResult {
    std::vector<NodeId> nodes; // selection order, t first
    bool clipped = false;      // budget exceeded the candidate pool
    bool padded = false;       // SP ran out of disjoint paths
};

namespace detail {

// t first, then candidates by degree descending, id ascending.
inline std::vector<NodeId> hd_order(const Instance& inst) {
    std::vector<NodeId> order;
    order.reserve(inst.candidates.size());
    for (NodeId v : inst.candidates)
        if (v != inst.t) order.push_back(v);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        return inst.graph.degree(a) > inst.graph.degree(b);
    });
    order.insert(order.begin(), inst.t);
    return order;
}

// Hop-shortest s->t path that avoids banned candidates and picks up at
// least one fresh candidate interior; empty when none exists. Seeds may
// appear as interiors, they just contribute nothing. BFS over
// (node, seen-a-candidate) states, neighbors ascending, so ties resolve
// to the lexicographically smallest path.
inline std::vector<NodeId> next_sp_contribution(const Instance& inst,
                                                const std::vector<char>& banned) {
    const SocialGraph& g = inst.graph;
    auto code = [&](NodeId v, int f) { return static_cast<std::size_t>(v) * 2 + f; };
    std::vector<std::size_t> parent(2 * g.n, static_cast<std::size_t>(-1));
    std::vector<char> seen(2 * g.n, 0);
    std::queue<std::size_t> q;
    std::size_t start = code(inst.s, 0);
    seen[start] = 1;
    q.push(start);
    std::size_t goal = code(inst.t, 1);
    while (!q.empty() && !seen[goal]) {
        std::size_t cur = q.front();
        q.pop();
        NodeId v = static_cast<NodeId>(cur / 2);
        int f = static_cast<int>(cur % 2);
        if (v == inst.t) continue; // t never sits in a path interior
        for (NodeId u : g.adj[v]) {
            if (u == inst.s) continue;
            int nf = f;
            if (inst.is_candidate(u) && u != inst.t) {
                if (banned[u]) continue;
                nf = 1;
            }
            std::size_t nxt = code(u, nf);
            if (seen[nxt]) continue;
            seen[nxt] = 1;
            parent[nxt] = cur;
            q.push(nxt);
        }
    }
    if (!seen[goal]) return {};
    std::vector<NodeId> interior;
    for (std::size_t cur = parent[goal]; cur != start; cur = parent[cur]) {
        NodeId v = static_cast<NodeId>(cur / 2);
        if (inst.is_candidate(v)) interior.push_back(v);
    }
    std::reverse(interior.begin(), interior.end());
    return interior;
}

} // namespace detail

// High-degree baseline: t plus the k-1 highest-degree candidates.
inline BaselineResult hd(const Instance& inst, std::size_t k) {
    if (k == 0) throw InvalidParameterError("budget k must be at least 1");
    BaselineResult r;
    std::vector<NodeId> order = detail::hd_order(inst);
    for (NodeId v : order) {
        if (r.nodes.size() >= k) break;
        r.nodes.push_back(v);
    }
    if (r.nodes.size() < k) r.clipped = true;
    return r;
}

// Shortest-path baseline: t plus the candidate interiors of successive
// shortest s->t paths, each disjoint from earlier picks over candidate
// interiors; high-degree padding when the paths run out. A common
// selection stream truncated at k keeps sp(k) a subset of sp(k+1).
inline BaselineResult sp(const Instance& inst, std::size_t k) {
    if (k == 0) throw InvalidParameterError("budget k must be at least 1");
    BaselineResult r;
    r.nodes.push_back(inst.t);
    std::vector<char> taken(inst.graph.n, 0);
    taken[inst.t] = 1;
    while (r.nodes.size() < k) {
        std::vector<NodeId> gain = detail::next_sp_contribution(inst, taken);
        if (gain.empty()) break;
        for (NodeId v : gain) {
            if (r.nodes.size() >= k) break;
            taken[v] = 1;
            r.nodes.push_back(v);
        }
    }
    if (r.nodes.size() < k) {
        r.padded = true;
        for (NodeId v : detail::hd_order(inst)) {
            if (r.nodes.size() >= k) break;
            if (taken[v]) continue;
            taken[v] = 1;
            r.nodes.push_back(v);
        }
        if (r.nodes.size() < k) r.clipped = true;
    }
    return r;
}

inline BaselineResult run_strategy(const Instance& inst, Strategy strategy, std::size_t k) {
    return strategy == Strategy::HD ? hd(inst, k) : sp(inst, k);
}

struct GrowResult {
    std::vector<NodeId> nodes;
    std::size_t k = 0;
    FEstimate achieved;
    bool reached = false;
};

// Smallest budget whose strategy set estimates at or above the target
// (mean >= target - one half-width); scans k upward, one fresh estimate
// stream per k.
inline GrowResult grow_until(const Instance& inst, Strategy strategy, double f_target,
                             std::uint64_t eval_samples, std::size_t k_cap,
                             std::uint64_t seed) {
    if (!(f_target >= 0.0 && f_target <= 1.0))
        throw InvalidParameterError("f_target must lie in [0,1]");
    if (k_cap == 0) throw InvalidParameterError("k_cap must be at least 1");
    GrowResult res;
    for (std::size_t k = 1; k <= k_cap; ++k) {
        BaselineResult cur = run_strategy(inst, strategy, k);
        FEstimate est = estimate_f_traces(inst, cur.nodes, eval_samples, stream_seed(seed, k));
        res.nodes = std::move(cur.nodes);
        res.k = k;
        res.achieved = est;
        if (est.mean >= f_target - est.half_width) {
            res.reached = true;
            return res;
        }
        if (cur.clipped) break; // pool exhausted, larger k changes nothing
    }
    res.reached = false;
    return res;
}

} // namespace raf
