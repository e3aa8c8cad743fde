#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "raf/errors.hpp"
#include "raf/graph.hpp"
#include "raf/parallel.hpp"
#include "raf/rng.hpp"

namespace raf {

// How a backward walk ended. ReachedSeed is the only type-1 outcome;
// the "selected nobody" event is a terminal tag, never a node id, so an
// invitation set can never claim to contain it.
enum class TraceTerminal { ReachedSeed, Dangling, Cycle, ThroughS };

struct BackwardTrace {
    std::vector<NodeId> nodes; // nodes[0] = t; never contains s or N_s
    TraceTerminal terminal = TraceTerminal::Dangling;
    NodeId seed = kNoNode;     // the N_s member reached, if any

    bool type_one() const { return terminal == TraceTerminal::ReachedSeed; }
};

// g[v] is the neighbor v selected, or kNoNode.
using FullRealization = std::vector<NodeId>;

// Draws v's selection: neighbor adj[v][i] with probability in_w[v][i],
// kNoNode with the leftover mass.
inline NodeId sample_selection(const SocialGraph& g, NodeId v, std::mt19937_64& rng) {
    const auto& w = g.in_w[v];
    if (w.empty()) return kNoNode;
    double x = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (x < acc) return g.adj[v][i];
    }
    return kNoNode;
}

// Lazy backward walk from t: only nodes on the chain ever sample a
// selection. The walk halts on a seed (type-1), a dangling selection, a
// repeat, or s itself; s is not invitable, so a chain through it can
// never be covered and counts as type-0.
inline BackwardTrace sample_backward_trace(const Instance& inst, std::mt19937_64& rng) {
    const SocialGraph& g = inst.graph;
    BackwardTrace tr;
    tr.nodes.push_back(inst.t);
    NodeId cur = inst.t;
    for (;;) {
        NodeId u = sample_selection(g, cur, rng);
        if (u == kNoNode) {
            tr.terminal = TraceTerminal::Dangling;
            return tr;
        }
        if (inst.is_seed(u)) {
            tr.terminal = TraceTerminal::ReachedSeed;
            tr.seed = u;
            return tr;
        }
        if (u == inst.s) {
            tr.terminal = TraceTerminal::ThroughS;
            return tr;
        }
        if (std::find(tr.nodes.begin(), tr.nodes.end(), u) != tr.nodes.end()) {
            tr.terminal = TraceTerminal::Cycle;
            return tr;
        }
        tr.nodes.push_back(u);
        cur = u;
    }
}

struct RealizationBatch {
    std::vector<BackwardTrace> traces;
    std::uint64_t l = 0;
    std::uint64_t ones = 0;
    std::uint64_t seed = 0;
};

// l independent traces; trace i draws from stream (master_seed, i), so
// the batch is identical for any worker count.
inline RealizationBatch sample_batch(const Instance& inst, std::uint64_t l,
                                     std::uint64_t master_seed, unsigned workers = 1) {
    RealizationBatch batch;
    batch.l = l;
    batch.seed = master_seed;
    batch.traces.resize(l);
    parallel_for(l, workers, [&](std::uint64_t i) {
        auto rng = make_stream(master_seed, i);
        batch.traces[i] = sample_backward_trace(inst, rng);
    });
    for (const auto& tr : batch.traces)
        if (tr.type_one()) ++batch.ones;
    return batch;
}

// Every node selects, whether or not any walk will look at it.
inline FullRealization sample_full_realization(const Instance& inst, std::mt19937_64& rng) {
    const SocialGraph& g = inst.graph;
    FullRealization sel(g.n, kNoNode);
    for (NodeId v = 0; v < g.n; ++v) sel[v] = sample_selection(g, v, rng);
    return sel;
}

// Backward walk through a fixed full realization (the eager counterpart
// of sample_backward_trace).
inline BackwardTrace trace_of(const Instance& inst, const FullRealization& g) {
    BackwardTrace tr;
    tr.nodes.push_back(inst.t);
    NodeId cur = inst.t;
    for (;;) {
        NodeId u = g[cur];
        if (u == kNoNode) {
            tr.terminal = TraceTerminal::Dangling;
            return tr;
        }
        if (inst.is_seed(u)) {
            tr.terminal = TraceTerminal::ReachedSeed;
            tr.seed = u;
            return tr;
        }
        if (u == inst.s) {
            tr.terminal = TraceTerminal::ThroughS;
            return tr;
        }
        if (std::find(tr.nodes.begin(), tr.nodes.end(), u) != tr.nodes.end()) {
            tr.terminal = TraceTerminal::Cycle;
            return tr;
        }
        tr.nodes.push_back(u);
        cur = u;
    }
}

// Realization-side friending process: H_0 = N_s, then nodes of I whose
// selected neighbor already belongs join round by round. Returns the
// success flag and H_infinity (seeds included).
inline std::pair<bool, std::vector<NodeId>> forward_process2(const Instance& inst,
                                                             const FullRealization& g,
                                                             const std::vector<NodeId>& I) {
    for (NodeId v : I)
        if (v >= inst.graph.n || !inst.is_candidate(v))
            throw ContractError("invitation set leaves the candidate universe");
    std::vector<char> in_h(inst.graph.n, 0);
    std::vector<NodeId> h = inst.seed_set;
    for (NodeId v : h) in_h[v] = 1;
    bool success = false;
    bool grew = true;
    while (grew && !success) {
        grew = false;
        std::vector<NodeId> joiners;
        for (NodeId v : I) {
            if (in_h[v]) continue;
            NodeId u = g[v];
            if (u != kNoNode && in_h[u]) joiners.push_back(v);
        }
        for (NodeId v : joiners) {
            in_h[v] = 1;
            h.push_back(v);
            grew = true;
            if (v == inst.t) success = true;
        }
    }
    std::sort(h.begin(), h.end());
    return {success, h};
}

inline double enumeration_size(const SocialGraph& g) {
    double prod = 1.0;
    for (NodeId v = 0; v < g.n; ++v)
        prod *= static_cast<double>(g.degree(v) + 1);
    return prod;
}

inline constexpr std::uint64_t kEnumerationCap = 10'000'000;

// Visits every realization exactly once, zero-probability branches
// included, as fn(selection vector, Pr[g]). Probabilities sum to 1.
// Choice index d for node v means neighbor adj[v][d], or kNoNode at
// d = deg(v).
template <class Fn>
void enumerate_realizations(const SocialGraph& g, Fn&& fn,
                            std::uint64_t cap = kEnumerationCap) {
    if (enumeration_size(g) > static_cast<double>(cap))
        throw EnumerationCapError("instance too large for enumeration");
    std::vector<std::size_t> choice(g.n, 0);
    FullRealization sel(g.n, kNoNode);
    std::vector<double> prob(g.n, 0.0);
    auto apply = [&](NodeId v) {
        std::size_t d = choice[v];
        if (d < g.degree(v)) {
            sel[v] = g.adj[v][d];
            prob[v] = g.in_w[v][d];
        } else {
            sel[v] = kNoNode;
            double none = 1.0;
            for (double w : g.in_w[v]) none -= w;
            prob[v] = none > 0.0 ? none : 0.0;
        }
    };
    for (NodeId v = 0; v < g.n; ++v) apply(v);
    for (;;) {
        double p = 1.0;
        for (NodeId v = 0; v < g.n; ++v) p *= prob[v];
        fn(static_cast<const FullRealization&>(sel), p);
        // odometer increment
        NodeId v = 0;
        while (v < g.n) {
            if (++choice[v] <= g.degree(v)) {
                apply(v);
                break;
            }
            choice[v] = 0;
            apply(v);
            ++v;
        }
        if (v == g.n) return;
    }
}

template <class Fn>
void enumerate_realizations(const Instance& inst, Fn&& fn,
                            std::uint64_t cap = kEnumerationCap) {
    enumerate_realizations(inst.graph, std::forward<Fn>(fn), cap);
}

} // namespace raf
