#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "raf/errors.hpp"

namespace raf {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = ~NodeId(0);

enum class WeightScheme { DegreeReciprocal, ExplicitWeights };

// Slack for checking sum_u w(u,v) <= 1 on weight files.
inline constexpr double kWeightSumSlack = 1e-9;

// Undirected social graph with per-ordered-pair familiarity weights.
// in_w[v][i] is w(adj[v][i], v): how familiar v is with its i-th
// neighbor, i.e. the weight that neighbor contributes toward v's
// threshold and the probability that v selects it in a realization.
// out_w[v][i] is the mirrored w(v, adj[v][i]).
// Immutable after construction; safe to share across threads.
struct SocialGraph {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<std::vector<NodeId>> adj; // sorted neighbor lists
    std::vector<std::vector<double>> in_w;
    std::vector<std::vector<double>> out_w;
    std::vector<std::uint64_t> label;     // dense id -> original label
    std::unordered_map<std::uint64_t, NodeId> label_to_id;

    std::size_t degree(NodeId v) const { return adj[v].size(); }

    // Position of u in adj[v], or npos.
    std::size_t neighbor_index(NodeId v, NodeId u) const {
        const auto& nv = adj[v];
        auto it = std::lower_bound(nv.begin(), nv.end(), u);
        if (it == nv.end() || *it != u) return static_cast<std::size_t>(-1);
        return static_cast<std::size_t>(it - nv.begin());
    }

    bool has_edge(NodeId u, NodeId v) const {
        return neighbor_index(v, u) != static_cast<std::size_t>(-1);
    }

    // w(u,v): v's familiarity with u; 0 when {u,v} is not an edge.
    double weight(NodeId u, NodeId v) const {
        std::size_t i = neighbor_index(v, u);
        if (i == static_cast<std::size_t>(-1)) return 0.0;
        return in_w[v][i];
    }

    double in_weight_sum(NodeId v) const {
        double s = 0.0;
        for (double w : in_w[v]) s += w;
        return s;
    }

    // Programmatic construction, mostly for tests and generators. Edges
    // are unordered pairs; duplicates and self-loops are rejected.
    static SocialGraph from_edges(std::size_t n,
                                  const std::vector<std::pair<NodeId, NodeId>>& edges) {
        SocialGraph g;
        g.n = n;
        g.adj.assign(n, {});
        for (auto [u, v] : edges) {
            if (u == v) throw InvalidParameterError("self-loop in edge list");
            if (u >= n || v >= n) throw InvalidParameterError("node id out of range");
            g.adj[u].push_back(v);
            g.adj[v].push_back(u);
        }
        for (std::size_t v = 0; v < n; ++v) {
            auto& nv = g.adj[v];
            std::sort(nv.begin(), nv.end());
            if (std::adjacent_find(nv.begin(), nv.end()) != nv.end())
                throw InvalidParameterError("duplicate edge");
        }
        g.m = edges.size();
        g.label.resize(n);
        for (std::size_t v = 0; v < n; ++v) {
            g.label[v] = v;
            g.label_to_id.emplace(v, static_cast<NodeId>(v));
        }
        g.assign_degree_reciprocal_weights();
        return g;
    }

    // Edges given as (u, v, w_uv, w_vu) where w_uv = w(u,v).
    static SocialGraph from_weighted_edges(
        std::size_t n,
        const std::vector<std::tuple<NodeId, NodeId, double, double>>& edges) {
        std::vector<std::pair<NodeId, NodeId>> plain;
        plain.reserve(edges.size());
        for (const auto& [u, v, wuv, wvu] : edges) plain.emplace_back(u, v);
        SocialGraph g = from_edges(n, plain);
        for (const auto& [u, v, wuv, wvu] : edges) {
            g.set_weight(u, v, wuv);
            g.set_weight(v, u, wvu);
        }
        g.validate_weight_sums();
        return g;
    }

    void assign_degree_reciprocal_weights() {
        in_w.assign(n, {});
        out_w.assign(n, {});
        for (std::size_t v = 0; v < n; ++v) {
            double w = adj[v].empty() ? 0.0 : 1.0 / static_cast<double>(adj[v].size());
            in_w[v].assign(adj[v].size(), w);
        }
        for (std::size_t v = 0; v < n; ++v) {
            out_w[v].resize(adj[v].size());
            for (std::size_t i = 0; i < adj[v].size(); ++i) {
                NodeId u = adj[v][i];
                out_w[v][i] = adj[u].empty() ? 0.0 : 1.0 / static_cast<double>(adj[u].size());
            }
        }
    }

    // Sets w(u,v) on an existing edge, keeping in_w/out_w in sync.
    void set_weight(NodeId u, NodeId v, double w_uv) {
        if (w_uv <= 0.0 || w_uv > 1.0)
            throw InvalidParameterError("edge weight must lie in (0,1]");
        std::size_t iv = neighbor_index(v, u);
        if (iv == static_cast<std::size_t>(-1))
            throw InvalidParameterError("set_weight on a non-edge");
        if (in_w[v].size() != adj[v].size()) in_w[v].resize(adj[v].size(), 0.0);
        in_w[v][iv] = w_uv;
        std::size_t iu = neighbor_index(u, v);
        if (out_w[u].size() != adj[u].size()) out_w[u].resize(adj[u].size(), 0.0);
        out_w[u][iu] = w_uv;
    }

    void validate_weight_sums() const {
        for (std::size_t v = 0; v < n; ++v) {
            double s = 0.0;
            for (double w : in_w[v]) s += w;
            if (s > 1.0 + kWeightSumSlack)
                throw InvalidParameterError(
                    "weight normalization violated at node " + std::to_string(label[v]) +
                    ": incoming weights sum to " + std::to_string(s));
        }
    }
};

// Reads a SNAP-style edge list: '#' lines ignored, otherwise two
// whitespace-separated non-negative integer labels per line (plus two
// decimal weights under ExplicitWeights). Node ids are densified in
// order of first appearance; duplicate edges collapse to the first
// occurrence.
inline SocialGraph load_edge_list(std::istream& in, WeightScheme scheme) {
    SocialGraph g;
    struct Quad { NodeId u, v; double wuv, wvu; };
    std::vector<Quad> edges;
    std::string line;
    std::size_t line_no = 0;
    auto intern = [&g](std::uint64_t lbl) -> NodeId {
        auto it = g.label_to_id.find(lbl);
        if (it != g.label_to_id.end()) return it->second;
        NodeId id = static_cast<NodeId>(g.label.size());
        g.label.push_back(lbl);
        g.label_to_id.emplace(lbl, id);
        return id;
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r\n");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::istringstream ls(line);
        std::uint64_t a = 0, b = 0;
        if (!(ls >> a >> b))
            throw ParseError("malformed edge at line " + std::to_string(line_no), line_no);
        double wuv = 0.0, wvu = 0.0;
        if (scheme == WeightScheme::ExplicitWeights) {
            if (!(ls >> wuv >> wvu))
                throw ParseError("missing weights at line " + std::to_string(line_no), line_no);
            if (wuv <= 0.0 || wuv > 1.0 || wvu <= 0.0 || wvu > 1.0)
                throw ParseError("weight outside (0,1] at line " + std::to_string(line_no),
                                 line_no);
        }
        std::string trailing;
        if (ls >> trailing)
            throw ParseError("trailing tokens at line " + std::to_string(line_no), line_no);
        if (a == b)
            throw ParseError("self-loop at line " + std::to_string(line_no), line_no);
        edges.push_back({intern(a), intern(b), wuv, wvu});
    }
    g.n = g.label.size();
    g.adj.assign(g.n, {});
    // Collapse duplicates, keeping the first occurrence's weights.
    std::vector<Quad> kept;
    kept.reserve(edges.size());
    {
        std::unordered_map<std::uint64_t, bool> seen;
        seen.reserve(edges.size() * 2);
        for (const auto& e : edges) {
            NodeId lo = std::min(e.u, e.v), hi = std::max(e.u, e.v);
            std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | hi;
            if (seen.emplace(key, true).second) kept.push_back(e);
        }
    }
    for (const auto& e : kept) {
        g.adj[e.u].push_back(e.v);
        g.adj[e.v].push_back(e.u);
    }
    for (auto& nv : g.adj) std::sort(nv.begin(), nv.end());
    g.m = kept.size();
    if (scheme == WeightScheme::DegreeReciprocal) {
        g.assign_degree_reciprocal_weights();
    } else {
        g.in_w.assign(g.n, {});
        g.out_w.assign(g.n, {});
        for (std::size_t v = 0; v < g.n; ++v) {
            g.in_w[v].assign(g.adj[v].size(), 0.0);
            g.out_w[v].assign(g.adj[v].size(), 0.0);
        }
        for (const auto& e : kept) {
            g.set_weight(e.u, e.v, e.wuv);
            g.set_weight(e.v, e.u, e.wvu);
        }
        try {
            g.validate_weight_sums();
        } catch (const InvalidParameterError& err) {
            throw ParseError(err.what());
        }
    }
    return g;
}

inline SocialGraph load_edge_list_file(const std::string& path, WeightScheme scheme) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file: " + path);
    return load_edge_list(in, scheme);
}

// An (s, t) friending instance. The invitation universe is
// V \ ({s} u N_s): inviting s or an existing friend is void, so those
// nodes are excluded once and for all here.
struct Instance {
    const SocialGraph& graph;
    NodeId s;
    NodeId t;
    std::vector<NodeId> seed_set;   // N_s, sorted
    std::vector<NodeId> candidates; // sorted
    std::vector<char> seed_mask;
    std::vector<char> candidate_mask;

    Instance(const SocialGraph& g, NodeId s_, NodeId t_) : graph(g), s(s_), t(t_) {
        if (s >= g.n || t >= g.n)
            throw InvalidParameterError("s or t outside the graph");
        if (s == t)
            throw InfeasibleError("initiator equals target");
        if (g.has_edge(s, t))
            throw InfeasibleError("target is already a friend of the initiator");
        seed_set = g.adj[s];
        seed_mask.assign(g.n, 0);
        for (NodeId v : seed_set) seed_mask[v] = 1;
        candidate_mask.assign(g.n, 0);
        for (NodeId v = 0; v < g.n; ++v) {
            if (v == s || seed_mask[v]) continue;
            candidate_mask[v] = 1;
            candidates.push_back(v);
        }
    }

    bool is_seed(NodeId v) const { return seed_mask[v] != 0; }
    bool is_candidate(NodeId v) const { return candidate_mask[v] != 0; }
};

enum class VmaxMode { Exact, Overapprox };

namespace detail {

// Unit-capacity max-flow network for the two-disjoint-paths test. The
// required flow value is at most 2, so two rounds of BFS augmentation
// suffice.
struct UnitFlowNet {
    struct Arc { int to; int cap; int rev; };
    std::vector<std::vector<Arc>> arcs;

    explicit UnitFlowNet(int n) : arcs(n) {}

    void add_arc(int from, int to, int cap) {
        arcs[from].push_back({to, cap, static_cast<int>(arcs[to].size())});
        arcs[to].push_back({from, 0, static_cast<int>(arcs[from].size()) - 1});
    }

    // One augmenting path of capacity 1, found by BFS. Returns false
    // when the sink is unreachable in the residual network.
    bool augment(int src, int snk) {
        std::vector<int> prev_node(arcs.size(), -1), prev_arc(arcs.size(), -1);
        std::queue<int> q;
        q.push(src);
        prev_node[src] = src;
        while (!q.empty() && prev_node[snk] < 0) {
            int v = q.front();
            q.pop();
            for (std::size_t i = 0; i < arcs[v].size(); ++i) {
                const Arc& a = arcs[v][i];
                if (a.cap > 0 && prev_node[a.to] < 0) {
                    prev_node[a.to] = v;
                    prev_arc[a.to] = static_cast<int>(i);
                    q.push(a.to);
                }
            }
        }
        if (prev_node[snk] < 0) return false;
        for (int v = snk; v != src; v = prev_node[v]) {
            Arc& a = arcs[prev_node[v]][prev_arc[v]];
            a.cap -= 1;
            arcs[v][a.rev].cap += 1;
        }
        return true;
    }

    int max_flow_upto2(int src, int snk) {
        int f = 0;
        while (f < 2 && augment(src, snk)) ++f;
        return f;
    }
};

// Contracted search graph for V_max: vertices are the candidates plus a
// super-source sigma standing for all of N_s. s never appears (a simple
// path from N_s to t cannot pass through it without touching N_s twice).
struct ContractedGraph {
    std::vector<std::vector<int>> adj; // index: 0..k-1 candidates, k = sigma
    std::vector<NodeId> nodes;         // candidate per index
    std::vector<int> index_of;         // node -> index, -1 otherwise
    int sigma;

    explicit ContractedGraph(const Instance& inst) {
        const SocialGraph& g = inst.graph;
        nodes = inst.candidates;
        index_of.assign(g.n, -1);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            index_of[nodes[i]] = static_cast<int>(i);
        sigma = static_cast<int>(nodes.size());
        adj.assign(nodes.size() + 1, {});
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            NodeId v = nodes[i];
            bool touches_seed = false;
            for (NodeId u : g.adj[v]) {
                if (inst.is_candidate(u)) {
                    adj[i].push_back(index_of[u]);
                } else if (inst.is_seed(u)) {
                    touches_seed = true;
                }
            }
            if (touches_seed) {
                adj[i].push_back(sigma);
                adj[sigma].push_back(static_cast<int>(i));
            }
        }
    }
};

// Does the contracted graph hold two paths from u, one to sigma and one
// to t, vertex-disjoint except at u? Vertex splitting enforces the
// disjointness; a sink tau takes one unit from sigma and one from t.
inline bool two_disjoint_paths(const ContractedGraph& cg, int u, int t_idx) {
    int k = static_cast<int>(cg.adj.size()); // candidates + sigma
    // node i -> in = 2i, out = 2i+1; tau = 2k
    int tau = 2 * k;
    UnitFlowNet net(2 * k + 1);
    for (int i = 0; i < k; ++i)
        net.add_arc(2 * i, 2 * i + 1, i == u ? 2 : 1);
    for (int i = 0; i < k; ++i)
        for (int j : cg.adj[i]) net.add_arc(2 * i + 1, 2 * j, 1);
    net.add_arc(2 * cg.sigma + 1, tau, 1);
    net.add_arc(2 * t_idx + 1, tau, 1);
    return net.max_flow_upto2(2 * u + 1, tau) == 2;
}

} // namespace detail

// Candidate nodes lying on some simple path from N_s to t that avoids
// {s} u N_s in its interior.
//
// Overapprox is the single reachability sweep: candidates reachable from
// N_s in G - {s} that can also reach t. It can include nodes no simple
// path uses (a pendant neighbor of t, say) but never misses one, which
// only inflates the sample bound, never breaks it.
//
// Exact runs a two-disjoint-paths test per candidate and is meant for
// small graphs and the alpha = 1 solution.
inline std::vector<NodeId> compute_vmax(const Instance& inst, VmaxMode mode) {
    const SocialGraph& g = inst.graph;
    auto bfs_avoiding_s = [&](const std::vector<NodeId>& sources, std::vector<char>& reach) {
        reach.assign(g.n, 0);
        std::queue<NodeId> q;
        for (NodeId v : sources) {
            if (v == inst.s || reach[v]) continue;
            reach[v] = 1;
            q.push(v);
        }
        while (!q.empty()) {
            NodeId v = q.front();
            q.pop();
            for (NodeId u : g.adj[v]) {
                if (u == inst.s || reach[u]) continue;
                reach[u] = 1;
                q.push(u);
            }
        }
    };
    std::vector<char> from_seeds, from_t;
    bfs_avoiding_s(inst.seed_set, from_seeds);
    bfs_avoiding_s({inst.t}, from_t);
    std::vector<NodeId> over;
    for (NodeId v : inst.candidates)
        if (from_seeds[v] && from_t[v]) over.push_back(v);
    if (mode == VmaxMode::Overapprox) return over;

    detail::ContractedGraph cg(inst);
    int t_idx = cg.index_of[inst.t];
    std::vector<NodeId> exact;
    for (NodeId v : over) {
        int u = cg.index_of[v];
        if (v == inst.t) {
            // t itself is in V_max iff any N_s -> t path exists, which
            // the reachability sweep has already certified.
            exact.push_back(v);
        } else if (detail::two_disjoint_paths(cg, u, t_idx)) {
            exact.push_back(v);
        }
    }
    return exact;
}

} // namespace raf
