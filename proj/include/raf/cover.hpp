#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "raf/errors.hpp"
#include "raf/graph.hpp"
#include "raf/realization.hpp"

namespace raf {

// Covering demand extracted from a batch: cover at least p of the
// type-1 trace sets, counted with multiplicity.
struct CoverInstance {
    std::vector<NodeId> universe;
    std::vector<std::pair<std::vector<NodeId>, std::uint64_t>> family; // lex-sorted distinct sets
    std::uint64_t p = 0;
    std::uint64_t family_size = 0; // total multiplicity = |B_l^1|
};

struct CoverSolution {
    std::vector<NodeId> chosen;
    std::uint64_t covered = 0;
    bool exact = false;
};

inline CoverInstance build_cover_instance(const RealizationBatch& batch,
                                          const std::vector<NodeId>& candidates,
                                          std::uint64_t p) {
    if (p > batch.ones)
        throw InfeasibleError("cover demand " + std::to_string(p) +
                              " exceeds the " + std::to_string(batch.ones) +
                              " type-1 traces in the batch");
    CoverInstance ci;
    ci.universe = candidates;
    ci.p = p;
    ci.family_size = batch.ones;
    std::map<std::vector<NodeId>, std::uint64_t> counts;
    for (const auto& tr : batch.traces) {
        if (!tr.type_one()) continue;
        std::vector<NodeId> key = tr.nodes;
        std::sort(key.begin(), key.end());
        ++counts[key];
    }
    ci.family.assign(counts.begin(), counts.end());
    return ci;
}

namespace detail {

// Word-blocked bitset over the elements that actually appear in the
// family; the universe itself can be large.
struct Bits {
    std::vector<std::uint64_t> w;

    explicit Bits(std::size_t nbits = 0) : w((nbits + 63) / 64, 0) {}

    void set(std::size_t i) { w[i / 64] |= std::uint64_t(1) << (i % 64); }

    bool subset_of(const Bits& o) const {
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] & ~o.w[k]) return false;
        return true;
    }

    void merge(const Bits& o) {
        for (std::size_t k = 0; k < w.size(); ++k) w[k] |= o.w[k];
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t x : w) c += static_cast<std::size_t>(std::popcount(x));
        return c;
    }
};

} // namespace detail

inline std::uint64_t count_covered(const CoverInstance& ci, const std::vector<NodeId>& chosen) {
    std::vector<char> mask;
    NodeId hi = 0;
    for (const auto& [set, mult] : ci.family)
        for (NodeId v : set) hi = std::max(hi, v);
    for (NodeId v : chosen) hi = std::max(hi, v);
    mask.assign(static_cast<std::size_t>(hi) + 1, 0);
    for (NodeId v : chosen) mask[v] = 1;
    std::uint64_t covered = 0;
    for (const auto& [set, mult] : ci.family) {
        bool in = true;
        for (NodeId v : set)
            if (!mask[v]) { in = false; break; }
        if (in) covered += mult;
    }
    return covered;
}

// Greedy cover: keep absorbing the cheapest not-yet-covered trace set
// (fewest nodes outside the chosen set), ties to higher multiplicity
// then lexicographic order, until the demand is met.
inline CoverSolution solve_greedy(const CoverInstance& ci) {
    CoverSolution sol;
    if (ci.p == 0) return sol;
    std::vector<char> chosen_mask;
    {
        NodeId hi = 0;
        for (const auto& [set, mult] : ci.family)
            for (NodeId v : set) hi = std::max(hi, v);
        chosen_mask.assign(static_cast<std::size_t>(hi) + 1, 0);
    }
    std::uint64_t covered = 0;
    std::vector<char> done(ci.family.size(), 0);
    while (covered < ci.p) {
        std::size_t pick = ci.family.size();
        std::size_t pick_need = 0;
        for (std::size_t j = 0; j < ci.family.size(); ++j) {
            if (done[j]) continue;
            std::size_t need = 0;
            for (NodeId v : ci.family[j].first)
                if (!chosen_mask[v]) ++need;
            if (pick == ci.family.size() || need < pick_need ||
                (need == pick_need && ci.family[j].second > ci.family[pick].second)) {
                pick = j;
                pick_need = need;
            }
        }
        if (pick == ci.family.size())
            throw InfeasibleError("cover demand exceeds total family multiplicity");
        for (NodeId v : ci.family[pick].first) {
            if (!chosen_mask[v]) {
                chosen_mask[v] = 1;
                sol.chosen.push_back(v);
            }
        }
        // absorbing one set can cover others for free
        for (std::size_t j = 0; j < ci.family.size(); ++j) {
            if (done[j]) continue;
            bool in = true;
            for (NodeId v : ci.family[j].first)
                if (!chosen_mask[v]) { in = false; break; }
            if (in) {
                done[j] = 1;
                covered += ci.family[j].second;
            }
        }
    }
    std::sort(sol.chosen.begin(), sol.chosen.end());
    sol.covered = count_covered(ci, sol.chosen);
    sol.exact = false;
    return sol;
}

// Exact minimum cover by branch and bound over unions of distinct
// trace sets (an optimum is such a union: replacing it by the union of
// the sets it covers never grows it). Caps keep it an oracle for small
// families; production falls back to greedy past them.
inline CoverSolution solve_exact(const CoverInstance& ci, std::size_t distinct_cap = 25,
                                 std::uint64_t node_budget = 5'000'000) {
    if (ci.family.size() > distinct_cap)
        throw CoverIntractableError("cover family has " + std::to_string(ci.family.size()) +
                                    " distinct sets, cap is " + std::to_string(distinct_cap));
    CoverSolution sol;
    sol.exact = true;
    if (ci.p == 0) return sol;

    // remap family elements to dense indices
    std::vector<NodeId> elems;
    for (const auto& [set, mult] : ci.family)
        for (NodeId v : set) elems.push_back(v);
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    auto idx_of = [&](NodeId v) {
        return static_cast<std::size_t>(
            std::lower_bound(elems.begin(), elems.end(), v) - elems.begin());
    };
    const std::size_t d = ci.family.size();
    std::vector<detail::Bits> set_bits;
    std::vector<std::uint64_t> mult(d);
    std::vector<std::size_t> order(d);
    for (std::size_t j = 0; j < d; ++j) order[j] = j;
    // explore high-multiplicity, small sets first for early incumbents
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (ci.family[a].second != ci.family[b].second)
            return ci.family[a].second > ci.family[b].second;
        return ci.family[a].first.size() < ci.family[b].first.size();
    });
    set_bits.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        detail::Bits b(elems.size());
        for (NodeId v : ci.family[order[j]].first) b.set(idx_of(v));
        set_bits.push_back(std::move(b));
        mult[j] = ci.family[order[j]].second;
    }
    std::vector<std::uint64_t> mult_suffix(d + 1, 0);
    for (std::size_t j = d; j-- > 0;) mult_suffix[j] = mult_suffix[j + 1] + mult[j];
    if (mult_suffix[0] < ci.p)
        throw InfeasibleError("cover demand exceeds total family multiplicity");

    // Greedy incumbent tightens the size prune; if the search never
    // beats it, the incumbent was already optimal.
    CoverSolution incumbent = solve_greedy(ci);
    std::size_t best_size = incumbent.chosen.size();
    detail::Bits best_bits(elems.size());
    bool improved = false;

    std::uint64_t nodes_visited = 0;
    auto covered_by = [&](const detail::Bits& u) {
        std::uint64_t c = 0;
        for (std::size_t j = 0; j < d; ++j)
            if (set_bits[j].subset_of(u)) c += mult[j];
        return c;
    };
    auto dfs = [&](auto&& self, std::size_t j, const detail::Bits& u) -> void {
        if (++nodes_visited > node_budget)
            throw CoverIntractableError("exact cover search exceeded its node budget");
        std::uint64_t cov = covered_by(u);
        std::size_t size = u.count();
        if (cov >= ci.p) {
            // growing u further cannot help
            if (size < best_size) {
                best_size = size;
                best_bits = u;
                improved = true;
            }
            return;
        }
        if (j == d) return;
        // coverage still short: any fix adds a set not inside u, hence
        // at least one fresh element
        if (size >= best_size) return;
        if (cov + mult_suffix[j] < ci.p) return;
        detail::Bits with = u;
        with.merge(set_bits[j]);
        self(self, j + 1, with);
        self(self, j + 1, u);
    };
    detail::Bits empty(elems.size());
    dfs(dfs, 0, empty);

    if (improved) {
        for (std::size_t i = 0; i < elems.size(); ++i)
            if (best_bits.w[i / 64] & (std::uint64_t(1) << (i % 64)))
                sol.chosen.push_back(elems[i]);
    } else {
        sol.chosen = incumbent.chosen;
    }
    sol.covered = count_covered(ci, sol.chosen);
    sol.exact = true;
    return sol;
}

} // namespace raf
