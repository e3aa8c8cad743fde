#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "raf/errors.hpp"
#include "raf/graph.hpp"
#include "raf/parallel.hpp"
#include "raf/realization.hpp"
#include "raf/rng.hpp"

namespace raf {

struct ThresholdAssignment {
    std::vector<double> theta; // theta[v] in [0,1], one per node
};

inline ThresholdAssignment sample_thresholds(const SocialGraph& g, std::mt19937_64& rng) {
    ThresholdAssignment th;
    th.theta.resize(g.n);
    for (NodeId v = 0; v < g.n; ++v) th.theta[v] = uniform01(rng);
    return th;
}

enum class EstimateMethod { Thresholds, Traces, Exact };

struct FEstimate {
    double mean = 0.0;
    std::uint64_t samples = 0;
    double half_width = 0.0; // 95% confidence
    EstimateMethod method = EstimateMethod::Traces;
};

namespace detail {

inline std::vector<char> invitation_mask(const Instance& inst, const std::vector<NodeId>& I) {
    std::vector<char> mask(inst.graph.n, 0);
    for (NodeId v : I) {
        if (v >= inst.graph.n || !inst.is_candidate(v))
            throw ContractError("invitation set leaves the candidate universe");
        mask[v] = 1;
    }
    return mask;
}

// 95% half-width; Wilson interval when successes are scarce, where the
// normal approximation collapses to zero width.
inline double confidence_half_width(std::uint64_t successes, std::uint64_t samples) {
    if (samples == 0) return 0.0;
    const double z = 1.959963984540054;
    double n = static_cast<double>(samples);
    double p = static_cast<double>(successes) / n;
    if (successes >= 10)
        return z * std::sqrt(p * (1.0 - p) / n);
    double z2 = z * z;
    return z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
}

} // namespace detail

// Threshold-side friending process: C_0 = N_s, and an invited node u
// joins once the joined familiarity mass sum_{v in C} w(v,u) reaches
// theta_u (the >= comparison, exactly). Synchronous rounds; at most |I|
// of them since every round recruits at least one invitee.
inline std::pair<bool, std::vector<NodeId>> forward_process1(const Instance& inst,
                                                             const ThresholdAssignment& th,
                                                             const std::vector<NodeId>& I) {
    detail::invitation_mask(inst, I); // validates I
    const SocialGraph& g = inst.graph;
    std::vector<char> in_c(g.n, 0);
    std::vector<double> accum(g.n, 0.0);
    std::vector<NodeId> c = inst.seed_set;
    auto join = [&](NodeId v) {
        in_c[v] = 1;
        for (std::size_t i = 0; i < g.adj[v].size(); ++i)
            accum[g.adj[v][i]] += g.out_w[v][i];
    };
    for (NodeId v : c) join(v);
    bool success = false;
    bool grew = true;
    while (grew && !success) {
        grew = false;
        std::vector<NodeId> joiners;
        for (NodeId v : I)
            if (!in_c[v] && accum[v] >= th.theta[v]) joiners.push_back(v);
        for (NodeId v : joiners) {
            join(v);
            c.push_back(v);
            grew = true;
            if (v == inst.t) success = true;
        }
    }
    std::sort(c.begin(), c.end());
    return {success, c};
}

// Monte Carlo f(I) by running the threshold process on fresh uniform
// thresholds per sample. Kept as the independent cross-check for the
// trace estimator; one backward walk per sample is much cheaper.
inline FEstimate estimate_f_thresholds(const Instance& inst, const std::vector<NodeId>& I,
                                       std::uint64_t num_samples, std::uint64_t seed,
                                       unsigned workers = 1) {
    detail::invitation_mask(inst, I); // validate up front
    std::vector<char> hit(num_samples, 0);
    parallel_for(num_samples, workers, [&](std::uint64_t i) {
        auto rng = make_stream(seed, i);
        ThresholdAssignment th = sample_thresholds(inst.graph, rng);
        hit[i] = forward_process1(inst, th, I).first ? 1 : 0;
    });
    std::uint64_t successes = 0;
    for (char h : hit) successes += h;
    FEstimate est;
    est.mean = num_samples ? static_cast<double>(successes) / static_cast<double>(num_samples) : 0.0;
    est.samples = num_samples;
    est.half_width = detail::confidence_half_width(successes, num_samples);
    est.method = EstimateMethod::Thresholds;
    return est;
}

// Monte Carlo f(I) by the covering rule: one backward trace per sample,
// scored 1 iff it is type-1 and its nodes all lie in I.
inline FEstimate estimate_f_traces(const Instance& inst, const std::vector<NodeId>& I,
                                   std::uint64_t num_samples, std::uint64_t seed,
                                   unsigned workers = 1) {
    std::vector<char> mask = detail::invitation_mask(inst, I);
    std::vector<char> hit(num_samples, 0);
    parallel_for(num_samples, workers, [&](std::uint64_t i) {
        auto rng = make_stream(seed, i);
        BackwardTrace tr = sample_backward_trace(inst, rng);
        if (!tr.type_one()) return;
        for (NodeId v : tr.nodes)
            if (!mask[v]) return;
        hit[i] = 1;
    });
    std::uint64_t successes = 0;
    for (char h : hit) successes += h;
    FEstimate est;
    est.mean = num_samples ? static_cast<double>(successes) / static_cast<double>(num_samples) : 0.0;
    est.samples = num_samples;
    est.half_width = detail::confidence_half_width(successes, num_samples);
    est.method = EstimateMethod::Traces;
    return est;
}

// Exact f(I) as the probability mass of realizations whose trace is
// type-1 and covered by I. Enumeration-capped, so tiny graphs only.
inline FEstimate exact_f(const Instance& inst, const std::vector<NodeId>& I,
                         std::uint64_t cap = kEnumerationCap) {
    std::vector<char> mask = detail::invitation_mask(inst, I);
    double total = 0.0;
    enumerate_realizations(
        inst,
        [&](const FullRealization& g, double p) {
            if (p == 0.0) return;
            BackwardTrace tr = trace_of(inst, g);
            if (!tr.type_one()) return;
            for (NodeId v : tr.nodes)
                if (!mask[v]) return;
            total += p;
        },
        cap);
    FEstimate est;
    est.mean = total;
    est.samples = 0;
    est.half_width = 0.0;
    est.method = EstimateMethod::Exact;
    return est;
}

} // namespace raf
