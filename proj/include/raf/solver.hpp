#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "raf/cover.hpp"
#include "raf/diffusion.hpp"
#include "raf/errors.hpp"
#include "raf/graph.hpp"
#include "raf/pmax.hpp"
#include "raf/realization.hpp"
#include "raf/rng.hpp"

namespace raf {

struct RafParams {
    double epsilon0 = 0.0;
    double epsilon1 = 0.0;
    double beta = 0.0;
};

namespace detail {

// A(eps1) = eps1 * (1 + n_eff * eps1) under the eps0 = n_eff * eps1
// coupling; beta and the solve target are functions of it.
inline double coupling_a(double eps1, double n_eff) {
    return eps1 * (1.0 + n_eff * eps1);
}

inline double beta_of(double eps1, double alpha, double n_eff) {
    double a = coupling_a(eps1, n_eff);
    return (alpha - a) / (1.0 + a);
}

// Left side of beta*(1 - A) - A = alpha - epsilon; strictly decreasing
// in eps1, tending to alpha as eps1 -> 0.
inline double param_target(double eps1, double alpha, double n_eff) {
    double a = coupling_a(eps1, n_eff);
    return beta_of(eps1, alpha, n_eff) * (1.0 - a) - a;
}

} // namespace detail

// Derives (eps0, eps1, beta) for the target ratio alpha and slack
// epsilon: eps1 solves beta(eps1)(1 - eps1(1+eps0)) - eps1(1+eps0)
// = alpha - epsilon with eps0 = n_eff * eps1 and
// beta = (alpha - eps1(1+eps0)) / (1 + eps1(1+eps0)).
inline RafParams solve_params(double alpha, double epsilon, double n_eff) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidParameterError("alpha must lie in (0,1]");
    if (!(epsilon > 0.0 && epsilon < alpha))
        throw InvalidParameterError("epsilon must lie in (0, alpha)");
    if (!(n_eff >= 1.0))
        throw InvalidParameterError("n_eff must be at least 1");
    double target = alpha - epsilon;
    // beta hits zero at A = alpha, i.e. at this eps1
    double hi = (-1.0 + std::sqrt(1.0 + 4.0 * n_eff * alpha)) / (2.0 * n_eff);
    double lo = 0.0;
    if (detail::param_target(hi, alpha, n_eff) > target)
        throw InvalidParameterError("parameter solve found no root"); // unreachable for valid input
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (detail::param_target(mid, alpha, n_eff) > target)
            lo = mid;
        else
            hi = mid;
    }
    double eps1 = 0.5 * (lo + hi);
    if (std::abs(detail::param_target(eps1, alpha, n_eff) - target) > 1e-12)
        throw InvalidParameterError("parameter solve failed to reach its residual target");
    RafParams p;
    p.epsilon1 = eps1;
    p.epsilon0 = n_eff * eps1;
    p.beta = detail::beta_of(eps1, alpha, n_eff);
    return p;
}

// Sample-count bound: l* = ceil((ln2 + lnN + n_eff ln2)(2 + eps1(1-eps0))
// / (eps1^2 (1-eps0)^2 p_star)). Degenerates as eps0 -> 1.
inline std::uint64_t compute_l_star(double epsilon0, double epsilon1, double n_big,
                                    double n_eff, double p_star) {
    if (!(epsilon0 >= 0.0 && epsilon0 < 1.0))
        throw InvalidParameterError("epsilon0 must lie in [0,1) for the sample bound");
    if (!(epsilon1 > 0.0))
        throw InvalidParameterError("epsilon1 must be positive");
    if (!(p_star > 0.0))
        throw InvalidParameterError("p_star must be positive");
    double num = (std::log(2.0) + std::log(n_big) + n_eff * std::log(2.0)) *
                 (2.0 + epsilon1 * (1.0 - epsilon0));
    double den = epsilon1 * epsilon1 * (1.0 - epsilon0) * (1.0 - epsilon0) * p_star;
    double l = std::ceil(num / den);
    if (!(l >= 1.0))
        throw InvalidParameterError("sample bound degenerated");
    if (l >= 9.22e18)
        throw InvalidParameterError(
            "l* = " + std::to_string(l) +
            " overflows any practical budget; supply an explicit realization count");
    return static_cast<std::uint64_t>(l);
}

struct RafOptions {
    bool use_full_n = false;        // Eq-(12) n: full node count instead of |V_max|
    std::uint64_t l_override = 0;   // 0 = use the derived l*
    std::uint64_t seed = 1;
    std::uint64_t pmax_max_samples = 0; // 0 = stopping-rule default budget
    std::size_t exact_cover_cap = 25;   // distinct-set limit for the exact solver
    std::uint64_t cover_node_budget = 5'000'000;
    std::uint64_t eval_samples = 10'000; // post-hoc f(I*) check
    unsigned workers = 1;
    bool keep_batch = false;        // retain the trace batch for auditing
};

struct RafConfig {
    double alpha = 0.0;
    double epsilon = 0.0;
    double n_big = 0.0;
    double n_eff = 0.0;
    double epsilon0 = 0.0;
    double epsilon1 = 0.0;
    double beta = 0.0;
    std::uint64_t l = 0;        // realizations actually drawn
    std::uint64_t l_star = 0;   // derived bound, 0 when overridden
    std::uint64_t l_override = 0;
};

struct BatchSummary {
    std::uint64_t l = 0;
    std::uint64_t ones = 0;
    std::uint64_t p = 0; // ceil(beta * ones)
};

struct RafSolution {
    std::vector<NodeId> invitation;
    BatchSummary batch_summary;
    std::uint64_t covered = 0;
    bool exact_cover = false;
    PmaxEstimate pmax_estimate;
    FEstimate f_check;
    RafConfig config;
    std::optional<RealizationBatch> batch; // only with keep_batch
};

namespace detail {

// Largest usable epsilon for this (alpha, n_eff): beyond it the derived
// eps0 = n_eff * eps1 exceeds 1 and the accuracy machinery degenerates.
inline double epsilon_ceiling(double alpha, double n_eff) {
    double eps1_cap = 1.0 / n_eff;
    double hi = (-1.0 + std::sqrt(1.0 + 4.0 * n_eff * alpha)) / (2.0 * n_eff);
    if (eps1_cap >= hi) return alpha; // every root keeps eps0 below 1
    return alpha - param_target(eps1_cap, alpha, n_eff);
}

} // namespace detail

// The full pipeline: candidate region, accuracy parameters, p_max by
// stopping rule, a batch of l backward traces, the cover demand
// p = ceil(beta |B^1|), and a cover solve (exact when the family is
// small, greedy otherwise). f_check re-estimates f(I*) on fresh traces.
inline RafSolution raf(const Instance& inst, double alpha, double epsilon, double n_big,
                       const RafOptions& options = {}) {
    if (!(n_big >= 3.0))
        throw InvalidParameterError("N must be at least 3");
    std::vector<NodeId> vmax = compute_vmax(inst, VmaxMode::Overapprox);
    if (vmax.empty())
        throw PmaxTooSmallError(0.0); // t unreachable from the seeds
    double n_eff = options.use_full_n ? static_cast<double>(inst.graph.n)
                                      : static_cast<double>(vmax.size());
    RafParams params = solve_params(alpha, epsilon, n_eff);
    double eps0_cap = options.l_override ? 1.0 : 1.0 - 1e-12;
    if (params.epsilon0 > eps0_cap) {
        throw InvalidParameterError(
            "derived epsilon0 = " + std::to_string(params.epsilon0) +
            " exceeds 1; epsilon must stay below about " +
            std::to_string(detail::epsilon_ceiling(alpha, n_eff)) +
            " for this alpha and candidate-region size");
    }
    RafConfig config;
    config.alpha = alpha;
    config.epsilon = epsilon;
    config.n_big = n_big;
    config.n_eff = n_eff;
    config.epsilon0 = params.epsilon0;
    config.epsilon1 = params.epsilon1;
    config.beta = params.beta;
    config.l_override = options.l_override;

    PmaxEstimate pmax = stopping_rule_estimate(inst, params.epsilon0, n_big,
                                               options.pmax_max_samples,
                                               stream_seed(options.seed, 0));
    std::uint64_t l;
    if (options.l_override) {
        l = options.l_override;
    } else {
        config.l_star = compute_l_star(params.epsilon0, params.epsilon1, n_big, n_eff,
                                       pmax.p_star);
        l = config.l_star;
    }
    config.l = l;

    RealizationBatch batch = sample_batch(inst, l, stream_seed(options.seed, 1),
                                          options.workers);
    if (batch.ones == 0) {
        // l draws, no type-1 trace: certify by the rule of three
        throw PmaxTooSmallError(l ? 3.0 / static_cast<double>(l) : 1.0);
    }
    std::uint64_t p = static_cast<std::uint64_t>(
        std::ceil(params.beta * static_cast<double>(batch.ones)));
    CoverInstance ci = build_cover_instance(batch, inst.candidates, p);
    CoverSolution cover;
    if (ci.family.size() <= options.exact_cover_cap) {
        try {
            cover = solve_exact(ci, options.exact_cover_cap, options.cover_node_budget);
        } catch (const CoverIntractableError&) {
            cover = solve_greedy(ci);
        }
    } else {
        cover = solve_greedy(ci);
    }

    RafSolution sol;
    sol.invitation = cover.chosen;
    sol.batch_summary = {l, batch.ones, p};
    sol.covered = cover.covered;
    sol.exact_cover = cover.exact;
    sol.pmax_estimate = pmax;
    sol.config = config;
    sol.f_check = estimate_f_traces(inst, sol.invitation, options.eval_samples,
                                    stream_seed(options.seed, 2), options.workers);
    if (options.keep_batch) sol.batch = std::move(batch);
    return sol;
}

// alpha = 1: the exact candidate region is the unique minimum
// invitation set achieving p_max.
inline std::vector<NodeId> solve_alpha_one(const Instance& inst) {
    return compute_vmax(inst, VmaxMode::Exact);
}

} // namespace raf
