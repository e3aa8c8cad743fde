#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "raf/errors.hpp"
#include "raf/graph.hpp"
#include "raf/realization.hpp"
#include "raf/rng.hpp"

namespace raf {

struct PmaxEstimate {
    double p_star = 0.0;
    std::uint64_t upsilon = 0;
    std::uint64_t total_samples = 0;
    double epsilon0 = 0.0;
    double failure_budget = 0.0; // 1/N
};

// Success target of the stopping rule with failure probability 1/N:
// Upsilon = ceil(1 + 4(e-2)(1+eps0) ln(2N) / eps0^2).
inline std::uint64_t stopping_rule_upsilon(double epsilon0, double n_big) {
    if (!(epsilon0 > 0.0 && epsilon0 <= 1.0))
        throw InvalidParameterError("epsilon0 must lie in (0,1]");
    if (!(n_big >= 3.0))
        throw InvalidParameterError("N must be at least 3");
    double y = 1.0 + 4.0 * (std::numbers::e - 2.0) * (1.0 + epsilon0) *
                         std::log(2.0 * n_big) / (epsilon0 * epsilon0);
    return static_cast<std::uint64_t>(std::ceil(y));
}

// Enough budget to certify p_max >= 0.01 a hundred times over.
inline std::uint64_t default_pmax_budget(std::uint64_t upsilon) {
    return 100 * upsilon * 100;
}

// Draws backward traces until Upsilon of them are type-1 and returns
// Upsilon / (traces drawn). Guarantee: within relative error epsilon0
// of p_max with probability at least 1 - 1/N. Trace i uses stream
// (seed, i), so the sample path is reproducible and independent of any
// batching. max_samples = 0 means the default budget.
inline PmaxEstimate stopping_rule_estimate(const Instance& inst, double epsilon0,
                                           double n_big, std::uint64_t max_samples,
                                           std::uint64_t seed) {
    std::uint64_t upsilon = stopping_rule_upsilon(epsilon0, n_big);
    if (max_samples == 0) max_samples = default_pmax_budget(upsilon);
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < max_samples; ++i) {
        auto rng = make_stream(seed, i);
        if (sample_backward_trace(inst, rng).type_one()) {
            ++ones;
            if (ones == upsilon) {
                PmaxEstimate est;
                est.p_star = static_cast<double>(upsilon) / static_cast<double>(i + 1);
                est.upsilon = upsilon;
                est.total_samples = i + 1;
                est.epsilon0 = epsilon0;
                est.failure_budget = 1.0 / n_big;
                return est;
            }
        }
    }
    throw PmaxTooSmallError(static_cast<double>(upsilon) / static_cast<double>(max_samples));
}

} // namespace raf
