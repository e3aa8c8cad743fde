#pragma once

#include <stdexcept>
#include <string>

namespace raf {

// Malformed input file. line is 1-based, 0 when unknown.
struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(const std::string& what, std::size_t line_no = 0)
        : std::runtime_error(what), line(line_no) {}
};

// Parameter outside its admissible range (alpha, epsilon, N, ...).
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Caller broke an API contract (e.g. invitation set not within the
// candidate universe).
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Instance cannot be solved: s == t, t already a friend of s, or a cover
// instance demanding more coverage than the batch holds.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The stopping rule exhausted its sample budget before observing enough
// type-1 realizations. upper_bound is the certified bound Upsilon/max_samples.
struct PmaxTooSmallError : std::runtime_error {
    double upper_bound;
    explicit PmaxTooSmallError(double bound)
        : std::runtime_error("p_max is indistinguishable from 0 (empirical upper bound " +
                             std::to_string(bound) + ")"),
          upper_bound(bound) {}
};

// Realization enumeration would exceed the configured cap.
struct EnumerationCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact cover search exceeded its size cap or node budget.
struct CoverIntractableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace raf
