#pragma once

#include <stdexcept>
#include <string>

namespace fxap {

// Invalid parameters, malformed configs, dimension mismatches.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Solver breakdown: non-finite or nonpositive pivot and the like.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite signal or weights during an adaptive run. iteration is -1 when
// the failing update was executed outside a simulation loop.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& what, long iteration, double mu,
                     std::string variant = {})
        : std::runtime_error(what), iteration(iteration), mu(mu),
          variant(std::move(variant)) {}

    long iteration;
    double mu;
    std::string variant;
};

} // namespace fxap
