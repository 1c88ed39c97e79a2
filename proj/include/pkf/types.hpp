// Common scalar/matrix aliases and error types shared across the library.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pkf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Input matrix expected to be positive semidefinite is not (beyond tolerance).
struct NotPSD : std::runtime_error {
    explicit NotPSD(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct TooFewSamples : std::invalid_argument {
    explicit TooFewSamples(const std::string& what) : std::invalid_argument(what) {}
};

/// Iterative solver exceeded its iteration cap without meeting tolerance.
struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

/// Spectral radius of A too close to (or beyond) 1 for a stationary computation.
struct UnstableA : std::invalid_argument {
    explicit UnstableA(const std::string& what) : std::invalid_argument(what) {}
};

/// Image/range-inclusion assumption of a closed-form gain does not hold.
struct AssumptionViolated : std::runtime_error {
    explicit AssumptionViolated(const std::string& what) : std::runtime_error(what) {}
};

/// Problem size exceeds the supported desk-scale bound.
struct ScaleExceeded : std::invalid_argument {
    explicit ScaleExceeded(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw DimensionMismatch(what);
}

}  // namespace pkf
