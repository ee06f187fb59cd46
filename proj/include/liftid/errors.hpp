#pragma once

#include <stdexcept>
#include <string>

namespace liftid {

/// Gram matrix of a regression is singular or ill-conditioned; usually means
/// the data are not persistently exciting.
struct SingularGram : std::runtime_error {
    explicit SingularGram(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical integration or rollout produced NaN/Inf.
struct NonFiniteState : std::runtime_error {
    explicit NonFiniteState(const std::string& what) : std::runtime_error(what) {}
};

/// Training loss became NaN/Inf; the optimization diverged.
struct NonFiniteLoss : std::runtime_error {
    explicit NonFiniteLoss(const std::string& what) : std::runtime_error(what) {}
};

struct AlreadyFolded : std::runtime_error {
    explicit AlreadyFolded(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed file, config, or CLI usage.
struct UserError : std::runtime_error {
    explicit UserError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace liftid
