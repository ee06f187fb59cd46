#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "liftid/errors.hpp"

namespace liftid::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Gram condition number above which an unregularized least-squares solve is
/// rejected. Near the double-precision limit for normal equations.
inline constexpr double kGramConditionLimit = 1e12;

bool all_finite(const Matrix& m);

/// Solves W = argmin ||regressors * W - targets||_F^2 + ridge * ||W||_F^2
/// via normal equations, i.e. W = (X'X + ridge*I)^-1 X'Y.
///
/// With ridge == 0, throws SingularGram when cond(X'X) exceeds
/// kGramConditionLimit; regularization is never applied silently.
Matrix solve_least_squares(const Matrix& regressors, const Matrix& targets,
                           double ridge = 0.0);

/// Counter-based deterministic random generator (SplitMix64 stream).
///
/// Draw i of a generator seeded with s is mix64(s + (i+1) * 0x9E3779B97F4A7C15)
/// where mix64 is the SplitMix64 finalizer, so equal seeds give bit-identical
/// streams on every platform. Doubles take the top 53 bits of a draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double next_double();

    /// Uniform in [lo, hi). Requires lo < hi.
    double uniform(double lo, double hi);

    /// `count` i.i.d. samples from U[lo, hi). Requires lo < hi.
    Vector uniform(double lo, double hi, int count);

    /// Uniform integer in [0, bound). Requires bound > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Independent child stream; stream k of seed s is reproducible across
    /// runs regardless of how the parent has been used.
    Rng derive(std::uint64_t stream) const;

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace liftid::numerics
