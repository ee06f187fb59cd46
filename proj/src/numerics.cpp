#include "liftid/numerics.hpp"

#include <cmath>

namespace liftid::numerics {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

bool all_finite(const Matrix& m) {
    return m.allFinite();
}

Matrix solve_least_squares(const Matrix& regressors, const Matrix& targets,
                           double ridge) {
    const Eigen::Index n = regressors.rows();
    const Eigen::Index p = regressors.cols();
    if (targets.rows() != n) {
        throw DimensionMismatch("least squares: regressors and targets disagree on sample count");
    }
    if (n < p) {
        throw SingularGram("least squares: fewer samples than regressor columns");
    }
    if (ridge < 0.0) {
        throw std::invalid_argument("least squares: ridge must be nonnegative");
    }

    Matrix gram = regressors.transpose() * regressors;
    if (ridge == 0.0) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || hi / lo > kGramConditionLimit) {
            throw SingularGram("least squares: Gram matrix condition number exceeds 1e12; "
                               "data are not persistently exciting");
        }
    } else {
        gram.diagonal().array() += ridge;
    }

    Matrix w = gram.ldlt().solve(regressors.transpose() * targets);
    if (!all_finite(w)) {
        throw SingularGram("least squares: solve produced non-finite coefficients");
    }
    return w;
}

std::uint64_t Rng::next_u64() {
    ++counter_;
    return mix64(seed_ + counter_ * kGolden);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    if (!(lo < hi)) {
        throw std::invalid_argument("uniform: requires lo < hi");
    }
    return lo + (hi - lo) * next_double();
}

Vector Rng::uniform(double lo, double hi, int count) {
    if (!(lo < hi)) {
        throw std::invalid_argument("uniform: requires lo < hi");
    }
    if (count < 0) {
        throw std::invalid_argument("uniform: count must be nonnegative");
    }
    Vector out(count);
    for (int i = 0; i < count; ++i) {
        out[i] = lo + (hi - lo) * next_double();
    }
    return out;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("below: bound must be positive");
    }
    // Lemire's multiply-shift with rejection; unbiased and deterministic.
    while (true) {
        const std::uint64_t x = next_u64();
        const auto m = static_cast<unsigned __int128>(x) * bound;
        const auto lo = static_cast<std::uint64_t>(m);
        if (lo >= bound || lo >= static_cast<std::uint64_t>(-bound) % bound) {
            return static_cast<std::uint64_t>(m >> 64);
        }
    }
}

Rng Rng::derive(std::uint64_t stream) const {
    return Rng(mix64(seed_ ^ mix64(kGolden + stream)));
}

}  // namespace liftid::numerics
