#pragma once

#include <string>
#include <vector>

#include "liftid/numerics.hpp"

namespace liftid::lifting {

using numerics::Matrix;
using numerics::Vector;

/// Dimensions of the lifted datum xi = (x', zeta*', eta', u')'.
struct Dims {
    int l = 0;  ///< state
    int z = 0;  ///< measured observables
    int m = 0;  ///< synthetic observables
    int n = 0;  ///< input

    int p() const { return l + z + m + n; }
    bool operator==(const Dims&) const = default;
};

/// Uniformly sampled time series; one row per sample instant.
struct Trajectory {
    double dt = 0.0;
    Matrix states;       ///< samples x l
    Matrix inputs;       ///< samples x n
    Matrix observables;  ///< samples x z (z may be 0)

    int samples() const { return static_cast<int>(states.rows()); }
    int l() const { return static_cast<int>(states.cols()); }
    int n() const { return static_cast<int>(inputs.cols()); }
    int z() const { return static_cast<int>(observables.cols()); }

    void validate() const;
};

enum class Split { Train, Validation };

std::string to_string(Split s);

/// Means over the training split, one entry per channel.
struct Centering {
    Vector mean_x, mean_u, mean_zeta;
};

struct Dataset {
    std::vector<Trajectory> trajectories;
    std::vector<Split> split;  ///< one tag per trajectory
    Centering centering;

    double dt() const { return trajectories.at(0).dt; }
    int l() const { return trajectories.at(0).l(); }
    int n() const { return trajectories.at(0).n(); }
    int z() const { return trajectories.at(0).z(); }

    std::vector<int> indices(Split tag) const;
    void validate() const;

    /// Recomputes centering means from the training split.
    void compute_centering();
};

/// One consecutive-sample observation, never spanning trajectory boundaries.
struct TransitionPair {
    Vector x_t, zeta_t, u_t;
    Vector x_next, zeta_next;
};

/// All consecutive-sample pairs of the tagged trajectories, in trajectory
/// order then time order.
std::vector<TransitionPair> transition_pairs(const Dataset& ds, Split tag);

/// Concatenates (x, zeta, eta, u) in the fixed global datum order.
Vector assemble_datum(const Dims& dims, const Vector& x, const Vector& zeta,
                      const Vector& eta, const Vector& u);

/// Monomial dictionary over a d-dimensional input, graded-lexicographic
/// order, constant term excluded.
class PolyBasis {
public:
    PolyBasis(int dim, std::vector<std::vector<int>> exponents);

    /// First `count` monomials of total degree >= min_degree in graded-lex
    /// order (degree ascending; within a degree, exponent vectors descending
    /// lexicographically, so x^2 precedes x*y precedes y^2).
    static PolyBasis graded_lex(int dim, int count, int min_degree = 1);

    Vector evaluate(const Vector& v) const;

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(exponents_.size()); }
    const std::vector<std::vector<int>>& exponents() const { return exponents_; }

private:
    int dim_;
    std::vector<std::vector<int>> exponents_;
};

/// Linear dynamic model over the lifted datum: A predicts (x, zeta*)_{t+1},
/// H predicts eta_{t+1}.
struct LiftedLinearModel {
    Matrix A;  ///< (l+z) x p
    Matrix H;  ///< m x p
    Dims dims;
    bool folded = false;

    void validate() const;

    // Column blocks of the datum, in the fixed (x, zeta*, eta, u) order.
    auto a_x() const { return A.middleCols(0, dims.l); }
    auto a_zeta() const { return A.middleCols(dims.l, dims.z); }
    auto a_eta() const { return A.middleCols(dims.l + dims.z, dims.m); }
    auto a_u() const { return A.middleCols(dims.l + dims.z + dims.m, dims.n); }
    auto h_zeta() const { return H.middleCols(dims.l, dims.z); }
    auto h_u() const { return H.middleCols(dims.l + dims.z + dims.m, dims.n); }
};

}  // namespace liftid::lifting
