#pragma once

#include <optional>

#include "liftid/lifting.hpp"

namespace liftid::baselines {

using lifting::Dataset;
using lifting::Dims;
using lifting::LiftedLinearModel;
using lifting::PolyBasis;
using numerics::Matrix;

enum class BaselineKind { Dmdc, Edmdc, KoopmanWithControl, Dfl };

/// Dictionary for the eDMDc baseline: the first `count` graded-lex monomials
/// over (x, zeta) beyond degree 1 (degree-1 terms would duplicate datum
/// entries and make the Gram singular).
PolyBasis edmdc_basis(int l, int z, int count = 2);

/// Dictionary for the Koopman-with-control baseline; same construction with a
/// larger count.
PolyBasis koopman_basis(int l, int z, int count = 32);

/// Regresses the full map (x, zeta, u)_t -> (x, zeta)_{t+1}; no synthetic
/// observables.
LiftedLinearModel fit_dmdc(const Dataset& ds, double ridge = 0.0);

/// Lifts with eta = basis(x, zeta) and regresses A over (x, zeta, eta, u)
/// for (x, zeta)_{t+1} and H for eta_{t+1}.
LiftedLinearModel fit_edmdc(const Dataset& ds, const PolyBasis& basis, double ridge = 0.0);

/// fit_edmdc with a graded-lex dictionary truncated to `feature_count`.
LiftedLinearModel fit_koopman(const Dataset& ds, int feature_count, double ridge = 0.0);

/// Dual-faceted linearization: the state rows of A are fixed to the given
/// structural matrix (shape l x (l+z+n) over the (x, zeta*, u) datum); the
/// observable rows are regressed. Expects observables already cleaned.
LiftedLinearModel fit_dfl(const Dataset& ds, const Matrix& structural_A, double ridge = 0.0);

/// Forward-Euler structural state equation of the toy plant,
/// q_{t+1} = q_t + dt * f*_t over the datum (q, f*, e_C, u).
Matrix toy_structural_a(double dt);

/// Structural state row of the toy plant identified under the bond-graph
/// support. With zero-order-hold inputs the one-sample update of q depends
/// on the held input as well as the flow, so the row spans {q, f*, u}; the
/// capacitor effort influences q only through f and its column stays zero.
/// Coefficients come from restricted least squares on the training split.
Matrix toy_structural_row(const Dataset& ds, double ridge = 0.0);

/// Reported lifted dimension: datum dimension p for regression baselines
/// (m = 0 models count state, measured observables and input); the
/// Koopman-with-control convention counts state plus dictionary features.
int lifted_dim(BaselineKind kind, const Dims& dims);

}  // namespace liftid::baselines
