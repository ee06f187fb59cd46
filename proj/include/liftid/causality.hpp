#pragma once

#include "liftid/lifting.hpp"
#include "liftid/numerics.hpp"

namespace liftid::causality {

using lifting::Dataset;
using lifting::LiftedLinearModel;
using lifting::Split;
using lifting::Trajectory;
using numerics::Matrix;
using numerics::Vector;

/// Linear input-dependence model of the measured observables,
/// zeta(x, u) = zeta*(x) + D u. Means are those of the samples D was
/// estimated from; they are not applied when cleaning.
struct AnticausalFilter {
    Matrix D;          ///< z x n
    Vector mean_zeta;  ///< z
    Vector mean_u;     ///< n

    static AnticausalFilter zero(int z, int n);
};

/// Regresses D = E[zeta u'] E[u u']^-1 on mean-centered samples.
/// Throws SingularGram when the input Gram is ill-conditioned (input not
/// persistently exciting).
AnticausalFilter estimate_filter(const Matrix& zeta_samples, const Matrix& u_samples);

/// Stacks every sample of the tagged trajectories and estimates the filter.
AnticausalFilter estimate_filter_from(const Dataset& ds, Split tag);

/// zeta* = zeta - D u.
Vector clean(const AnticausalFilter& filter, const Vector& zeta, const Vector& u);

/// Applies `clean` to every sample.
Trajectory clean_trajectory(const AnticausalFilter& filter, const Trajectory& traj);
Dataset clean_dataset(const AnticausalFilter& filter, const Dataset& ds);

/// Terminal input fold: rewrites the input blocks so the model consumes raw
/// measured zeta and reproduces the predictions the unfolded model makes on
/// cleaned zeta*. The predicted observable block remains zeta*.
LiftedLinearModel fold_input(const LiftedLinearModel& model, const AnticausalFilter& filter);

}  // namespace liftid::causality
