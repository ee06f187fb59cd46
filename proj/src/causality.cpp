#include "liftid/causality.hpp"

namespace liftid::causality {

AnticausalFilter AnticausalFilter::zero(int z, int n) {
    AnticausalFilter f;
    f.D = Matrix::Zero(z, n);
    f.mean_zeta = Vector::Zero(z);
    f.mean_u = Vector::Zero(n);
    return f;
}

AnticausalFilter estimate_filter(const Matrix& zeta_samples, const Matrix& u_samples) {
    const Eigen::Index count = u_samples.rows();
    if (zeta_samples.rows() != count) {
        throw DimensionMismatch("estimate_filter: sample counts differ");
    }
    if (count <= u_samples.cols()) {
        throw std::invalid_argument("estimate_filter: need more samples than input channels");
    }

    AnticausalFilter filter;
    filter.mean_zeta = zeta_samples.colwise().mean().transpose();
    filter.mean_u = u_samples.colwise().mean().transpose();

    const Matrix zeta_c = zeta_samples.rowwise() - filter.mean_zeta.transpose();
    const Matrix u_c = u_samples.rowwise() - filter.mean_u.transpose();

    // D' solves the least squares u_c * D' = zeta_c, so D = E[zeta u'] E[u u']^-1.
    filter.D = numerics::solve_least_squares(u_c, zeta_c).transpose();
    return filter;
}

AnticausalFilter estimate_filter_from(const Dataset& ds, Split tag) {
    const auto idx = ds.indices(tag);
    long rows = 0;
    for (int i : idx) rows += ds.trajectories[i].samples();

    Matrix zeta(rows, ds.z());
    Matrix u(rows, ds.n());
    long at = 0;
    for (int i : idx) {
        const auto& traj = ds.trajectories[i];
        zeta.middleRows(at, traj.samples()) = traj.observables;
        u.middleRows(at, traj.samples()) = traj.inputs;
        at += traj.samples();
    }
    return estimate_filter(zeta, u);
}

Vector clean(const AnticausalFilter& filter, const Vector& zeta, const Vector& u) {
    if (zeta.size() != filter.D.rows() || u.size() != filter.D.cols()) {
        throw DimensionMismatch("clean: zeta/u lengths do not match filter");
    }
    return zeta - filter.D * u;
}

Trajectory clean_trajectory(const AnticausalFilter& filter, const Trajectory& traj) {
    if (traj.z() != filter.D.rows() || traj.n() != filter.D.cols()) {
        throw DimensionMismatch("clean_trajectory: trajectory does not match filter");
    }
    Trajectory out = traj;
    out.observables = traj.observables - traj.inputs * filter.D.transpose();
    return out;
}

Dataset clean_dataset(const AnticausalFilter& filter, const Dataset& ds) {
    Dataset out = ds;
    for (auto& traj : out.trajectories) {
        traj.observables -= traj.inputs * filter.D.transpose();
    }
    out.compute_centering();
    return out;
}

LiftedLinearModel fold_input(const LiftedLinearModel& model, const AnticausalFilter& filter) {
    if (model.folded) {
        throw AlreadyFolded("fold_input: model is already folded");
    }
    if (filter.D.rows() != model.dims.z || filter.D.cols() != model.dims.n) {
        throw DimensionMismatch("fold_input: filter shape does not match model dims");
    }

    // The trained model consumes cleaned zeta* = zeta - D u. Substituting raw
    // zeta therefore moves A_zeta * D onto the input block with a minus sign:
    //   A_zeta (zeta - D u) + A_u u = A_zeta zeta + (A_u - A_zeta D) u.
    LiftedLinearModel out = model;
    const int u_off = model.dims.l + model.dims.z + model.dims.m;
    out.A.middleCols(u_off, model.dims.n) -= model.a_zeta() * filter.D;
    if (model.dims.m > 0) {
        out.H.middleCols(u_off, model.dims.n) -= model.h_zeta() * filter.D;
    }
    out.folded = true;
    return out;
}

}  // namespace liftid::causality
