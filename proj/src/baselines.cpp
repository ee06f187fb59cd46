#include "liftid/baselines.hpp"

namespace liftid::baselines {

using lifting::Split;
using lifting::TransitionPair;
using lifting::Trajectory;
using numerics::Vector;

PolyBasis edmdc_basis(int l, int z, int count) {
    return PolyBasis::graded_lex(l + z, count, /*min_degree=*/2);
}

PolyBasis koopman_basis(int l, int z, int count) {
    return PolyBasis::graded_lex(l + z, count, /*min_degree=*/2);
}

namespace {

Vector concat(const Vector& a, const Vector& b) {
    Vector out(a.size() + b.size());
    out << a, b;
    return out;
}

struct Regression {
    Matrix xi;            // N x p
    Matrix state_targets; // N x (l+z)
    Matrix eta_targets;   // N x m
};

Regression assemble(const Dataset& ds, const PolyBasis* basis) {
    const auto pairs = lifting::transition_pairs(ds, Split::Train);
    const int l = ds.l();
    const int z = ds.z();
    const int n = ds.n();
    const int m = basis ? basis->size() : 0;
    const int p = l + z + m + n;
    const auto count = static_cast<Eigen::Index>(pairs.size());

    Regression reg;
    reg.xi.resize(count, p);
    reg.state_targets.resize(count, l + z);
    reg.eta_targets.resize(count, m);
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto& pair = pairs[i];
        reg.xi.block(i, 0, 1, l) = pair.x_t.transpose();
        reg.xi.block(i, l, 1, z) = pair.zeta_t.transpose();
        if (basis) {
            reg.xi.block(i, l + z, 1, m) =
                basis->evaluate(concat(pair.x_t, pair.zeta_t)).transpose();
            reg.eta_targets.row(i) =
                basis->evaluate(concat(pair.x_next, pair.zeta_next)).transpose();
        }
        reg.xi.block(i, l + z + m, 1, n) = pair.u_t.transpose();
        reg.state_targets.block(i, 0, 1, l) = pair.x_next.transpose();
        reg.state_targets.block(i, l, 1, z) = pair.zeta_next.transpose();
    }
    return reg;
}

}  // namespace

LiftedLinearModel fit_dmdc(const Dataset& ds, double ridge) {
    ds.validate();
    const Regression reg = assemble(ds, nullptr);

    LiftedLinearModel model;
    model.dims = Dims{ds.l(), ds.z(), 0, ds.n()};
    model.A = numerics::solve_least_squares(reg.xi, reg.state_targets, ridge).transpose();
    model.H = Matrix::Zero(0, model.dims.p());
    model.validate();
    return model;
}

LiftedLinearModel fit_edmdc(const Dataset& ds, const PolyBasis& basis, double ridge) {
    ds.validate();
    if (basis.dim() != ds.l() + ds.z()) {
        throw DimensionMismatch("fit_edmdc: basis dimension must equal l + z");
    }
    const Regression reg = assemble(ds, &basis);

    Matrix targets(reg.xi.rows(), reg.state_targets.cols() + reg.eta_targets.cols());
    targets << reg.state_targets, reg.eta_targets;
    const Matrix w = numerics::solve_least_squares(reg.xi, targets, ridge);

    LiftedLinearModel model;
    model.dims = Dims{ds.l(), ds.z(), basis.size(), ds.n()};
    model.A = w.leftCols(reg.state_targets.cols()).transpose();
    model.H = w.rightCols(reg.eta_targets.cols()).transpose();
    model.validate();
    return model;
}

LiftedLinearModel fit_koopman(const Dataset& ds, int feature_count, double ridge) {
    if (feature_count < 1) {
        throw std::invalid_argument("fit_koopman: feature_count must be >= 1");
    }
    return fit_edmdc(ds, koopman_basis(ds.l(), ds.z(), feature_count), ridge);
}

LiftedLinearModel fit_dfl(const Dataset& ds, const Matrix& structural_A, double ridge) {
    ds.validate();
    const int l = ds.l();
    const int z = ds.z();
    const int p = l + z + ds.n();
    if (structural_A.rows() != l || structural_A.cols() != p) {
        throw DimensionMismatch("fit_dfl: structural A must be l x (l+z+n)");
    }

    const Regression reg = assemble(ds, nullptr);
    const Matrix h = numerics::solve_least_squares(
        reg.xi, reg.state_targets.rightCols(z), ridge).transpose();

    LiftedLinearModel model;
    model.dims = Dims{l, z, 0, ds.n()};
    model.A.resize(l + z, p);
    model.A.topRows(l) = structural_A;
    model.A.bottomRows(z) = h;
    model.H = Matrix::Zero(0, p);
    model.validate();
    return model;
}

Matrix toy_structural_a(double dt) {
    Matrix a(1, 4);
    a << 1.0, dt, 0.0, 0.0;
    return a;
}

Matrix toy_structural_row(const Dataset& ds, double ridge) {
    if (ds.l() != 1 || ds.z() != 2 || ds.n() != 1) {
        throw DimensionMismatch("toy_structural_row: expects the toy shape l=1, z=2, n=1");
    }
    const auto pairs = lifting::transition_pairs(ds, Split::Train);
    const auto count = static_cast<Eigen::Index>(pairs.size());
    Matrix x(count, 3);
    Matrix y(count, 1);
    for (Eigen::Index i = 0; i < count; ++i) {
        x(i, 0) = pairs[i].x_t[0];
        x(i, 1) = pairs[i].zeta_t[0];
        x(i, 2) = pairs[i].u_t[0];
        y(i, 0) = pairs[i].x_next[0];
    }
    const Matrix w = numerics::solve_least_squares(x, y, ridge);
    Matrix row(1, 4);
    row << w(0, 0), w(1, 0), 0.0, w(2, 0);
    return row;
}

int lifted_dim(BaselineKind kind, const Dims& dims) {
    if (kind == BaselineKind::KoopmanWithControl) {
        return dims.l + dims.m;
    }
    return dims.p();
}

}  // namespace liftid::baselines
