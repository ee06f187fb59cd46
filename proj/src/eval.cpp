#include "liftid/eval.hpp"

#include <cmath>
#include <limits>

namespace liftid::eval {

ModelBundle ModelBundle::from_l3(std::string method, const l3::L3Model& model) {
    ModelBundle bundle;
    bundle.method = std::move(method);
    bundle.linear = model.linear;
    bundle.net = model.net;
    bundle.filter = model.filter;
    bundle.lifted_dim = model.linear.dims.p();
    return bundle;
}

Rollout rollout(const ModelBundle& bundle, const Vector& x0, const Vector& zeta0,
                const Matrix& inputs, double dt) {
    const lifting::Dims& dims = bundle.linear.dims;
    bundle.linear.validate();
    if (x0.size() != dims.l || zeta0.size() != dims.z || inputs.cols() != dims.n) {
        throw DimensionMismatch("rollout: initial condition or inputs do not match model");
    }
    const auto samples = inputs.rows();
    if (samples < 1) {
        throw std::invalid_argument("rollout: empty input sequence");
    }
    if (bundle.linear.folded && dims.z > 0 && !bundle.filter) {
        throw std::invalid_argument("rollout: folded model requires its filter");
    }

    Rollout out;
    out.dt = dt;
    out.states.resize(samples, dims.l);
    out.observables.resize(samples, dims.z);
    out.synthetic.resize(samples, dims.m);

    // Step-0 lift input: the network/dictionary consumes the observables in
    // the domain it was trained on, so a folded model cleans the raw zeta0.
    Vector zeta_clean = zeta0;
    if (bundle.linear.folded && dims.z > 0) {
        zeta_clean = causality::clean(*bundle.filter, zeta0, inputs.row(0).transpose());
    }

    Vector eta(dims.m);
    if (dims.m > 0) {
        Vector lift_in(dims.l + dims.z);
        lift_in << x0, zeta_clean;
        if (bundle.net) {
            eta = bundle.net->forward(lift_in);
        } else if (bundle.basis) {
            eta = bundle.basis->evaluate(lift_in);
        } else {
            throw std::invalid_argument("rollout: model has synthetic observables but no lift");
        }
    }

    Vector x = x0;
    Vector zeta = zeta_clean;
    for (Eigen::Index t = 0; t < samples; ++t) {
        if (!x.allFinite() || !zeta.allFinite() || !eta.allFinite()) {
            throw NonFiniteState("rollout: prediction diverged at step " + std::to_string(t));
        }
        out.states.row(t) = x.transpose();
        out.observables.row(t) = zeta.transpose();
        out.synthetic.row(t) = eta.transpose();
        if (t + 1 == samples) break;

        const Vector u = inputs.row(t).transpose();
        // A folded model's zeta slot expects the raw measurement, which is
        // recoverable from the cleaned prediction and the current input.
        Vector zeta_slot = zeta;
        if (bundle.linear.folded && dims.z > 0) {
            zeta_slot += bundle.filter->D * u;
        }
        const Vector xi = lifting::assemble_datum(dims, x, zeta_slot, eta, u);
        const Vector next = bundle.linear.A * xi;
        if (dims.m > 0) {
            eta = bundle.linear.H * xi;
        }
        x = next.head(dims.l);
        zeta = next.tail(dims.z);
    }
    return out;
}

double ise(const Matrix& predicted, const Matrix& truth, double dt) {
    if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols()) {
        throw DimensionMismatch("ise: sequences differ in shape");
    }
    return (predicted - truth).squaredNorm() * dt;
}

CompareReport compare(const Trajectory& truth, const std::vector<ModelBundle>& models) {
    truth.validate();
    CompareReport report;
    report.truth_states = truth.states;
    report.dt = truth.dt;

    for (const auto& bundle : models) {
        if (bundle.linear.dims.l != truth.l() || bundle.linear.dims.n != truth.n()) {
            throw DimensionMismatch("compare: model " + bundle.method +
                                    " does not match trajectory dims");
        }
        CompareRow row;
        row.model = bundle.method;
        row.lifted_dim = bundle.lifted_dim;

        Vector zeta0 = truth.observables.row(0).transpose();
        if (bundle.linear.dims.z == 0) {
            zeta0 = Vector::Zero(0);
        } else if (!bundle.linear.folded && bundle.filter) {
            // Unfolded but filter-trained models consume cleaned observables.
            zeta0 = causality::clean(*bundle.filter, zeta0, truth.inputs.row(0).transpose());
        }

        try {
            Rollout r = rollout(bundle, truth.states.row(0).transpose(), zeta0, truth.inputs,
                                truth.dt);
            row.ise = ise(r.states, truth.states, truth.dt);
            report.rollouts.push_back(std::move(r));
        } catch (const NonFiniteState&) {
            row.diverged = true;
            row.ise = std::numeric_limits<double>::infinity();
            report.rollouts.emplace_back();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace liftid::eval
