#include "liftid/lifting.hpp"

#include <algorithm>
#include <cmath>

namespace liftid::lifting {

void Trajectory::validate() const {
    if (states.rows() < 2) {
        throw std::invalid_argument("trajectory: needs at least two samples");
    }
    if (inputs.rows() != states.rows() || observables.rows() != states.rows()) {
        throw DimensionMismatch("trajectory: state/input/observable sample counts differ");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("trajectory: dt must be positive");
    }
    if (!numerics::all_finite(states) || !numerics::all_finite(inputs) ||
        !numerics::all_finite(observables)) {
        throw NonFiniteState("trajectory: non-finite sample");
    }
}

std::string to_string(Split s) {
    return s == Split::Train ? "train" : "validation";
}

std::vector<int> Dataset::indices(Split tag) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split[i] == tag) out.push_back(static_cast<int>(i));
    }
    return out;
}

void Dataset::validate() const {
    if (trajectories.empty() || split.size() != trajectories.size()) {
        throw std::invalid_argument("dataset: split tags must match trajectory count");
    }
    const auto& first = trajectories.front();
    for (const auto& traj : trajectories) {
        traj.validate();
        if (traj.l() != first.l() || traj.n() != first.n() || traj.z() != first.z() ||
            traj.dt != first.dt) {
            throw DimensionMismatch("dataset: trajectories disagree on (l, n, z, dt)");
        }
    }
    if (indices(Split::Train).empty() || indices(Split::Validation).empty()) {
        throw std::invalid_argument("dataset: both split tags must be populated");
    }
}

void Dataset::compute_centering() {
    const auto train = indices(Split::Train);
    Vector sum_x = Vector::Zero(l());
    Vector sum_u = Vector::Zero(n());
    Vector sum_z = Vector::Zero(z());
    long count = 0;
    for (int i : train) {
        const auto& traj = trajectories[i];
        sum_x += traj.states.colwise().sum().transpose();
        sum_u += traj.inputs.colwise().sum().transpose();
        sum_z += traj.observables.colwise().sum().transpose();
        count += traj.samples();
    }
    centering.mean_x = sum_x / static_cast<double>(count);
    centering.mean_u = sum_u / static_cast<double>(count);
    centering.mean_zeta = sum_z / static_cast<double>(count);
}

std::vector<TransitionPair> transition_pairs(const Dataset& ds, Split tag) {
    const auto idx = ds.indices(tag);
    if (idx.empty()) {
        throw std::invalid_argument("transition_pairs: split tag not present in dataset");
    }
    std::vector<TransitionPair> pairs;
    for (int i : idx) {
        const auto& traj = ds.trajectories[i];
        for (int t = 0; t + 1 < traj.samples(); ++t) {
            TransitionPair pair;
            pair.x_t = traj.states.row(t).transpose();
            pair.zeta_t = traj.observables.row(t).transpose();
            pair.u_t = traj.inputs.row(t).transpose();
            pair.x_next = traj.states.row(t + 1).transpose();
            pair.zeta_next = traj.observables.row(t + 1).transpose();
            pairs.push_back(std::move(pair));
        }
    }
    return pairs;
}

Vector assemble_datum(const Dims& dims, const Vector& x, const Vector& zeta,
                      const Vector& eta, const Vector& u) {
    if (x.size() != dims.l || zeta.size() != dims.z || eta.size() != dims.m ||
        u.size() != dims.n) {
        throw DimensionMismatch("assemble_datum: component length does not match dims");
    }
    Vector xi(dims.p());
    xi << x, zeta, eta, u;
    return xi;
}

PolyBasis::PolyBasis(int dim, std::vector<std::vector<int>> exponents)
    : dim_(dim), exponents_(std::move(exponents)) {
    if (dim_ <= 0) {
        throw std::invalid_argument("poly basis: dimension must be positive");
    }
    for (const auto& e : exponents_) {
        if (static_cast<int>(e.size()) != dim_) {
            throw DimensionMismatch("poly basis: exponent vector length != dim");
        }
        int degree = 0;
        for (int k : e) {
            if (k < 0) throw std::invalid_argument("poly basis: negative exponent");
            degree += k;
        }
        if (degree < 1) {
            throw std::invalid_argument("poly basis: constant term excluded");
        }
    }
}

namespace {

// Compositions of `degree` into `dim` parts, descending lexicographic.
void enumerate_degree(int dim, int degree, std::vector<int>& current,
                      std::vector<std::vector<int>>& out, int remaining_slots) {
    if (remaining_slots == 1) {
        current.push_back(degree);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int k = degree; k >= 0; --k) {
        current.push_back(k);
        enumerate_degree(dim, degree - k, current, out, remaining_slots - 1);
        current.pop_back();
    }
}

}  // namespace

PolyBasis PolyBasis::graded_lex(int dim, int count, int min_degree) {
    if (dim <= 0 || count <= 0 || min_degree < 1) {
        throw std::invalid_argument("poly basis: dim, count >= 1 and min_degree >= 1 required");
    }
    std::vector<std::vector<int>> exps;
    for (int degree = min_degree; static_cast<int>(exps.size()) < count; ++degree) {
        std::vector<std::vector<int>> level;
        std::vector<int> current;
        enumerate_degree(dim, degree, current, level, dim);
        for (auto& e : level) {
            if (static_cast<int>(exps.size()) == count) break;
            exps.push_back(std::move(e));
        }
    }
    return PolyBasis(dim, std::move(exps));
}

Vector PolyBasis::evaluate(const Vector& v) const {
    if (v.size() != dim_) {
        throw DimensionMismatch("poly basis: input length != dim");
    }
    Vector out(size());
    for (int i = 0; i < size(); ++i) {
        double value = 1.0;
        for (int j = 0; j < dim_; ++j) {
            for (int k = 0; k < exponents_[i][j]; ++k) value *= v[j];
        }
        out[i] = value;
    }
    return out;
}

void LiftedLinearModel::validate() const {
    if (A.rows() != dims.l + dims.z || A.cols() != dims.p()) {
        throw DimensionMismatch("lifted model: A shape inconsistent with dims");
    }
    if (H.rows() != dims.m || (dims.m > 0 && H.cols() != dims.p())) {
        throw DimensionMismatch("lifted model: H shape inconsistent with dims");
    }
    if (!numerics::all_finite(A) || !numerics::all_finite(H)) {
        throw NonFiniteState("lifted model: non-finite coefficients");
    }
}

}  // namespace liftid::lifting
