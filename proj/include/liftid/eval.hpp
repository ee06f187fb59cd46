#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liftid/causality.hpp"
#include "liftid/l3.hpp"
#include "liftid/lifting.hpp"
#include "liftid/neural.hpp"

namespace liftid::eval {

using causality::AnticausalFilter;
using lifting::LiftedLinearModel;
using lifting::PolyBasis;
using lifting::Trajectory;
using neural::Mlp;
using numerics::Matrix;
using numerics::Vector;

/// A fitted model plus everything needed to roll it out and serialize it:
/// the lift provider (network or dictionary, absent for m = 0 models) and
/// the anticausal filter it was trained behind, when any.
struct ModelBundle {
    std::string method;
    LiftedLinearModel linear;
    std::optional<Mlp> net;
    std::optional<PolyBasis> basis;
    std::optional<AnticausalFilter> filter;
    int lifted_dim = 0;

    static ModelBundle from_l3(std::string method, const l3::L3Model& model);
};

struct Rollout {
    Matrix states;       ///< samples x l
    Matrix observables;  ///< samples x z, predicted cleaned zeta*
    Matrix synthetic;    ///< samples x m
    double dt = 0.0;
};

/// Open-loop simulation: state and observables evolve by the linear model
/// from (x0, zeta0) under the recorded inputs. The lift is evaluated once at
/// step 0; afterwards eta propagates through H and the observable channel is
/// the model's own prediction. zeta0 is raw for a folded model (the stored
/// filter cleans it) and already-cleaned otherwise.
Rollout rollout(const ModelBundle& bundle, const Vector& x0, const Vector& zeta0,
                const Matrix& inputs, double dt);

/// Integrated squared state error, rectangle rule over the full horizon.
double ise(const Matrix& predicted, const Matrix& truth, double dt);

struct CompareRow {
    std::string model;
    int lifted_dim = 0;
    double ise = 0.0;
    bool diverged = false;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    std::vector<Rollout> rollouts;  ///< aligned with rows; empty if diverged
    Matrix truth_states;
    double dt = 0.0;
};

/// Rolls every model out over the test trajectory's inputs and scores the
/// state channel. A model whose rollout leaves the finite range is reported
/// with infinite error instead of aborting the comparison.
CompareReport compare(const Trajectory& truth, const std::vector<ModelBundle>& models);

}  // namespace liftid::eval
