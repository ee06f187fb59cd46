#pragma once

#include <cstdint>
#include <vector>

#include "liftid/causality.hpp"
#include "liftid/lifting.hpp"
#include "liftid/neural.hpp"

namespace liftid::l3 {

using causality::AnticausalFilter;
using lifting::Dataset;
using lifting::Dims;
using lifting::LiftedLinearModel;
using lifting::TransitionPair;
using neural::Mlp;
using numerics::Matrix;
using numerics::Vector;

struct L3Config {
    std::vector<int> hidden{256, 256};
    int synthetic = 2;  ///< synthetic observable count m
    neural::AdamParams adam{};
    int batch_size = 32;
    Matrix weight_q;  ///< residual weight Q; empty means identity
    int patience = 5;
    int max_epochs = 1000;
    std::uint64_t seed = 0;
    bool use_filter = true;  ///< false reproduces the NoF ablation
    bool use_zeta = true;    ///< false reproduces the NoZ ablation
    double init_range = 0.1; ///< uniform +-range for A and H entries
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct L3Model {
    Mlp net;
    LiftedLinearModel linear;  ///< folded after training
    AnticausalFilter filter;
    L3Config config;
    std::vector<EpochStats> history;
};

/// Stacked one-step residual ((x, zeta*)_{t+1} - A xi_t, eta_{t+1} - H xi_t)
/// with eta at both times produced by the same network parameters.
/// Pair observables must be in the model's regressor domain (cleaned for an
/// unfolded model trained per Algorithm 1).
Vector residual(const LiftedLinearModel& model, const Mlp& net, const TransitionPair& pair);

double pair_loss(const LiftedLinearModel& model, const Mlp& net, const Matrix& weight_q,
                 const TransitionPair& pair);

struct BatchEval {
    double loss = 0.0;  ///< mean loss over the batch
    Matrix grad_a, grad_h;
    Mlp::Gradients grad_net;
};

/// Mean batch loss and its exact gradients with respect to A, H and the
/// network parameters; gradient flow passes through both network instances.
BatchEval batch_gradients(const LiftedLinearModel& model, const Mlp& net,
                          const Matrix& weight_q, const std::vector<TransitionPair>& pairs);

/// Mean loss only.
double batch_loss(const LiftedLinearModel& model, const Mlp& net, const Matrix& weight_q,
                  const std::vector<TransitionPair>& pairs);

/// Learned lifting linearization: estimates the anticausal filter, cleans the
/// observables, jointly trains (theta, A, H) with Adam on shuffled
/// mini-batches, early-stops on validation loss with best-weights restore,
/// then applies the terminal input fold.
L3Model train(const Dataset& ds, const L3Config& cfg);

struct GradCheckReport {
    double max_rel_theta = 0.0;
    double max_rel_a = 0.0;
    double max_rel_h = 0.0;

    double max_rel() const;
};

/// Central finite-difference check of every parameter gradient; the reported
/// metric is |analytic - fd| / max(|fd|, 1e-3), comparable against 1e-4
/// (equivalently: 1e-4 relative with a 1e-7 absolute floor).
GradCheckReport gradient_check(const LiftedLinearModel& model, const Mlp& net,
                               const Matrix& weight_q,
                               const std::vector<TransitionPair>& pairs, double step = 1e-5);

}  // namespace liftid::l3
