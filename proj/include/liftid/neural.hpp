#pragma once

#include <cstdint>
#include <vector>

#include "liftid/numerics.hpp"

namespace liftid::neural {

using numerics::Matrix;
using numerics::Rng;
using numerics::Vector;

/// Fully connected network, ReLU hidden layers, linear output.
///
/// layer_sizes = {d_in, hidden..., d_out}; weights[i] maps layer i to i+1.
/// A zero-output network (d_out == 0) is valid and degenerates to an empty
/// lift.
struct Mlp {
    std::vector<int> layer_sizes;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    /// Glorot-uniform weights (+-sqrt(6 / (fan_in + fan_out))), zero biases.
    /// Weight entries are drawn in row-major order.
    static Mlp init(const std::vector<int>& sizes, Rng& rng);

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    int layer_count() const { return static_cast<int>(weights.size()); }

    /// Post-activation values per layer for a batch; activations[0] is the
    /// input block, activations[L] the network output.
    struct Trace {
        std::vector<Matrix> activations;
    };

    struct Gradients {
        std::vector<Matrix> weights;
        std::vector<Vector> biases;

        static Gradients zeros_like(const Mlp& net);
        void accumulate(const Gradients& other);
        void scale(double factor);
    };

    Vector forward(const Vector& input) const;

    /// Inputs are columns (d_in x batch); returns d_out x batch.
    Matrix forward_batch(const Matrix& inputs, Trace* trace = nullptr) const;

    /// Gradients of the batch-summed loss given d(loss)/d(output) columns.
    Gradients backward(const Trace& trace, const Matrix& output_grad) const;

    void validate() const;
};

struct AdamParams {
    double alpha = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One bias-corrected Adam update over a flat parameter array. `step` is the
/// already-incremented step counter (first call passes 1). Moment vectors
/// must be zero-initialized with the parameter's size.
void adam_update(double* params, const double* grads, Eigen::Index size, Vector& m,
                 Vector& v, std::int64_t step, const AdamParams& hp);

/// Adam state over an ordered list of parameter tensors.
class AdamOptimizer {
public:
    AdamOptimizer(AdamParams hp, const std::vector<Eigen::Index>& tensor_sizes);

    /// Applies one update; tensors must be passed in registration order.
    void step(const std::vector<double*>& params, const std::vector<const double*>& grads);

    std::int64_t steps_taken() const { return t_; }

private:
    AdamParams hp_;
    std::vector<Eigen::Index> sizes_;
    std::vector<Vector> m_, v_;
    std::int64_t t_ = 0;
};

}  // namespace liftid::neural
