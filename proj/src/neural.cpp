#include "liftid/neural.hpp"

#include <cmath>

namespace liftid::neural {

Mlp Mlp::init(const std::vector<int>& sizes, Rng& rng) {
    if (sizes.size() < 2) {
        throw std::invalid_argument("mlp: need at least input and output layer sizes");
    }
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        if (sizes[i] <= 0) {
            throw std::invalid_argument("mlp: input and hidden layer sizes must be positive");
        }
    }
    if (sizes.back() < 0) {
        throw std::invalid_argument("mlp: output size must be nonnegative");
    }

    Mlp net;
    net.layer_sizes = sizes;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const int fan_in = sizes[i];
        const int fan_out = sizes[i + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) {
                w(r, c) = rng.uniform(-bound, bound);
            }
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(Vector::Zero(fan_out));
    }
    return net;
}

void Mlp::validate() const {
    if (layer_sizes.size() < 2 || weights.size() != layer_sizes.size() - 1 ||
        biases.size() != weights.size()) {
        throw DimensionMismatch("mlp: layer bookkeeping inconsistent");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i].rows() != layer_sizes[i + 1] || weights[i].cols() != layer_sizes[i] ||
            biases[i].size() != layer_sizes[i + 1]) {
            throw DimensionMismatch("mlp: layer shapes do not chain");
        }
        if (!numerics::all_finite(weights[i]) || !numerics::all_finite(biases[i])) {
            throw NonFiniteState("mlp: non-finite parameters");
        }
    }
}

Vector Mlp::forward(const Vector& input) const {
    return forward_batch(input);
}

Matrix Mlp::forward_batch(const Matrix& inputs, Trace* trace) const {
    if (inputs.rows() != input_dim()) {
        throw DimensionMismatch("mlp forward: input rows != input_dim");
    }
    if (trace) {
        trace->activations.clear();
        trace->activations.reserve(weights.size() + 1);
        trace->activations.push_back(inputs);
    }
    Matrix a = inputs;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        Matrix zed = weights[i] * a;
        zed.colwise() += biases[i];
        if (i + 1 < weights.size()) {
            a = zed.cwiseMax(0.0);
        } else {
            a = std::move(zed);
        }
        if (trace) trace->activations.push_back(a);
    }
    return a;
}

Mlp::Gradients Mlp::Gradients::zeros_like(const Mlp& net) {
    Gradients g;
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        g.weights.push_back(Matrix::Zero(net.weights[i].rows(), net.weights[i].cols()));
        g.biases.push_back(Vector::Zero(net.biases[i].size()));
    }
    return g;
}

void Mlp::Gradients::accumulate(const Gradients& other) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] += other.weights[i];
        biases[i] += other.biases[i];
    }
}

void Mlp::Gradients::scale(double factor) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] *= factor;
        biases[i] *= factor;
    }
}

Mlp::Gradients Mlp::backward(const Trace& trace, const Matrix& output_grad) const {
    const auto layers = static_cast<std::ptrdiff_t>(weights.size());
    if (trace.activations.size() != weights.size() + 1) {
        throw DimensionMismatch("mlp backward: trace does not match network");
    }
    if (output_grad.rows() != output_dim() ||
        output_grad.cols() != trace.activations.front().cols()) {
        throw DimensionMismatch("mlp backward: upstream gradient shape mismatch");
    }

    Gradients grads = Gradients::zeros_like(*this);
    Matrix delta = output_grad;
    for (std::ptrdiff_t i = layers - 1; i >= 0; --i) {
        grads.weights[i] = delta * trace.activations[i].transpose();
        grads.biases[i] = delta.rowwise().sum();
        if (i > 0) {
            delta = weights[i].transpose() * delta;
            // ReLU mask: hidden activations are max(z, 0), so a > 0 marks
            // the active units.
            delta.array() *= (trace.activations[i].array() > 0.0).cast<double>();
        }
    }
    return grads;
}

void adam_update(double* params, const double* grads, Eigen::Index size, Vector& m,
                 Vector& v, std::int64_t step, const AdamParams& hp) {
    if (m.size() != size || v.size() != size || step < 1) {
        throw std::invalid_argument("adam_update: moment sizes or step invalid");
    }
    const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step));
    for (Eigen::Index i = 0; i < size; ++i) {
        const double g = grads[i];
        m[i] = hp.beta1 * m[i] + (1.0 - hp.beta1) * g;
        v[i] = hp.beta2 * v[i] + (1.0 - hp.beta2) * g * g;
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        params[i] -= hp.alpha * m_hat / (std::sqrt(v_hat) + hp.epsilon);
    }
}

AdamOptimizer::AdamOptimizer(AdamParams hp, const std::vector<Eigen::Index>& tensor_sizes)
    : hp_(hp), sizes_(tensor_sizes) {
    for (Eigen::Index size : sizes_) {
        m_.push_back(Vector::Zero(size));
        v_.push_back(Vector::Zero(size));
    }
}

void AdamOptimizer::step(const std::vector<double*>& params,
                         const std::vector<const double*>& grads) {
    if (params.size() != sizes_.size() || grads.size() != sizes_.size()) {
        throw DimensionMismatch("adam: tensor list does not match registration");
    }
    ++t_;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        adam_update(params[i], grads[i], sizes_[i], m_[i], v_[i], t_, hp_);
    }
}

}  // namespace liftid::neural
