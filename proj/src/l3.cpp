#include "liftid/l3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace liftid::l3 {

using lifting::Split;
using neural::AdamOptimizer;
using numerics::Rng;

namespace {

Matrix resolve_weight_q(const Matrix& weight_q, int size) {
    if (weight_q.size() == 0) {
        return Matrix::Identity(size, size);
    }
    if (weight_q.rows() != size || weight_q.cols() != size) {
        throw DimensionMismatch("L3: Q must be (l+z+m) square");
    }
    if (!weight_q.isApprox(weight_q.transpose(), 1e-12)) {
        throw std::invalid_argument("L3: Q must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(weight_q);
    if (eig.eigenvalues().minCoeff() < -1e-12) {
        throw std::invalid_argument("L3: Q must be positive semidefinite");
    }
    return weight_q;
}

/// Columns of the training set gathered once; batches slice by index.
struct PairColumns {
    Matrix in_t;    ///< (l+z) x N network/datum inputs at t
    Matrix in_next; ///< (l+z) x N at t+1
    Matrix u;       ///< n x N
};

PairColumns gather(const Dims& dims, const std::vector<TransitionPair>& pairs) {
    const auto count = static_cast<Eigen::Index>(pairs.size());
    PairColumns cols;
    cols.in_t.resize(dims.l + dims.z, count);
    cols.in_next.resize(dims.l + dims.z, count);
    cols.u.resize(dims.n, count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto& pair = pairs[i];
        if (pair.x_t.size() != dims.l || pair.zeta_t.size() != dims.z ||
            pair.u_t.size() != dims.n) {
            throw DimensionMismatch("L3: transition pair does not match model dims");
        }
        cols.in_t.col(i) << pair.x_t, pair.zeta_t;
        cols.in_next.col(i) << pair.x_next, pair.zeta_next;
        cols.u.col(i) = pair.u_t;
    }
    return cols;
}

struct Gathered {
    Matrix in_t, in_next, u;
};

Gathered slice(const PairColumns& cols, const std::vector<int>& idx, int from, int count) {
    Gathered g;
    g.in_t.resize(cols.in_t.rows(), count);
    g.in_next.resize(cols.in_next.rows(), count);
    g.u.resize(cols.u.rows(), count);
    for (int k = 0; k < count; ++k) {
        const int j = idx[from + k];
        g.in_t.col(k) = cols.in_t.col(j);
        g.in_next.col(k) = cols.in_next.col(j);
        g.u.col(k) = cols.u.col(j);
    }
    return g;
}

/// Core forward/backward over gathered columns. Gradients are of the MEAN
/// per-pair loss; pass want_grads=false for evaluation only.
BatchEval evaluate(const Matrix& a, const Matrix& h, const Mlp& net, const Matrix& weight_q,
                   const Dims& dims, const Matrix& in_t, const Matrix& in_next,
                   const Matrix& u, bool want_grads) {
    const auto batch = in_t.cols();
    const double inv_batch = 1.0 / static_cast<double>(batch);

    Mlp::Trace trace_t, trace_next;
    const Matrix eta_t = net.forward_batch(in_t, want_grads ? &trace_t : nullptr);
    const Matrix eta_next = net.forward_batch(in_next, want_grads ? &trace_next : nullptr);

    Matrix xi(dims.p(), batch);
    xi.topRows(dims.l + dims.z) = in_t;
    xi.middleRows(dims.l + dims.z, dims.m) = eta_t;
    xi.bottomRows(dims.n) = u;

    Matrix residuals(dims.l + dims.z + dims.m, batch);
    residuals.topRows(dims.l + dims.z) = in_next - a * xi;
    residuals.bottomRows(dims.m) = eta_next - h * xi;

    const Matrix weighted = weight_q * residuals;

    BatchEval out;
    out.loss = (residuals.array() * weighted.array()).sum() * inv_batch;
    if (!want_grads) {
        return out;
    }

    // dJ/dr = 2 Q r for symmetric Q; the mean over the batch folds in here.
    const Matrix force = (2.0 * inv_batch) * weighted;
    const auto force_state = force.topRows(dims.l + dims.z);
    const auto force_eta = force.bottomRows(dims.m);

    out.grad_a = -force_state * xi.transpose();
    out.grad_h = -force_eta * xi.transpose();

    // Datum gradient; only its eta block reaches the network (x, zeta*, u are
    // data). The t+1 instance contributes through the eta_{t+1} target.
    const Matrix datum_grad = -(a.transpose() * force_state + h.transpose() * force_eta);
    const Matrix eta_t_grad = datum_grad.middleRows(dims.l + dims.z, dims.m);

    out.grad_net = net.backward(trace_t, eta_t_grad);
    out.grad_net.accumulate(net.backward(trace_next, force_eta));
    return out;
}

std::vector<int> all_indices(std::size_t count) {
    std::vector<int> idx(count);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

struct Snapshot {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
    Matrix a, h;
};

}  // namespace

Vector residual(const LiftedLinearModel& model, const Mlp& net, const TransitionPair& pair) {
    const Dims& dims = model.dims;
    Vector in_t(dims.l + dims.z), in_next(dims.l + dims.z);
    if (pair.x_t.size() != dims.l || pair.zeta_t.size() != dims.z ||
        pair.u_t.size() != dims.n || net.output_dim() != dims.m) {
        throw DimensionMismatch("residual: pair or network does not match model dims");
    }
    in_t << pair.x_t, pair.zeta_t;
    in_next << pair.x_next, pair.zeta_next;

    const Vector eta_t = net.forward(in_t);
    const Vector eta_next = net.forward(in_next);
    const Vector xi = lifting::assemble_datum(dims, pair.x_t, pair.zeta_t, eta_t, pair.u_t);

    Vector r(dims.l + dims.z + dims.m);
    r.head(dims.l + dims.z) = in_next - model.A * xi;
    r.tail(dims.m) = eta_next - model.H * xi;
    return r;
}

double pair_loss(const LiftedLinearModel& model, const Mlp& net, const Matrix& weight_q,
                 const TransitionPair& pair) {
    const Vector r = residual(model, net, pair);
    const Matrix q = resolve_weight_q(weight_q, static_cast<int>(r.size()));
    return r.dot(q * r);
}

BatchEval batch_gradients(const LiftedLinearModel& model, const Mlp& net,
                          const Matrix& weight_q, const std::vector<TransitionPair>& pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("batch_gradients: empty batch");
    }
    const Matrix q = resolve_weight_q(weight_q, model.dims.l + model.dims.z + model.dims.m);
    const PairColumns cols = gather(model.dims, pairs);
    return evaluate(model.A, model.H, net, q, model.dims, cols.in_t, cols.in_next, cols.u,
                    /*want_grads=*/true);
}

double batch_loss(const LiftedLinearModel& model, const Mlp& net, const Matrix& weight_q,
                  const std::vector<TransitionPair>& pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("batch_loss: empty batch");
    }
    const Matrix q = resolve_weight_q(weight_q, model.dims.l + model.dims.z + model.dims.m);
    const PairColumns cols = gather(model.dims, pairs);
    return evaluate(model.A, model.H, net, q, model.dims, cols.in_t, cols.in_next, cols.u,
                    /*want_grads=*/false)
        .loss;
}

L3Model train(const Dataset& ds, const L3Config& cfg) {
    ds.validate();
    if (cfg.batch_size < 1 || cfg.patience < 1 || cfg.max_epochs < 0 || cfg.synthetic < 0) {
        throw std::invalid_argument("L3: invalid training configuration");
    }

    Dims dims{ds.l(), cfg.use_zeta ? ds.z() : 0, cfg.synthetic, ds.n()};

    // Stage the working data: optionally drop zeta, then clean it.
    Dataset work = ds;
    if (!cfg.use_zeta) {
        for (auto& traj : work.trajectories) {
            traj.observables = Matrix::Zero(traj.samples(), 0);
        }
        work.compute_centering();
    }
    AnticausalFilter filter = AnticausalFilter::zero(dims.z, dims.n);
    if (cfg.use_filter && dims.z > 0) {
        filter = causality::estimate_filter_from(work, Split::Train);
        work = causality::clean_dataset(filter, work);
    }

    const auto pairs_train = lifting::transition_pairs(work, Split::Train);
    const auto pairs_val = lifting::transition_pairs(work, Split::Validation);
    const PairColumns train_cols = gather(dims, pairs_train);
    const PairColumns val_cols = gather(dims, pairs_val);
    const auto val_idx = all_indices(pairs_val.size());
    const Gathered val_all = slice(val_cols, val_idx, 0, static_cast<int>(val_idx.size()));

    const Matrix q = resolve_weight_q(cfg.weight_q, dims.l + dims.z + dims.m);

    // Seeded initialization; draw order is fixed: network layers, then A,
    // then H, both row-major.
    Rng rng(cfg.seed);
    std::vector<int> layers;
    layers.push_back(dims.l + dims.z);
    for (int hdim : cfg.hidden) layers.push_back(hdim);
    layers.push_back(dims.m);
    Mlp net = Mlp::init(layers, rng);

    auto init_matrix = [&](Eigen::Index rows, Eigen::Index cols) {
        Matrix out(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                out(r, c) = rng.uniform(-cfg.init_range, cfg.init_range);
            }
        }
        return out;
    };
    Matrix a = init_matrix(dims.l + dims.z, dims.p());
    Matrix h = init_matrix(dims.m, dims.p());

    // A and H join the network parameters under one optimizer; tensor order
    // is W1, b1, ..., WL, bL, A, H.
    std::vector<Eigen::Index> sizes;
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
        sizes.push_back(net.weights[i].size());
        sizes.push_back(net.biases[i].size());
    }
    sizes.push_back(a.size());
    sizes.push_back(h.size());
    AdamOptimizer opt(cfg.adam, sizes);

    double best_val = std::numeric_limits<double>::infinity();
    Snapshot best{net.weights, net.biases, a, h};
    int stale_epochs = 0;
    std::vector<EpochStats> history;
    auto order = all_indices(pairs_train.size());

    for (int epoch = 0;; ++epoch) {
        const double val_loss =
            evaluate(a, h, net, q, dims, val_all.in_t, val_all.in_next, val_all.u, false).loss;
        if (!std::isfinite(val_loss)) {
            throw NonFiniteLoss("L3: validation loss is not finite");
        }
        if (val_loss < best_val) {
            best_val = val_loss;
            best = Snapshot{net.weights, net.biases, a, h};
            stale_epochs = 0;
        } else {
            ++stale_epochs;
        }
        if (stale_epochs >= cfg.patience || epoch >= cfg.max_epochs) {
            break;
        }

        rng.shuffle(order);
        double loss_sum = 0.0;
        const int total = static_cast<int>(order.size());
        for (int from = 0; from < total; from += cfg.batch_size) {
            const int batch = std::min(cfg.batch_size, total - from);
            const Gathered g = slice(train_cols, order, from, batch);
            BatchEval be = evaluate(a, h, net, q, dims, g.in_t, g.in_next, g.u, true);
            if (!std::isfinite(be.loss)) {
                throw NonFiniteLoss("L3: training loss diverged at epoch " +
                                    std::to_string(epoch));
            }
            loss_sum += be.loss * batch;

            std::vector<double*> params;
            std::vector<const double*> grads;
            for (std::size_t i = 0; i < net.weights.size(); ++i) {
                params.push_back(net.weights[i].data());
                grads.push_back(be.grad_net.weights[i].data());
                params.push_back(net.biases[i].data());
                grads.push_back(be.grad_net.biases[i].data());
            }
            params.push_back(a.data());
            grads.push_back(be.grad_a.data());
            params.push_back(h.data());
            grads.push_back(be.grad_h.data());
            opt.step(params, grads);
        }
        history.push_back({loss_sum / total, val_loss});
    }

    net.weights = best.weights;
    net.biases = best.biases;
    a = best.a;
    h = best.h;

    LiftedLinearModel linear;
    linear.A = a;
    linear.H = h;
    linear.dims = dims;
    linear.folded = false;
    linear.validate();

    L3Model model;
    model.net = std::move(net);
    model.linear = causality::fold_input(linear, filter);
    model.filter = std::move(filter);
    model.config = cfg;
    model.history = std::move(history);
    return model;
}

double GradCheckReport::max_rel() const {
    return std::max(max_rel_theta, std::max(max_rel_a, max_rel_h));
}

namespace {

double fd_metric(double analytic, double fd) {
    return std::abs(analytic - fd) / std::max(std::abs(fd), 1e-3);
}

}  // namespace

GradCheckReport gradient_check(const LiftedLinearModel& model, const Mlp& net,
                               const Matrix& weight_q,
                               const std::vector<TransitionPair>& pairs, double step) {
    const Matrix q = resolve_weight_q(weight_q, model.dims.l + model.dims.z + model.dims.m);
    const BatchEval analytic = batch_gradients(model, net, q, pairs);

    LiftedLinearModel probe_model = model;
    Mlp probe_net = net;
    const auto loss_at = [&]() { return batch_loss(probe_model, probe_net, q, pairs); };
    const auto central = [&](double* slot) {
        const double saved = *slot;
        *slot = saved + step;
        const double up = loss_at();
        *slot = saved - step;
        const double down = loss_at();
        *slot = saved;
        return (up - down) / (2.0 * step);
    };

    GradCheckReport report;
    for (std::size_t layer = 0; layer < probe_net.weights.size(); ++layer) {
        for (Eigen::Index i = 0; i < probe_net.weights[layer].size(); ++i) {
            const double fd = central(probe_net.weights[layer].data() + i);
            report.max_rel_theta = std::max(
                report.max_rel_theta, fd_metric(analytic.grad_net.weights[layer](i), fd));
        }
        for (Eigen::Index i = 0; i < probe_net.biases[layer].size(); ++i) {
            const double fd = central(probe_net.biases[layer].data() + i);
            report.max_rel_theta = std::max(
                report.max_rel_theta, fd_metric(analytic.grad_net.biases[layer](i), fd));
        }
    }
    for (Eigen::Index i = 0; i < probe_model.A.size(); ++i) {
        const double fd = central(probe_model.A.data() + i);
        report.max_rel_a = std::max(report.max_rel_a, fd_metric(analytic.grad_a(i), fd));
    }
    for (Eigen::Index i = 0; i < probe_model.H.size(); ++i) {
        const double fd = central(probe_model.H.data() + i);
        report.max_rel_h = std::max(report.max_rel_h, fd_metric(analytic.grad_h(i), fd));
    }
    return report;
}

}  // namespace liftid::l3
