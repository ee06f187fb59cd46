#include "liftid/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace liftid::plant {

using lifting::Split;

double phi_r(double e) {
    return 2.0 / (1.0 + std::exp(-4.0 * e)) - 1.0;
}

double phi_c(double q) {
    return q >= 0.0 ? q * q : -(q * q);
}

double ToyPlant::derivative(double q, double u) const {
    return phi_r(u - phi_c(q));
}

Vector ToyPlant::observe(double q, double u) const {
    Vector zeta(2);
    zeta << phi_r(u - phi_c(q)), phi_c(q);
    return zeta;
}

SignalSpec SignalSpec::piecewise_uniform(double lo, double hi) {
    SignalSpec s;
    s.kind = SignalKind::PiecewiseConstantUniform;
    s.lo = lo;
    s.hi = hi;
    return s;
}

SignalSpec SignalSpec::square_wave(double amplitude, double period) {
    SignalSpec s;
    s.kind = SignalKind::SquareWave;
    s.amplitude = amplitude;
    s.period = period;
    return s;
}

SignalSpec SignalSpec::noisy_pid(double kp, double ki, double kd, double setpoint_lo,
                                 double setpoint_hi, double noise) {
    SignalSpec s;
    s.kind = SignalKind::NoisyPid;
    s.kp = kp;
    s.ki = ki;
    s.kd = kd;
    s.setpoint_lo = setpoint_lo;
    s.setpoint_hi = setpoint_hi;
    s.noise = noise;
    return s;
}

Vector generate_signal(const SignalSpec& spec, Rng& rng, double duration, double dt) {
    if (!(dt > 0.0) || !(duration > 0.0)) {
        throw std::invalid_argument("generate_signal: duration and dt must be positive");
    }
    const int steps = static_cast<int>(std::llround(duration / dt));
    if (std::abs(steps * dt - duration) > 1e-9 * duration || steps < 1) {
        throw std::invalid_argument("generate_signal: duration must be a positive multiple of dt");
    }
    const int samples = steps + 1;
    Vector u(samples);

    switch (spec.kind) {
        case SignalKind::PiecewiseConstantUniform: {
            if (!(spec.lo < spec.hi)) {
                throw std::invalid_argument("generate_signal: requires lo < hi");
            }
            u = rng.uniform(spec.lo, spec.hi, samples);
            break;
        }
        case SignalKind::SquareWave: {
            if (!(spec.period > 0.0)) {
                throw std::invalid_argument("generate_signal: square wave period must be positive");
            }
            for (int i = 0; i < samples; ++i) {
                const double phase = std::fmod(i * dt, spec.period);
                u[i] = phase < 0.5 * spec.period ? spec.amplitude : -spec.amplitude;
            }
            break;
        }
        case SignalKind::NoisyPid: {
            // Open-loop excitation: the tracked output is taken as zero, so the
            // error is the setpoint itself. Integral by rectangle rule with an
            // anti-windup clamp at 10x the setpoint amplitude bound.
            const double setpoint = rng.uniform(spec.setpoint_lo, spec.setpoint_hi);
            const double windup =
                10.0 * std::max(std::abs(spec.setpoint_lo), std::abs(spec.setpoint_hi));
            double integral = 0.0;
            double prev_error = setpoint;
            for (int i = 0; i < samples; ++i) {
                const double error = setpoint;
                integral = std::clamp(integral + error * dt, -windup, windup);
                const double derivative = i == 0 ? 0.0 : (error - prev_error) / dt;
                prev_error = error;
                double value = spec.kp * error + spec.ki * integral + spec.kd * derivative;
                if (spec.noise > 0.0) {
                    value += rng.uniform(-spec.noise, spec.noise);
                }
                u[i] = value;
            }
            break;
        }
    }
    return u;
}

namespace {

double rk4_sample_step(const ToyPlant& plant, double q, double u, double h, int substeps) {
    const double hs = h / substeps;
    for (int s = 0; s < substeps; ++s) {
        const double k1 = plant.derivative(q, u);
        const double k2 = plant.derivative(q + 0.5 * hs * k1, u);
        const double k3 = plant.derivative(q + 0.5 * hs * k2, u);
        const double k4 = plant.derivative(q + hs * k3, u);
        q += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return q;
}

}  // namespace

Trajectory simulate(const ToyPlant& plant, double q0, const Vector& input, double dt,
                    int substeps) {
    if (!(dt > 0.0) || substeps < 1) {
        throw std::invalid_argument("simulate: dt must be positive and substeps >= 1");
    }
    const int samples = static_cast<int>(input.size());
    if (samples < 2) {
        throw std::invalid_argument("simulate: need at least two input samples");
    }

    Trajectory traj;
    traj.dt = dt;
    traj.states.resize(samples, ToyPlant::l);
    traj.inputs.resize(samples, ToyPlant::n);
    traj.observables.resize(samples, ToyPlant::z);

    double q = q0;
    for (int t = 0; t < samples; ++t) {
        if (!std::isfinite(q)) {
            throw NonFiniteState("simulate: state diverged during integration");
        }
        traj.states(t, 0) = q;
        traj.inputs(t, 0) = input[t];
        traj.observables.row(t) = plant.observe(q, input[t]).transpose();
        if (t + 1 < samples) {
            q = rk4_sample_step(plant, q, input[t], dt, substeps);
        }
    }
    return traj;
}

int train_count(int count) {
    const int train = static_cast<int>(std::floor(0.8 * count));
    return std::clamp(train, 1, count - 1);
}

Dataset generate_dataset(const ToyPlant& plant, int count, double duration, double rate,
                         const Rng& rng, int substeps, const ExcitationRanges& ranges) {
    if (count < 2) {
        throw std::invalid_argument("generate_dataset: need at least two trajectories to split");
    }
    if (!(rate > 0.0)) {
        throw std::invalid_argument("generate_dataset: rate must be positive");
    }
    const double dt = 1.0 / rate;

    Dataset ds;
    ds.trajectories.reserve(count);
    for (int i = 0; i < count; ++i) {
        Rng stream = rng.derive(static_cast<std::uint64_t>(i) + 1);
        const double q0 = stream.uniform(ranges.q0_lo, ranges.q0_hi);
        const Vector u = generate_signal(
            SignalSpec::piecewise_uniform(ranges.input_lo, ranges.input_hi), stream,
            duration, dt);
        ds.trajectories.push_back(simulate(plant, q0, u, dt, substeps));
    }

    Rng split_stream = rng.derive(0);
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    split_stream.shuffle(order);

    const int n_train = train_count(count);
    ds.split.assign(count, Split::Validation);
    for (int k = 0; k < n_train; ++k) {
        ds.split[order[k]] = lifting::Split::Train;
    }

    ds.compute_centering();
    ds.validate();
    return ds;
}

}  // namespace liftid::plant
