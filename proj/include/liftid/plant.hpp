#pragma once

#include "liftid/lifting.hpp"
#include "liftid/numerics.hpp"

namespace liftid::plant {

using lifting::Dataset;
using lifting::Trajectory;
using numerics::Matrix;
using numerics::Rng;
using numerics::Vector;

/// Saturating resistor characteristic, odd, range (-1, 1).
double phi_r(double e);

/// Stiffening capacitor characteristic, sgn(q) * q^2.
double phi_c(double q);

/// First-order nonlinear plant with scalar state q, scalar input u and
/// measured observables zeta = (f, e_C) where f = phi_r(u - phi_c(q)) is the
/// flow through the resistor and e_C = phi_c(q) the capacitor effort. The
/// flow observable depends directly on u, which is what makes it anticausal.
struct ToyPlant {
    static constexpr int l = 1;
    static constexpr int n = 1;
    static constexpr int z = 2;

    double derivative(double q, double u) const;
    Vector observe(double q, double u) const;
};

enum class SignalKind { PiecewiseConstantUniform, SquareWave, NoisyPid };

struct SignalSpec {
    SignalKind kind = SignalKind::PiecewiseConstantUniform;
    double lo = -1.0, hi = 1.0;      ///< amplitude bounds (PiecewiseConstantUniform)
    double amplitude = 1.0;          ///< SquareWave
    double period = 1.0;             ///< SquareWave, seconds
    double kp = 1.0, ki = 0.0, kd = 0.0;            ///< NoisyPid gains
    double setpoint_lo = -1.0, setpoint_hi = 1.0;   ///< NoisyPid setpoint bounds
    double noise = 0.0;                             ///< NoisyPid noise bound w

    static SignalSpec piecewise_uniform(double lo, double hi);
    static SignalSpec square_wave(double amplitude, double period);
    static SignalSpec noisy_pid(double kp, double ki, double kd, double setpoint_lo,
                                double setpoint_hi, double noise);
};

/// Samples an excitation signal at instants 0, dt, ..., duration. The
/// returned column holds one input value per sample instant; inputs are held
/// constant over each interval (zero-order hold).
Vector generate_signal(const SignalSpec& spec, Rng& rng, double duration, double dt);

/// Integrates the plant under a zero-order-hold input sequence with classical
/// RK4, `substeps` internal steps per sample interval. Observables are
/// evaluated at the sample instants.
Trajectory simulate(const ToyPlant& plant, double q0, const Vector& input, double dt,
                    int substeps = 10);

/// Excitation ranges for generate_dataset. Defaults draw q0 ~ U(-2, 2) and
/// piecewise-constant U(-2.5, 2.5) inputs.
struct ExcitationRanges {
    double q0_lo = -2.0, q0_hi = 2.0;
    double input_lo = -2.5, input_hi = 2.5;
};

/// Data-generation protocol: `count` trajectories with random initial
/// conditions and piecewise-constant uniform inputs, split 80-20 by
/// trajectory. Trajectory i draws from rng.derive(i + 1); the split uses
/// rng.derive(0), so serial and parallel generation agree.
Dataset generate_dataset(const ToyPlant& plant, int count, double duration, double rate,
                         const Rng& rng, int substeps = 10,
                         const ExcitationRanges& ranges = {});

/// Floor(0.8 * count) training trajectories, at least one per split.
int train_count(int count);

}  // namespace liftid::plant
