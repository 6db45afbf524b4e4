#pragma once

#include "specverify/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace specverify {

struct PendulumState {
    double theta = 0.0;  // radians, 0 = hanging down
    double omega = 0.0;  // radians/second
};

struct PendulumParams {
    double mass = 1.0;        // kg
    double length = 0.5;      // m
    double gravity = 9.81;    // m/s^2
    double damping = 0.1;     // N*m*s
    double dt_inner = 0.001;  // s, integration substep
    double dt_sample = 0.1;   // s, interval between emitted states
};

void validate_params(const PendulumParams& p);

// Advances one sample interval with semi-implicit Euler substeps of
// theta'' = -(g/l) sin(theta) - (c/(m l^2)) omega.
PendulumState step_pendulum(PendulumState s, const PendulumParams& p);

// E = m g l h + 1/2 m l^2 omega^2 with h = -cos(theta).
double energy(const PendulumState& s, const PendulumParams& p);

// Same energy from network coordinates (w, h, s*omega).
double energy_coords(const Vector& coords, const PendulumParams& p,
                     double velocity_scale = 0.1);

// One (state, next state) pair in network coordinates (sin t, -cos t, s*w).
struct StatePair {
    Vector input;
    Vector target;
};

// theta ~ U[-pi, pi), omega ~ U(-10, 10); one integrator step per pair.
// Each pair draws from its own (seed, index) stream, so chunked generation
// would produce identical data.
std::vector<StatePair> generate_dataset(int n_pairs, std::uint64_t seed,
                                        const PendulumParams& p,
                                        double velocity_scale = 0.1);

void write_pendulum_csv(const std::vector<StatePair>& pairs, const std::string& path);

inline constexpr const char* kPendulumCsvHeader = "w,h,somega,w_next,h_next,somega_next";

}  // namespace specverify
