#include "specverify/physics.hpp"

#include "specverify/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace specverify {

void validate_params(const PendulumParams& p) {
    if (p.mass <= 0.0 || p.length <= 0.0 || p.gravity <= 0.0) {
        throw DomainError("pendulum: mass, length and gravity must be positive");
    }
    if (p.damping < 0.0) {
        throw DomainError("pendulum: damping must be nonnegative");
    }
    if (p.dt_inner <= 0.0 || p.dt_sample <= 0.0 || p.dt_inner > p.dt_sample) {
        throw DomainError("pendulum: need 0 < dt_inner <= dt_sample");
    }
}

PendulumState step_pendulum(PendulumState s, const PendulumParams& p) {
    validate_params(p);
    const int substeps = std::max(1, static_cast<int>(std::lround(p.dt_sample / p.dt_inner)));
    const double dt = p.dt_sample / static_cast<double>(substeps);
    const double g_over_l = p.gravity / p.length;
    const double damp = p.damping / (p.mass * p.length * p.length);
    for (int i = 0; i < substeps; ++i) {
        s.omega += dt * (-g_over_l * std::sin(s.theta) - damp * s.omega);
        s.theta += dt * s.omega;
    }
    if (!std::isfinite(s.theta) || !std::isfinite(s.omega)) {
        throw NumericError("step_pendulum: state diverged");
    }
    return s;
}

double energy(const PendulumState& s, const PendulumParams& p) {
    const double h = -std::cos(s.theta);
    return p.mass * p.gravity * p.length * h +
           0.5 * p.mass * p.length * p.length * s.omega * s.omega;
}

double energy_coords(const Vector& coords, const PendulumParams& p, double velocity_scale) {
    if (coords.size() != 3) {
        throw ShapeError("energy_coords: expected (w, h, s*omega)");
    }
    const double omega = coords(2) / velocity_scale;
    return p.mass * p.gravity * p.length * coords(1) +
           0.5 * p.mass * p.length * p.length * omega * omega;
}

namespace {

Vector to_coords(const PendulumState& s, double velocity_scale) {
    Vector v(3);
    v(0) = std::sin(s.theta);
    v(1) = -std::cos(s.theta);
    v(2) = velocity_scale * s.omega;
    return v;
}

}  // namespace

std::vector<StatePair> generate_dataset(int n_pairs, std::uint64_t seed,
                                        const PendulumParams& p, double velocity_scale) {
    validate_params(p);
    if (n_pairs < 1) {
        throw ConfigError("generate_dataset: n_pairs must be >= 1");
    }
    std::vector<StatePair> pairs;
    pairs.reserve(static_cast<std::size_t>(n_pairs));
    const double pi = std::acos(-1.0);
    const double omega_cap = 1.0 / velocity_scale;
    for (int i = 0; i < n_pairs; ++i) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
        // Resample within the pair's own stream until the successor also
        // stays inside the scaled unit box (gravity can push |omega|
        // slightly past the sampling range in one step).
        while (true) {
            PendulumState s;
            s.theta = rng.uniform(-pi, pi);
            s.omega = rng.uniform(-omega_cap, omega_cap);
            const PendulumState next = step_pendulum(s, p);
            if (std::abs(next.omega) > omega_cap) continue;
            pairs.push_back({to_coords(s, velocity_scale), to_coords(next, velocity_scale)});
            break;
        }
    }
    return pairs;
}

void write_pendulum_csv(const std::vector<StatePair>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("write_pendulum_csv: cannot open '" + path + "' for writing");
    }
    out << kPendulumCsvHeader << '\n';
    char buf[64];
    for (const StatePair& pair : pairs) {
        for (int i = 0; i < 3; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", pair.input(i));
            out << buf << ',';
        }
        for (int i = 0; i < 3; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", pair.target(i));
            out << buf << (i == 2 ? '\n' : ',');
        }
    }
    if (!out) {
        throw IoError("write_pendulum_csv: write to '" + path + "' failed");
    }
}

}  // namespace specverify
