#pragma once

#include "specverify/bounds.hpp"
#include "specverify/network.hpp"
#include "specverify/specs.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace specverify {

struct AttackConfig {
    int steps = 100;
    double step_size = 0.0;  // <= 0 picks delta/4 per region
    int restarts = 20;
    std::uint64_t seed = 0;
};

struct Witness {
    std::vector<Vector> inputs;
    double value = 0.0;  // exact eval_spec at the witness
};

// d F(x, f(x)) / d x for each input copy, with gradients flowing through the
// network (ReLU subgradient 0 at kinks) and the exact spec evaluator.
std::vector<Vector> spec_input_gradient(std::span<const Network* const> nets,
                                        const Specification& spec,
                                        std::span<const Vector> xs);

// Projected gradient ascent on F over the input boxes, cfg.restarts
// independent starts (the first at the nominal point). Returns the best
// point found iff its exact F value is positive.
std::optional<Witness> pgd_falsify(std::span<const Network* const> nets,
                                   const Specification& spec,
                                   std::span<const InputRegion> regions,
                                   const AttackConfig& cfg);

}  // namespace specverify
