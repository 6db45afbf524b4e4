#pragma once

#include "specverify/bounds.hpp"
#include "specverify/falsify.hpp"
#include "specverify/lp.hpp"
#include "specverify/network.hpp"
#include "specverify/specs.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace specverify {

enum class VerifyStatus { Verified, Unknown, Falsified };

struct VerificationOutcome {
    VerifyStatus status = VerifyStatus::Unknown;
    double relaxation_optimum = 0.0;  // LP max z (always populated)
    std::optional<Witness> witness;   // populated when Falsified
};

struct VerifyOptions {
    // Verified requires the LP optimum < -margin so simplex tolerances
    // cannot flip a certificate.
    double margin = 1e-6;
    int n_tangents = 5;
    bool tighten_bounds = false;
    bool run_falsifier = true;
    AttackConfig attack;
    std::string dump_lp_path;  // non-empty: write the LP text dump here
};

// LP variable ids for one encoded network copy.
struct NetworkEncoding {
    std::vector<VarId> x;
    std::vector<VarId> y;
};

// Adds input-box variables, affine equalities and ReLU triangle relaxations
// for one network copy; bounds must come from propagate_bounds on the same
// region.
NetworkEncoding encode_network(LinearProgram& lp, const Network& net, const LayerBounds& lb,
                               const std::string& prefix);

// Interval bounds sharpened per neuron by solving the LP relaxation of the
// preceding layers with objective +-that pre-activation.
LayerBounds tighten_bounds_lp(const Network& net, const InputRegion& region);

VerificationOutcome verify_example(std::span<const Network* const> nets,
                                   const Specification& spec,
                                   std::span<const InputRegion> regions,
                                   const VerifyOptions& options);

// Exhaustive max of eval_spec over a regular grid (box corners included).
// Guarded to a total input dimension of at most 4.
double grid_oracle(std::span<const Network* const> nets, const Specification& spec,
                   std::span<const InputRegion> regions, int points_per_dim);

struct SweepRow {
    double delta = 0.0;
    double verification_bound = 0.0;
    double adversarial_bound = 0.0;
    long n_examples = 0;
    double mean_lp_value = 0.0;
    long wall_ms = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
};

// One test example: nominal input(s) plus the specification instance to
// check on them.
struct SweepItem {
    std::vector<Vector> centers;
    Specification spec;
};

struct SweepConfig {
    VerifyOptions verify;
    std::vector<double> deltas;
    std::optional<double> clip_lo;
    std::optional<double> clip_hi;
    int jobs = 0;        // 0 = hardware concurrency
    bool timing = true;  // false writes wall_ms = 0 for byte-reproducible CSVs
    std::uint64_t seed = 0;
};

// Runs verify + falsify on every (delta, example) cell; each example's
// attack derives its seed from (seed, delta index, example index), so
// results are independent of worker scheduling.
SweepReport sweep(const Network& net, const std::vector<SweepItem>& items,
                  const SweepConfig& cfg);

std::string report_to_csv(const SweepReport& report);

}  // namespace specverify
