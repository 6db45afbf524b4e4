#pragma once

#include "specverify/bounds.hpp"
#include "specverify/lp.hpp"
#include "specverify/network.hpp"
#include "specverify/relax.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace specverify {

// F(x, y) = c'y + d.
struct LinearSpec {
    Vector c;
    double d = 0.0;
};

// F(x, y) = sum_j P(j|x) dist_j - epsilon, P = softmax(y). dist holds the
// label distances from the true label, so dist[true] = 0.
struct SemanticSoftmaxSpec {
    Vector dist;
    double epsilon = 0.23;
};

// F(x_1..x_N, y_1..y_N) = E_j |sum_n (j_n - targets_n)| - epsilon, the
// expectation running over all n_labels^N label tuples.
struct DigitSumSpec {
    std::vector<int> targets;
    int n_labels = 10;
    double epsilon = 1.0;
};

// F(x, y) = (1, x, y)' Q (1, x, y) with symmetric Q.
struct QuadraticSpec {
    Matrix Q;
};

// F(x, y) = floor + sum_i p_i log p_i, i.e. the predictive entropy must stay
// above `floor`.
struct EntropySpec {
    double floor = 0.1;
};

using Specification =
    std::variant<LinearSpec, SemanticSoftmaxSpec, DigitSumSpec, QuadraticSpec, EntropySpec>;

inline constexpr int kMaxDigitSumCopies = 4;
inline constexpr long kMaxDigitSumTerms = 65536;

// Number of (input, output) pairs the specification consumes: N for
// DigitSum, 1 otherwise.
int spec_arity(const Specification& spec);

// Throws SchemaError/ConfigError when a spec violates its invariants.
void validate_spec(const Specification& spec);

// Exact value of F; the specification holds at the point iff the value <= 0.
double eval_spec(const Specification& spec, std::span<const Vector> xs,
                 std::span<const Vector> ys);

// Exact value of the function the LP objective z relaxes. For the softmax
// family this is the denominator-cleared form (same sign as eval_spec, the
// positive softmax normalizers multiplied through) evaluated at per-copy
// stabilized logits y - shift; for linear and quadratic specs it coincides
// with eval_spec. `shifts` must match the shifts the encoding used
// (encode_spec uses max_j u_K,j per copy); empty means no shift.
double eval_spec_relaxed_form(const Specification& spec, std::span<const Vector> xs,
                              std::span<const Vector> ys,
                              std::span<const double> shifts = {});

// The stabilizing logit shifts encode_spec applies for the given bounds.
std::vector<double> encoding_shifts(const Specification& spec,
                                    std::span<const LayerBounds> bounds);

// LP variable ids of one network copy's input and output.
struct NetworkVarMap {
    std::vector<VarId> x;
    std::vector<VarId> y;
};

struct EncodedSpec {
    RelaxationSet relaxation;
    VarId z;
};

// Emits constraints and auxiliary variables (allocated in `lp`) so that
// maximizing z over the relaxed set upper-bounds max F over the true set.
// The returned RelaxationSet is not yet applied to `lp`.
EncodedSpec encode_spec(const Specification& spec, std::span<const LayerBounds> bounds,
                        std::span<const NetworkVarMap> copies, LinearProgram& lp,
                        int n_tangents);

// Pendulum energy parameters in SI units; velocity_scale is the factor on
// angular velocity in network coordinates (w, h, s*omega).
struct EnergyParams {
    double mass = 1.0;
    double length = 0.5;
    double gravity = 9.81;
    double velocity_scale = 0.1;
};

// Quadratic spec for E(next) - E(current) over network coordinates
// (w, h, s*omega) -> (w', h', s*omega').
QuadraticSpec build_energy_Q(const EnergyParams& p, int input_dim = 3, int output_dim = 3);

Specification parse_spec_json(const std::string& text, const std::string& origin);
std::string spec_to_json(const Specification& spec);
Specification load_spec(const std::string& path);
void save_spec(const Specification& spec, const std::string& path);

// Label-distance matrix file: {"labels": [...], "distance": [[...]]};
// validated square, symmetric, nonnegative with zero diagonal.
Matrix load_distance_matrix(const std::string& path);
Vector distance_row(const Matrix& distances, int true_label);

}  // namespace specverify
