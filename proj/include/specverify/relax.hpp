#pragma once

#include "specverify/types.hpp"

#include <span>
#include <vector>

namespace specverify {

using VarId = int;

enum class Relation { Le, Ge, Eq };

struct LinearConstraint {
    std::vector<std::pair<VarId, double>> terms;
    Relation rel = Relation::Le;
    double rhs = 0.0;
};

struct VarBound {
    VarId id;
    double lo;
    double hi;
};

// Linear constraints plus interval bounds to impose on the variables they
// reference. Guaranteed to contain the graph of the relaxed atom over its
// input interval(s), so intersecting sets from several atoms stays sound.
struct RelaxationSet {
    std::vector<VarBound> var_bounds;
    std::vector<LinearConstraint> constraints;

    void merge(RelaxationSet other);
};

// Intervals narrower than this emit equalities instead of near-singular
// secants.
inline constexpr double kDegenerateInterval = 1e-12;

// Exponentials below this are relaxed by their variable box alone: the
// secant/tangent cuts they would add carry coefficients small enough to
// wreck LP conditioning while tightening z by less than the verification
// margin. Dropping cuts only loosens the relaxation, so soundness holds.
inline constexpr double kNegligibleExp = 1e-8;

// Tangent abscissae: evenly spaced over [l, u] including both endpoints;
// a single tangent is placed at the midpoint.
std::vector<double> tangent_grid(double l, double u, int n_tangents);

// Triangle relaxation of a = max(v, 0) for pre-activation v in [l, u].
RelaxationSet relu_relaxation(VarId v, VarId a, double l, double u);

// Chord above and tangents below a = exp(y) for y in [l, u].
RelaxationSet exp_relaxation(VarId y, VarId a, double l, double u, int n_tangents);

// Four-inequality envelope of the bilinear product p = x * y with
// x in [lx, ux], y in [ly, uy].
RelaxationSet mccormick_product(VarId x, VarId y, VarId p, double lx, double ux,
                                double ly, double uy);

// Variable ids for the distinct entries of a symmetric matrix, stored over
// unordered pairs (i <= j).
class QuadVarIndex {
public:
    QuadVarIndex() = default;
    QuadVarIndex(Index n, std::vector<VarId> upper_triangle);

    // Validates symmetry of a full id matrix; throws SchemaError otherwise.
    static QuadVarIndex from_full(const Eigen::Matrix<VarId, Eigen::Dynamic, Eigen::Dynamic>& ids);

    Index dim() const { return n_; }
    VarId operator()(Index i, Index j) const;

private:
    Index n_ = 0;
    std::vector<VarId> ids_;
};

// Envelope of X = alpha * alpha^T over box bounds on alpha: McCormick rows
// for every unordered pair, chord and tangent cuts along the diagonal.
RelaxationSet quad_relaxation(std::span<const VarId> alpha, const QuadVarIndex& X,
                              const Vector& l, const Vector& u, int n_tangents);

// Tangent cuts above the concave map t = -Z * log(Z) for Z in [Zl, Zu],
// Zl > 0.
RelaxationSet neg_zlogz_tangents(VarId Z, VarId t, double Zl, double Zu, int n_tangents);

}  // namespace specverify
