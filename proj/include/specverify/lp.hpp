#pragma once

#include "specverify/relax.hpp"
#include "specverify/types.hpp"

#include <limits>
#include <string>
#include <vector>

namespace specverify {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Solver tolerances. Feasibility is checked on the returned assignment, the
// reduced-cost tolerance decides optimality, and entries below the pivot
// threshold are never used as pivots.
inline constexpr double kFeasTol = 1e-7;
inline constexpr double kBoundTol = 1e-9;
inline constexpr double kReducedCostTol = 1e-9;
inline constexpr double kPivotTol = 1e-10;
inline constexpr long kMaxIterations = 1'000'000;

struct LpVariable {
    std::string name;
    double lo;
    double hi;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    Vector assignment;  // indexed by VarId, present when Optimal
    long iterations = 0;
};

// Dense maximization LP over box-bounded variables.
class LinearProgram {
public:
    VarId add_variable(std::string name, double lo, double hi);
    void tighten_bound(VarId id, double lo, double hi);
    void add_constraint(LinearConstraint c);
    void apply(const RelaxationSet& set);

    // Objective sense is always maximize.
    void set_objective(std::vector<std::pair<VarId, double>> terms);

    Index num_variables() const { return static_cast<Index>(vars_.size()); }
    Index num_constraints() const { return static_cast<Index>(constraints_.size()); }
    const LpVariable& variable(VarId id) const { return vars_[static_cast<std::size_t>(id)]; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    const std::vector<std::pair<VarId, double>>& objective() const { return objective_; }

private:
    std::vector<LpVariable> vars_;
    std::vector<LinearConstraint> constraints_;
    std::vector<std::pair<VarId, double>> objective_;

    void check_var(VarId id, const char* where) const;
};

// Two-phase bounded-variable primal simplex with Bland's rule engaged after
// a run of degenerate pivots. Deterministic for identical input. Throws
// SolverLimitError past the iteration cap and InternalError if the reported
// optimum fails its own feasibility check.
LpSolution solve(const LinearProgram& lp);

// CPLEX-style LP text dump (for --dump-lp).
std::string to_lp_text(const LinearProgram& lp);

}  // namespace specverify
