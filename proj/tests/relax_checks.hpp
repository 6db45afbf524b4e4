#pragma once

// Shared constraint-satisfaction checks for relaxation sets, used by both
// the unit tests and the acceptance suite.

#include "specverify/relax.hpp"

#include <cmath>
#include <map>

namespace specverify::testing {

// Worst signed slack of `point` against every constraint (>= 0 means all
// satisfied; Eq rows contribute -|residual|).
inline double min_constraint_slack(const RelaxationSet& set,
                                   const std::map<VarId, double>& point) {
    double worst = 1e300;
    for (const LinearConstraint& c : set.constraints) {
        double lhs = 0.0;
        for (const auto& [id, coeff] : c.terms) {
            lhs += coeff * point.at(id);
        }
        double slack = 0.0;
        switch (c.rel) {
            case Relation::Le: slack = c.rhs - lhs; break;
            case Relation::Ge: slack = lhs - c.rhs; break;
            case Relation::Eq: slack = -std::abs(lhs - c.rhs); break;
        }
        worst = std::min(worst, slack);
    }
    for (const VarBound& b : set.var_bounds) {
        const double v = point.at(b.id);
        worst = std::min(worst, v - b.lo);
        worst = std::min(worst, b.hi - v);
    }
    return worst;
}

}  // namespace specverify::testing
