#include "specverify/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <memory>
#include <sstream>

namespace specverify {

void LinearProgram::check_var(VarId id, const char* where) const {
    if (id < 0 || static_cast<std::size_t>(id) >= vars_.size()) {
        std::ostringstream msg;
        msg << where << ": variable id " << id << " not declared";
        throw SchemaError(msg.str());
    }
}

VarId LinearProgram::add_variable(std::string name, double lo, double hi) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
        throw BoundOrderError("add_variable: invalid bounds for '" + name + "'");
    }
    vars_.push_back({std::move(name), lo, hi});
    return static_cast<VarId>(vars_.size() - 1);
}

void LinearProgram::tighten_bound(VarId id, double lo, double hi) {
    check_var(id, "tighten_bound");
    LpVariable& v = vars_[static_cast<std::size_t>(id)];
    v.lo = std::max(v.lo, lo);
    v.hi = std::min(v.hi, hi);
    if (v.lo > v.hi) {
        throw BoundOrderError("tighten_bound: empty interval for '" + v.name + "'");
    }
}

void LinearProgram::add_constraint(LinearConstraint c) {
    bool any_nonzero = false;
    for (const auto& [id, coeff] : c.terms) {
        check_var(id, "add_constraint");
        if (std::isnan(coeff)) {
            throw SchemaError("add_constraint: NaN coefficient");
        }
        if (coeff != 0.0) any_nonzero = true;
    }
    if (!any_nonzero) {
        throw SchemaError("add_constraint: all coefficients are zero");
    }
    if (!std::isfinite(c.rhs)) {
        throw SchemaError("add_constraint: non-finite right-hand side");
    }
    constraints_.push_back(std::move(c));
}

void LinearProgram::apply(const RelaxationSet& set) {
    for (const VarBound& b : set.var_bounds) {
        tighten_bound(b.id, b.lo, b.hi);
    }
    for (const LinearConstraint& c : set.constraints) {
        add_constraint(c);
    }
}

void LinearProgram::set_objective(std::vector<std::pair<VarId, double>> terms) {
    for (const auto& [id, coeff] : terms) {
        check_var(id, "set_objective");
        if (!std::isfinite(coeff)) {
            throw SchemaError("set_objective: non-finite coefficient");
        }
    }
    objective_ = std::move(terms);
}

namespace {

enum class ColState : unsigned char { Basic, AtLower, AtUpper };

// Internal model: maximize c'w subject to A w (<=|=) b, 0 <= w <= ub.
// Original variables are shifted by their lower bound, mirrored when only
// the upper bound is finite, or split into positive parts when free.
struct Canonical {
    Index n_struct = 0;
    std::vector<double> ub;             // per structural column
    std::vector<double> cost;           // phase-2 objective per column
    double cost_offset = 0.0;
    // Per original variable: column of its (first) part and the transform.
    enum class Kind : unsigned char { Shifted, Mirrored, Split };
    struct Origin {
        Kind kind;
        Index col;
        double base;
    };
    std::vector<Origin> origins;

    std::vector<std::vector<std::pair<Index, double>>> rows;  // structural coefficients
    std::vector<double> rhs;
    std::vector<bool> is_eq;
};

Canonical canonicalize(const LinearProgram& lp) {
    Canonical cf;
    const Index nv = lp.num_variables();
    cf.origins.resize(static_cast<std::size_t>(nv));
    for (VarId id = 0; id < nv; ++id) {
        const LpVariable& v = lp.variable(id);
        auto& origin = cf.origins[static_cast<std::size_t>(id)];
        if (std::isfinite(v.lo)) {
            origin = {Canonical::Kind::Shifted, cf.n_struct, v.lo};
            cf.ub.push_back(std::isfinite(v.hi) ? v.hi - v.lo : kInf);
            cf.n_struct += 1;
        } else if (std::isfinite(v.hi)) {
            origin = {Canonical::Kind::Mirrored, cf.n_struct, v.hi};
            cf.ub.push_back(kInf);
            cf.n_struct += 1;
        } else {
            origin = {Canonical::Kind::Split, cf.n_struct, 0.0};
            cf.ub.push_back(kInf);
            cf.ub.push_back(kInf);
            cf.n_struct += 2;
        }
    }
    cf.cost.assign(static_cast<std::size_t>(cf.n_struct), 0.0);
    for (const auto& [id, coeff] : lp.objective()) {
        const auto& origin = cf.origins[static_cast<std::size_t>(id)];
        switch (origin.kind) {
            case Canonical::Kind::Shifted:
                cf.cost[static_cast<std::size_t>(origin.col)] += coeff;
                cf.cost_offset += coeff * origin.base;
                break;
            case Canonical::Kind::Mirrored:
                cf.cost[static_cast<std::size_t>(origin.col)] -= coeff;
                cf.cost_offset += coeff * origin.base;
                break;
            case Canonical::Kind::Split:
                cf.cost[static_cast<std::size_t>(origin.col)] += coeff;
                cf.cost[static_cast<std::size_t>(origin.col + 1)] -= coeff;
                break;
        }
    }
    for (const LinearConstraint& c : lp.constraints()) {
        const double sign = (c.rel == Relation::Ge) ? -1.0 : 1.0;
        std::vector<std::pair<Index, double>> row;
        row.reserve(c.terms.size() + 2);
        double rhs = sign * c.rhs;
        for (const auto& [id, coeff] : c.terms) {
            if (coeff == 0.0) continue;
            const auto& origin = cf.origins[static_cast<std::size_t>(id)];
            const double a = sign * coeff;
            switch (origin.kind) {
                case Canonical::Kind::Shifted:
                    row.emplace_back(origin.col, a);
                    rhs -= a * origin.base;
                    break;
                case Canonical::Kind::Mirrored:
                    row.emplace_back(origin.col, -a);
                    rhs -= a * origin.base;
                    break;
                case Canonical::Kind::Split:
                    row.emplace_back(origin.col, a);
                    row.emplace_back(origin.col + 1, -a);
                    break;
            }
        }
        cf.rows.push_back(std::move(row));
        cf.rhs.push_back(rhs);
        cf.is_eq.push_back(c.rel == Relation::Eq);
    }
    return cf;
}

class Simplex {
public:
    explicit Simplex(const Canonical& cf) : cf_(cf) { build(); }

    LpStatus run(long& iterations) {
        if (m_ > 0 && n_art_ > 0) {
            const LpStatus st = run_phase(iterations, /*phase1=*/true);
            if (st != LpStatus::Optimal) return st;  // only the iteration cap path
            if (phase1_infeasibility() > kFeasTol) {
                if (std::getenv("SPECVERIFY_LP_DEBUG")) {
                    std::fprintf(stderr, "phase1 end: infeas=%.3e broken=%d careful=%d iters=%ld\n",
                                 phase1_infeasibility(), static_cast<int>(broken_),
                                 static_cast<int>(careful_), iterations);
                }
                return LpStatus::Infeasible;
            }
            expel_artificials(iterations);
            lock_artificials();
        }
        return run_phase(iterations, /*phase1=*/false);
    }

    // Runs one phase to a *certified* optimum: a claimed optimum is accepted
    // only once reduced costs recomputed exactly from the basis factorization
    // confirm it; otherwise the tableau is rebuilt (clearing drift) and the
    // phase continues. A basis whose exact values violate bounds marks the
    // solve as broken; the caller restarts in careful mode.
    LpStatus run_phase(long& iterations, bool phase1) {
        set_phase_objective(phase1);
        for (int round = 0; round < 8; ++round) {
            const LpStatus st = iterate(iterations);
            if (st != LpStatus::Optimal) return st;
            if (m_ == 0) return LpStatus::Optimal;
            switch (certify_and_refresh()) {
                case Certify::Optimal:
                    return LpStatus::Optimal;
                case Certify::Continue:
                    rebuild_tableau();
                    break;
                case Certify::Broken:
                    broken_ = true;
                    return LpStatus::Optimal;
            }
        }
        broken_ = true;  // still drifting after repeated rebuilds
        return LpStatus::Optimal;
    }

    bool broken() const { return broken_; }

    // Careful mode: Bland's rule from the first pivot onward.
    void set_careful() {
        careful_ = true;
        bland_ = true;
    }

    // Structural solution in canonical (shifted) space.
    std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(cf_.n_struct), 0.0);
        for (Index j = 0; j < cf_.n_struct; ++j) {
            if (state_[static_cast<std::size_t>(j)] == ColState::AtUpper) {
                v[static_cast<std::size_t>(j)] = hi_[static_cast<std::size_t>(j)];
            }
        }
        for (Index i = 0; i < m_; ++i) {
            const Index bi = basis_[static_cast<std::size_t>(i)];
            if (bi < cf_.n_struct) v[static_cast<std::size_t>(bi)] = beta_(i);
        }
        return v;
    }

    // Recomputes the basic values from the original column data with a
    // dense LU solve, clearing accumulated tableau drift.
    void refine_basic_values() {
        if (m_ == 0) return;
        const Eigen::PartialPivLU<Matrix> lu(basis_matrix());
        beta_ = lu.solve(nonbasic_adjusted_rhs());
    }

private:
    const Canonical& cf_;
    Index m_ = 0;           // rows
    Index n_struct_ = 0;    // structural columns
    Index n_total_ = 0;     // structural + slack + artificial
    Index n_art_ = 0;
    RowMajorMatrix T_;      // m x n_total tableau, T = B^-1 A
    Eigen::RowVectorXd d_;  // reduced costs
    Vector beta_;           // basic variable values
    std::vector<double> lo_, hi_;
    std::vector<Index> basis_;
    std::vector<ColState> state_;
    std::vector<double> phase_cost_;
    std::vector<bool> row_negated_;
    std::vector<Index> artificial_row_;  // per artificial column, its row
    long degenerate_run_ = 0;
    bool bland_ = false;
    bool careful_ = false;
    bool broken_ = false;
    mutable std::vector<char> skip_;  // entering columns rejected for unstable pivots

    Matrix basis_matrix() const {
        Matrix B = Matrix::Zero(m_, m_);
        for (Index i = 0; i < m_; ++i) {
            fill_original_column(basis_[static_cast<std::size_t>(i)], B.col(i));
        }
        return B;
    }

    // Right-hand side minus the contributions of nonbasic at-upper columns
    // (only structural columns can sit at a finite upper bound).
    Vector nonbasic_adjusted_rhs() const {
        Vector rhs(m_);
        for (Index i = 0; i < m_; ++i) {
            const double sgn = row_negated_[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
            rhs(i) = sgn * cf_.rhs[static_cast<std::size_t>(i)];
        }
        for (Index j = 0; j < n_struct_; ++j) {
            if (state_[static_cast<std::size_t>(j)] != ColState::AtUpper) continue;
            const double v = hi_[static_cast<std::size_t>(j)];
            if (v == 0.0) continue;
            for (Index i = 0; i < m_; ++i) {
                rhs(i) -= original_entry(i, j) * v;
            }
        }
        return rhs;
    }

    template <typename Col>
    void fill_original_column(Index j, Col col) const {
        col.setZero();
        if (j < n_struct_) {
            for (Index i = 0; i < m_; ++i) {
                const double v = original_entry(i, j);
                if (v != 0.0) col(i) = v;
            }
        } else if (j < n_struct_ + m_) {
            const Index row = j - n_struct_;
            col(row) = row_negated_[static_cast<std::size_t>(row)] ? -1.0 : 1.0;
        } else {
            col(artificial_row_[static_cast<std::size_t>(j - n_struct_ - m_)]) = 1.0;
        }
    }

    // Exact reduced costs for the current phase objective via y = B^-T c_B,
    // then d = c - y^T A over the sparse original columns.
    void refresh_reduced_costs(const Eigen::PartialPivLU<Matrix>& lu) {
        Vector cb(m_);
        for (Index i = 0; i < m_; ++i) {
            cb(i) = phase_cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
        }
        const Vector y = lu.transpose().solve(cb);
        d_ = Eigen::Map<const Eigen::RowVectorXd>(phase_cost_.data(), n_total_);
        for (Index i = 0; i < m_; ++i) {
            if (y(i) == 0.0) continue;
            const double sgn = row_negated_[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
            for (const auto& [col, coeff] : cf_.rows[static_cast<std::size_t>(i)]) {
                d_(col) -= y(i) * sgn * coeff;
            }
            d_(n_struct_ + i) -= y(i) * sgn;  // slack column
        }
        for (std::size_t a = 0; a < artificial_row_.size(); ++a) {
            d_(n_struct_ + m_ + static_cast<Index>(a)) -= y(artificial_row_[a]);
        }
    }

    enum class Certify { Optimal, Continue, Broken };

    // A claimed optimum holds only if exactly recomputed reduced costs find
    // no improving column; the refreshed beta/d also clear tableau drift.
    Certify certify_and_refresh() {
        const Eigen::PartialPivLU<Matrix> lu(basis_matrix());
        beta_ = lu.solve(nonbasic_adjusted_rhs());
        double worst = 0.0;
        for (Index i = 0; i < m_; ++i) {
            const Index bi = basis_[static_cast<std::size_t>(i)];
            worst = std::max(worst, lo_[static_cast<std::size_t>(bi)] - beta_(i));
            const double cap = hi_[static_cast<std::size_t>(bi)];
            if (std::isfinite(cap)) worst = std::max(worst, beta_(i) - cap);
        }
        if (!std::isfinite(worst) || worst > 1e-5) {
            if (std::getenv("SPECVERIFY_LP_DEBUG")) {
                Index worst_row = -1;
                double w2 = 0.0;
                for (Index i = 0; i < m_; ++i) {
                    const Index bi = basis_[static_cast<std::size_t>(i)];
                    double v = lo_[static_cast<std::size_t>(bi)] - beta_(i);
                    const double cap = hi_[static_cast<std::size_t>(bi)];
                    if (std::isfinite(cap)) v = std::max(v, beta_(i) - cap);
                    if (v > w2) {
                        w2 = v;
                        worst_row = i;
                    }
                }
                std::fprintf(stderr,
                             "certify broken: worst=%.3e m=%ld row=%ld basiscol=%ld "
                             "beta=%.6e lo=%.3e hi=%.3e careful=%d\n",
                             worst, static_cast<long>(m_), static_cast<long>(worst_row),
                             static_cast<long>(basis_[static_cast<std::size_t>(worst_row)]),
                             beta_(worst_row),
                             lo_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(worst_row)])],
                             hi_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(worst_row)])],
                             static_cast<int>(careful_));
            }
            return Certify::Broken;  // exact basis is primal infeasible
        }
        refresh_reduced_costs(lu);
        skip_.clear();
        return choose_entering() < 0 ? Certify::Optimal : Certify::Continue;
    }

    // T = B^-1 A rebuilt from original data in column blocks.
    void rebuild_tableau() {
        const Eigen::PartialPivLU<Matrix> lu(basis_matrix());
        const Index block = 512;
        Matrix cols;
        for (Index j0 = 0; j0 < n_total_; j0 += block) {
            const Index width = std::min(block, n_total_ - j0);
            cols.resize(m_, width);
            for (Index j = 0; j < width; ++j) {
                fill_original_column(j0 + j, cols.col(j));
            }
            T_.middleCols(j0, width) = lu.solve(cols);
        }
        degenerate_run_ = 0;
        bland_ = careful_;
    }

    // Entry (i, j) of the as-built equation system A w + s (+ t) = b,
    // including phase-0 row negations.
    double original_entry(Index i, Index j) const {
        const double sgn = row_negated_[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
        if (j < n_struct_) {
            double total = 0.0;
            for (const auto& [col, coeff] : cf_.rows[static_cast<std::size_t>(i)]) {
                if (col == j) total += coeff;
            }
            return sgn * total;
        }
        if (j < n_struct_ + m_) {
            return (j - n_struct_ == i) ? sgn : 0.0;
        }
        return (artificial_row_[static_cast<std::size_t>(j - n_struct_ - m_)] == i) ? 1.0 : 0.0;
    }

    void build() {
        m_ = static_cast<Index>(cf_.rows.size());
        n_struct_ = cf_.n_struct;
        // Artificials: equality rows with nonzero rhs, inequality rows with
        // negative rhs (their slack alone cannot form a feasible basis).
        std::vector<Index> art_rows;
        for (Index i = 0; i < m_; ++i) {
            const double b = cf_.rhs[static_cast<std::size_t>(i)];
            const bool eq = cf_.is_eq[static_cast<std::size_t>(i)];
            if ((eq && b != 0.0) || (!eq && b < 0.0)) {
                art_rows.push_back(i);
            }
        }
        n_art_ = static_cast<Index>(art_rows.size());
        n_total_ = n_struct_ + m_ + n_art_;

        T_ = RowMajorMatrix::Zero(m_, n_total_);
        beta_ = Vector::Zero(m_);
        lo_.assign(static_cast<std::size_t>(n_total_), 0.0);
        hi_.assign(static_cast<std::size_t>(n_total_), kInf);
        state_.assign(static_cast<std::size_t>(n_total_), ColState::AtLower);
        basis_.assign(static_cast<std::size_t>(m_), -1);
        row_negated_.assign(static_cast<std::size_t>(m_), false);
        artificial_row_.clear();

        for (Index j = 0; j < n_struct_; ++j) {
            hi_[static_cast<std::size_t>(j)] = cf_.ub[static_cast<std::size_t>(j)];
        }
        Index art = n_struct_ + m_;
        for (Index i = 0; i < m_; ++i) {
            for (const auto& [col, coeff] : cf_.rows[static_cast<std::size_t>(i)]) {
                T_(i, col) += coeff;
            }
            const Index slack = n_struct_ + i;
            T_(i, slack) = 1.0;
            if (cf_.is_eq[static_cast<std::size_t>(i)]) {
                hi_[static_cast<std::size_t>(slack)] = 0.0;
            }
            double b = cf_.rhs[static_cast<std::size_t>(i)];
            const bool needs_art = (cf_.is_eq[static_cast<std::size_t>(i)] && b != 0.0) ||
                                   (!cf_.is_eq[static_cast<std::size_t>(i)] && b < 0.0);
            if (needs_art && b < 0.0) {
                // Negate the whole row so the artificial enters with +1 and
                // the starting basis stays an identity.
                T_.row(i) = -T_.row(i);
                b = -b;
                row_negated_[static_cast<std::size_t>(i)] = true;
            }
            if (needs_art) {
                T_(i, art) = 1.0;
                basis_[static_cast<std::size_t>(i)] = art;
                state_[static_cast<std::size_t>(art)] = ColState::Basic;
                beta_(i) = b;
                artificial_row_.push_back(i);
                ++art;
            } else {
                basis_[static_cast<std::size_t>(i)] = slack;
                state_[static_cast<std::size_t>(slack)] = ColState::Basic;
                beta_(i) = b;
            }
        }
    }

    void set_phase_objective(bool phase1) {
        phase_cost_.assign(static_cast<std::size_t>(n_total_), 0.0);
        if (phase1) {
            for (Index j = n_struct_ + m_; j < n_total_; ++j) {
                phase_cost_[static_cast<std::size_t>(j)] = -1.0;
            }
        } else {
            for (Index j = 0; j < n_struct_; ++j) {
                phase_cost_[static_cast<std::size_t>(j)] = cf_.cost[static_cast<std::size_t>(j)];
            }
        }
        d_ = Eigen::Map<const Eigen::RowVectorXd>(phase_cost_.data(), n_total_);
        for (Index i = 0; i < m_; ++i) {
            const double cb = phase_cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
            if (cb != 0.0) {
                d_ -= cb * T_.row(i);
            }
        }
        degenerate_run_ = 0;
        bland_ = careful_;
    }

    double phase1_infeasibility() const {
        double total = 0.0;
        for (Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= n_struct_ + m_) total += beta_(i);
        }
        return total;
    }

    bool eligible(Index j) const {
        const auto s = state_[static_cast<std::size_t>(j)];
        if (s == ColState::Basic) return false;
        if (hi_[static_cast<std::size_t>(j)] - lo_[static_cast<std::size_t>(j)] <= 0.0) return false;
        if (!skip_.empty() && skip_[static_cast<std::size_t>(j)]) return false;
        if (s == ColState::AtLower) return d_(j) > kReducedCostTol;
        return d_(j) < -kReducedCostTol;
    }

    Index choose_entering() const {
        if (bland_) {
            for (Index j = 0; j < n_total_; ++j) {
                if (eligible(j)) return j;
            }
            return -1;
        }
        Index best = -1;
        double best_score = 0.0;
        for (Index j = 0; j < n_total_; ++j) {
            if (!eligible(j)) continue;
            const double score = std::abs(d_(j));
            if (score > best_score + 1e-15) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    LpStatus iterate(long& iterations) {
        long since_refresh = 0;
        while (true) {
            if (iterations >= kMaxIterations) {
                throw SolverLimitError("simplex: iteration cap reached");
            }
            // Periodic exact refresh keeps drift in check on LPs where the
            // basis factorization is cheap.
            if (m_ > 0 && m_ <= 2048 && ++since_refresh >= 256) {
                since_refresh = 0;
                const Eigen::PartialPivLU<Matrix> lu(basis_matrix());
                beta_ = lu.solve(nonbasic_adjusted_rhs());
                refresh_reduced_costs(lu);
            }
            const Index e = choose_entering();
            if (e < 0) return LpStatus::Optimal;
            ++iterations;

            const double dir = (state_[static_cast<std::size_t>(e)] == ColState::AtLower) ? 1.0 : -1.0;
            const double own_range =
                hi_[static_cast<std::size_t>(e)] - lo_[static_cast<std::size_t>(e)];

            // Harris-style two-pass ratio test. Pass 1 finds the step limit
            // with a small bound-violation allowance; pass 2 picks, among
            // rows whose exact ratio fits under the limit, the one with the
            // largest pivot magnitude (lowest basic index under Bland's
            // rule). This keeps pivots well scaled at the cost of bound
            // overshoots no larger than the feasibility tolerance.
            const auto exact_ratio = [&](Index i, double g, bool* to_upper) -> double {
                const Index bi = basis_[static_cast<std::size_t>(i)];
                if (g > 0.0) {
                    *to_upper = false;
                    return (beta_(i) - lo_[static_cast<std::size_t>(bi)]) / g;
                }
                const double cap = hi_[static_cast<std::size_t>(bi)];
                if (!std::isfinite(cap)) return kInf;
                *to_upper = true;
                return (cap - beta_(i)) / (-g);
            };

            double theta = own_range;
            for (Index i = 0; i < m_; ++i) {
                const double t = T_(i, e);
                if (std::abs(t) <= kPivotTol) continue;
                const double g = dir * t;
                bool to_upper;
                double ratio = exact_ratio(i, g, &to_upper);
                if (!std::isfinite(ratio)) continue;
                // No allowance for rows already past their bound, so
                // violations cannot ratchet beyond the tolerance.
                const double allowance = ratio >= 0.0 ? kFeasTol / std::abs(g) : 0.0;
                ratio = std::max(ratio, 0.0) + allowance;
                theta = std::min(theta, ratio);
            }
            if (!std::isfinite(theta)) {
                return LpStatus::Unbounded;
            }

            Index leave_row = -1;
            bool leave_to_upper = false;
            double step = own_range;
            double best_pivot = 0.0;
            for (Index i = 0; i < m_; ++i) {
                const double t = T_(i, e);
                if (std::abs(t) <= kPivotTol) continue;
                const double g = dir * t;
                bool to_upper;
                double ratio = exact_ratio(i, g, &to_upper);
                if (!std::isfinite(ratio)) continue;
                ratio = std::max(ratio, 0.0);
                if (ratio > theta) continue;
                const bool better =
                    leave_row < 0 ||
                    (bland_ ? tie_break(i, leave_row) : std::abs(t) > best_pivot);
                if (better) {
                    leave_row = i;
                    leave_to_upper = to_upper;
                    step = ratio;
                    best_pivot = std::abs(t);
                }
            }
            if (leave_row >= 0 && step > own_range) {
                // The entering variable's own range binds first.
                leave_row = -1;
                step = own_range;
            }
            if (leave_row >= 0 && best_pivot < 1e-7 && !bland_) {
                // A pivot this small is indistinguishable from drift noise
                // (dependent columns look improving); exclude the column
                // until the next successful step. certify_and_refresh
                // re-examines skipped columns with exact data.
                if (skip_.empty()) skip_.assign(static_cast<std::size_t>(n_total_), 0);
                skip_[static_cast<std::size_t>(e)] = 1;
                --iterations;
                continue;
            }
            skip_.clear();
            if (step <= 1e-12) {
                ++degenerate_run_;
                if (!bland_ && degenerate_run_ > 2 * (m_ + n_total_)) {
                    bland_ = true;
                }
            } else {
                degenerate_run_ = 0;
                bland_ = careful_;
            }

            if (leave_row < 0) {
                // Bound flip: the entering variable crosses to its other bound.
                beta_ -= (dir * step) * T_.col(e);
                state_[static_cast<std::size_t>(e)] =
                    (dir > 0.0) ? ColState::AtUpper : ColState::AtLower;
                continue;
            }

            pivot(e, leave_row, dir, step, leave_to_upper);
        }
    }

    // Deterministic tie-break: prefer the row whose basic variable has the
    // smaller column index (Bland-compatible).
    bool tie_break(Index candidate, Index incumbent) const {
        return basis_[static_cast<std::size_t>(candidate)] <
               basis_[static_cast<std::size_t>(incumbent)];
    }

    void pivot(Index e, Index r, double dir, double step, bool leave_to_upper) {
        const double enter_value =
            ((dir > 0.0) ? lo_[static_cast<std::size_t>(e)] : hi_[static_cast<std::size_t>(e)]) +
            dir * step;
        beta_ -= (dir * step) * T_.col(e);

        const Index leaving = basis_[static_cast<std::size_t>(r)];
        state_[static_cast<std::size_t>(leaving)] =
            leave_to_upper ? ColState::AtUpper : ColState::AtLower;
        // Snap the leaving variable's numerics onto its bound.
        beta_(r) = enter_value;
        basis_[static_cast<std::size_t>(r)] = e;
        state_[static_cast<std::size_t>(e)] = ColState::Basic;

        const double p = T_(r, e);
        T_.row(r) /= p;
        for (Index i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = T_(i, e);
            if (f != 0.0) {
                T_.row(i) -= f * T_.row(r);
            }
        }
        const double de = d_(e);
        if (de != 0.0) {
            d_ -= de * T_.row(r);
        }
    }

    void expel_artificials(long& iterations) {
        for (Index i = 0; i < m_; ++i) {
            const Index bi = basis_[static_cast<std::size_t>(i)];
            if (bi < n_struct_ + m_) continue;
            // Replace a basic artificial (value ~0) by the column with the
            // largest usable pivot in this row.
            Index target = -1;
            double best = kPivotTol;
            for (Index j = 0; j < n_struct_ + m_; ++j) {
                if (state_[static_cast<std::size_t>(j)] == ColState::Basic) continue;
                if (std::abs(T_(i, j)) > best) {
                    best = std::abs(T_(i, j));
                    target = j;
                }
            }
            if (target < 0) continue;  // redundant row; artificial stays basic at zero
            ++iterations;
            const double dir =
                (state_[static_cast<std::size_t>(target)] == ColState::AtLower) ? 1.0 : -1.0;
            pivot(target, i, dir, 0.0, /*leave_to_upper=*/false);
        }
    }

    void lock_artificials() {
        for (Index j = n_struct_ + m_; j < n_total_; ++j) {
            hi_[static_cast<std::size_t>(j)] = 0.0;
        }
    }
};

}  // namespace

namespace {

Vector extract_assignment(const LinearProgram& lp, const Canonical& cf,
                          const std::vector<double>& w) {
    const Index nv = lp.num_variables();
    Vector assignment(nv);
    for (VarId id = 0; id < nv; ++id) {
        const auto& origin = cf.origins[static_cast<std::size_t>(id)];
        double x = 0.0;
        switch (origin.kind) {
            case Canonical::Kind::Shifted:
                x = origin.base + w[static_cast<std::size_t>(origin.col)];
                break;
            case Canonical::Kind::Mirrored:
                x = origin.base - w[static_cast<std::size_t>(origin.col)];
                break;
            case Canonical::Kind::Split:
                x = w[static_cast<std::size_t>(origin.col)] -
                    w[static_cast<std::size_t>(origin.col + 1)];
                break;
        }
        const LpVariable& v = lp.variable(id);
        // Snap float drift onto the box before the feasibility audit.
        assignment(id) = std::min(std::max(x, v.lo), v.hi);
    }
    return assignment;
}

double worst_violation(const LinearProgram& lp, const Vector& assignment) {
    double worst = 0.0;
    for (const LinearConstraint& c : lp.constraints()) {
        double lhs = 0.0;
        for (const auto& [id, coeff] : c.terms) {
            lhs += coeff * assignment(id);
        }
        const double resid = lhs - c.rhs;
        switch (c.rel) {
            case Relation::Le: worst = std::max(worst, resid); break;
            case Relation::Ge: worst = std::max(worst, -resid); break;
            case Relation::Eq: worst = std::max(worst, std::abs(resid)); break;
        }
    }
    return worst;
}

}  // namespace

LpSolution solve(const LinearProgram& lp) {
    const Canonical cf = canonicalize(lp);
    LpSolution solution;
    solution.iterations = 0;
    auto simplex = std::make_unique<Simplex>(cf);
    solution.status = simplex->run(solution.iterations);
    if (simplex->broken()) {
        // Numerical breakdown: redo the whole solve under Bland's rule.
        simplex = std::make_unique<Simplex>(cf);
        simplex->set_careful();
        long more = 0;
        solution.status = simplex->run(more);
        solution.iterations += more;
        if (simplex->broken()) {
            throw InternalError("simplex: basis breakdown persisted under Bland's rule");
        }
    }
    if (solution.status != LpStatus::Optimal) {
        return solution;
    }

    solution.assignment = extract_assignment(lp, cf, simplex->values());
    if (worst_violation(lp, solution.assignment) > kFeasTol) {
        // Tableau drift: recompute the basic values from original data.
        simplex->refine_basic_values();
        solution.assignment = extract_assignment(lp, cf, simplex->values());
        const double resid = worst_violation(lp, solution.assignment);
        if (resid > kFeasTol) {
            std::ostringstream msg;
            msg << "simplex: reported optimum violates a constraint by " << resid;
            throw InternalError(msg.str());
        }
    }

    double obj = 0.0;
    for (const auto& [id, coeff] : lp.objective()) {
        obj += coeff * solution.assignment(id);
    }
    solution.objective = obj;
    return solution;
}

namespace {

std::string lp_name(const LpVariable& v, VarId id) {
    std::string n = v.name.empty() ? "v" : v.name;
    for (char& ch : n) {
        if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
    }
    return n + "_" + std::to_string(id);
}

void write_terms(std::ostream& os, const std::vector<std::pair<VarId, double>>& terms,
                 const LinearProgram& lp) {
    bool first = true;
    for (const auto& [id, coeff] : terms) {
        if (coeff == 0.0) continue;
        if (first) {
            os << (coeff < 0 ? "- " : "");
        } else {
            os << (coeff < 0 ? " - " : " + ");
        }
        os << std::abs(coeff) << ' ' << lp_name(lp.variable(id), id);
        first = false;
    }
    if (first) os << "0";
}

}  // namespace

std::string to_lp_text(const LinearProgram& lp) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "\\ LP dump (" << lp.num_variables() << " variables, " << lp.num_constraints()
       << " constraints)\nMaximize\n obj: ";
    write_terms(os, lp.objective(), lp);
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < lp.constraints().size(); ++i) {
        const LinearConstraint& c = lp.constraints()[i];
        os << " c" << i << ": ";
        write_terms(os, c.terms, lp);
        switch (c.rel) {
            case Relation::Le: os << " <= "; break;
            case Relation::Ge: os << " >= "; break;
            case Relation::Eq: os << " = "; break;
        }
        os << c.rhs << '\n';
    }
    os << "Bounds\n";
    for (VarId id = 0; id < lp.num_variables(); ++id) {
        const LpVariable& v = lp.variable(id);
        const std::string name = lp_name(v, id);
        if (!std::isfinite(v.lo) && !std::isfinite(v.hi)) {
            os << ' ' << name << " free\n";
        } else if (!std::isfinite(v.lo)) {
            os << ' ' << name << " <= " << v.hi << "\n";
        } else if (!std::isfinite(v.hi)) {
            os << ' ' << name << " >= " << v.lo << "\n";
        } else {
            os << ' ' << v.lo << " <= " << name << " <= " << v.hi << '\n';
        }
    }
    os << "End\n";
    return os.str();
}

}  // namespace specverify
