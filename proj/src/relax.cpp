#include "specverify/relax.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace specverify {

void RelaxationSet::merge(RelaxationSet other) {
    var_bounds.insert(var_bounds.end(), other.var_bounds.begin(), other.var_bounds.end());
    constraints.insert(constraints.end(), std::make_move_iterator(other.constraints.begin()),
                       std::make_move_iterator(other.constraints.end()));
}

std::vector<double> tangent_grid(double l, double u, int n_tangents) {
    if (n_tangents < 1) {
        throw ConfigError("tangent_grid: n_tangents must be >= 1");
    }
    if (u - l < kDegenerateInterval) {
        return {l};
    }
    if (n_tangents == 1) {
        return {0.5 * (l + u)};
    }
    std::vector<double> grid(static_cast<std::size_t>(n_tangents));
    const double step = (u - l) / static_cast<double>(n_tangents - 1);
    for (int i = 0; i < n_tangents; ++i) {
        grid[static_cast<std::size_t>(i)] = l + step * i;
    }
    grid.front() = l;
    grid.back() = u;
    return grid;
}

namespace {

void check_ordered(double l, double u, const char* where) {
    if (!(l <= u)) {
        std::ostringstream msg;
        msg << where << ": lower bound " << l << " exceeds upper bound " << u;
        throw BoundOrderError(msg.str());
    }
}

// Builds a constraint skipping structurally zero coefficients (e.g. the
// alpha term of a diagonal secant over a symmetric interval).
LinearConstraint make_constraint(std::initializer_list<std::pair<VarId, double>> terms,
                                 Relation rel, double rhs) {
    LinearConstraint c;
    for (const auto& [id, coeff] : terms) {
        if (coeff != 0.0) c.terms.emplace_back(id, coeff);
    }
    c.rel = rel;
    c.rhs = rhs;
    return c;
}

}  // namespace

RelaxationSet relu_relaxation(VarId v, VarId a, double l, double u) {
    check_ordered(l, u, "relu_relaxation");
    RelaxationSet set;
    set.var_bounds.push_back({a, std::max(l, 0.0), std::max(u, 0.0)});
    if (l >= 0.0) {
        set.constraints.push_back({{{a, 1.0}, {v, -1.0}}, Relation::Eq, 0.0});
        return set;
    }
    if (u <= 0.0) {
        set.constraints.push_back({{{a, 1.0}}, Relation::Eq, 0.0});
        return set;
    }
    // a >= v, a >= 0, a <= u/(u-l) * (v - l)
    set.constraints.push_back({{{a, 1.0}, {v, -1.0}}, Relation::Ge, 0.0});
    set.constraints.push_back({{{a, 1.0}}, Relation::Ge, 0.0});
    const double slope = u / (u - l);
    set.constraints.push_back({{{a, 1.0}, {v, -slope}}, Relation::Le, -slope * l});
    return set;
}

RelaxationSet exp_relaxation(VarId y, VarId a, double l, double u, int n_tangents) {
    check_ordered(l, u, "exp_relaxation");
    if (n_tangents < 1) {
        throw ConfigError("exp_relaxation: n_tangents must be >= 1");
    }
    RelaxationSet set;
    const double el = std::exp(l);
    const double eu = std::exp(u);
    if (u - l < kDegenerateInterval) {
        set.var_bounds.push_back({a, el, eu});
        set.constraints.push_back({{{a, 1.0}}, Relation::Eq, el});
        return set;
    }
    if (eu < kNegligibleExp) {
        // Entirely negligible range: the box [0, e^u] is the relaxation.
        set.var_bounds.push_back({a, 0.0, eu});
        return set;
    }
    set.var_bounds.push_back({a, el, eu});
    // Chord above: a <= slope * y + intercept. expm1 keeps the slope accurate
    // for narrow intervals; the direct difference is safe otherwise.
    const double width = u - l;
    const double slope =
        width < 1e-3 ? el * std::expm1(width) / width : (eu - el) / width;
    const double intercept = (u * el - l * eu) / width;
    set.constraints.push_back({{{a, 1.0}, {y, -slope}}, Relation::Le, intercept});
    // Tangents below: a >= e^eta * y + e^eta * (1 - eta). Negligible ones
    // are dominated by the variable bound.
    for (double eta : tangent_grid(l, u, n_tangents)) {
        const double e = std::exp(eta);
        if (e < kNegligibleExp) continue;
        set.constraints.push_back({{{a, 1.0}, {y, -e}}, Relation::Ge, e * (1.0 - eta)});
    }
    return set;
}

RelaxationSet mccormick_product(VarId x, VarId y, VarId p, double lx, double ux,
                                double ly, double uy) {
    check_ordered(lx, ux, "mccormick_product");
    check_ordered(ly, uy, "mccormick_product");
    RelaxationSet set;
    const double corners[4] = {lx * ly, lx * uy, ux * ly, ux * uy};
    set.var_bounds.push_back({p, *std::min_element(corners, corners + 4),
                              *std::max_element(corners, corners + 4)});
    // From (x-lx)(y-ly) >= 0, (x-ux)(y-uy) >= 0, (x-lx)(y-uy) <= 0,
    // (x-ux)(y-ly) <= 0, with p replacing x*y.
    set.constraints.push_back(make_constraint({{p, 1.0}, {x, -ly}, {y, -lx}}, Relation::Ge, -lx * ly));
    set.constraints.push_back(make_constraint({{p, 1.0}, {x, -uy}, {y, -ux}}, Relation::Ge, -ux * uy));
    set.constraints.push_back(make_constraint({{p, 1.0}, {x, -uy}, {y, -lx}}, Relation::Le, -lx * uy));
    set.constraints.push_back(make_constraint({{p, 1.0}, {x, -ly}, {y, -ux}}, Relation::Le, -ux * ly));
    return set;
}

QuadVarIndex::QuadVarIndex(Index n, std::vector<VarId> upper_triangle)
    : n_(n), ids_(std::move(upper_triangle)) {
    const std::size_t expected = static_cast<std::size_t>(n * (n + 1) / 2);
    if (ids_.size() != expected) {
        throw SchemaError("QuadVarIndex: expected one id per unordered pair");
    }
}

QuadVarIndex QuadVarIndex::from_full(
    const Eigen::Matrix<VarId, Eigen::Dynamic, Eigen::Dynamic>& ids) {
    if (ids.rows() != ids.cols()) {
        throw SchemaError("QuadVarIndex: id matrix must be square");
    }
    const Index n = ids.rows();
    std::vector<VarId> tri;
    tri.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
    for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) {
            if (ids(i, j) != ids(j, i)) {
                throw SchemaError("QuadVarIndex: id matrix is not symmetric");
            }
            tri.push_back(ids(i, j));
        }
    }
    return QuadVarIndex(n, std::move(tri));
}

VarId QuadVarIndex::operator()(Index i, Index j) const {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n_) {
        throw SchemaError("QuadVarIndex: pair index out of range");
    }
    // Row-major offset into the upper triangle.
    const Index offset = i * n_ - i * (i - 1) / 2 + (j - i);
    return ids_[static_cast<std::size_t>(offset)];
}

RelaxationSet quad_relaxation(std::span<const VarId> alpha, const QuadVarIndex& X,
                              const Vector& l, const Vector& u, int n_tangents) {
    const Index n = static_cast<Index>(alpha.size());
    if (X.dim() != n || l.size() != n || u.size() != n) {
        throw SchemaError("quad_relaxation: alpha, X and bounds disagree on dimension");
    }
    if (n_tangents < 1) {
        throw ConfigError("quad_relaxation: n_tangents must be >= 1");
    }
    RelaxationSet set;
    for (Index i = 0; i < n; ++i) {
        check_ordered(l(i), u(i), "quad_relaxation");
        const VarId xii = X(i, i);
        const VarId ai = alpha[static_cast<std::size_t>(i)];
        const double li = l(i), ui = u(i);
        const double lo = (li <= 0.0 && ui >= 0.0) ? 0.0 : std::min(li * li, ui * ui);
        const double hi = std::max(li * li, ui * ui);
        set.var_bounds.push_back({xii, lo, hi});
        if (ui - li < kDegenerateInterval) {
            // Chord and tangents coincide: X_ii = (l+u) a - ul.
            set.constraints.push_back(make_constraint({{xii, 1.0}, {ai, -(li + ui)}}, Relation::Eq, -ui * li));
            continue;
        }
        // Chord above the diagonal square: X_ii <= (l+u) a - ul.
        set.constraints.push_back(make_constraint({{xii, 1.0}, {ai, -(li + ui)}}, Relation::Le, -ui * li));
        // Tangents below: X_ii >= 2 eta a - eta^2.
        for (double eta : tangent_grid(li, ui, n_tangents)) {
            set.constraints.push_back(make_constraint({{xii, 1.0}, {ai, -2.0 * eta}}, Relation::Ge, -eta * eta));
        }
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            set.merge(mccormick_product(alpha[static_cast<std::size_t>(i)],
                                        alpha[static_cast<std::size_t>(j)], X(i, j), l(i), u(i),
                                        l(j), u(j)));
        }
    }
    return set;
}

RelaxationSet neg_zlogz_tangents(VarId Z, VarId t, double Zl, double Zu, int n_tangents) {
    if (!(Zl > 0.0)) {
        throw DomainError("neg_zlogz_tangents: Z lower bound must be positive");
    }
    check_ordered(Zl, Zu, "neg_zlogz_tangents");
    if (n_tangents < 1) {
        throw ConfigError("neg_zlogz_tangents: n_tangents must be >= 1");
    }
    const auto f = [](double z) { return -z * std::log(z); };
    RelaxationSet set;
    // -Z log Z is concave; on [Zl, Zu] the minimum sits at an endpoint and
    // the maximum at 1/e when the interval contains it.
    const double lo = std::min(f(Zl), f(Zu));
    const double inv_e = 1.0 / std::exp(1.0);
    const double hi = (Zl <= inv_e && inv_e <= Zu) ? inv_e : std::max(f(Zl), f(Zu));
    set.var_bounds.push_back({t, lo, hi});
    // t <= -(log eta + 1) Z + eta at each tangent point.
    for (double eta : tangent_grid(Zl, Zu, n_tangents)) {
        set.constraints.push_back(make_constraint({{t, 1.0}, {Z, std::log(eta) + 1.0}}, Relation::Le, eta));
    }
    return set;
}

}  // namespace specverify
