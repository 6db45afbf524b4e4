#include "specverify/specs.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace specverify {

using nlohmann::json;

namespace {

long digit_sum_term_count(const DigitSumSpec& spec) {
    long terms = 1;
    for (std::size_t n = 0; n < spec.targets.size(); ++n) {
        terms *= spec.n_labels;
        if (terms > kMaxDigitSumTerms) return terms;
    }
    return terms;
}

// Visits every tuple in {0..n_labels-1}^N in odometer order.
template <typename Fn>
void for_each_tuple(int n_labels, int copies, Fn&& fn) {
    std::vector<int> tuple(static_cast<std::size_t>(copies), 0);
    while (true) {
        fn(static_cast<const std::vector<int>&>(tuple));
        int pos = copies - 1;
        while (pos >= 0 && ++tuple[static_cast<std::size_t>(pos)] == n_labels) {
            tuple[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
}

}  // namespace

int spec_arity(const Specification& spec) {
    if (const auto* digits = std::get_if<DigitSumSpec>(&spec)) {
        return static_cast<int>(digits->targets.size());
    }
    return 1;
}

void validate_spec(const Specification& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearSpec>) {
                if (s.c.size() == 0) throw SchemaError("linear spec: empty coefficient vector");
                if (!s.c.allFinite() || !std::isfinite(s.d)) {
                    throw SchemaError("linear spec: non-finite parameters");
                }
            } else if constexpr (std::is_same_v<T, SemanticSoftmaxSpec>) {
                if (s.dist.size() == 0) throw SchemaError("semantic spec: empty distance vector");
                if (!s.dist.allFinite() || !std::isfinite(s.epsilon)) {
                    throw SchemaError("semantic spec: non-finite parameters");
                }
                if (s.dist.minCoeff() < 0.0) {
                    throw SchemaError("semantic spec: negative label distance");
                }
                if (s.dist.minCoeff() != 0.0) {
                    throw SchemaError("semantic spec: no zero entry for the true label");
                }
            } else if constexpr (std::is_same_v<T, DigitSumSpec>) {
                const int copies = static_cast<int>(s.targets.size());
                if (copies < 1 || copies > kMaxDigitSumCopies) {
                    throw SchemaError("digit-sum spec: need between 1 and 4 targets");
                }
                if (s.n_labels < 1) throw SchemaError("digit-sum spec: n_labels must be positive");
                for (int t : s.targets) {
                    if (t < 0 || t >= s.n_labels) {
                        throw SchemaError("digit-sum spec: target outside label range");
                    }
                }
                if (digit_sum_term_count(s) > kMaxDigitSumTerms) {
                    throw ConfigError("digit-sum spec: n_labels^N exceeds the term cap");
                }
                if (!std::isfinite(s.epsilon)) {
                    throw SchemaError("digit-sum spec: non-finite epsilon");
                }
            } else if constexpr (std::is_same_v<T, QuadraticSpec>) {
                if (s.Q.rows() == 0 || s.Q.rows() != s.Q.cols()) {
                    throw SchemaError("quadratic spec: Q must be square and non-empty");
                }
                if (!s.Q.allFinite()) throw SchemaError("quadratic spec: non-finite Q");
                if ((s.Q - s.Q.transpose()).cwiseAbs().maxCoeff() > 0.0) {
                    throw SchemaError("quadratic spec: Q must be symmetric");
                }
            } else {
                if (!std::isfinite(s.floor)) throw SchemaError("entropy spec: non-finite floor");
            }
        },
        spec);
}

namespace {

void check_arity(const Specification& spec, std::span<const Vector> xs,
                 std::span<const Vector> ys) {
    const std::size_t arity = static_cast<std::size_t>(spec_arity(spec));
    if (xs.size() != arity || ys.size() != arity) {
        std::ostringstream msg;
        msg << "eval_spec: expected " << arity << " (input, output) pairs, got " << xs.size()
            << "/" << ys.size();
        throw ShapeError(msg.str());
    }
}

}  // namespace

double eval_spec(const Specification& spec, std::span<const Vector> xs,
                 std::span<const Vector> ys) {
    check_arity(spec, xs, ys);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearSpec>) {
                if (ys[0].size() != s.c.size()) {
                    throw ShapeError("eval_spec: linear coefficient dim mismatch");
                }
                return s.c.dot(ys[0]) + s.d;
            } else if constexpr (std::is_same_v<T, SemanticSoftmaxSpec>) {
                if (ys[0].size() != s.dist.size()) {
                    throw ShapeError("eval_spec: distance vector dim mismatch");
                }
                return softmax(ys[0]).dot(s.dist) - s.epsilon;
            } else if constexpr (std::is_same_v<T, DigitSumSpec>) {
                const int copies = static_cast<int>(s.targets.size());
                std::vector<Vector> probs(static_cast<std::size_t>(copies));
                for (int n = 0; n < copies; ++n) {
                    if (ys[static_cast<std::size_t>(n)].size() != s.n_labels) {
                        throw ShapeError("eval_spec: digit-sum logit dim != n_labels");
                    }
                    probs[static_cast<std::size_t>(n)] = softmax(ys[static_cast<std::size_t>(n)]);
                }
                double expectation = 0.0;
                for_each_tuple(s.n_labels, copies, [&](const std::vector<int>& tuple) {
                    double prob = 1.0;
                    int err = 0;
                    for (int n = 0; n < copies; ++n) {
                        prob *= probs[static_cast<std::size_t>(n)](tuple[static_cast<std::size_t>(n)]);
                        err += tuple[static_cast<std::size_t>(n)] - s.targets[static_cast<std::size_t>(n)];
                    }
                    expectation += std::abs(static_cast<double>(err)) * prob;
                });
                return expectation - s.epsilon;
            } else if constexpr (std::is_same_v<T, QuadraticSpec>) {
                const Index dim = 1 + xs[0].size() + ys[0].size();
                if (s.Q.rows() != dim) {
                    throw ShapeError("eval_spec: Q dimension != 1 + n + m");
                }
                Vector alpha(dim);
                alpha(0) = 1.0;
                alpha.segment(1, xs[0].size()) = xs[0];
                alpha.segment(1 + xs[0].size(), ys[0].size()) = ys[0];
                return alpha.dot(s.Q * alpha);
            } else {
                const Vector p = softmax(ys[0]);
                double plogp = 0.0;
                for (Index i = 0; i < p.size(); ++i) {
                    if (p(i) > 0.0) plogp += p(i) * std::log(p(i));
                }
                return s.floor + plogp;
            }
        },
        spec);
}

double eval_spec_relaxed_form(const Specification& spec, std::span<const Vector> xs,
                              std::span<const Vector> ys, std::span<const double> shifts) {
    check_arity(spec, xs, ys);
    const auto shift_of = [&](std::size_t copy) {
        return copy < shifts.size() ? shifts[copy] : 0.0;
    };
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SemanticSoftmaxSpec>) {
                double total = 0.0;
                for (Index j = 0; j < ys[0].size(); ++j) {
                    total += std::exp(ys[0](j) - shift_of(0)) * (s.dist(j) - s.epsilon);
                }
                return total;
            } else if constexpr (std::is_same_v<T, DigitSumSpec>) {
                const int copies = static_cast<int>(s.targets.size());
                double total = 0.0;
                for_each_tuple(s.n_labels, copies, [&](const std::vector<int>& tuple) {
                    double logit_sum = 0.0;
                    int err = 0;
                    for (int n = 0; n < copies; ++n) {
                        logit_sum += ys[static_cast<std::size_t>(n)](tuple[static_cast<std::size_t>(n)]) -
                                     shift_of(static_cast<std::size_t>(n));
                        err += tuple[static_cast<std::size_t>(n)] - s.targets[static_cast<std::size_t>(n)];
                    }
                    total += (std::abs(static_cast<double>(err)) - s.epsilon) * std::exp(logit_sum);
                });
                return total;
            } else if constexpr (std::is_same_v<T, EntropySpec>) {
                double total = 0.0;
                double Z = 0.0;
                for (Index i = 0; i < ys[0].size(); ++i) {
                    const double yi = ys[0](i) - shift_of(0);
                    const double e = std::exp(yi);
                    total += (s.floor + yi) * e;
                    Z += e;
                }
                return total - Z * std::log(Z);
            } else {
                return eval_spec(spec, xs, ys);
            }
        },
        spec);
}

std::vector<double> encoding_shifts(const Specification& spec,
                                    std::span<const LayerBounds> bounds) {
    std::vector<double> shifts;
    const bool shifted = std::holds_alternative<SemanticSoftmaxSpec>(spec) ||
                         std::holds_alternative<DigitSumSpec>(spec) ||
                         std::holds_alternative<EntropySpec>(spec);
    for (const LayerBounds& lb : bounds) {
        shifts.push_back(shifted ? lb.output_upper().maxCoeff() : 0.0);
    }
    return shifts;
}

namespace {

struct TermInterval {
    double lo = 0.0;
    double hi = 0.0;

    void add(double coeff, double vlo, double vhi) {
        const double a = coeff * vlo;
        const double b = coeff * vhi;
        lo += std::min(a, b);
        hi += std::max(a, b);
    }
};

// Lower end of an exp-relaxed variable's box: exp_relaxation widens a
// negligible range to [0, e^u], and interval math here must match.
double exp_range_lo(double l, double u) {
    if (u - l < kDegenerateInterval) return std::exp(l);
    return std::exp(u) < kNegligibleExp ? 0.0 : std::exp(l);
}

void check_copies(const Specification& spec, std::span<const LayerBounds> bounds,
                  std::span<const NetworkVarMap> copies) {
    const std::size_t arity = static_cast<std::size_t>(spec_arity(spec));
    if (bounds.size() != arity || copies.size() != arity) {
        throw ShapeError("encode_spec: bounds/var maps do not match spec arity");
    }
    for (std::size_t i = 0; i < arity; ++i) {
        if (bounds[i].lower.empty()) {
            throw ShapeError("encode_spec: missing propagated bounds");
        }
        if (static_cast<std::size_t>(bounds[i].output_lower().size()) != copies[i].y.size()) {
            throw ShapeError("encode_spec: output bounds do not match output variables");
        }
    }
}

}  // namespace

EncodedSpec encode_spec(const Specification& spec, std::span<const LayerBounds> bounds,
                        std::span<const NetworkVarMap> copies, LinearProgram& lp,
                        int n_tangents) {
    validate_spec(spec);
    check_copies(spec, bounds, copies);
    EncodedSpec enc;
    RelaxationSet& set = enc.relaxation;

    const auto define_affine = [&](const char* name,
                                   std::vector<std::pair<VarId, double>> terms,
                                   double constant, TermInterval range) -> VarId {
        const VarId id = lp.add_variable(name, range.lo + constant, range.hi + constant);
        terms.emplace_back(id, -1.0);
        // terms + constant - id = 0  <=>  id = terms + constant
        LinearConstraint c{std::move(terms), Relation::Eq, -constant};
        for (auto& [vid, coeff] : c.terms) coeff = -coeff;
        c.rhs = constant;
        set.constraints.push_back(std::move(c));
        return id;
    };

    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearSpec>) {
                const auto& y = copies[0].y;
                if (static_cast<std::size_t>(s.c.size()) != y.size()) {
                    throw ShapeError("encode_spec: linear coefficient dim mismatch");
                }
                TermInterval range;
                std::vector<std::pair<VarId, double>> terms;
                for (std::size_t j = 0; j < y.size(); ++j) {
                    const Index jj = static_cast<Index>(j);
                    if (s.c(jj) == 0.0) continue;
                    terms.emplace_back(y[j], s.c(jj));
                    range.add(s.c(jj), bounds[0].output_lower()(jj), bounds[0].output_upper()(jj));
                }
                if (terms.empty()) {
                    // Constant specification: z = d.
                    enc.z = lp.add_variable("z", s.d, s.d);
                    return;
                }
                enc.z = define_affine("z", std::move(terms), s.d, range);
            } else if constexpr (std::is_same_v<T, SemanticSoftmaxSpec>) {
                const auto& y = copies[0].y;
                if (static_cast<std::size_t>(s.dist.size()) != y.size()) {
                    throw ShapeError("encode_spec: distance vector dim mismatch");
                }
                // Stabilizing shift: relax exp(y_j - c) with c = max_j u_j,
                // a positive rescale of the cleared form that keeps every
                // exponential in (0, 1].
                const double shift = bounds[0].output_upper().maxCoeff();
                TermInterval range;
                std::vector<std::pair<VarId, double>> terms;
                for (std::size_t j = 0; j < y.size(); ++j) {
                    const Index jj = static_cast<Index>(j);
                    TermInterval yrange;
                    yrange.lo = bounds[0].output_lower()(jj);
                    yrange.hi = bounds[0].output_upper()(jj);
                    const double l = yrange.lo - shift;
                    const double u = yrange.hi - shift;
                    const VarId shifted = define_affine(("ys" + std::to_string(j)).c_str(),
                                                        {{y[j], 1.0}}, -shift, yrange);
                    const double alo = exp_range_lo(l, u);
                    const VarId alpha = lp.add_variable("alpha" + std::to_string(j),
                                                        alo, std::exp(u));
                    set.merge(exp_relaxation(shifted, alpha, l, u, n_tangents));
                    const double coeff = s.dist(jj) - s.epsilon;
                    if (coeff != 0.0) {
                        terms.emplace_back(alpha, coeff);
                        range.add(coeff, alo, std::exp(u));
                    }
                }
                if (terms.empty()) {
                    enc.z = lp.add_variable("z", 0.0, 0.0);
                    return;
                }
                enc.z = define_affine("z", std::move(terms), 0.0, range);
            } else if constexpr (std::is_same_v<T, DigitSumSpec>) {
                const int copies_n = static_cast<int>(s.targets.size());
                double total_shift = 0.0;
                for (int n = 0; n < copies_n; ++n) {
                    if (static_cast<int>(copies[static_cast<std::size_t>(n)].y.size()) !=
                        s.n_labels) {
                        throw ShapeError("encode_spec: digit-sum output dim != n_labels");
                    }
                    // Per-copy stabilizing shift, folded into each tuple sum.
                    total_shift += bounds[static_cast<std::size_t>(n)].output_upper().maxCoeff();
                }
                TermInterval zrange;
                std::vector<std::pair<VarId, double>> zterms;
                long tuple_idx = 0;
                for_each_tuple(s.n_labels, copies_n, [&](const std::vector<int>& tuple) {
                    // s_t = sum_n y^(n)_{j_n} - total_shift; alpha_t relaxes exp(s_t).
                    TermInterval srange;
                    std::vector<std::pair<VarId, double>> sterms;
                    int err = 0;
                    for (int n = 0; n < copies_n; ++n) {
                        const int label = tuple[static_cast<std::size_t>(n)];
                        const Index jj = static_cast<Index>(label);
                        sterms.emplace_back(copies[static_cast<std::size_t>(n)].y[static_cast<std::size_t>(label)], 1.0);
                        srange.add(1.0, bounds[static_cast<std::size_t>(n)].output_lower()(jj),
                                   bounds[static_cast<std::size_t>(n)].output_upper()(jj));
                        err += label - s.targets[static_cast<std::size_t>(n)];
                    }
                    const std::string suffix = std::to_string(tuple_idx++);
                    const double slo = srange.lo - total_shift;
                    const double shi = srange.hi - total_shift;
                    const double alo = std::exp(slo);
                    const double ahi = std::exp(shi);
                    VarId alpha;
                    double alo_box = alo;
                    if (ahi < kNegligibleExp && shi - slo >= kDegenerateInterval) {
                        // Negligible tuple: the box alone relaxes it, and the
                        // logit-sum variable is not needed at all.
                        alo_box = 0.0;
                        alpha = lp.add_variable("alpha" + suffix, 0.0, ahi);
                    } else {
                        const VarId sum_id = define_affine(("s" + suffix).c_str(),
                                                           std::move(sterms), -total_shift,
                                                           srange);
                        alpha = lp.add_variable("alpha" + suffix, alo, ahi);
                        set.merge(exp_relaxation(sum_id, alpha, slo, shi, n_tangents));
                    }
                    const double coeff = std::abs(static_cast<double>(err)) - s.epsilon;
                    if (coeff != 0.0) {
                        zterms.emplace_back(alpha, coeff);
                        zrange.add(coeff, alo_box, ahi);
                    }
                });
                if (zterms.empty()) {
                    enc.z = lp.add_variable("z", 0.0, 0.0);
                    return;
                }
                enc.z = define_affine("z", std::move(zterms), 0.0, zrange);
            } else if constexpr (std::is_same_v<T, QuadraticSpec>) {
                const auto& xm = copies[0].x;
                const auto& ym = copies[0].y;
                const Index dim = 1 + static_cast<Index>(xm.size() + ym.size());
                if (s.Q.rows() != dim) {
                    throw ShapeError("encode_spec: Q dimension != 1 + n + m");
                }
                std::vector<VarId> alpha;
                alpha.reserve(static_cast<std::size_t>(dim));
                Vector l(dim), u(dim);
                alpha.push_back(lp.add_variable("alpha_one", 1.0, 1.0));
                l(0) = 1.0;
                u(0) = 1.0;
                for (std::size_t i = 0; i < xm.size(); ++i) {
                    alpha.push_back(xm[i]);
                    l(static_cast<Index>(1 + i)) = bounds[0].lower[0](static_cast<Index>(i));
                    u(static_cast<Index>(1 + i)) = bounds[0].upper[0](static_cast<Index>(i));
                }
                for (std::size_t i = 0; i < ym.size(); ++i) {
                    alpha.push_back(ym[i]);
                    l(static_cast<Index>(1 + xm.size() + i)) =
                        bounds[0].output_lower()(static_cast<Index>(i));
                    u(static_cast<Index>(1 + xm.size() + i)) =
                        bounds[0].output_upper()(static_cast<Index>(i));
                }
                std::vector<VarId> tri;
                tri.reserve(static_cast<std::size_t>(dim * (dim + 1) / 2));
                for (Index i = 0; i < dim; ++i) {
                    for (Index j = i; j < dim; ++j) {
                        tri.push_back(lp.add_variable(
                            "X" + std::to_string(i) + "_" + std::to_string(j), -kInf, kInf));
                    }
                }
                const QuadVarIndex X(dim, std::move(tri));
                set.merge(quad_relaxation(alpha, X, l, u, n_tangents));
                // z = Tr(QX) over the distinct entries of symmetric X.
                std::vector<std::pair<VarId, double>> terms;
                for (Index i = 0; i < dim; ++i) {
                    for (Index j = i; j < dim; ++j) {
                        const double coeff = (i == j) ? s.Q(i, i) : s.Q(i, j) + s.Q(j, i);
                        if (coeff != 0.0) terms.emplace_back(X(i, j), coeff);
                    }
                }
                if (terms.empty()) {
                    enc.z = lp.add_variable("z", 0.0, 0.0);
                    return;
                }
                // z bounds from the interval each X entry can take.
                TermInterval range;
                for (Index i = 0; i < dim; ++i) {
                    for (Index j = i; j < dim; ++j) {
                        const double coeff = (i == j) ? s.Q(i, i) : s.Q(i, j) + s.Q(j, i);
                        if (coeff == 0.0) continue;
                        double xlo, xhi;
                        if (i == j) {
                            xlo = (l(i) <= 0.0 && u(i) >= 0.0) ? 0.0
                                                               : std::min(l(i) * l(i), u(i) * u(i));
                            xhi = std::max(l(i) * l(i), u(i) * u(i));
                        } else {
                            const double corners[4] = {l(i) * l(j), l(i) * u(j), u(i) * l(j),
                                                       u(i) * u(j)};
                            xlo = *std::min_element(corners, corners + 4);
                            xhi = *std::max_element(corners, corners + 4);
                        }
                        range.add(coeff, xlo, xhi);
                    }
                }
                enc.z = define_affine("z", std::move(terms), 0.0, range);
            } else {
                // Entropy: z = sum_i (E alpha_i + p_i) + t with p_i ~ y'_i e^{y'_i}
                // over stabilized logits y' = y - max_j u_j, Z = sum alpha_i,
                // t <= tangents of -Z log Z. Shifting rescales the cleared
                // form by e^{-shift} > 0 (softmax entropy itself is shift
                // invariant).
                const auto& y = copies[0].y;
                const Index labels = static_cast<Index>(y.size());
                const double shift = bounds[0].output_upper().maxCoeff();
                TermInterval zrange;
                std::vector<std::pair<VarId, double>> zterms;
                TermInterval Zrange;
                std::vector<std::pair<VarId, double>> Zterms;
                for (Index i = 0; i < labels; ++i) {
                    TermInterval yrange;
                    yrange.lo = bounds[0].output_lower()(i);
                    yrange.hi = bounds[0].output_upper()(i);
                    const double l = yrange.lo - shift;
                    const double u = yrange.hi - shift;
                    const double el = exp_range_lo(l, u);
                    const double eu = std::exp(u);
                    const VarId shifted = define_affine(("ys" + std::to_string(i)).c_str(),
                                                        {{y[static_cast<std::size_t>(i)], 1.0}},
                                                        -shift, yrange);
                    const VarId alpha =
                        lp.add_variable("alpha" + std::to_string(i), el, eu);
                    set.merge(exp_relaxation(shifted, alpha, l, u, n_tangents));
                    const double corners[4] = {l * el, l * eu, u * el, u * eu};
                    const double plo = *std::min_element(corners, corners + 4);
                    const double phi = *std::max_element(corners, corners + 4);
                    const VarId prod = lp.add_variable("p" + std::to_string(i), plo, phi);
                    if (eu >= kNegligibleExp || u - l < kDegenerateInterval) {
                        set.merge(mccormick_product(shifted, alpha, prod, l, u, el, eu));
                    }
                    zterms.emplace_back(alpha, s.floor);
                    zrange.add(s.floor, el, eu);
                    zterms.emplace_back(prod, 1.0);
                    zrange.add(1.0, plo, phi);
                    Zterms.emplace_back(alpha, 1.0);
                    Zrange.add(1.0, el, eu);
                }
                const VarId Z = define_affine("Z", std::move(Zterms), 0.0, Zrange);
                const auto f = [](double z) { return -z * std::log(z); };
                const double tlo = std::min(f(Zrange.lo), f(Zrange.hi));
                const double inv_e = 1.0 / std::exp(1.0);
                const double thi = (Zrange.lo <= inv_e && inv_e <= Zrange.hi)
                                       ? inv_e
                                       : std::max(f(Zrange.lo), f(Zrange.hi));
                const VarId t = lp.add_variable("t", tlo, thi);
                set.merge(neg_zlogz_tangents(Z, t, Zrange.lo, Zrange.hi, n_tangents));
                zterms.emplace_back(t, 1.0);
                zrange.add(1.0, tlo, thi);
                enc.z = define_affine("z", std::move(zterms), 0.0, zrange);
            }
        },
        spec);
    return enc;
}

QuadraticSpec build_energy_Q(const EnergyParams& p, int input_dim, int output_dim) {
    if (p.mass <= 0.0 || p.length <= 0.0 || p.gravity <= 0.0 || p.velocity_scale <= 0.0) {
        throw DomainError("build_energy_Q: physical parameters must be positive");
    }
    if (input_dim != 3 || output_dim != 3) {
        throw ConfigError("build_energy_Q: state layout is (w, h, s*omega) -> 3 in, 3 out");
    }
    const Index dim = 1 + 3 + 3;
    Matrix Q = Matrix::Zero(dim, dim);
    const double mgl = p.mass * p.gravity * p.length;
    const double kin = 0.5 * p.mass * p.length * p.length /
                       (p.velocity_scale * p.velocity_scale);
    // alpha = (1, w, h, s*omega, w', h', s*omega').
    Q(0, 5) = mgl / 2.0;
    Q(5, 0) = mgl / 2.0;
    Q(0, 2) = -mgl / 2.0;
    Q(2, 0) = -mgl / 2.0;
    Q(6, 6) = kin;
    Q(3, 3) = -kin;
    QuadraticSpec spec{std::move(Q)};
    validate_spec(Specification{spec});
    return spec;
}

namespace {

Vector vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) {
        throw SchemaError(what + " must be a non-empty array");
    }
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Index>(i)) = j[i].get<double>();
    }
    return v;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw SchemaError(what + " must be a non-empty nested array");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            throw SchemaError(what + " has ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

}  // namespace

Specification parse_spec_json(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("kind")) {
        throw SchemaError(origin + ": specification must be an object with a 'kind' tag");
    }
    const std::string kind = doc.at("kind").get<std::string>();
    Specification spec;
    if (kind == "linear") {
        spec = LinearSpec{vector_from_json(doc.at("c"), origin + ": c"),
                          doc.value("d", 0.0)};
    } else if (kind == "semantic_softmax") {
        spec = SemanticSoftmaxSpec{vector_from_json(doc.at("dist"), origin + ": dist"),
                                   doc.value("epsilon", 0.23)};
    } else if (kind == "digit_sum") {
        DigitSumSpec s;
        s.targets = doc.at("targets").get<std::vector<int>>();
        s.n_labels = doc.value("n_labels", 10);
        s.epsilon = doc.value("epsilon", 1.0);
        spec = std::move(s);
    } else if (kind == "quadratic") {
        spec = QuadraticSpec{matrix_from_json(doc.at("Q"), origin + ": Q")};
    } else if (kind == "entropy") {
        spec = EntropySpec{doc.value("E", 0.1)};
    } else {
        throw SchemaError(origin + ": unknown specification kind '" + kind + "'");
    }
    validate_spec(spec);
    return spec;
}

std::string spec_to_json(const Specification& spec) {
    json doc;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearSpec>) {
                doc["kind"] = "linear";
                doc["c"] = std::vector<double>(s.c.data(), s.c.data() + s.c.size());
                doc["d"] = s.d;
            } else if constexpr (std::is_same_v<T, SemanticSoftmaxSpec>) {
                doc["kind"] = "semantic_softmax";
                doc["dist"] = std::vector<double>(s.dist.data(), s.dist.data() + s.dist.size());
                doc["epsilon"] = s.epsilon;
            } else if constexpr (std::is_same_v<T, DigitSumSpec>) {
                doc["kind"] = "digit_sum";
                doc["targets"] = s.targets;
                doc["n_labels"] = s.n_labels;
                doc["epsilon"] = s.epsilon;
            } else if constexpr (std::is_same_v<T, QuadraticSpec>) {
                doc["kind"] = "quadratic";
                json rows = json::array();
                for (Index r = 0; r < s.Q.rows(); ++r) {
                    json row = json::array();
                    for (Index c = 0; c < s.Q.cols(); ++c) row.push_back(s.Q(r, c));
                    rows.push_back(std::move(row));
                }
                doc["Q"] = std::move(rows);
            } else {
                doc["kind"] = "entropy";
                doc["E"] = s.floor;
            }
        },
        spec);
    return doc.dump(2);
}

Specification load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("load_spec: cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec_json(buf.str(), path);
}

void save_spec(const Specification& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("save_spec: cannot open '" + path + "' for writing");
    }
    out << spec_to_json(spec) << '\n';
}

Matrix load_distance_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("load_distance_matrix: cannot open '" + path + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!doc.contains("distance")) {
        throw SchemaError(path + ": missing 'distance' matrix");
    }
    Matrix d = matrix_from_json(doc.at("distance"), path + ": distance");
    if (d.rows() != d.cols()) {
        throw SchemaError(path + ": distance matrix must be square");
    }
    if ((d - d.transpose()).cwiseAbs().maxCoeff() > 0.0) {
        throw SchemaError(path + ": distance matrix must be symmetric");
    }
    if (d.diagonal().cwiseAbs().maxCoeff() > 0.0) {
        throw SchemaError(path + ": distance matrix diagonal must be zero");
    }
    if (d.minCoeff() < 0.0) {
        throw SchemaError(path + ": distances must be nonnegative");
    }
    return d;
}

Vector distance_row(const Matrix& distances, int true_label) {
    if (true_label < 0 || true_label >= distances.rows()) {
        throw ConfigError("distance_row: label outside matrix range");
    }
    return distances.row(true_label).transpose();
}

}  // namespace specverify
