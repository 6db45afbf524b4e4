#include "specverify/falsify.hpp"

#include "specverify/rng.hpp"

#include <cmath>
#include <sstream>

namespace specverify {

namespace {

// Forward pass keeping the input of every layer, for the reverse sweep.
struct Trace {
    std::vector<Vector> layer_inputs;
    Vector output;
};

Trace traced_forward(const Network& net, const Vector& x) {
    Trace trace;
    trace.layer_inputs.reserve(net.layers.size());
    Vector h = x;
    for (const Layer& layer : net.layers) {
        trace.layer_inputs.push_back(h);
        if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
            h = (affine->weight * h + affine->bias).eval();
        } else {
            h = h.cwiseMax(0.0);
        }
    }
    trace.output = std::move(h);
    return trace;
}

Vector backprop_input(const Network& net, const Trace& trace, Vector grad_out) {
    for (std::size_t k = net.layers.size(); k-- > 0;) {
        const Layer& layer = net.layers[k];
        if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
            grad_out = (affine->weight.transpose() * grad_out).eval();
        } else {
            // Subgradient 0 at the kink: mask strictly positive inputs.
            const Vector& pre = trace.layer_inputs[k];
            grad_out = (pre.array() > 0.0).select(grad_out, 0.0);
        }
    }
    return grad_out;
}

// dF/dy per copy; xs enter only through the quadratic spec's direct term.
struct SpecGrad {
    std::vector<Vector> dy;
    std::vector<Vector> dx_direct;
};

SpecGrad spec_output_gradient(const Specification& spec, std::span<const Vector> xs,
                              std::span<const Vector> ys) {
    SpecGrad g;
    g.dy.resize(ys.size());
    g.dx_direct.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        g.dx_direct[i] = Vector::Zero(xs[i].size());
    }
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearSpec>) {
                g.dy[0] = s.c;
            } else if constexpr (std::is_same_v<T, SemanticSoftmaxSpec>) {
                const Vector p = softmax(ys[0]);
                const double mean = p.dot(s.dist);
                g.dy[0] = p.array() * (s.dist.array() - mean);
            } else if constexpr (std::is_same_v<T, DigitSumSpec>) {
                const int copies = static_cast<int>(s.targets.size());
                std::vector<Vector> probs(static_cast<std::size_t>(copies));
                for (int n = 0; n < copies; ++n) {
                    probs[static_cast<std::size_t>(n)] = softmax(ys[static_cast<std::size_t>(n)]);
                }
                // cond[n](j) = E[|err| | j_n = j] over the other copies.
                std::vector<Vector> cond(static_cast<std::size_t>(copies));
                for (int n = 0; n < copies; ++n) {
                    cond[static_cast<std::size_t>(n)] = Vector::Zero(s.n_labels);
                }
                std::vector<int> tuple(static_cast<std::size_t>(copies), 0);
                while (true) {
                    int err = 0;
                    for (int n = 0; n < copies; ++n) {
                        err += tuple[static_cast<std::size_t>(n)] - s.targets[static_cast<std::size_t>(n)];
                    }
                    const double c = std::abs(static_cast<double>(err));
                    for (int n = 0; n < copies; ++n) {
                        double rest = 1.0;
                        for (int m = 0; m < copies; ++m) {
                            if (m != n) {
                                rest *= probs[static_cast<std::size_t>(m)](tuple[static_cast<std::size_t>(m)]);
                            }
                        }
                        cond[static_cast<std::size_t>(n)](tuple[static_cast<std::size_t>(n)]) += c * rest;
                    }
                    int pos = copies - 1;
                    while (pos >= 0 && ++tuple[static_cast<std::size_t>(pos)] == s.n_labels) {
                        tuple[static_cast<std::size_t>(pos)] = 0;
                        --pos;
                    }
                    if (pos < 0) break;
                }
                for (int n = 0; n < copies; ++n) {
                    const Vector& p = probs[static_cast<std::size_t>(n)];
                    const Vector& cn = cond[static_cast<std::size_t>(n)];
                    const double mean = p.dot(cn);
                    g.dy[static_cast<std::size_t>(n)] = p.array() * (cn.array() - mean);
                }
            } else if constexpr (std::is_same_v<T, QuadraticSpec>) {
                const Index nx = xs[0].size();
                const Index ny = ys[0].size();
                Vector alpha(1 + nx + ny);
                alpha(0) = 1.0;
                alpha.segment(1, nx) = xs[0];
                alpha.segment(1 + nx, ny) = ys[0];
                const Vector grad = (s.Q + s.Q.transpose()) * alpha;
                g.dx_direct[0] = grad.segment(1, nx);
                g.dy[0] = grad.segment(1 + nx, ny);
            } else {
                const Vector p = softmax(ys[0]);
                Vector logp(p.size());
                for (Index i = 0; i < p.size(); ++i) {
                    logp(i) = (p(i) > 0.0) ? std::log(p(i)) : -745.0;
                }
                const double plogp = p.dot(logp);
                g.dy[0] = p.array() * (logp.array() - plogp);
            }
        },
        spec);
    return g;
}

}  // namespace

std::vector<Vector> spec_input_gradient(std::span<const Network* const> nets,
                                        const Specification& spec,
                                        std::span<const Vector> xs) {
    const std::size_t arity = static_cast<std::size_t>(spec_arity(spec));
    if (nets.size() != arity || xs.size() != arity) {
        throw ShapeError("spec_input_gradient: arity mismatch between nets/inputs/spec");
    }
    std::vector<Trace> traces(arity);
    std::vector<Vector> ys(arity);
    for (std::size_t i = 0; i < arity; ++i) {
        traces[i] = traced_forward(*nets[i], xs[i]);
        ys[i] = traces[i].output;
    }
    const SpecGrad sg = spec_output_gradient(spec, xs, ys);
    std::vector<Vector> grads(arity);
    for (std::size_t i = 0; i < arity; ++i) {
        grads[i] = backprop_input(*nets[i], traces[i], sg.dy[i]) + sg.dx_direct[i];
        if (!grads[i].allFinite()) {
            throw NumericError("spec_input_gradient: non-finite gradient");
        }
    }
    return grads;
}

std::optional<Witness> pgd_falsify(std::span<const Network* const> nets,
                                   const Specification& spec,
                                   std::span<const InputRegion> regions,
                                   const AttackConfig& cfg) {
    const std::size_t arity = static_cast<std::size_t>(spec_arity(spec));
    if (nets.size() != arity || regions.size() != arity) {
        throw ShapeError("pgd_falsify: arity mismatch between nets/regions/spec");
    }
    if (cfg.steps < 1 || cfg.restarts < 1) {
        throw ConfigError("pgd_falsify: steps and restarts must be >= 1");
    }
    std::vector<Vector> lo(arity), hi(arity);
    std::vector<double> eta(arity);
    for (std::size_t i = 0; i < arity; ++i) {
        lo[i] = regions[i].lower();
        hi[i] = regions[i].upper();
        eta[i] = cfg.step_size > 0.0 ? cfg.step_size : regions[i].delta / 4.0;
    }

    const auto evaluate = [&](const std::vector<Vector>& xs) {
        std::vector<Vector> ys(arity);
        for (std::size_t i = 0; i < arity; ++i) {
            ys[i] = forward(*nets[i], xs[i]);
        }
        return eval_spec(spec, xs, ys);
    };

    double best_value = -kInf;
    std::vector<Vector> best_xs;
    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<Vector> xs(arity);
        if (r == 0) {
            // Nominal start keeps behaviour continuous as delta -> 0.
            for (std::size_t i = 0; i < arity; ++i) {
                xs[i] = regions[i].center.cwiseMax(lo[i]).cwiseMin(hi[i]);
            }
        } else {
            Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(r));
            for (std::size_t i = 0; i < arity; ++i) {
                xs[i].resize(lo[i].size());
                for (Index d = 0; d < lo[i].size(); ++d) {
                    xs[i](d) = rng.uniform(lo[i](d), hi[i](d));
                }
            }
        }
        for (int step = 0; step < cfg.steps; ++step) {
            const std::vector<Vector> grads = spec_input_gradient(nets, spec, xs);
            for (std::size_t i = 0; i < arity; ++i) {
                if (eta[i] == 0.0) continue;
                xs[i] += eta[i] * grads[i];
                xs[i] = xs[i].cwiseMax(lo[i]).cwiseMin(hi[i]);
            }
        }
        const double value = evaluate(xs);
        if (value > best_value) {
            best_value = value;
            best_xs = std::move(xs);
        }
    }

    if (best_value > 0.0) {
        for (std::size_t i = 0; i < arity; ++i) {
            if ((best_xs[i].array() < lo[i].array()).any() ||
                (best_xs[i].array() > hi[i].array()).any()) {
                throw InternalError("pgd_falsify: witness escaped its box");
            }
        }
        return Witness{std::move(best_xs), best_value};
    }
    return std::nullopt;
}

}  // namespace specverify
