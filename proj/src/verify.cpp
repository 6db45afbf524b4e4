#include "specverify/verify.hpp"

#include "specverify/rng.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace specverify {

NetworkEncoding encode_network(LinearProgram& lp, const Network& net, const LayerBounds& lb,
                               const std::string& prefix) {
    if (lb.lower.size() != net.layers.size() + 1) {
        throw ShapeError("encode_network: bounds do not match network depth");
    }
    NetworkEncoding enc;
    std::vector<VarId> current;
    current.reserve(static_cast<std::size_t>(net.input_dim));
    for (int i = 0; i < net.input_dim; ++i) {
        current.push_back(lp.add_variable(prefix + "x" + std::to_string(i),
                                          lb.lower[0](i), lb.upper[0](i)));
    }
    enc.x = current;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const Vector& out_lo = lb.lower[k + 1];
        const Vector& out_hi = lb.upper[k + 1];
        std::vector<VarId> next;
        next.reserve(static_cast<std::size_t>(out_lo.size()));
        if (const auto* affine = std::get_if<AffineLayer>(&net.layers[k])) {
            for (Index r = 0; r < affine->weight.rows(); ++r) {
                const VarId id = lp.add_variable(
                    prefix + "h" + std::to_string(k) + "_" + std::to_string(r), out_lo(r),
                    out_hi(r));
                LinearConstraint eq;
                eq.terms.reserve(static_cast<std::size_t>(affine->weight.cols()) + 1);
                eq.terms.emplace_back(id, 1.0);
                for (Index c = 0; c < affine->weight.cols(); ++c) {
                    if (affine->weight(r, c) != 0.0) {
                        eq.terms.emplace_back(current[static_cast<std::size_t>(c)],
                                              -affine->weight(r, c));
                    }
                }
                eq.rel = Relation::Eq;
                eq.rhs = affine->bias(r);
                lp.add_constraint(std::move(eq));
                next.push_back(id);
            }
        } else {
            const Vector& pre_lo = lb.lower[k];
            const Vector& pre_hi = lb.upper[k];
            for (Index r = 0; r < pre_lo.size(); ++r) {
                const VarId id = lp.add_variable(
                    prefix + "a" + std::to_string(k) + "_" + std::to_string(r), out_lo(r),
                    out_hi(r));
                lp.apply(relu_relaxation(current[static_cast<std::size_t>(r)], id, pre_lo(r),
                                         pre_hi(r)));
                next.push_back(id);
            }
        }
        current = std::move(next);
    }
    enc.y = std::move(current);
    return enc;
}

LayerBounds tighten_bounds_lp(const Network& net, const InputRegion& region) {
    LayerBounds lb = propagate_bounds(net, region);
    // Sharpen each affine layer's output in turn; later layers then
    // propagate from the tightened intervals.
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        if (!std::holds_alternative<AffineLayer>(net.layers[k])) continue;
        Network prefix;
        prefix.name = net.name + "/prefix";
        prefix.input_dim = net.input_dim;
        prefix.layers.assign(net.layers.begin(), net.layers.begin() + static_cast<long>(k) + 1);
        prefix.output_dim = static_cast<int>(lb.lower[k + 1].size());

        LayerBounds prefix_lb;
        prefix_lb.lower.assign(lb.lower.begin(), lb.lower.begin() + static_cast<long>(k) + 2);
        prefix_lb.upper.assign(lb.upper.begin(), lb.upper.begin() + static_cast<long>(k) + 2);

        for (Index r = 0; r < lb.lower[k + 1].size(); ++r) {
            for (const double sense : {1.0, -1.0}) {
                LinearProgram lp;
                const NetworkEncoding enc = encode_network(lp, prefix, prefix_lb, "t_");
                lp.set_objective({{enc.y[static_cast<std::size_t>(r)], sense}});
                const LpSolution sol = solve(lp);
                if (sol.status != LpStatus::Optimal) {
                    throw InternalError("tighten_bounds_lp: relaxation LP not optimal");
                }
                if (sense > 0.0) {
                    lb.upper[k + 1](r) = std::min(lb.upper[k + 1](r), sol.objective);
                } else {
                    lb.lower[k + 1](r) = std::max(lb.lower[k + 1](r), -sol.objective);
                }
            }
        }
        // Re-propagate the suffix from the sharpened interval.
        for (std::size_t j = k + 1; j < net.layers.size(); ++j) {
            const Vector& lo = lb.lower[j];
            const Vector& hi = lb.upper[j];
            if (const auto* affine = std::get_if<AffineLayer>(&net.layers[j])) {
                const Vector mid = 0.5 * (lo + hi);
                const Vector rad = 0.5 * (hi - lo);
                lb.lower[j + 1] = affine->weight * mid + affine->bias - affine->weight.cwiseAbs() * rad;
                lb.upper[j + 1] = affine->weight * mid + affine->bias + affine->weight.cwiseAbs() * rad;
            } else {
                lb.lower[j + 1] = lo.cwiseMax(0.0);
                lb.upper[j + 1] = hi.cwiseMax(0.0);
            }
        }
    }
    return lb;
}

VerificationOutcome verify_example(std::span<const Network* const> nets,
                                   const Specification& spec,
                                   std::span<const InputRegion> regions,
                                   const VerifyOptions& options) {
    const std::size_t arity = static_cast<std::size_t>(spec_arity(spec));
    if (nets.size() != arity || regions.size() != arity) {
        throw ShapeError("verify_example: arity mismatch between nets/regions/spec");
    }
    std::vector<LayerBounds> bounds(arity);
    std::vector<NetworkEncoding> encodings(arity);
    LinearProgram lp;
    for (std::size_t i = 0; i < arity; ++i) {
        bounds[i] = options.tighten_bounds ? tighten_bounds_lp(*nets[i], regions[i])
                                           : propagate_bounds(*nets[i], regions[i]);
        encodings[i] = encode_network(lp, *nets[i], bounds[i],
                                      "c" + std::to_string(i) + "_");
    }
    std::vector<NetworkVarMap> maps(arity);
    for (std::size_t i = 0; i < arity; ++i) {
        maps[i] = {encodings[i].x, encodings[i].y};
    }
    const EncodedSpec enc = encode_spec(spec, bounds, maps, lp, options.n_tangents);
    lp.apply(enc.relaxation);
    lp.set_objective({{enc.z, 1.0}});

    if (!options.dump_lp_path.empty()) {
        std::ofstream out(options.dump_lp_path);
        if (!out) {
            throw IoError("verify_example: cannot open '" + options.dump_lp_path + "'");
        }
        out << to_lp_text(lp);
    }

    const LpSolution sol = solve(lp);
    if (sol.status == LpStatus::Infeasible) {
        // The nominal point is always feasible for a correct encoding.
        throw InternalError("verify_example: relaxation LP reported infeasible");
    }
    if (sol.status == LpStatus::Unbounded) {
        throw InternalError("verify_example: relaxation LP reported unbounded");
    }

    VerificationOutcome outcome;
    outcome.relaxation_optimum = sol.objective;
    if (sol.objective < -options.margin) {
        outcome.status = VerifyStatus::Verified;
        return outcome;
    }
    if (options.run_falsifier) {
        if (auto witness = pgd_falsify(nets, spec, regions, options.attack)) {
            outcome.status = VerifyStatus::Falsified;
            outcome.witness = std::move(witness);
            return outcome;
        }
    }
    outcome.status = VerifyStatus::Unknown;
    return outcome;
}

double grid_oracle(std::span<const Network* const> nets, const Specification& spec,
                   std::span<const InputRegion> regions, int points_per_dim) {
    const std::size_t arity = static_cast<std::size_t>(spec_arity(spec));
    if (nets.size() != arity || regions.size() != arity) {
        throw ShapeError("grid_oracle: arity mismatch");
    }
    if (points_per_dim < 2) {
        throw ConfigError("grid_oracle: need at least 2 points per dimension");
    }
    Index total_dim = 0;
    for (const InputRegion& region : regions) {
        total_dim += region.center.size();
    }
    if (total_dim > 4) {
        throw ConfigError("grid_oracle: total input dimension exceeds 4");
    }

    // Per flattened dimension: the grid values (a single value for
    // degenerate intervals so delta=0 stays cheap).
    std::vector<std::vector<double>> axes;
    std::vector<std::pair<std::size_t, Index>> owner;  // (copy, coordinate)
    for (std::size_t c = 0; c < arity; ++c) {
        const Vector lo = regions[c].lower();
        const Vector hi = regions[c].upper();
        for (Index d = 0; d < lo.size(); ++d) {
            std::vector<double> axis;
            if (hi(d) - lo(d) < 1e-15) {
                axis.push_back(lo(d));
            } else {
                axis.reserve(static_cast<std::size_t>(points_per_dim));
                for (int i = 0; i < points_per_dim; ++i) {
                    axis.push_back(lo(d) + (hi(d) - lo(d)) * static_cast<double>(i) /
                                               (points_per_dim - 1));
                }
                axis.front() = lo(d);
                axis.back() = hi(d);
            }
            axes.push_back(std::move(axis));
            owner.emplace_back(c, d);
        }
    }

    // Evaluate in column batches: one forward_batch GEMM per copy, then a
    // vectorized quadratic path or a per-column generic path.
    const std::size_t chunk = 4096;
    std::vector<Matrix> xmat(arity), ymat(arity);
    for (std::size_t c = 0; c < arity; ++c) {
        xmat[c].resize(regions[c].center.size(), static_cast<Index>(chunk));
    }
    const auto* quad = std::get_if<QuadraticSpec>(&spec);

    std::vector<std::size_t> idx(axes.size(), 0);
    std::vector<Vector> xs(arity), ys(arity);
    for (std::size_t c = 0; c < arity; ++c) {
        xs[c] = regions[c].lower();
    }
    double best = -kInf;
    bool done = false;
    while (!done) {
        Index filled = 0;
        while (filled < static_cast<Index>(chunk) && !done) {
            for (std::size_t d = 0; d < axes.size(); ++d) {
                xmat[owner[d].first](owner[d].second, filled) = axes[d][idx[d]];
            }
            ++filled;
            std::size_t pos = axes.size();
            while (pos > 0 && ++idx[pos - 1] == axes[pos - 1].size()) {
                idx[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) done = true;
        }
        for (std::size_t c = 0; c < arity; ++c) {
            ymat[c] = forward_batch(*nets[c], xmat[c].leftCols(filled));
        }
        if (quad) {
            const Index n = xmat[0].rows();
            const Index m = ymat[0].rows();
            Matrix A(1 + n + m, filled);
            A.row(0).setOnes();
            A.middleRows(1, n) = xmat[0].leftCols(filled);
            A.middleRows(1 + n, m) = ymat[0];
            const Eigen::RowVectorXd vals = (quad->Q * A).cwiseProduct(A).colwise().sum();
            best = std::max(best, vals.maxCoeff());
        } else {
            for (Index col = 0; col < filled; ++col) {
                for (std::size_t c = 0; c < arity; ++c) {
                    xs[c] = xmat[c].col(col);
                    ys[c] = ymat[c].col(col);
                }
                best = std::max(best, eval_spec(spec, xs, ys));
            }
        }
    }
    return best;
}

namespace {

struct CellResult {
    bool verified = false;
    bool falsified = false;
    double lp_value = 0.0;
};

}  // namespace

SweepReport sweep(const Network& net, const std::vector<SweepItem>& items,
                  const SweepConfig& cfg) {
    if (items.empty()) {
        throw ConfigError("sweep: empty test set");
    }
    if (cfg.deltas.empty()) {
        throw ConfigError("sweep: no perturbation radii given");
    }
    const int jobs = cfg.jobs > 0
                         ? cfg.jobs
                         : std::max(1u, std::thread::hardware_concurrency());
    SweepReport report;
    for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
        const double delta = cfg.deltas[di];
        const auto start_time = std::chrono::steady_clock::now();
        std::vector<CellResult> results(items.size());
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> workers;
        std::mutex error_mutex;
        std::exception_ptr first_error;

        const auto worker = [&]() {
            while (true) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= items.size()) break;
                try {
                    const SweepItem& item = items[i];
                    const std::size_t arity =
                        static_cast<std::size_t>(spec_arity(item.spec));
                    if (item.centers.size() != arity) {
                        throw ShapeError("sweep: example arity does not match its spec");
                    }
                    std::vector<InputRegion> regions;
                    regions.reserve(arity);
                    for (const Vector& center : item.centers) {
                        regions.push_back(make_region(center, delta, cfg.clip_lo, cfg.clip_hi));
                    }
                    std::vector<const Network*> nets(arity, &net);

                    VerifyOptions opts = cfg.verify;
                    opts.run_falsifier = false;
                    opts.dump_lp_path.clear();
                    const VerificationOutcome lp_out = verify_example(nets, item.spec, regions, opts);

                    AttackConfig attack = cfg.verify.attack;
                    attack.seed = Rng::mix(cfg.seed + 0x9e3779b97f4a7c15ULL * (di + 1)) ^
                                  static_cast<std::uint64_t>(i);
                    const auto witness = pgd_falsify(nets, item.spec, regions, attack);

                    CellResult cell;
                    cell.verified = lp_out.status == VerifyStatus::Verified;
                    cell.falsified = witness.has_value();
                    cell.lp_value = lp_out.relaxation_optimum;
                    if (cell.verified && cell.falsified) {
                        throw InternalError("sweep: falsifier defeated a certified example");
                    }
                    results[i] = cell;
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        for (int t = 0; t < jobs; ++t) {
            workers.emplace_back(worker);
        }
        for (std::thread& t : workers) {
            t.join();
        }
        if (first_error) std::rethrow_exception(first_error);

        SweepRow row;
        row.delta = delta;
        row.n_examples = static_cast<long>(items.size());
        double lp_sum = 0.0;
        long verified = 0, unfalsified = 0;
        for (const CellResult& cell : results) {
            verified += cell.verified ? 1 : 0;
            unfalsified += cell.falsified ? 0 : 1;
            lp_sum += cell.lp_value;
        }
        row.verification_bound = static_cast<double>(verified) / static_cast<double>(items.size());
        row.adversarial_bound =
            static_cast<double>(unfalsified) / static_cast<double>(items.size());
        row.mean_lp_value = lp_sum / static_cast<double>(items.size());
        row.wall_ms = cfg.timing
                          ? std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start_time)
                                .count()
                          : 0;
        report.rows.push_back(row);
    }
    return report;
}

std::string report_to_csv(const SweepReport& report) {
    std::string csv = "delta,verification_bound,adversarial_bound,n_examples,mean_lp_value,wall_ms\n";
    char buf[160];
    for (const SweepRow& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%ld,%.6g,%ld\n", row.delta,
                      row.verification_bound, row.adversarial_bound, row.n_examples,
                      row.mean_lp_value, row.wall_ms);
        csv += buf;
    }
    return csv;
}

}  // namespace specverify
