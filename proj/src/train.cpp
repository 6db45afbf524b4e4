#include "specverify/train.hpp"

#include "specverify/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace specverify {

Network init_mlp(const std::string& name, const std::vector<int>& dims, std::uint64_t seed) {
    if (dims.size() < 2) {
        throw ConfigError("init_mlp: need at least input and output dims");
    }
    Rng rng(Rng::mix(seed));
    std::vector<Layer> layers;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        const int fan_in = dims[k];
        const int fan_out = dims[k + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        AffineLayer affine;
        affine.weight.resize(fan_out, fan_in);
        affine.bias.resize(fan_out);
        for (Index r = 0; r < fan_out; ++r) {
            for (Index c = 0; c < fan_in; ++c) {
                affine.weight(r, c) = rng.uniform(-bound, bound);
            }
            affine.bias(r) = rng.uniform(-bound, bound);
        }
        layers.push_back(std::move(affine));
        if (k + 2 < dims.size()) {
            layers.push_back(ReluLayer{});
        }
    }
    return make_network(name, dims.front(), std::move(layers));
}

namespace {

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Coordinate-space energy and its gradient wrt (w, h, s*omega).
double energy_of(const Vector& coords, const EnergyParams& p) {
    const double omega = coords(2) / p.velocity_scale;
    return p.mass * p.gravity * p.length * coords(1) +
           0.5 * p.mass * p.length * p.length * omega * omega;
}

Vector energy_grad(const Vector& coords, const EnergyParams& p) {
    Vector g = Vector::Zero(3);
    g(1) = p.mass * p.gravity * p.length;
    g(2) = p.mass * p.length * p.length * coords(2) /
           (p.velocity_scale * p.velocity_scale);
    return g;
}

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

// Accumulates dW/db for one sample given dL/dy.
void backprop_params(const Network& net, const Trace& trace, Vector grad, ParamGrads& grads) {
    std::size_t affine_idx = grads.dW.size();
    for (std::size_t k = net.layers.size(); k-- > 0;) {
        if (const auto* affine = std::get_if<AffineLayer>(&net.layers[k])) {
            --affine_idx;
            grads.dW[affine_idx].noalias() += grad * trace.layer_inputs[k].transpose();
            grads.db[affine_idx] += grad;
            grad = (affine->weight.transpose() * grad).eval();
        } else {
            grad = (trace.layer_inputs[k].array() > 0.0).select(grad, 0.0);
        }
    }
}

Vector backprop_input_only(const Network& net, const Trace& trace, Vector grad) {
    for (std::size_t k = net.layers.size(); k-- > 0;) {
        if (const auto* affine = std::get_if<AffineLayer>(&net.layers[k])) {
            grad = (affine->weight.transpose() * grad).eval();
        } else {
            grad = (trace.layer_inputs[k].array() > 0.0).select(grad, 0.0);
        }
    }
    return grad;
}

ParamGrads zero_grads(const Network& net) {
    ParamGrads grads;
    for (const Layer& layer : net.layers) {
        if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
            grads.dW.push_back(Matrix::Zero(affine->weight.rows(), affine->weight.cols()));
            grads.db.push_back(Vector::Zero(affine->bias.size()));
        }
    }
    return grads;
}

// Loss value and dL/dy for one regression/classification sample.
double sample_loss(const Vector& x, const Trace& trace, const TrainingData& data,
                   std::size_t index, const LossConfig& cfg, Vector& grad_y) {
    const Vector& y = trace.output;
    switch (cfg.kind) {
        case LossKind::L1: {
            const Vector& target = data.targets[index];
            grad_y = (y - target).unaryExpr([](double v) { return sign0(v); });
            return (y - target).cwiseAbs().sum();
        }
        case LossKind::L1PlusEnergy: {
            const Vector& target = data.targets[index];
            const double e_pred = energy_of(y, cfg.energy);
            const double e_target = energy_of(target, cfg.energy);
            const double e_input = energy_of(x, cfg.energy);
            const Vector de = energy_grad(y, cfg.energy);
            grad_y = (y - target).unaryExpr([](double v) { return sign0(v); });
            double loss = (y - target).cwiseAbs().sum();
            loss += std::abs(e_pred - e_target);
            grad_y += sign0(e_pred - e_target) * de;
            const double gain = e_pred - e_input;
            loss += std::max(gain, 0.0);
            if (gain > 0.0) grad_y += de;
            return loss;
        }
        case LossKind::CrossEntropy:
        case LossKind::CrossEntropyAdversarial: {
            const int label = data.labels[index];
            const Vector p = softmax(y);
            grad_y = p;
            grad_y(label) -= 1.0;
            return -std::log(std::max(p(label), 1e-300));
        }
    }
    throw ConfigError("sample_loss: unknown loss kind");
}

Vector adversarial_input(const Network& net, const TrainingData& data, std::size_t index,
                         const LossConfig& cfg, Rng& rng) {
    const Vector& x0 = data.inputs[index];
    Vector lo = x0.array() - cfg.adv_delta;
    Vector hi = x0.array() + cfg.adv_delta;
    if (cfg.adv_clip_lo) lo = lo.cwiseMax(*cfg.adv_clip_lo);
    if (cfg.adv_clip_hi) hi = hi.cwiseMin(*cfg.adv_clip_hi);
    Vector x(x0.size());
    for (Index i = 0; i < x.size(); ++i) {
        x(i) = rng.uniform(lo(i), hi(i));
    }
    const double eta = cfg.adv_delta / 4.0;
    const int label = data.labels[index];
    for (int step = 0; step < cfg.adv_steps; ++step) {
        const Trace trace = traced_forward(net, x);
        Vector grad_y = softmax(trace.output);
        grad_y(label) -= 1.0;
        const Vector grad_x = backprop_input_only(net, trace, grad_y);
        x += eta * grad_x.unaryExpr([](double v) { return sign0(v); });
        x = x.cwiseMax(lo).cwiseMin(hi);
    }
    return x;
}

}  // namespace

std::pair<double, ParamGrads> loss_and_grad(const Network& net, const TrainingData& data,
                                            std::span<const int> batch_indices,
                                            const LossConfig& cfg, std::uint64_t batch_seed) {
    if (batch_indices.empty()) {
        throw ConfigError("loss_and_grad: empty batch");
    }
    ParamGrads grads = zero_grads(net);
    double total = 0.0;
    Rng rng(Rng::mix(batch_seed));
    for (int idx : batch_indices) {
        const std::size_t i = static_cast<std::size_t>(idx);
        Vector x = data.inputs[i];
        if (cfg.kind == LossKind::CrossEntropyAdversarial) {
            x = adversarial_input(net, data, i, cfg, rng);
        }
        const Trace trace = traced_forward(net, x);
        Vector grad_y;
        total += sample_loss(x, trace, data, i, cfg, grad_y);
        backprop_params(net, trace, std::move(grad_y), grads);
    }
    const double scale = 1.0 / static_cast<double>(batch_indices.size());
    total *= scale;
    for (Matrix& m : grads.dW) m *= scale;
    for (Vector& v : grads.db) v *= scale;
    return {total, std::move(grads)};
}

namespace {

double test_metric(const Network& net, const TrainingData& test_set, const LossConfig& cfg) {
    if (test_set.size() == 0) return 0.0;
    const bool classification =
        cfg.kind == LossKind::CrossEntropy || cfg.kind == LossKind::CrossEntropyAdversarial;
    double acc = 0.0;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        const Vector y = forward(net, test_set.inputs[i]);
        if (classification) {
            Index best;
            y.maxCoeff(&best);
            acc += (static_cast<int>(best) == test_set.labels[i]) ? 1.0 : 0.0;
        } else {
            acc += (y - test_set.targets[i]).cwiseAbs().sum();
        }
    }
    return acc / static_cast<double>(test_set.size());
}

}  // namespace

TrainResult train(const Network& init, const TrainingData& train_set,
                  const TrainingData& test_set, const LossConfig& cfg) {
    if (train_set.size() == 0) {
        throw ConfigError("train: empty training set");
    }
    const bool classification =
        cfg.kind == LossKind::CrossEntropy || cfg.kind == LossKind::CrossEntropyAdversarial;
    if (classification && train_set.labels.size() != train_set.size()) {
        throw ShapeError("train: classification loss needs labels");
    }
    if (!classification && train_set.targets.size() != train_set.size()) {
        throw ShapeError("train: regression loss needs targets");
    }
    if (cfg.learning_rate <= 0.0 || cfg.epochs < 0 || cfg.batch_size < 1) {
        throw ConfigError("train: invalid learning rate / epochs / batch size");
    }

    TrainResult result;
    result.net = init;
    ParamGrads velocity = zero_grads(init);
    std::vector<int> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(Rng::mix(cfg.seed + 0x5eedULL));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates from the seeded stream.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(shuffle_rng.uniform_int(
                0, static_cast<int>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t len =
                std::min(static_cast<std::size_t>(cfg.batch_size), order.size() - start);
            const std::uint64_t batch_seed =
                Rng::mix(cfg.seed) ^ (static_cast<std::uint64_t>(epoch) << 32 | batches);
            auto [loss, grads] = loss_and_grad(
                result.net, train_set, std::span<const int>(order.data() + start, len), cfg,
                batch_seed);
            if (!std::isfinite(loss)) {
                std::ostringstream msg;
                msg << "train: loss diverged at epoch " << epoch << ", batch " << batches;
                throw TrainingError(msg.str());
            }
            epoch_loss += loss;
            ++batches;
            std::size_t affine_idx = 0;
            for (Layer& layer : result.net.layers) {
                if (auto* affine = std::get_if<AffineLayer>(&layer)) {
                    velocity.dW[affine_idx] =
                        cfg.momentum * velocity.dW[affine_idx] - cfg.learning_rate * grads.dW[affine_idx];
                    velocity.db[affine_idx] =
                        cfg.momentum * velocity.db[affine_idx] - cfg.learning_rate * grads.db[affine_idx];
                    affine->weight += velocity.dW[affine_idx];
                    affine->bias += velocity.db[affine_idx];
                    ++affine_idx;
                }
            }
        }
        result.log.push_back({epoch, epoch_loss / static_cast<double>(std::max<std::size_t>(batches, 1)),
                              test_metric(result.net, test_set, cfg)});
    }
    return result;
}

void write_train_log_csv(const std::vector<TrainLogRow>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("write_train_log_csv: cannot open '" + path + "'");
    }
    out << "epoch,train_loss,test_metric\n";
    char buf[96];
    for (const TrainLogRow& row : log) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g\n", row.epoch, row.train_loss,
                      row.test_metric);
        out << buf;
    }
}

}  // namespace specverify
