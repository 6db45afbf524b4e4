#pragma once

#include "specverify/network.hpp"
#include "specverify/specs.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace specverify {

enum class LossKind {
    L1,                       // |f(x) - target|_1
    L1PlusEnergy,             // + |E(f(x)) - E(target)| + relu(E(f(x)) - E(x))
    CrossEntropy,             // -log softmax(f(x))[label]
    CrossEntropyAdversarial,  // cross entropy at a PGD point inside the delta box
};

struct LossConfig {
    LossKind kind = LossKind::L1;
    EnergyParams energy;       // used by L1PlusEnergy
    double adv_delta = 0.1;    // used by CrossEntropyAdversarial (input units)
    int adv_steps = 7;
    std::optional<double> adv_clip_lo = 0.0;
    std::optional<double> adv_clip_hi = 1.0;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int epochs = 10;
    int batch_size = 32;
    std::uint64_t seed = 0;
};

// Either targets (regression) or labels (classification) is populated.
struct TrainingData {
    std::vector<Vector> inputs;
    std::vector<Vector> targets;
    std::vector<int> labels;

    std::size_t size() const { return inputs.size(); }
};

// Gradients aligned with the affine layers of the network, in layer order.
struct ParamGrads {
    std::vector<Matrix> dW;
    std::vector<Vector> db;
};

struct TrainLogRow {
    int epoch;
    double train_loss;
    double test_metric;  // mean l1 for regression losses, accuracy for CE
};

struct TrainResult {
    Network net;
    std::vector<TrainLogRow> log;
};

// Fully connected ReLU MLP with uniform +-1/sqrt(fan_in) init.
Network init_mlp(const std::string& name, const std::vector<int>& dims, std::uint64_t seed);

// Mean loss and parameter gradients over the batch (reverse-mode).
std::pair<double, ParamGrads> loss_and_grad(const Network& net, const TrainingData& data,
                                            std::span<const int> batch_indices,
                                            const LossConfig& cfg, std::uint64_t batch_seed = 0);

// SGD with momentum; deterministic for a fixed seed. Throws TrainingError
// with epoch context when the loss diverges.
TrainResult train(const Network& init, const TrainingData& train_set,
                  const TrainingData& test_set, const LossConfig& cfg);

void write_train_log_csv(const std::vector<TrainLogRow>& log, const std::string& path);

}  // namespace specverify
