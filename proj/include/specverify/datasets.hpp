#pragma once

#include "specverify/physics.hpp"
#include "specverify/types.hpp"

#include <string>
#include <vector>

namespace specverify {

struct LabeledDataset {
    std::string name;
    std::vector<Vector> inputs;  // image pixels scaled into [0, 1]
    std::vector<int> labels;
};

// Big-endian IDX ingestion (magic 2051 for images, 2049 for labels); pixels
// scaled by 1/255.
LabeledDataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

// Reads the physics module's CSV schema; exact round trip of
// write_pendulum_csv output.
std::vector<StatePair> load_pendulum_csv(const std::string& path);

}  // namespace specverify
