#pragma once

#include "specverify/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace specverify {

// Deterministic 28x28 grayscale digit corpus rendered from stroke skeletons
// with per-sample jitter (rotation, scale, shift, thickness, noise). Serves
// as the bundled stand-in image dataset; written in bit-exact IDX format so
// it flows through the ordinary idx ingestion path.
struct DigitCorpus {
    std::vector<Vector> images;  // 784 pixels in [0, 1]
    std::vector<int> labels;
};

DigitCorpus generate_digits(int count, std::uint64_t seed);

// IDX writers (big-endian; magic 2051 / 2049). Pixels quantized to bytes.
void write_idx_images(const std::vector<Vector>& images, const std::string& path);
void write_idx_labels(const std::vector<int>& labels, const std::string& path);

}  // namespace specverify
