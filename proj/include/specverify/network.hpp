#pragma once

#include "specverify/types.hpp"

#include <string>
#include <variant>
#include <vector>

namespace specverify {

struct AffineLayer {
    Matrix weight;  // (out x in), row-major semantics in the file format
    Vector bias;    // length == weight.rows()
};

struct ReluLayer {};

using Layer = std::variant<AffineLayer, ReluLayer>;

// Feedforward net of affine and ReLU layers. Immutable after construction;
// share freely across threads.
struct Network {
    std::string name;
    int input_dim = 0;
    int output_dim = 0;
    std::vector<Layer> layers;
};

// Validates dimension chaining and finiteness; throws SchemaError/NumericError.
Network make_network(std::string name, int input_dim, std::vector<Layer> layers);

Vector forward(const Network& net, const Vector& x);

// Batched forward; samples are columns. Used by the grid oracle.
Matrix forward_batch(const Network& net, const Matrix& xs);

// Numerically stable softmax (max subtraction).
Vector softmax(const Vector& logits);

Network load_model(const std::string& path);
void save_model(const Network& net, const std::string& path);

Network parse_model_json(const std::string& text, const std::string& origin);
std::string model_to_json(const Network& net);

}  // namespace specverify
