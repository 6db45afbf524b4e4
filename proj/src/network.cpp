#include "specverify/network.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace specverify {

using nlohmann::json;

namespace {

int layer_out_dim(const Layer& layer, int in_dim) {
    if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
        return static_cast<int>(affine->weight.rows());
    }
    return in_dim;  // ReLU preserves dimension
}

}  // namespace

Network make_network(std::string name, int input_dim, std::vector<Layer> layers) {
    if (input_dim <= 0) {
        throw SchemaError("network '" + name + "': input_dim must be positive");
    }
    int dim = input_dim;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        if (const auto* affine = std::get_if<AffineLayer>(&layers[k])) {
            if (affine->weight.cols() != dim) {
                std::ostringstream msg;
                msg << "network '" << name << "': layer " << k << " expects input of dim "
                    << affine->weight.cols() << " but gets " << dim;
                throw SchemaError(msg.str());
            }
            if (affine->bias.size() != affine->weight.rows()) {
                std::ostringstream msg;
                msg << "network '" << name << "': layer " << k << " bias length "
                    << affine->bias.size() << " != weight rows " << affine->weight.rows();
                throw SchemaError(msg.str());
            }
            if (!affine->weight.allFinite() || !affine->bias.allFinite()) {
                std::ostringstream msg;
                msg << "network '" << name << "': layer " << k << " has non-finite parameters";
                throw NumericError(msg.str());
            }
        }
        dim = layer_out_dim(layers[k], dim);
    }
    Network net;
    net.name = std::move(name);
    net.input_dim = input_dim;
    net.output_dim = dim;
    net.layers = std::move(layers);
    return net;
}

Vector forward(const Network& net, const Vector& x) {
    if (x.size() != net.input_dim) {
        std::ostringstream msg;
        msg << "forward: input has dim " << x.size() << ", network '" << net.name
            << "' expects " << net.input_dim;
        throw ShapeError(msg.str());
    }
    if (!x.allFinite()) {
        throw NumericError("forward: non-finite input");
    }
    Vector h = x;
    for (const Layer& layer : net.layers) {
        if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
            h = (affine->weight * h + affine->bias).eval();
        } else {
            h = h.cwiseMax(0.0);
        }
        if (!h.allFinite()) {
            throw NumericError("forward: non-finite intermediate activation");
        }
    }
    return h;
}

Matrix forward_batch(const Network& net, const Matrix& xs) {
    if (xs.rows() != net.input_dim) {
        throw ShapeError("forward_batch: sample rows do not match network input_dim");
    }
    Matrix h = xs;
    for (const Layer& layer : net.layers) {
        if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
            h = (affine->weight * h).colwise() + affine->bias;
        } else {
            h = h.cwiseMax(0.0);
        }
    }
    return h;
}

Vector softmax(const Vector& logits) {
    if (logits.size() == 0) {
        throw ShapeError("softmax: empty logit vector");
    }
    const double shift = logits.maxCoeff();
    Vector e = (logits.array() - shift).exp();
    return e / e.sum();
}

namespace {

Layer layer_from_json(const json& j, std::size_t k, const std::string& origin) {
    const auto type = j.value("type", std::string{});
    if (type == "relu") {
        return ReluLayer{};
    }
    if (type != "affine") {
        std::ostringstream msg;
        msg << origin << ": layer " << k << " has unknown type '" << type << "'";
        throw SchemaError(msg.str());
    }
    if (!j.contains("weight") || !j.contains("bias")) {
        std::ostringstream msg;
        msg << origin << ": layer " << k << " missing weight/bias";
        throw SchemaError(msg.str());
    }
    const json& w = j.at("weight");
    const json& b = j.at("bias");
    if (!w.is_array() || w.empty() || !w.front().is_array()) {
        std::ostringstream msg;
        msg << origin << ": layer " << k << " weight must be a non-empty nested array";
        throw SchemaError(msg.str());
    }
    const std::size_t rows = w.size();
    const std::size_t cols = w.front().size();
    AffineLayer affine;
    affine.weight.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!w[r].is_array() || w[r].size() != cols) {
            std::ostringstream msg;
            msg << origin << ": layer " << k << " weight row " << r
                << " has length " << w[r].size() << ", expected " << cols;
            throw SchemaError(msg.str());
        }
        for (std::size_t c = 0; c < cols; ++c) {
            affine.weight(static_cast<Index>(r), static_cast<Index>(c)) = w[r][c].get<double>();
        }
    }
    if (!b.is_array() || b.size() != rows) {
        std::ostringstream msg;
        msg << origin << ": layer " << k << " bias length " << b.size()
            << " != weight rows " << rows;
        throw SchemaError(msg.str());
    }
    affine.bias.resize(static_cast<Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        affine.bias(static_cast<Index>(r)) = b[r].get<double>();
    }
    return affine;
}

}  // namespace

Network parse_model_json(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("input_dim") || !doc.contains("layers")) {
        throw SchemaError(origin + ": model must be an object with input_dim and layers");
    }
    std::vector<Layer> layers;
    const json& jlayers = doc.at("layers");
    if (!jlayers.is_array()) {
        throw SchemaError(origin + ": layers must be an array");
    }
    layers.reserve(jlayers.size());
    for (std::size_t k = 0; k < jlayers.size(); ++k) {
        layers.push_back(layer_from_json(jlayers[k], k, origin));
    }
    return make_network(doc.value("name", std::string{}), doc.at("input_dim").get<int>(),
                        std::move(layers));
}

std::string model_to_json(const Network& net) {
    json doc;
    doc["name"] = net.name;
    doc["input_dim"] = net.input_dim;
    json jlayers = json::array();
    for (const Layer& layer : net.layers) {
        if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
            json jw = json::array();
            for (Index r = 0; r < affine->weight.rows(); ++r) {
                json row = json::array();
                for (Index c = 0; c < affine->weight.cols(); ++c) {
                    row.push_back(affine->weight(r, c));
                }
                jw.push_back(std::move(row));
            }
            json jb = json::array();
            for (Index r = 0; r < affine->bias.size(); ++r) {
                jb.push_back(affine->bias(r));
            }
            jlayers.push_back({{"type", "affine"}, {"weight", std::move(jw)}, {"bias", std::move(jb)}});
        } else {
            jlayers.push_back({{"type", "relu"}});
        }
    }
    doc["layers"] = std::move(jlayers);
    return doc.dump(2);
}

Network load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("load_model: cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str(), path);
}

void save_model(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("save_model: cannot open '" + path + "' for writing");
    }
    out << model_to_json(net) << '\n';
    if (!out) {
        throw IoError("save_model: write to '" + path + "' failed");
    }
}

}  // namespace specverify
