#include "specverify/datasets.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace specverify {

namespace {

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) {
        throw IoError(path + ": truncated file");
    }
    return (static_cast<std::uint32_t>(bytes[0]) << 24) |
           (static_cast<std::uint32_t>(bytes[1]) << 16) |
           (static_cast<std::uint32_t>(bytes[2]) << 8) | static_cast<std::uint32_t>(bytes[3]);
}

constexpr std::uint32_t kImagesMagic = 2051;
constexpr std::uint32_t kLabelsMagic = 2049;

}  // namespace

LabeledDataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) {
        throw IoError("load_mnist_idx: cannot open '" + images_path + "'");
    }
    const std::uint32_t img_magic = read_u32_be(img, images_path);
    if (img_magic != kImagesMagic) {
        std::ostringstream msg;
        msg << images_path << ": bad magic " << img_magic << ", expected " << kImagesMagic;
        throw FormatError(msg.str());
    }
    const std::uint32_t count = read_u32_be(img, images_path);
    const std::uint32_t rows = read_u32_be(img, images_path);
    const std::uint32_t cols = read_u32_be(img, images_path);
    if (count == 0 || rows == 0 || cols == 0) {
        throw FormatError(images_path + ": empty image file");
    }

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) {
        throw IoError("load_mnist_idx: cannot open '" + labels_path + "'");
    }
    const std::uint32_t lab_magic = read_u32_be(lab, labels_path);
    if (lab_magic != kLabelsMagic) {
        std::ostringstream msg;
        msg << labels_path << ": bad magic " << lab_magic << ", expected " << kLabelsMagic;
        throw FormatError(msg.str());
    }
    const std::uint32_t lab_count = read_u32_be(lab, labels_path);
    if (lab_count != count) {
        std::ostringstream msg;
        msg << "load_mnist_idx: " << count << " images but " << lab_count << " labels";
        throw ConsistencyError(msg.str());
    }

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    std::vector<unsigned char> raw(pixels);
    LabeledDataset ds;
    ds.name = images_path;
    ds.inputs.reserve(count);
    ds.labels.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        img.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(pixels));
        if (!img) {
            throw IoError(images_path + ": truncated pixel data");
        }
        Vector v(static_cast<Index>(pixels));
        for (std::size_t px = 0; px < pixels; ++px) {
            v(static_cast<Index>(px)) = static_cast<double>(raw[px]) / 255.0;
        }
        ds.inputs.push_back(std::move(v));
        char label = 0;
        lab.read(&label, 1);
        if (!lab) {
            throw IoError(labels_path + ": truncated label data");
        }
        ds.labels.push_back(static_cast<int>(static_cast<unsigned char>(label)));
    }
    return ds;
}

std::vector<StatePair> load_pendulum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("load_pendulum_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(path + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kPendulumCsvHeader) {
        throw FormatError(path + ": header '" + line + "' does not match '" +
                          kPendulumCsvHeader + "'");
    }
    std::vector<StatePair> pairs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double values[6];
        const char* ptr = line.data();
        const char* end = line.data() + line.size();
        for (int i = 0; i < 6; ++i) {
            const auto [next, ec] = std::from_chars(ptr, end, values[i]);
            if (ec != std::errc{}) {
                std::ostringstream msg;
                msg << path << ":" << lineno << ": non-numeric cell " << i;
                throw ParseError(msg.str());
            }
            ptr = next;
            if (i < 5) {
                if (ptr >= end || *ptr != ',') {
                    std::ostringstream msg;
                    msg << path << ":" << lineno << ": expected 6 comma-separated columns";
                    throw ParseError(msg.str());
                }
                ++ptr;
            }
        }
        if (ptr != end) {
            std::ostringstream msg;
            msg << path << ":" << lineno << ": trailing characters";
            throw ParseError(msg.str());
        }
        StatePair pair;
        pair.input = Eigen::Map<const Vector>(values, 3);
        pair.target = Eigen::Map<const Vector>(values + 3, 3);
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace specverify
