#include "posekit/features/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "posekit/error.hpp"

namespace posekit::features {

static_assert(std::endian::native == std::endian::little);

namespace {

constexpr char kMagic[4] = {'F', 'P', 'F', 'H'};

template <typename T>
void put(std::ostream &out, T value) {
    out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T get(std::istream &in) {
    T value{};
    if (!in.read(reinterpret_cast<char *>(&value), sizeof(T))) {
        throw Error(ErrorCode::ParseError, "truncated feature file");
    }
    return value;
}

}  // namespace

void write_features(std::ostream &out, const FeatureSet &features) {
    if (features.keypoint_indices.size() != features.descriptors.size()) {
        throw Error(ErrorCode::InvalidParameter,
                    "feature set index/descriptor length mismatch");
    }
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kFeatureFileVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(features.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(kFpfhDim));
    for (std::size_t i = 0; i < features.size(); ++i) {
        put<std::uint32_t>(out, features.keypoint_indices[i]);
        out.write(reinterpret_cast<const char *>(features.descriptors[i].data()),
                  sizeof(float) * kFpfhDim);
    }
    if (!out) throw Error(ErrorCode::IoError, "failed writing feature stream");
}

FeatureSet read_features(std::istream &in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw Error(ErrorCode::ParseError, "missing FPFH magic");
    }
    const auto version = get<std::uint32_t>(in);
    if (version != kFeatureFileVersion) {
        throw Error(ErrorCode::ParseError,
                    "unsupported feature file version " + std::to_string(version));
    }
    const auto count = get<std::uint32_t>(in);
    const auto dim = get<std::uint32_t>(in);
    if (dim != kFpfhDim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "feature dimension " + std::to_string(dim) + ", expected 33");
    }
    FeatureSet fs;
    fs.keypoint_indices.resize(count);
    fs.descriptors.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        fs.keypoint_indices[i] = get<std::uint32_t>(in);
        if (!in.read(reinterpret_cast<char *>(fs.descriptors[i].data()),
                     sizeof(float) * kFpfhDim)) {
            throw Error(ErrorCode::ParseError, "truncated feature file");
        }
    }
    return fs;
}

void write_features(const std::filesystem::path &path, const FeatureSet &features) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    write_features(out, features);
}

FeatureSet read_features(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_features(in);
}

}  // namespace posekit::features
