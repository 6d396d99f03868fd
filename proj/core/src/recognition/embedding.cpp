#include "posekit/recognition/embedding.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <opencv2/imgproc.hpp>

#include "posekit/error.hpp"

namespace posekit::recognition {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr int kInputSide = 224;

// Host is little-endian (checked at compile time below), so raw copies match
// the on-disk byte order.
static_assert(std::endian::native == std::endian::little);

}  // namespace

Embedding::Embedding(std::vector<float> values) : values_(std::move(values)) {
    for (float v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParameter, "non-finite embedding value");
    }
}

void write_embedding(std::ostream &out, const Embedding &e) {
    const auto dim = static_cast<std::uint32_t>(e.dim());
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char *>(&dim), 4);
    out.write(reinterpret_cast<const char *>(e.values().data()),
              static_cast<std::streamsize>(sizeof(float) * e.dim()));
    if (!out) throw Error(ErrorCode::IoError, "embedding write failed");
}

void write_embedding(const std::filesystem::path &path, const Embedding &e) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    write_embedding(out, e);
}

Embedding read_embedding(std::istream &in, std::optional<std::size_t> expected_dim) {
    char magic[4];
    std::uint32_t dim = 0;
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw Error(ErrorCode::ParseError, "not an embedding file");
    }
    if (!in.read(reinterpret_cast<char *>(&dim), 4)) {
        throw Error(ErrorCode::ParseError, "truncated embedding header");
    }
    if (expected_dim && dim != *expected_dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "embedding has dim " + std::to_string(dim) + ", expected " +
                            std::to_string(*expected_dim));
    }
    std::vector<float> values(dim);
    if (!in.read(reinterpret_cast<char *>(values.data()),
                 static_cast<std::streamsize>(sizeof(float) * dim))) {
        throw Error(ErrorCode::ParseError, "truncated embedding data");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorCode::ParseError, "trailing bytes after embedding");
    }
    try {
        return Embedding(std::move(values));
    } catch (const Error &) {
        throw Error(ErrorCode::ParseError, "embedding holds non-finite values");
    }
}

Embedding load_external_embedding(const std::filesystem::path &path,
                                  std::optional<std::size_t> expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_embedding(in, expected_dim);
}

Embedding extract_baseline_embedding(const ingest::RgbImage &crop, std::size_t dim) {
    if (dim != kDefaultEmbeddingDim) {
        throw Error(ErrorCode::InvalidParameter, "baseline extractor only produces 1000 bins");
    }
    if (crop.empty() || crop.width <= 0 || crop.height <= 0) {
        throw Error(ErrorCode::EmptyImage, "empty crop");
    }
    const cv::Mat src(crop.height, crop.width, CV_8UC3,
                      const_cast<std::uint8_t *>(crop.pixels.data()));
    cv::Mat resized;
    cv::resize(src, resized, cv::Size(kInputSide, kInputSide), 0.0, 0.0, cv::INTER_NEAREST);

    std::array<std::uint32_t, kDefaultEmbeddingDim> counts{};
    for (int v = 0; v < resized.rows; ++v) {
        const std::uint8_t *row = resized.ptr<std::uint8_t>(v);
        for (int u = 0; u < resized.cols; ++u) {
            const unsigned r = row[3 * u] * 10u / 256u;
            const unsigned g = row[3 * u + 1] * 10u / 256u;
            const unsigned b = row[3 * u + 2] * 10u / 256u;
            ++counts[100 * r + 10 * g + b];
        }
    }
    const double total = static_cast<double>(kInputSide) * kInputSide;
    std::vector<float> values(kDefaultEmbeddingDim);
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = static_cast<float>(counts[i] / total);
    }
    return Embedding(std::move(values));
}

}  // namespace posekit::recognition
