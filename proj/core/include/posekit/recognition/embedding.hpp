#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "posekit/ingest/image.hpp"

namespace posekit::recognition {

inline constexpr std::size_t kDefaultEmbeddingDim = 1000;

// Fixed-length color feature vector. Throws InvalidParameter on construction
// from non-finite values.
class Embedding {
public:
    Embedding() = default;
    explicit Embedding(std::vector<float> values);

    std::size_t dim() const noexcept { return values_.size(); }
    const std::vector<float> &values() const noexcept { return values_; }
    float operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const Embedding &, const Embedding &) = default;

private:
    std::vector<float> values_;
};

// File format: "EMB1", u32 dim, dim x float32, all little-endian.
void write_embedding(std::ostream &out, const Embedding &e);
void write_embedding(const std::filesystem::path &path, const Embedding &e);
// Throws ParseError on a malformed or truncated file, DimensionMismatch when
// `expected_dim` is given and differs.
Embedding read_embedding(std::istream &in, std::optional<std::size_t> expected_dim = {});
Embedding load_external_embedding(const std::filesystem::path &path,
                                  std::optional<std::size_t> expected_dim = {});

// Stand-in for a CNN extractor: the crop is resized to 224x224 (nearest
// neighbour) and summarised by a joint RGB histogram on a 10x10x10 grid,
// L1-normalised. Bin of a pixel = 100 * (r*10/256) + 10 * (g*10/256) +
// b*10/256. Only dim = 1000 is supported. Throws EmptyImage.
Embedding extract_baseline_embedding(const ingest::RgbImage &crop,
                                     std::size_t dim = kDefaultEmbeddingDim);

}  // namespace posekit::recognition
