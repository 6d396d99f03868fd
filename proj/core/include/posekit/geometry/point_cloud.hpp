#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace posekit::geometry {

using Vec3 = Eigen::Vector3d;

// Positions in meters with optional per-point normals and RGB colors.
//
// Normals carry a validity mask: a point whose neighbourhood was too small or
// rank deficient keeps a zero normal and `normal_valid(i) == false`. Every
// valid normal is unit length. Colors are in [0, 1]. The cloud is validated
// on construction and immutable afterwards.
class PointCloud {
public:
    PointCloud() = default;

    explicit PointCloud(std::vector<Vec3> points);

    // `normals` and `colors` may be empty. When normals are given without a
    // mask, a normal is valid iff it is non-zero (it is then renormalised).
    PointCloud(std::vector<Vec3> points,
               std::vector<Vec3> normals,
               std::vector<Vec3> colors = {},
               std::vector<std::uint8_t> normal_mask = {});

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }

    bool has_normals() const noexcept { return !normals_.empty(); }
    bool has_colors() const noexcept { return !colors_.empty(); }

    std::span<const Vec3> points() const noexcept { return points_; }
    std::span<const Vec3> normals() const noexcept { return normals_; }
    std::span<const Vec3> colors() const noexcept { return colors_; }
    std::span<const std::uint8_t> normal_mask() const noexcept {
        return normal_mask_;
    }

    const Vec3 &point(std::size_t i) const { return points_[i]; }
    const Vec3 &normal(std::size_t i) const { return normals_[i]; }
    bool normal_valid(std::size_t i) const {
        return has_normals() && normal_mask_[i] != 0;
    }
    std::size_t valid_normal_count() const noexcept;

    // Copy with normals replaced (mask semantics as in the constructor).
    PointCloud with_normals(std::vector<Vec3> normals,
                            std::vector<std::uint8_t> mask) const;
    PointCloud without_normals() const;

    // Copy whose coordinates, normals and colors are rounded through float32,
    // i.e. exactly representable in the on-disk formats.
    PointCloud quantized_to_float() const;

    // Copy restricted to the given indices, in that order.
    PointCloud select(std::span<const std::size_t> indices) const;

    friend bool operator==(const PointCloud &, const PointCloud &) = default;

private:
    void validate();

    std::vector<Vec3> points_;
    std::vector<Vec3> normals_;
    std::vector<Vec3> colors_;
    std::vector<std::uint8_t> normal_mask_;
};

}  // namespace posekit::geometry
