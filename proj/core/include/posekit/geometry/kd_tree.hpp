#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "posekit/geometry/point_cloud.hpp"

namespace posekit::geometry {

struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;

    friend bool operator==(const Neighbor &, const Neighbor &) = default;
};

// Exact kd-tree over k-dimensional points (k = 3 for clouds, 33 for FPFH).
//
// Splits on the dimension of widest spread at the median. Every query gives
// the same answer as a linear scan computing squared distances over the
// coordinates in order: pruning uses only comparisons that are monotone
// under floating-point rounding, so no candidate is ever lost. Ties in
// distance resolve to the lower index. Immutable after construction.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::span<const Vec3> points);
    // Row-major `count x dim` coordinates.
    KdTree(std::span<const double> data, std::size_t dim);

    std::size_t size() const noexcept { return size_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return size_ == 0; }

    // All points with distance <= radius, sorted by (distance, index).
    std::vector<Neighbor> radius_search(std::span<const double> query,
                                        double radius) const;
    std::vector<Neighbor> radius_search(const Vec3 &query, double radius) const;

    // Closest point. Throws EmptyIndex when the tree is empty.
    Neighbor nearest(std::span<const double> query) const;
    Neighbor nearest(const Vec3 &query) const;

    // Closest point with distance <= max_distance, if any.
    std::optional<Neighbor> nearest_within(const Vec3 &query,
                                           double max_distance) const;
    std::optional<Neighbor> nearest_within(std::span<const double> query,
                                           double max_distance) const;

private:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint32_t split_dim = 0;
        double split_value = 0.0;
    };

    static constexpr std::size_t kLeafSize = 8;

    void build(std::span<const double> data);
    std::int32_t build_node(std::uint32_t begin, std::uint32_t end,
                            std::span<const double> data);
    double squared_distance(std::span<const double> query,
                            std::size_t slot) const;
    void radius_recurse(std::int32_t node, std::span<const double> query,
                        double radius_sq, std::vector<Neighbor> &out) const;
    void nearest_recurse(std::int32_t node, std::span<const double> query,
                         double &best_sq, std::size_t &best_index) const;
    void check_query(std::span<const double> query) const;

    std::size_t size_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> coords_;       // permuted, row-major
    std::vector<std::uint32_t> order_; // slot -> original index
    std::vector<Node> nodes_;
};

}  // namespace posekit::geometry
