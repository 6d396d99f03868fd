#pragma once

#include "posekit/geometry/point_cloud.hpp"

namespace posekit::geometry {

// Axis-aligned box, min <= max componentwise.
class Aabb {
public:
    Aabb() = default;
    Aabb(const Vec3 &min, const Vec3 &max);

    const Vec3 &min() const noexcept { return min_; }
    const Vec3 &max() const noexcept { return max_; }

    Vec3 extent() const { return max_ - min_; }
    double volume() const;
    double diagonal() const { return extent().norm(); }
    bool contains(const Vec3 &p, double tolerance = 0.0) const;

    friend bool operator==(const Aabb &, const Aabb &) = default;

private:
    Vec3 min_ = Vec3::Zero();
    Vec3 max_ = Vec3::Zero();
};

// Volume of the overlap of two boxes (0 when disjoint or touching).
double intersection_volume(const Aabb &a, const Aabb &b);

// Componentwise min/max of the points. Throws EmptyCloud on an empty cloud.
Aabb bounding_box(const PointCloud &cloud);

}  // namespace posekit::geometry
