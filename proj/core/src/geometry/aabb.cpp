#include "posekit/geometry/aabb.hpp"

#include <algorithm>

#include "posekit/error.hpp"

namespace posekit::geometry {

Aabb::Aabb(const Vec3 &min, const Vec3 &max) : min_(min), max_(max) {
    if (!min_.allFinite() || !max_.allFinite()) {
        throw Error(ErrorCode::InvalidParameter, "box corner is not finite");
    }
    if ((min_.array() > max_.array()).any()) {
        throw Error(ErrorCode::InvalidParameter, "box min exceeds max");
    }
}

double Aabb::volume() const {
    const Vec3 e = extent();
    return e.x() * e.y() * e.z();
}

bool Aabb::contains(const Vec3 &p, double tolerance) const {
    return ((p.array() >= min_.array() - tolerance).all() &&
            (p.array() <= max_.array() + tolerance).all());
}

double intersection_volume(const Aabb &a, const Aabb &b) {
    double volume = 1.0;
    for (int k = 0; k < 3; ++k) {
        const double lo = std::max(a.min()[k], b.min()[k]);
        const double hi = std::min(a.max()[k], b.max()[k]);
        if (hi <= lo) return 0.0;
        volume *= hi - lo;
    }
    return volume;
}

Aabb bounding_box(const PointCloud &cloud) {
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyCloud, "bounding box of an empty cloud");
    }
    Vec3 lo = cloud.point(0);
    Vec3 hi = cloud.point(0);
    for (const auto &p : cloud.points()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return Aabb(lo, hi);
}

}  // namespace posekit::geometry
