#pragma once

#include <Eigen/Core>

#include "posekit/geometry/point_cloud.hpp"

namespace posekit::geometry {

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Proper rigid motion p -> R p + t.
//
// Constructed transforms are checked against the SO(3) invariants
// (RᵀR = I and det R = 1, both to 1e-9); `from_matrix` and
// `project_to_so3` are the ways in from approximately-orthogonal data.
class RigidTransform {
public:
    RigidTransform() = default;
    RigidTransform(const Mat3 &rotation, const Vec3 &translation);

    static RigidTransform identity() { return {}; }
    static RigidTransform from_matrix(const Mat4 &m);
    // Rotation from axis-angle (any non-unit axis is normalised).
    static RigidTransform from_axis_angle(const Vec3 &axis, double angle,
                                          const Vec3 &translation = Vec3::Zero());
    // Left-multiplicative update from a twist (ω, v): exp-map rotation of ω,
    // translation v.
    static RigidTransform from_twist(const Vec6 &twist);

    const Mat3 &rotation() const noexcept { return rotation_; }
    const Vec3 &translation() const noexcept { return translation_; }
    Mat4 matrix() const;

    RigidTransform inverse() const;
    Vec3 apply(const Vec3 &p) const { return rotation_ * p + translation_; }
    Vec3 rotate(const Vec3 &n) const { return rotation_ * n; }

    // Rotation angle (radians) of this transform's rotation part.
    double rotation_angle() const;

    friend RigidTransform operator*(const RigidTransform &a,
                                    const RigidTransform &b) {
        return RigidTransform(a.rotation_ * b.rotation_,
                              a.rotation_ * b.translation_ + a.translation_,
                              Unchecked{});
    }

    friend bool operator==(const RigidTransform &,
                           const RigidTransform &) = default;

private:
    struct Unchecked {};
    RigidTransform(const Mat3 &r, const Vec3 &t, Unchecked)
        : rotation_(r), translation_(t) {}

    Mat3 rotation_ = Mat3::Identity();
    Vec3 translation_ = Vec3::Zero();
};

// Nearest rotation matrix in Frobenius norm (polar decomposition via SVD).
Mat3 project_to_so3(const Mat3 &m);

bool is_rotation(const Mat3 &r, double tolerance = 1e-9);

// Angle (radians) between two rotations: angle of aᵀb.
double rotation_distance(const Mat3 &a, const Mat3 &b);

// Points p -> R p + t, normals n -> R n, colors untouched.
PointCloud apply_transform(const PointCloud &cloud, const RigidTransform &t);

}  // namespace posekit::geometry
