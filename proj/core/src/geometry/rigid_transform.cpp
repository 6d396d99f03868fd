#include "posekit/geometry/rigid_transform.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "posekit/error.hpp"

namespace posekit::geometry {

bool is_rotation(const Mat3 &r, double tolerance) {
    if (!r.allFinite()) return false;
    const Mat3 gram = r.transpose() * r;
    if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tolerance) {
        return false;
    }
    return std::abs(r.determinant() - 1.0) <= tolerance;
}

Mat3 project_to_so3(const Mat3 &m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3 &u = svd.matrixU();
    const Mat3 &v = svd.matrixV();
    Mat3 d = Mat3::Identity();
    d(2, 2) = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    return u * d * v.transpose();
}

double rotation_distance(const Mat3 &a, const Mat3 &b) {
    const Mat3 rel = a.transpose() * b;
    // Rotation angle from the antisymmetric part and trace; atan2 stays
    // accurate near zero where acos((tr - 1) / 2) loses precision.
    const Vec3 axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0),
                    rel(1, 0) - rel(0, 1));
    const double s = 0.5 * axis.norm();
    const double c = 0.5 * (rel.trace() - 1.0);
    return std::atan2(s, c);
}

RigidTransform::RigidTransform(const Mat3 &rotation, const Vec3 &translation)
    : rotation_(rotation), translation_(translation) {
    if (!is_rotation(rotation_)) {
        throw Error(ErrorCode::InvalidParameter,
                    "rotation is not orthonormal with determinant +1");
    }
    if (!translation_.allFinite()) {
        throw Error(ErrorCode::InvalidParameter, "translation is not finite");
    }
}

RigidTransform RigidTransform::from_matrix(const Mat4 &m) {
    if (!m.allFinite()) {
        throw Error(ErrorCode::InvalidParameter, "transform is not finite");
    }
    return RigidTransform(project_to_so3(m.topLeftCorner<3, 3>()),
                          m.topRightCorner<3, 1>(), Unchecked{});
}

RigidTransform RigidTransform::from_axis_angle(const Vec3 &axis, double angle,
                                               const Vec3 &translation) {
    if (axis.norm() == 0.0) {
        throw Error(ErrorCode::InvalidParameter, "zero rotation axis");
    }
    const Mat3 r = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
    return RigidTransform(project_to_so3(r), translation, Unchecked{});
}

RigidTransform RigidTransform::from_twist(const Vec6 &twist) {
    const Vec3 omega = twist.head<3>();
    const double angle = omega.norm();
    Mat3 r = Mat3::Identity();
    if (angle > 0.0) {
        r = Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
    }
    return RigidTransform(project_to_so3(r), twist.tail<3>(), Unchecked{});
}

Mat4 RigidTransform::matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
}

RigidTransform RigidTransform::inverse() const {
    const Mat3 rt = rotation_.transpose();
    return RigidTransform(rt, -(rt * translation_), Unchecked{});
}

double RigidTransform::rotation_angle() const {
    return rotation_distance(Mat3::Identity(), rotation_);
}

PointCloud apply_transform(const PointCloud &cloud, const RigidTransform &t) {
    std::vector<Vec3> points(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        points[i] = t.apply(cloud.point(i));
    }
    std::vector<Vec3> normals;
    std::vector<std::uint8_t> mask;
    if (cloud.has_normals()) {
        normals.resize(cloud.size());
        mask.assign(cloud.normal_mask().begin(), cloud.normal_mask().end());
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            normals[i] = mask[i] ? t.rotate(cloud.normal(i)) : Vec3::Zero();
        }
    }
    std::vector<Vec3> colors(cloud.colors().begin(), cloud.colors().end());
    return PointCloud(std::move(points), std::move(normals), std::move(colors),
                      std::move(mask));
}

}  // namespace posekit::geometry
