#include "posekit/registration/icp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include "posekit/error.hpp"

namespace posekit::registration {

namespace {

using geometry::Mat3;
using geometry::Vec3;
using geometry::Vec6;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct Matching {
    std::vector<PlaneCorrespondence> pairs;
    double fitness = 0.0;
    double rmse = 0.0;
};

class ValidTargetIndex {
public:
    explicit ValidTargetIndex(const PointCloud &target) {
        std::vector<Vec3> pts;
        for (std::size_t i = 0; i < target.size(); ++i) {
            if (target.normal_valid(i)) {
                slots_.push_back(i);
                pts.push_back(target.point(i));
            }
        }
        tree_ = geometry::KdTree(pts);
    }

    Matching match(const PointCloud &source, const PointCloud &target,
                   const RigidTransform &t, double max_distance) const {
        Matching m;
        double sse = 0.0;
        for (std::size_t i = 0; i < source.size(); ++i) {
            const Vec3 p = t.apply(source.point(i));
            const auto nn = tree_.nearest_within(p, max_distance);
            if (!nn) continue;
            const std::size_t j = slots_[nn->index];
            m.pairs.push_back({i, j});
            sse += (p - target.point(j)).squaredNorm();
        }
        if (!m.pairs.empty()) {
            m.fitness = static_cast<double>(m.pairs.size()) /
                        static_cast<double>(source.size());
            m.rmse = std::sqrt(sse / static_cast<double>(m.pairs.size()));
        }
        return m;
    }

private:
    std::vector<std::size_t> slots_;
    geometry::KdTree tree_;
};

double relative_change(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

Mat3 skew(const Vec3 &w) {
    Mat3 s;
    s << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
    return s;
}

RigidTransform small_angle_update(const Vec6 &x) {
    const Mat3 r = geometry::project_to_so3(Mat3::Identity() + skew(x.head<3>()));
    return RigidTransform(r, x.tail<3>());
}

}  // namespace

double point_to_plane_objective(const PointCloud &source, const PointCloud &target,
                                const std::vector<PlaneCorrespondence> &pairs,
                                const RigidTransform &transform) {
    double e = 0.0;
    for (const auto &c : pairs) {
        const double r = target.normal(c.target).dot(transform.apply(source.point(c.source)) -
                                                     target.point(c.target));
        e += r * r;
    }
    return e;
}

Vec6 point_to_plane_gradient(const PointCloud &source, const PointCloud &target,
                             const std::vector<PlaneCorrespondence> &pairs,
                             const RigidTransform &transform) {
    Vec6 g = Vec6::Zero();
    for (const auto &c : pairs) {
        const Vec3 p = transform.apply(source.point(c.source));
        const Vec3 &n = target.normal(c.target);
        const double r = n.dot(p - target.point(c.target));
        Vec6 j;
        j.head<3>() = p.cross(n);
        j.tail<3>() = n;
        g += 2.0 * r * j;
    }
    return g;
}

IcpResult icp_point_to_plane(const PointCloud &source, const PointCloud &target,
                             const RigidTransform &init, const IcpParams &params) {
    if (!(params.max_correspondence_distance > 0.0)) {
        throw Error(ErrorCode::InvalidParameter,
                    "ICP max correspondence distance must be positive");
    }
    if (!target.has_normals()) {
        throw Error(ErrorCode::InvalidParameter, "point-to-plane ICP needs target normals");
    }
    const ValidTargetIndex index(target);
    const double max_dist = params.max_correspondence_distance;

    IcpResult result;
    result.transform = init;
    Matching current = index.match(source, target, init, max_dist);
    if (current.pairs.empty()) {
        result.no_overlap = true;
        return result;
    }
    result.fitness = current.fitness;
    result.inlier_rmse = current.rmse;

    RigidTransform transform = init;
    for (std::size_t it = 0; it < params.max_iterations; ++it) {
        Mat6 jtj = Mat6::Zero();
        Vec6 jtr = Vec6::Zero();
        for (const auto &c : current.pairs) {
            const Vec3 p = transform.apply(source.point(c.source));
            const Vec3 &n = target.normal(c.target);
            const double r = n.dot(p - target.point(c.target));
            Vec6 j;
            j.head<3>() = p.cross(n);
            j.tail<3>() = n;
            jtj.noalias() += j * j.transpose();
            jtr.noalias() += r * j;
        }
        const Eigen::LDLT<Mat6> ldlt(jtj);
        Vec6 step = Vec6::Zero();
        if (ldlt.info() == Eigen::Success) step = -ldlt.solve(jtr);
        if (!step.allFinite()) step.setZero();

        const double before =
                point_to_plane_objective(source, target, current.pairs, transform);
        double after = before;
        double scale = 1.0;
        for (int halving = 0; halving < 20; ++halving, scale *= 0.5) {
            const RigidTransform candidate = small_angle_update(scale * step) * transform;
            const double e =
                    point_to_plane_objective(source, target, current.pairs, candidate);
            if (e <= before) {
                transform = RigidTransform::from_matrix(candidate.matrix());
                after = point_to_plane_objective(source, target, current.pairs, transform);
                if (after > before) {
                    // Re-orthonormalisation nudged it up; keep the unprojected pose.
                    transform = candidate;
                    after = e;
                }
                break;
            }
        }
        result.trace.push_back({before, after, current.pairs.size()});
        result.iterations_run = it + 1;

        Matching next = index.match(source, target, transform, max_dist);
        if (next.pairs.empty()) {
            result.transform = transform;
            result.fitness = 0.0;
            result.inlier_rmse = 0.0;
            return result;
        }
        const bool converged = relative_change(next.fitness, current.fitness) <
                                       params.relative_tolerance &&
                               relative_change(next.rmse, current.rmse) <
                                       params.relative_tolerance;
        current = std::move(next);
        if (converged) {
            result.converged = true;
            break;
        }
    }
    result.transform = transform;
    result.fitness = current.fitness;
    result.inlier_rmse = current.rmse;
    return result;
}

RegistrationScore compute_registration_rmse(const PointCloud &source,
                                            const PointCloud &target,
                                            const RigidTransform &transform,
                                            double max_distance) {
    if (!(max_distance > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "max distance must be positive");
    }
    RegistrationScore score;
    if (source.empty() || target.empty()) {
        score.no_inliers = true;
        return score;
    }
    std::vector<Vec3> moved(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) moved[i] = transform.apply(source.point(i));
    const geometry::KdTree tree(moved);
    double sse = 0.0;
    for (const auto &q : target.points()) {
        const auto nn = tree.nearest_within(q, max_distance);
        if (!nn) continue;
        ++score.inlier_count;
        sse += nn->distance * nn->distance;
    }
    if (score.inlier_count == 0) {
        score.no_inliers = true;
        return score;
    }
    score.rmse = std::sqrt(sse / static_cast<double>(score.inlier_count));
    score.inlier_ratio =
            static_cast<double>(score.inlier_count) / static_cast<double>(target.size());
    return score;
}

}  // namespace posekit::registration
