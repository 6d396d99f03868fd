#pragma once

#include <cstddef>
#include <vector>

#include "posekit/geometry/kd_tree.hpp"
#include "posekit/geometry/rigid_transform.hpp"

namespace posekit::registration {

using geometry::PointCloud;
using geometry::RigidTransform;

struct IcpParams {
    double max_correspondence_distance = 0.01;  // meters
    std::size_t max_iterations = 30;
    double relative_tolerance = 1e-6;
};

// Point-to-plane objective over a fixed correspondence set, before and after
// one 6x6 solve.
struct IcpStep {
    double objective_before = 0.0;
    double objective_after = 0.0;
    std::size_t correspondences = 0;
};

struct IcpResult {
    RigidTransform transform;  // full source -> target pose, init included
    double fitness = 0.0;      // matched source points / source points
    double inlier_rmse = 0.0;  // point-to-point over matched pairs
    std::size_t iterations_run = 0;
    bool converged = false;
    // Soft failure: nothing within range at the initial pose. The result
    // then carries the initial transform and fitness 0.
    bool no_overlap = false;
    std::vector<IcpStep> trace;
};

// Pairs (source index, target index) with the target restricted to points
// with valid normals.
struct PlaneCorrespondence {
    std::size_t source = 0;
    std::size_t target = 0;
};

// Point-to-plane ICP. Each iteration pairs every transformed source point
// with its nearest valid-normal target point within range, solves the
// small-angle linearisation of Σ (nᵀ(R p + t - q))², and applies the update
// with its rotation projected onto SO(3). A step that would raise the
// objective over the current pairs is halved until it does not. Stops when
// fitness and rmse both change by less than `relative_tolerance` (relative)
// or after `max_iterations`.
IcpResult icp_point_to_plane(const PointCloud &source, const PointCloud &target,
                             const RigidTransform &init, const IcpParams &params = {});

// Σ (n_qᵀ(T p - q))² over the given pairs.
double point_to_plane_objective(const PointCloud &source, const PointCloud &target,
                                const std::vector<PlaneCorrespondence> &pairs,
                                const RigidTransform &transform);

// Gradient of point_to_plane_objective with respect to a left twist
// (ω, v) at zero, from the normal equations: 2 Jᵀr.
geometry::Vec6 point_to_plane_gradient(const PointCloud &source, const PointCloud &target,
                                       const std::vector<PlaneCorrespondence> &pairs,
                                       const RigidTransform &transform);

struct RegistrationScore {
    double rmse = 0.0;
    double inlier_ratio = 0.0;
    std::size_t inlier_count = 0;
    bool no_inliers = false;
};

// Quality of a pose: every target point is paired with its nearest
// transformed source point; pairs within `max_distance` are inliers.
// inlier_ratio = inliers / target size, rmse over inlier pairs. Zero inliers
// give (0, 0) with `no_inliers` set.
RegistrationScore compute_registration_rmse(const PointCloud &source,
                                            const PointCloud &target,
                                            const RigidTransform &transform,
                                            double max_distance);

}  // namespace posekit::registration
