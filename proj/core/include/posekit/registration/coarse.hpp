#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "posekit/registration/correspondence.hpp"

namespace posekit::registration {

enum class CoarseMethod { Ransac, Fgr };

std::string_view to_string(CoarseMethod method) noexcept;
CoarseMethod parse_coarse_method(std::string_view name);

struct CoarseParams {
    // Shared
    double inlier_threshold = 0.01;  // meters; inliers are strictly closer
    // Matching rule for the candidate set that RANSAC samples from and that
    // both methods are scored on. FGR always optimises over mutual matches.
    bool mutual_matching = false;
    std::uint64_t seed = 0;

    // RANSAC
    std::size_t max_iterations = 4'000'000;
    // Early exit once this many consecutive validated hypotheses fail to beat
    // the incumbent.
    std::size_t validation_steps = 500;
    double edge_length_ratio = 0.9;
    std::size_t threads = 1;

    // FGR
    std::size_t fgr_iterations = 100;
    double fgr_tuple_ratio = 0.9;
    std::size_t fgr_tuple_count = 1000;
    double fgr_mu_division = 1.4;
};

// One FGR Gauss-Newton step: robust objective before and after, at fixed μ.
struct FgrStep {
    double mu = 0.0;
    double objective_before = 0.0;
    double objective_after = 0.0;
};

struct RegistrationResult {
    RigidTransform transform;
    std::size_t inlier_count = 0;
    double inlier_ratio = 0.0;  // inlier_count / target point count
    double inlier_rmse = 0.0;
    // Inlier correspondences under `transform`.
    CorrespondenceSet correspondence_set;

    // Diagnostics
    std::size_t candidate_count = 0;  // size of the scored candidate set
    std::size_t iterations = 0;
    std::size_t validations = 0;
    std::vector<FgrStep> fgr_trace;
};

// Scores `transform` against a candidate set: inliers are correspondences
// whose transformed source keypoint lies strictly within `threshold` of its
// target keypoint. inlier_ratio divides by the target cloud size.
RegistrationResult score_correspondences(const PointCloud &source,
                                         const PointCloud &target,
                                         const features::FeatureSet &source_features,
                                         const features::FeatureSet &target_features,
                                         const CorrespondenceSet &candidates,
                                         const RigidTransform &transform,
                                         double threshold);

// RANSAC over feature correspondences: 3-point samples pruned by an
// edge-length similarity check, closed-form pose, inlier counting; best by
// (inlier count, lower rmse, earlier iteration); final refit on the inliers.
// Hypothesis i draws from a stream derived from (seed, i), and hypotheses are
// reduced in iteration order, so the result is identical at any thread
// count. Throws TooFewCorrespondences below 3 candidates.
RegistrationResult ransac_registration(const PointCloud &source, const PointCloud &target,
                                       const features::FeatureSet &source_features,
                                       const features::FeatureSet &target_features,
                                       const CoarseParams &params);

RegistrationResult ransac_from_correspondences(const PointCloud &source,
                                               const PointCloud &target,
                                               const features::FeatureSet &source_features,
                                               const features::FeatureSet &target_features,
                                               const CorrespondenceSet &candidates,
                                               const CoarseParams &params);

// Fast global registration: mutual matches filtered by the tuple test, then
// graduated non-convexity on the scaled Geman-McClure objective with
// line-process weights and Gauss-Newton steps on a 6-dof twist. Each step is
// backtracked so the objective never increases at fixed μ.
RegistrationResult fgr_registration(const PointCloud &source, const PointCloud &target,
                                    const features::FeatureSet &source_features,
                                    const features::FeatureSet &target_features,
                                    const CoarseParams &params);

// Mutual matches surviving the tuple test, deduplicated, in source order.
CorrespondenceSet fgr_tuple_filter(const PointCloud &source, const PointCloud &target,
                                   const features::FeatureSet &source_features,
                                   const features::FeatureSet &target_features,
                                   const CorrespondenceSet &mutual_matches,
                                   const CoarseParams &params);

RegistrationResult coarse_registration(CoarseMethod method, const PointCloud &source,
                                       const PointCloud &target,
                                       const features::FeatureSet &source_features,
                                       const features::FeatureSet &target_features,
                                       const CoarseParams &params);

}  // namespace posekit::registration
