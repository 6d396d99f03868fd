#include "posekit/registration/coarse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "posekit/error.hpp"

namespace posekit::registration {

std::string_view to_string(CoarseMethod method) noexcept {
    return method == CoarseMethod::Ransac ? "RANSAC" : "FGR";
}

CoarseMethod parse_coarse_method(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "ransac") return CoarseMethod::Ransac;
    if (lower == "fgr") return CoarseMethod::Fgr;
    throw Error(ErrorCode::InvalidParameter,
                "unknown coarse method '" + std::string(name) + "'");
}

RegistrationResult score_correspondences(const PointCloud &source,
                                         const PointCloud &target,
                                         const features::FeatureSet &source_features,
                                         const features::FeatureSet &target_features,
                                         const CorrespondenceSet &candidates,
                                         const RigidTransform &transform,
                                         double threshold) {
    const CorrespondencePoints pts =
            gather_points(source, target, source_features, target_features, candidates);
    RegistrationResult result;
    result.transform = transform;
    result.candidate_count = candidates.size();
    const double threshold_sq = threshold * threshold;
    double sse = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double d2 = (transform.apply(pts.source[i]) - pts.target[i]).squaredNorm();
        if (d2 < threshold_sq) {
            result.correspondence_set.push_back(candidates[i]);
            sse += d2;
        }
    }
    result.inlier_count = result.correspondence_set.size();
    if (result.inlier_count > 0) {
        result.inlier_rmse = std::sqrt(sse / static_cast<double>(result.inlier_count));
    }
    if (!target.empty()) {
        result.inlier_ratio = std::min(
                1.0, static_cast<double>(result.inlier_count) /
                             static_cast<double>(target.size()));
    }
    return result;
}

RegistrationResult coarse_registration(CoarseMethod method, const PointCloud &source,
                                       const PointCloud &target,
                                       const features::FeatureSet &source_features,
                                       const features::FeatureSet &target_features,
                                       const CoarseParams &params) {
    if (method == CoarseMethod::Ransac) {
        return ransac_registration(source, target, source_features, target_features,
                                   params);
    }
    return fgr_registration(source, target, source_features, target_features, params);
}

}  // namespace posekit::registration
