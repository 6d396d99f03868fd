#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <thread>

#include "posekit/error.hpp"
#include "posekit/random.hpp"
#include "posekit/registration/coarse.hpp"

namespace posekit::registration {

namespace {

struct Hypothesis {
    bool validated = false;
    std::size_t inliers = 0;
    double rmse = 0.0;
    RigidTransform transform;
};

bool better(const Hypothesis &a, const Hypothesis &b) {
    return a.inliers > b.inliers || (a.inliers == b.inliers && a.rmse < b.rmse);
}

void count_inliers(const CorrespondencePoints &pts, const RigidTransform &t,
                   double threshold_sq, std::size_t &inliers, double &rmse) {
    const auto &r = t.rotation();
    const auto &tr = t.translation();
    std::size_t count = 0;
    double sse = 0.0;
    for (std::size_t i = 0; i < pts.source.size(); ++i) {
        const double d2 = (r * pts.source[i] + tr - pts.target[i]).squaredNorm();
        if (d2 < threshold_sq) {
            ++count;
            sse += d2;
        }
    }
    inliers = count;
    rmse = count ? std::sqrt(sse / static_cast<double>(count)) : 0.0;
}

bool edges_similar(const std::array<Vec3, 3> &s, const std::array<Vec3, 3> &t,
                   double ratio) {
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            const double ls = (s[a] - s[b]).norm();
            const double lt = (t[a] - t[b]).norm();
            if (ls == 0.0 || lt == 0.0) return false;
            if (ls < ratio * lt || lt < ratio * ls) return false;
        }
    }
    return true;
}

Hypothesis evaluate_iteration(std::size_t iteration, const CorrespondencePoints &pts,
                              const CoarseParams &params) {
    Hypothesis h;
    const std::size_t n = pts.source.size();
    CounterRng rng(derive_seed(params.seed, iteration));
    std::array<std::size_t, 3> idx{};
    idx[0] = rng.below(n);
    do { idx[1] = rng.below(n); } while (idx[1] == idx[0]);
    do { idx[2] = rng.below(n); } while (idx[2] == idx[0] || idx[2] == idx[1]);

    std::array<Vec3, 3> s{};
    std::array<Vec3, 3> t{};
    for (int k = 0; k < 3; ++k) {
        s[k] = pts.source[idx[k]];
        t[k] = pts.target[idx[k]];
    }
    if (!edges_similar(s, t, params.edge_length_ratio)) return h;
    const auto transform = try_estimate_rigid(s, t);
    if (!transform) return h;

    h.validated = true;
    h.transform = *transform;
    count_inliers(pts, h.transform, params.inlier_threshold * params.inlier_threshold,
                  h.inliers, h.rmse);
    return h;
}

}  // namespace

RegistrationResult ransac_from_correspondences(const PointCloud &source,
                                               const PointCloud &target,
                                               const features::FeatureSet &source_features,
                                               const features::FeatureSet &target_features,
                                               const CorrespondenceSet &candidates,
                                               const CoarseParams &params) {
    if (candidates.size() < 3) {
        throw Error(ErrorCode::TooFewCorrespondences,
                    "RANSAC needs at least three correspondences, got " +
                            std::to_string(candidates.size()));
    }
    if (!(params.inlier_threshold > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "inlier threshold must be positive");
    }
    const CorrespondencePoints pts =
            gather_points(source, target, source_features, target_features, candidates);

    const std::size_t threads = std::max<std::size_t>(1, params.threads);
    const std::size_t batch_size = 256 * threads;
    std::vector<Hypothesis> batch;

    Hypothesis best;
    std::size_t stale = 0;
    std::size_t validations = 0;
    std::size_t iterations = 0;
    bool done = params.max_iterations == 0;

    for (std::size_t start = 0; !done && start < params.max_iterations;
         start += batch_size) {
        const std::size_t count = std::min(batch_size, params.max_iterations - start);
        batch.assign(count, Hypothesis{});
        auto work = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                batch[i] = evaluate_iteration(start + i, pts, params);
            }
        };
        if (threads == 1) {
            work(0, count);
        } else {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (count + threads - 1) / threads;
            for (std::size_t w = 0; w < threads; ++w) {
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(count, lo + chunk);
                if (lo < hi) pool.emplace_back(work, lo, hi);
            }
        }
        // Sequential reduction in iteration order.
        for (std::size_t i = 0; i < count; ++i) {
            iterations = start + i + 1;
            const Hypothesis &h = batch[i];
            if (!h.validated) continue;
            ++validations;
            if (!best.validated || better(h, best)) {
                best = h;
                stale = 0;
            } else if (++stale >= params.validation_steps) {
                done = true;
                break;
            }
        }
    }

    RigidTransform final_transform = best.transform;
    if (best.validated && best.inliers >= 3) {
        // Refit on the inlier set while that does not lose inliers.
        Hypothesis current = best;
        for (int round = 0; round < 10; ++round) {
            std::vector<Vec3> s, t;
            const double thr_sq = params.inlier_threshold * params.inlier_threshold;
            for (std::size_t i = 0; i < pts.source.size(); ++i) {
                if ((current.transform.apply(pts.source[i]) - pts.target[i]).squaredNorm() <
                    thr_sq) {
                    s.push_back(pts.source[i]);
                    t.push_back(pts.target[i]);
                }
            }
            const auto refit = try_estimate_rigid(s, t);
            if (!refit) break;
            Hypothesis h;
            h.validated = true;
            h.transform = *refit;
            count_inliers(pts, h.transform, thr_sq, h.inliers, h.rmse);
            if (h.inliers < current.inliers) break;
            const bool improved = h.inliers > current.inliers;
            current = h;
            if (!improved) break;
        }
        final_transform = current.transform;
    }

    RegistrationResult result =
            score_correspondences(source, target, source_features, target_features,
                                  candidates, final_transform, params.inlier_threshold);
    result.iterations = iterations;
    result.validations = validations;
    return result;
}

RegistrationResult ransac_registration(const PointCloud &source, const PointCloud &target,
                                       const features::FeatureSet &source_features,
                                       const features::FeatureSet &target_features,
                                       const CoarseParams &params) {
    const auto candidates =
            match_features(source_features, target_features, params.mutual_matching);
    return ransac_from_correspondences(source, target, source_features, target_features,
                                       candidates, params);
}

}  // namespace posekit::registration
