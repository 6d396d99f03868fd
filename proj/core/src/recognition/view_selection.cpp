#include "posekit/recognition/view_selection.hpp"

#include <numeric>
#include <optional>

#include "posekit/error.hpp"
#include "posekit/random.hpp"

namespace posekit::recognition {

std::vector<const ObjectView *> select_views(const ModelDatabase &db, const std::string &label,
                                             std::size_t count, std::uint64_t seed) {
    const auto &views = db.views(label);
    std::vector<std::size_t> order(views.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(count, views.size());
    CounterRng rng(seed);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.below(order.size() - i);
        std::swap(order[i], order[j]);
    }
    std::vector<const ObjectView *> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(&views[order[i]]);
    return out;
}

namespace {

bool better(const ViewMatch &a, const ViewMatch &b) {
    if (a.result.inlier_count != b.result.inlier_count) {
        return a.result.inlier_count > b.result.inlier_count;
    }
    if (a.result.inlier_rmse != b.result.inlier_rmse) {
        return a.result.inlier_rmse < b.result.inlier_rmse;
    }
    return a.view->view_id < b.view->view_id;
}

}  // namespace

ViewMatch select_best_view(const DescribedCloud &scene, std::span<const ObjectView *const> views,
                           registration::CoarseMethod method,
                           const registration::CoarseParams &params, std::size_t min_inliers) {
    if (scene.cloud.empty()) throw Error(ErrorCode::EmptyCloud, "scene crop is empty");
    if (views.empty()) throw Error(ErrorCode::InvalidParameter, "no candidate views");
    if (min_inliers < 3) throw Error(ErrorCode::InvalidParameter, "min_inliers must be at least 3");
    if (scene.features.empty()) throw Error(ErrorCode::NoMatch, "scene crop has no features");

    std::optional<ViewMatch> best;
    for (std::size_t i = 0; i < views.size(); ++i) {
        const ObjectView *view = views[i];
        if (view->features.empty()) continue;
        registration::CoarseParams p = params;
        p.seed = derive_seed(params.seed, i);
        ViewMatch m{view, i, {}};
        try {
            m.result = registration::coarse_registration(method, view->cloud, scene.cloud,
                                                         view->features, scene.features, p);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::TooFewCorrespondences) throw;
            continue;
        }
        if (m.result.inlier_count < min_inliers) continue;
        if (!best || better(m, *best)) best = std::move(m);
    }
    if (!best) {
        throw Error(ErrorCode::NoMatch, "no view reached " + std::to_string(min_inliers) + " inliers");
    }
    return std::move(*best);
}

}  // namespace posekit::recognition
