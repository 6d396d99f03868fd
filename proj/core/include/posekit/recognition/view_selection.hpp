#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "posekit/recognition/model_database.hpp"
#include "posekit/registration/coarse.hpp"

namespace posekit::recognition {

// Up to `count` distinct views of `label`, sampled without replacement from
// a stream seeded by `seed`; all views (in sampled order) if there are fewer.
// Throws UnknownInstance.
std::vector<const ObjectView *> select_views(const ModelDatabase &db, const std::string &label,
                                             std::size_t count, std::uint64_t seed);

struct ViewMatch {
    const ObjectView *view = nullptr;
    std::size_t view_index = 0;  // position in the candidate list
    registration::RegistrationResult result;  // view -> scene
};

// Coarse-registers every view (source) onto the scene crop (target) and
// keeps the one with most inliers, then lower rmse, then lower view_id.
// View i is registered with seed derive_seed(params.seed, i). A view whose
// matching leaves fewer than three correspondences simply scores zero.
// Throws NoMatch when no view reaches `min_inliers` (at least 3).
ViewMatch select_best_view(const DescribedCloud &scene, std::span<const ObjectView *const> views,
                           registration::CoarseMethod method,
                           const registration::CoarseParams &params, std::size_t min_inliers = 3);

}  // namespace posekit::recognition
