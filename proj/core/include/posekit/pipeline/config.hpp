#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "posekit/recognition/model_database.hpp"
#include "posekit/registration/coarse.hpp"
#include "posekit/registration/icp.hpp"

namespace posekit::pipeline {

// Which stages run: classification only, plus coarse registration, plus ICP.
enum class ExecutionMode { ClassifyOnly, Coarse, Full };

std::string_view to_string(ExecutionMode mode) noexcept;
ExecutionMode parse_execution_mode(std::string_view name);

struct PipelineConfig {
    double leaf_m = 0.01;
    double fpfh_radius_m = 0.05;
    std::optional<double> normal_radius_m;  // 2 x leaf when unset
    double inlier_threshold_m = 0.01;
    registration::CoarseMethod coarse_method = registration::CoarseMethod::Ransac;
    std::size_t ransac_max_iterations = 4'000'000;
    std::size_t ransac_validation = 500;
    bool mutual_matching = false;
    std::size_t fgr_iterations = 100;
    double fgr_tuple_ratio = 0.9;
    double icp_max_dist_m = 0.01;
    std::size_t icp_max_iterations = 30;
    double icp_rel_tol = 1e-6;
    std::size_t views_per_instance = 10;
    std::size_t min_correspondences = 3;
    std::uint64_t seed = 0;
    ExecutionMode execution_mode = ExecutionMode::Full;
    std::size_t embedding_dim = 1000;

    // Runtime only; results do not depend on these.
    std::size_t workers = 1;
    std::size_t ransac_threads = 1;

    // Throws InvalidParameter.
    void validate() const;

    double normal_radius() const { return normal_radius_m.value_or(2.0 * leaf_m); }
    recognition::DescriptionParams description() const;
    registration::CoarseParams coarse_params() const;
    registration::IcpParams icp_params() const;
};

// Keys match the field names. Runtime keys are written only on request.
std::string config_to_json(const PipelineConfig &cfg, bool include_runtime = false);

// Overrides the fields present in `json_text` on top of `base`. Unknown keys
// are rejected (ParseError) so typos do not pass silently.
PipelineConfig config_from_json(const std::string &json_text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path &path, PipelineConfig base = {});

}  // namespace posekit::pipeline
