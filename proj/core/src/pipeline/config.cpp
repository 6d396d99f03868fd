#include "posekit/pipeline/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "posekit/error.hpp"

namespace posekit::pipeline {

using nlohmann::json;

std::string_view to_string(ExecutionMode mode) noexcept {
    switch (mode) {
    case ExecutionMode::ClassifyOnly: return "classify";
    case ExecutionMode::Coarse: return "coarse";
    case ExecutionMode::Full: return "full";
    }
    return "full";
}

ExecutionMode parse_execution_mode(std::string_view name) {
    if (name == "classify" || name == "ClassifyOnly") return ExecutionMode::ClassifyOnly;
    if (name == "coarse" || name == "Coarse") return ExecutionMode::Coarse;
    if (name == "full" || name == "Full") return ExecutionMode::Full;
    throw Error(ErrorCode::InvalidParameter, "unknown execution mode '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
    const auto positive = [](double v, const char *name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::InvalidParameter, std::string(name) + " must be positive");
        }
    };
    positive(leaf_m, "leaf_m");
    positive(fpfh_radius_m, "fpfh_radius_m");
    positive(normal_radius(), "normal_radius_m");
    positive(inlier_threshold_m, "inlier_threshold_m");
    positive(icp_max_dist_m, "icp_max_dist_m");
    positive(icp_rel_tol, "icp_rel_tol");
    if (!(fgr_tuple_ratio > 0.0 && fgr_tuple_ratio < 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "fgr_tuple_ratio must lie in (0, 1)");
    }
    if (min_correspondences < 3) {
        throw Error(ErrorCode::InvalidParameter, "min_correspondences must be at least 3");
    }
    if (ransac_max_iterations == 0 || ransac_validation == 0 || fgr_iterations == 0 ||
        icp_max_iterations == 0 || views_per_instance == 0 || embedding_dim == 0) {
        throw Error(ErrorCode::InvalidParameter, "iteration and count limits must be positive");
    }
    if (workers == 0 || ransac_threads == 0) {
        throw Error(ErrorCode::InvalidParameter, "thread counts must be positive");
    }
}

recognition::DescriptionParams PipelineConfig::description() const {
    return {leaf_m, fpfh_radius_m, normal_radius()};
}

registration::CoarseParams PipelineConfig::coarse_params() const {
    registration::CoarseParams p;
    p.inlier_threshold = inlier_threshold_m;
    p.mutual_matching = mutual_matching;
    p.seed = seed;
    p.max_iterations = ransac_max_iterations;
    p.validation_steps = ransac_validation;
    p.threads = ransac_threads;
    p.fgr_iterations = fgr_iterations;
    p.fgr_tuple_ratio = fgr_tuple_ratio;
    return p;
}

registration::IcpParams PipelineConfig::icp_params() const {
    return {icp_max_dist_m, icp_max_iterations, icp_rel_tol};
}

std::string config_to_json(const PipelineConfig &c, bool include_runtime) {
    json j = {{"leaf_m", c.leaf_m},
              {"fpfh_radius_m", c.fpfh_radius_m},
              {"normal_radius_m", c.normal_radius()},
              {"inlier_threshold_m", c.inlier_threshold_m},
              {"coarse_method", std::string(registration::to_string(c.coarse_method))},
              {"ransac_max_iterations", c.ransac_max_iterations},
              {"ransac_validation", c.ransac_validation},
              {"mutual_matching", c.mutual_matching},
              {"fgr_iterations", c.fgr_iterations},
              {"fgr_tuple_ratio", c.fgr_tuple_ratio},
              {"icp_max_dist_m", c.icp_max_dist_m},
              {"icp_max_iterations", c.icp_max_iterations},
              {"icp_rel_tol", c.icp_rel_tol},
              {"views_per_instance", c.views_per_instance},
              {"min_correspondences", c.min_correspondences},
              {"seed", c.seed},
              {"execution_mode", std::string(to_string(c.execution_mode))},
              {"embedding_dim", c.embedding_dim}};
    if (include_runtime) {
        j["workers"] = c.workers;
        j["ransac_threads"] = c.ransac_threads;
    }
    return j.dump(2);
}

PipelineConfig config_from_json(const std::string &json_text, PipelineConfig c) {
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
        for (const auto &[key, v] : j.items()) {
            if (key == "leaf_m") c.leaf_m = v.get<double>();
            else if (key == "fpfh_radius_m") c.fpfh_radius_m = v.get<double>();
            else if (key == "normal_radius_m") c.normal_radius_m = v.get<double>();
            else if (key == "inlier_threshold_m") c.inlier_threshold_m = v.get<double>();
            else if (key == "coarse_method")
                c.coarse_method = registration::parse_coarse_method(v.get<std::string>());
            else if (key == "ransac_max_iterations") c.ransac_max_iterations = v.get<std::size_t>();
            else if (key == "ransac_validation") c.ransac_validation = v.get<std::size_t>();
            else if (key == "mutual_matching") c.mutual_matching = v.get<bool>();
            else if (key == "fgr_iterations") c.fgr_iterations = v.get<std::size_t>();
            else if (key == "fgr_tuple_ratio") c.fgr_tuple_ratio = v.get<double>();
            else if (key == "icp_max_dist_m") c.icp_max_dist_m = v.get<double>();
            else if (key == "icp_max_iterations") c.icp_max_iterations = v.get<std::size_t>();
            else if (key == "icp_rel_tol") c.icp_rel_tol = v.get<double>();
            else if (key == "views_per_instance") c.views_per_instance = v.get<std::size_t>();
            else if (key == "min_correspondences") c.min_correspondences = v.get<std::size_t>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "execution_mode")
                c.execution_mode = parse_execution_mode(v.get<std::string>());
            else if (key == "embedding_dim") c.embedding_dim = v.get<std::size_t>();
            else if (key == "workers") c.workers = v.get<std::size_t>();
            else if (key == "ransac_threads") c.ransac_threads = v.get<std::size_t>();
            else throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
        }
    } catch (const json::exception &e) {
        throw Error(ErrorCode::ParseError, std::string("bad config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path &path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str(), std::move(base));
}

}  // namespace posekit::pipeline
