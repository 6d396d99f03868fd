#include "posekit/pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <thread>

#include "posekit/error.hpp"
#include "posekit/eval/metrics.hpp"
#include "posekit/random.hpp"
#include "posekit/recognition/view_selection.hpp"

namespace posekit::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// FNV-1a; std::hash is not stable across library implementations.
std::uint64_t stable_hash(const std::string &s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string error_name(const std::exception &e) {
    if (const auto *pe = dynamic_cast<const Error *>(&e)) return std::string(to_string(pe->code()));
    return "InternalError";
}

}  // namespace

ExecutionMode static_mode(const ingest::FrameManifest &, const ingest::FrameImages &,
                          ExecutionMode configured) {
    return configured;
}

ModeTrigger distance_trigger(const ingest::CameraIntrinsics &k, double full_within_m,
                             double coarse_within_m) {
    return [k, full_within_m, coarse_within_m](const ingest::FrameManifest &frame,
                                               const ingest::FrameImages &images,
                                               ExecutionMode configured) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto &a : frame.annotations) {
            const ingest::BBox2d c = ingest::clip_to_image(a.bbox, images.depth.width,
                                                           images.depth.height);
            std::vector<std::uint16_t> d;
            for (int v = c.y; v < c.y + c.height; ++v) {
                for (int u = c.x; u < c.x + c.width; ++u) {
                    if (images.depth.at(u, v) != 0) d.push_back(images.depth.at(u, v));
                }
            }
            if (d.empty()) continue;
            std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
            nearest = std::min(nearest, d[d.size() / 2] / k.depth_scale);
        }
        ExecutionMode wanted = ExecutionMode::ClassifyOnly;
        if (nearest <= full_within_m) wanted = ExecutionMode::Full;
        else if (nearest <= coarse_within_m) wanted = ExecutionMode::Coarse;
        return std::min(wanted, configured);
    };
}

void check_compatibility(const PipelineContext &ctx) {
    ctx.cfg.validate();
    ctx.db.check_compatible(ctx.cfg.description());
    if (ctx.model.dim() != ctx.cfg.embedding_dim) {
        throw Error(ErrorCode::CompatibilityError,
                    "model expects " + std::to_string(ctx.model.dim()) + "-dim embeddings, config says " +
                            std::to_string(ctx.cfg.embedding_dim));
    }
}

std::vector<eval::DetectionRecord> run_frame(const ingest::FrameManifest &frame,
                                             const ingest::FrameImages &images,
                                             const PipelineContext &ctx) {
    const PipelineConfig &cfg = ctx.cfg;
    const ExecutionMode mode =
            ctx.trigger ? ctx.trigger(frame, images, cfg.execution_mode) : cfg.execution_mode;
    const std::uint64_t frame_seed = derive_seed(cfg.seed, stable_hash(frame.id));

    std::vector<eval::DetectionRecord> records;
    for (std::size_t ai = 0; ai < frame.annotations.size(); ++ai) {
        const ingest::Annotation &ann = frame.annotations[ai];
        eval::DetectionRecord rec;
        rec.frame_id = frame.id;
        rec.annotation_index = ai;
        rec.instance_label = ann.label;
        rec.method = std::string(registration::to_string(cfg.coarse_method));
        rec.mode = std::string(to_string(mode));
        const std::uint64_t ann_seed = derive_seed(frame_seed, ai);

        try {
            rec.gt_box = eval::project_gt_box(ann.bbox, images.depth, ctx.intrinsics);
        } catch (const Error &) {
            // no depth under the annotation: nothing can match it
        }

        // The running stage is timed even when it fails.
        std::optional<double> *stage = nullptr;
        Clock::time_point stage_start;
        const auto begin_stage = [&](std::optional<double> &slot) {
            stage = &slot;
            stage_start = Clock::now();
        };
        const auto end_stage = [&] {
            *stage = seconds_since(stage_start);
            stage = nullptr;
        };

        try {
            // Stage 1: classify the color crop.
            begin_stage(rec.stage_timings.classify);
            recognition::Embedding emb =
                    ann.embedding
                            ? recognition::load_external_embedding(*ann.embedding, cfg.embedding_dim)
                            : recognition::extract_baseline_embedding(
                                      ingest::crop_image(images.rgb, ann.bbox), cfg.embedding_dim);
            const recognition::Prediction pred = recognition::predict(ctx.model, emb);
            rec.predicted_label = pred.label;
            end_stage();

            if (mode != ExecutionMode::ClassifyOnly) {
                // Stage 2: describe the crop and pick the best-fitting view.
                begin_stage(rec.stage_timings.coarse);
                const geometry::PointCloud crop =
                        ingest::crop_by_bbox(images.depth, &images.rgb, ctx.intrinsics, ann.bbox);
                const recognition::DescribedCloud scene =
                        recognition::describe_cloud(crop, cfg.description());
                const auto views = recognition::select_views(ctx.db, pred.label,
                                                             cfg.views_per_instance,
                                                             derive_seed(ann_seed, 0));
                registration::CoarseParams cp = cfg.coarse_params();
                cp.seed = derive_seed(ann_seed, 1);
                const recognition::ViewMatch match = recognition::select_best_view(
                        scene, views, cfg.coarse_method, cp, cfg.min_correspondences);
                end_stage();
                rec.correspondence_count = match.result.inlier_count;
                rec.view_id = match.view->view_id;
                rec.coarse_inlier_ratio = match.result.inlier_ratio;
                rec.coarse_inlier_rmse = match.result.inlier_rmse;
                rec.transform = match.result.transform;

                if (mode == ExecutionMode::Full) {
                    // Stage 3: dense refinement against the crop.
                    begin_stage(rec.stage_timings.icp);
                    const registration::IcpResult icp = registration::icp_point_to_plane(
                            match.view->cloud, scene.cloud, match.result.transform,
                            cfg.icp_params());
                    end_stage();
                    if (icp.no_overlap) {
                        rec.error = std::string(to_string(ErrorCode::NoOverlap));
                        rec.correspondence_count = 0;
                        rec.transform.reset();
                    } else {
                        rec.transform = icp.transform;
                        rec.icp_fitness = icp.fitness;
                        rec.icp_rmse = icp.inlier_rmse;
                    }
                }
                if (rec.transform) {
                    rec.est_box = geometry::bounding_box(
                            geometry::apply_transform(match.view->cloud, *rec.transform));
                }
            }
        } catch (const std::exception &e) {
            if (stage) end_stage();
            rec.error = error_name(e);
            rec.correspondence_count = 0;
            rec.transform.reset();
            rec.est_box.reset();
        }
        eval::score_detection(rec);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<eval::DetectionRecord> run_frame(const ingest::FrameManifest &frame,
                                             const PipelineContext &ctx) {
    ingest::FrameImages images;
    try {
        images = ingest::load_frame_images(frame);
    } catch (const std::exception &e) {
        std::vector<eval::DetectionRecord> records;
        for (std::size_t ai = 0; ai < frame.annotations.size(); ++ai) {
            eval::DetectionRecord rec;
            rec.frame_id = frame.id;
            rec.annotation_index = ai;
            rec.instance_label = frame.annotations[ai].label;
            rec.method = std::string(registration::to_string(ctx.cfg.coarse_method));
            rec.mode = std::string(to_string(ctx.cfg.execution_mode));
            rec.error = error_name(e);
            records.push_back(std::move(rec));
        }
        return records;
    }
    return run_frame(frame, images, ctx);
}

std::vector<eval::DetectionRecord> run_dataset(const ingest::Dataset &dataset,
                                               const PipelineContext &ctx) {
    check_compatibility(ctx);
    std::vector<std::vector<eval::DetectionRecord>> per_frame(dataset.frames.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < dataset.frames.size(); i = next++) {
            per_frame[i] = run_frame(dataset.frames[i], ctx);
        }
    };
    const std::size_t workers = std::min(ctx.cfg.workers, std::max<std::size_t>(dataset.frames.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    std::vector<eval::DetectionRecord> out;
    for (auto &f : per_frame) {
        for (auto &r : f) out.push_back(std::move(r));
    }
    return out;
}

}  // namespace posekit::pipeline
