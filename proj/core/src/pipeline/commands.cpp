#include "posekit/pipeline/commands.hpp"

#include <algorithm>
#include <chrono>

#include "posekit/error.hpp"
#include "posekit/geometry/ply_io.hpp"
#include "posekit/synthetic/dataset.hpp"

namespace posekit::pipeline {

namespace fs = std::filesystem;

BuildDbResult build_database_cmd(const fs::path &views_dir, const fs::path &out_dir,
                                 const PipelineConfig &cfg) {
    cfg.validate();
    if (!fs::is_directory(views_dir)) {
        throw Error(ErrorCode::IoError, "no views directory " + views_dir.string());
    }
    std::vector<fs::path> instance_dirs;
    for (const auto &e : fs::directory_iterator(views_dir)) {
        if (e.is_directory()) instance_dirs.push_back(e.path());
    }
    std::sort(instance_dirs.begin(), instance_dirs.end());
    if (instance_dirs.empty()) {
        throw Error(ErrorCode::InvalidParameter, "no instance directories in " + views_dir.string());
    }

    BuildDbResult result{recognition::ModelDatabase(cfg.description()), {}};
    for (const auto &inst : instance_dirs) {
        std::vector<fs::path> files;
        for (const auto &e : fs::directory_iterator(inst)) {
            if (e.is_regular_file() && e.path().extension() == ".ply") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        const std::string label = inst.filename().string();
        std::size_t added = 0;
        for (const auto &f : files) {
            try {
                result.db.add_view(recognition::describe_view(label, f.stem().string(),
                                                              geometry::read_ply(f),
                                                              cfg.description()));
                ++added;
            } catch (const Error &e) {
                result.warnings.push_back(f.string() + ": " + e.what());
            }
        }
        if (added == 0) {
            throw Error(ErrorCode::InvalidParameter, "instance '" + label + "' has no usable views");
        }
    }
    recognition::save_database(out_dir, result.db);
    return result;
}

TrainResult train_cmd(const fs::path &manifest, const fs::path &model_out,
                      const PipelineConfig &cfg, const recognition::TrainParams &params) {
    cfg.validate();
    const ingest::Dataset ds = ingest::load_dataset(manifest);
    std::vector<recognition::Embedding> embeddings;
    std::vector<std::string> labels;
    for (const auto &frame : ds.frames) {
        const ingest::RgbImage rgb = ingest::read_rgb_png(frame.rgb);
        for (const auto &a : frame.annotations) {
            embeddings.push_back(
                    a.embedding ? recognition::load_external_embedding(*a.embedding, cfg.embedding_dim)
                                : recognition::extract_baseline_embedding(
                                          ingest::crop_image(rgb, a.bbox), cfg.embedding_dim));
            labels.push_back(a.label);
        }
    }
    TrainResult out;
    out.model = recognition::train_classifier(embeddings, labels, params, &out.report);
    out.samples = embeddings.size();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        if (recognition::predict(out.model, embeddings[i]).label == labels[i]) ++correct;
    }
    out.training_accuracy = static_cast<double>(correct) / static_cast<double>(embeddings.size());
    recognition::save_model(model_out, out.model);
    return out;
}

eval::RunReport run_cmd(const fs::path &manifest, const fs::path &db_dir, const fs::path &model_path,
                        const PipelineConfig &cfg, const fs::path &report_out) {
    cfg.validate();
    const ingest::Dataset ds = ingest::load_dataset(manifest);
    const recognition::ModelDatabase db = recognition::load_database(db_dir, cfg.description());
    const recognition::LogisticModel model = recognition::load_model(model_path);
    const PipelineContext ctx{db, model, cfg, ds.intrinsics};
    eval::RunReport report;
    report.config_json = config_to_json(cfg);
    report.records = run_dataset(ds, ctx);
    eval::write_run_report(report_out, report);
    return report;
}

eval::EvaluationSummary evaluate_cmd(const std::vector<fs::path> &run_reports,
                                     const fs::path &json_out, const fs::path &csv_out) {
    std::vector<eval::DetectionRecord> records;
    for (const auto &p : run_reports) {
        auto r = eval::read_run_report(p);
        records.insert(records.end(), std::make_move_iterator(r.records.begin()),
                       std::make_move_iterator(r.records.end()));
    }
    eval::EvaluationSummary summary = eval::evaluate_records(records);
    eval::write_evaluation_report(json_out, csv_out, summary, records);
    return summary;
}

std::vector<BenchRow> bench_cmd(const PipelineConfig &cfg, std::size_t seeds, std::uint64_t task_seed) {
    cfg.validate();
    if (seeds == 0) throw Error(ErrorCode::InvalidParameter, "bench needs at least one seed");
    const synthetic::ViewMatchingTask task =
            synthetic::make_view_matching_task(task_seed, cfg.description());
    std::vector<BenchRow> rows;
    for (const auto method : {registration::CoarseMethod::Ransac, registration::CoarseMethod::Fgr}) {
        BenchRow row{std::string(registration::to_string(method)), 0.0, 0.0};
        std::vector<double> best;
        for (std::size_t s = 0; s < seeds; ++s) {
            registration::CoarseParams p = cfg.coarse_params();
            p.seed = s;
            double best_ratio = 0.0;
            for (const auto &view : task.views) {
                const auto start = std::chrono::steady_clock::now();
                try {
                    const auto r = registration::coarse_registration(
                            method, view.cloud, task.scene.cloud, view.features, task.scene.features, p);
                    best_ratio = std::max(best_ratio, r.inlier_ratio);
                } catch (const Error &e) {
                    if (e.code() != ErrorCode::TooFewCorrespondences) throw;
                }
                row.total_seconds += std::chrono::duration<double>(
                                             std::chrono::steady_clock::now() - start)
                                             .count();
            }
            best.push_back(best_ratio);
        }
        std::sort(best.begin(), best.end());
        const std::size_t n = best.size();
        row.median_best_ratio = n % 2 ? best[n / 2] : 0.5 * (best[n / 2 - 1] + best[n / 2]);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace posekit::pipeline
