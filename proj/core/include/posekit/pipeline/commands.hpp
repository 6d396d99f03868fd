#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "posekit/eval/report.hpp"
#include "posekit/pipeline/pipeline.hpp"

// Library side of the command-line subcommands, so they can be tested
// without spawning processes.
namespace posekit::pipeline {

struct BuildDbResult {
    recognition::ModelDatabase db;
    std::vector<std::string> warnings;  // unreadable views that were skipped
};

// Reads views_dir/<label>/*.ply, describes every view with the config's
// parameters and saves the database to out_dir. Throws InvalidParameter when
// an instance ends up without views or nothing is found.
BuildDbResult build_database_cmd(const std::filesystem::path &views_dir,
                                 const std::filesystem::path &out_dir, const PipelineConfig &cfg);

struct TrainResult {
    recognition::LogisticModel model;
    recognition::TrainReport report;
    std::size_t samples = 0;
    double training_accuracy = 0.0;
};

// Trains on the annotated crops of a dataset (external embeddings when the
// annotation names one) and saves the model.
TrainResult train_cmd(const std::filesystem::path &manifest, const std::filesystem::path &model_out,
                      const PipelineConfig &cfg, const recognition::TrainParams &params = {});

// Runs the pipeline over a dataset and writes the run report.
eval::RunReport run_cmd(const std::filesystem::path &manifest, const std::filesystem::path &db_dir,
                        const std::filesystem::path &model_path, const PipelineConfig &cfg,
                        const std::filesystem::path &report_out);

// Reads run reports, pools their records and writes the evaluation JSON and
// the PRC CSV.
eval::EvaluationSummary evaluate_cmd(const std::vector<std::filesystem::path> &run_reports,
                                     const std::filesystem::path &json_out,
                                     const std::filesystem::path &csv_out);

struct BenchRow {
    std::string method;
    double total_seconds = 0.0;      // coarse registration of all views, all seeds
    double median_best_ratio = 0.0;  // best-view inlier ratio, median over seeds
};

// RANSAC and FGR on the synthetic ten-view matching task, `seeds` times.
std::vector<BenchRow> bench_cmd(const PipelineConfig &cfg, std::size_t seeds,
                                std::uint64_t task_seed = 1);

}  // namespace posekit::pipeline
