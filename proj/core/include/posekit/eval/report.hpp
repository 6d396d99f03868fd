#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "posekit/eval/prc.hpp"

namespace posekit::eval {

// Output of a pipeline run. `config_json` is embedded verbatim as an object.
struct RunReport {
    std::string config_json = "{}";
    std::vector<DetectionRecord> records;
};

// Records keep their timings under "stage_timings"; the aggregated table is
// the top-level "timing" key. Everything else is deterministic.
void write_run_report(const std::filesystem::path &path, const RunReport &report);
RunReport read_run_report(const std::filesystem::path &path);

// JSON text with every "stage_timings" and "timing" member removed, for
// comparing runs.
std::string strip_timing_fields(const std::string &json_text);

struct MethodSummary {
    std::string method;
    std::size_t ground_truth = 0;  // one object per record
    std::size_t true_positives = 0;
    PrCurve curve;
};

struct EvaluationSummary {
    std::vector<MethodSummary> methods;
    double pooled_auc = 0.0;  // all records as one curve; 0 without records
    std::vector<MethodTiming> timing;
};

// Groups records by method. Every record stands for one annotated object,
// so each group's ground-truth count is its size. Empty input gives an
// empty summary.
EvaluationSummary evaluate_records(const std::vector<DetectionRecord> &records);

// JSON with per-record results, curve points, AUC, timing table and the
// curve conventions; CSV rows "method,threshold,precision,recall".
void write_evaluation_report(const std::filesystem::path &json_path,
                             const std::filesystem::path &csv_path,
                             const EvaluationSummary &summary,
                             const std::vector<DetectionRecord> &records);

}  // namespace posekit::eval
