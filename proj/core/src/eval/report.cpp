#include "posekit/eval/report.hpp"

#include <fstream>
#include <map>

#include <json.hpp>

#include "posekit/error.hpp"

namespace posekit::eval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json vec_json(const geometry::Vec3 &v) { return {v.x(), v.y(), v.z()}; }

geometry::Vec3 json_vec(const json &j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3) throw Error(ErrorCode::ParseError, "expected a 3-vector");
    return {v[0], v[1], v[2]};
}

json box_json(const Aabb &b) { return {{"min", vec_json(b.min())}, {"max", vec_json(b.max())}}; }

Aabb json_box(const json &j) { return Aabb(json_vec(j.at("min")), json_vec(j.at("max"))); }

json transform_json(const geometry::RigidTransform &t) {
    json r = json::array();
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) r.push_back(t.rotation()(i, k));
    }
    return {{"rotation", r}, {"translation", vec_json(t.translation())}};
}

geometry::RigidTransform json_transform(const json &j) {
    const auto r = j.at("rotation").get<std::vector<double>>();
    if (r.size() != 9) throw Error(ErrorCode::ParseError, "rotation needs 9 values");
    geometry::Mat3 m;
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) m(i, k) = r[static_cast<std::size_t>(3 * i + k)];
    }
    return {m, json_vec(j.at("translation"))};
}

json timings_json(const StageTimings &t) {
    json j = json::object();
    if (t.classify) j["classify"] = *t.classify;
    if (t.coarse) j["coarse"] = *t.coarse;
    if (t.icp) j["icp"] = *t.icp;
    return j;
}

template <class T>
std::optional<T> opt(const json &j, const char *key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

json record_json(const DetectionRecord &r) {
    json j = {{"frame_id", r.frame_id},
              {"annotation_index", r.annotation_index},
              {"instance_label", r.instance_label},
              {"predicted_label", r.predicted_label},
              {"method", r.method},
              {"mode", r.mode},
              {"correspondence_count", r.correspondence_count},
              {"coarse_inlier_ratio", r.coarse_inlier_ratio},
              {"coarse_inlier_rmse", r.coarse_inlier_rmse},
              {"iou", r.iou},
              {"mir", r.mir},
              {"is_true_positive", r.is_true_positive},
              {"error", r.error}};
    if (r.view_id) j["view_id"] = *r.view_id;
    if (r.transform) j["transform"] = transform_json(*r.transform);
    if (r.icp_fitness) j["icp_fitness"] = *r.icp_fitness;
    if (r.icp_rmse) j["icp_rmse"] = *r.icp_rmse;
    if (r.est_box) j["est_box"] = box_json(*r.est_box);
    if (r.gt_box) j["gt_box"] = box_json(*r.gt_box);
    j["stage_timings"] = timings_json(r.stage_timings);
    return j;
}

DetectionRecord json_record(const json &j) {
    DetectionRecord r;
    r.frame_id = j.at("frame_id").get<std::string>();
    r.annotation_index = j.value("annotation_index", std::size_t{0});
    r.instance_label = j.at("instance_label").get<std::string>();
    r.predicted_label = j.value("predicted_label", std::string());
    r.method = j.value("method", std::string());
    r.mode = j.value("mode", std::string());
    r.correspondence_count = j.value("correspondence_count", std::size_t{0});
    r.coarse_inlier_ratio = j.value("coarse_inlier_ratio", 0.0);
    r.coarse_inlier_rmse = j.value("coarse_inlier_rmse", 0.0);
    r.iou = j.value("iou", 0.0);
    r.mir = j.value("mir", 0.0);
    r.is_true_positive = j.value("is_true_positive", false);
    r.error = j.value("error", std::string());
    r.view_id = opt<std::string>(j, "view_id");
    if (j.contains("transform")) r.transform = json_transform(j.at("transform"));
    r.icp_fitness = opt<double>(j, "icp_fitness");
    r.icp_rmse = opt<double>(j, "icp_rmse");
    if (j.contains("est_box")) r.est_box = json_box(j.at("est_box"));
    if (j.contains("gt_box")) r.gt_box = json_box(j.at("gt_box"));
    if (j.contains("stage_timings")) {
        const json &t = j.at("stage_timings");
        r.stage_timings.classify = opt<double>(t, "classify");
        r.stage_timings.coarse = opt<double>(t, "coarse");
        r.stage_timings.icp = opt<double>(t, "icp");
    }
    return r;
}

json timing_table_json(const std::vector<MethodTiming> &timing) {
    json out = json::array();
    for (const auto &m : timing) {
        json cols = json::array();
        for (const auto &c : m.columns) {
            cols.push_back({{"stages", c.name},
                            {"mean_seconds", c.mean_seconds},
                            {"fps", c.fps},
                            {"samples", c.samples}});
        }
        out.push_back({{"method", m.method}, {"columns", std::move(cols)}});
    }
    return out;
}

void write_text(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void strip(json &j) {
    if (j.is_object()) {
        j.erase("stage_timings");
        j.erase("timing");
        for (auto &[key, value] : j.items()) strip(value);
    } else if (j.is_array()) {
        for (auto &v : j) strip(v);
    }
}

}  // namespace

void write_run_report(const fs::path &path, const RunReport &report) {
    json records = json::array();
    for (const auto &r : report.records) records.push_back(record_json(r));
    json config;
    try {
        config = json::parse(report.config_json);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::InvalidParameter, std::string("config is not JSON: ") + e.what());
    }
    const json j = {{"format", "posekit-run-report"},
                    {"version", 1},
                    {"config", std::move(config)},
                    {"records", std::move(records)},
                    {"timing", timing_table_json(aggregate_timings(report.records))}};
    write_text(path, j.dump(2) + "\n");
}

RunReport read_run_report(const fs::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    RunReport report;
    try {
        const json j = json::parse(in);
        if (j.at("format") != "posekit-run-report") {
            throw Error(ErrorCode::ParseError, "not a run report: " + path.string());
        }
        report.config_json = j.value("config", json::object()).dump();
        for (const json &r : j.at("records")) report.records.push_back(json_record(r));
    } catch (const json::exception &e) {
        throw Error(ErrorCode::ParseError, "bad run report " + path.string() + ": " + e.what());
    }
    return report;
}

std::string strip_timing_fields(const std::string &json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    strip(j);
    return j.dump();
}

EvaluationSummary evaluate_records(const std::vector<DetectionRecord> &records) {
    std::map<std::string, std::vector<DetectionRecord>> groups;
    for (const auto &r : records) groups[r.method].push_back(r);
    EvaluationSummary summary;
    for (const auto &[method, group] : groups) {
        MethodSummary m;
        m.method = method;
        m.ground_truth = group.size();
        for (const auto &r : group) m.true_positives += r.is_true_positive ? 1 : 0;
        m.curve = prc_auc(std::span<const DetectionRecord>(group), group.size());
        summary.methods.push_back(std::move(m));
    }
    if (!records.empty()) {
        summary.pooled_auc = prc_auc(std::span<const DetectionRecord>(records), records.size()).auc;
    }
    summary.timing = aggregate_timings(records);
    return summary;
}

void write_evaluation_report(const fs::path &json_path, const fs::path &csv_path,
                             const EvaluationSummary &summary,
                             const std::vector<DetectionRecord> &records) {
    json methods = json::array();
    std::string csv = "method,threshold,precision,recall\n";
    for (const auto &m : summary.methods) {
        json pts = json::array();
        for (const auto &p : m.curve.points) {
            pts.push_back({{"threshold", p.threshold}, {"precision", p.precision}, {"recall", p.recall}});
            csv += m.method + "," + std::to_string(p.threshold) + "," + json(p.precision).dump() +
                   "," + json(p.recall).dump() + "\n";
        }
        methods.push_back({{"method", m.method},
                           {"ground_truth", m.ground_truth},
                           {"true_positives", m.true_positives},
                           {"auc", m.curve.auc},
                           {"curve", std::move(pts)}});
    }
    json recs = json::array();
    for (const auto &r : records) recs.push_back(record_json(r));
    const json j = {
            {"format", "posekit-evaluation"},
            {"version", 1},
            {"conventions",
             {{"true_positive", "label correct and (IoU >= 0.25 or MIR >= 0.90)"},
              {"thresholds", "minimum correspondence count, 3 .. max observed"},
              {"auc", "trapezoid over recall, points in decreasing threshold order, anchored at "
                      "(recall 0, precision at highest threshold)"},
              {"boxes", "axis-aligned, camera frame"}}},
            {"auc", summary.pooled_auc},
            {"methods", std::move(methods)},
            {"timing", timing_table_json(summary.timing)},
            {"records", std::move(recs)}};
    write_text(json_path, j.dump(2) + "\n");
    write_text(csv_path, csv);
}

}  // namespace posekit::eval
