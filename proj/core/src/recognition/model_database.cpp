#include "posekit/recognition/model_database.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "posekit/error.hpp"
#include "posekit/features/feature_io.hpp"
#include "posekit/geometry/ply_io.hpp"
#include "posekit/geometry/sampling.hpp"

namespace posekit::recognition {

namespace fs = std::filesystem;
using nlohmann::json;

void DescriptionParams::validate() const {
    for (double v : {leaf, fpfh_radius, normal_radius}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::InvalidParameter, "description radii must be positive");
        }
    }
}

DescribedCloud describe_cloud(const PointCloud &raw, const DescriptionParams &params) {
    params.validate();
    const PointCloud down = geometry::voxel_downsample(raw, params.leaf);
    PointCloud cloud =
            geometry::estimate_normals(down, params.normal_radius, geometry::Vec3::Zero())
                    .quantized_to_float();
    features::FeatureSet fs = features::compute_fpfh(cloud, params.fpfh_radius);
    return {std::move(cloud), std::move(fs)};
}

ObjectView describe_view(std::string label, std::string view_id, const PointCloud &raw,
                         const DescriptionParams &params) {
    DescribedCloud d = describe_cloud(raw, params);
    return {std::move(label), std::move(view_id), std::move(d.cloud), std::move(d.features), {}};
}

namespace {

void check_name(const std::string &s, const char *what) {
    const bool bad = s.empty() || s == "." || s == ".." ||
                     s.find_first_of("/\\:") != std::string::npos;
    if (bad) {
        throw Error(ErrorCode::InvalidParameter,
                    std::string(what) + " '" + s + "' is not usable as a file name");
    }
}

json params_json(const DescriptionParams &p) {
    return {{"leaf_m", p.leaf}, {"fpfh_radius_m", p.fpfh_radius}, {"normal_radius_m", p.normal_radius}};
}

std::string describe(const DescriptionParams &p) { return params_json(p).dump(); }

}  // namespace

ModelDatabase::ModelDatabase(DescriptionParams params) : params_(params) { params_.validate(); }

void ModelDatabase::add_view(ObjectView view) {
    check_name(view.instance_label, "label");
    check_name(view.view_id, "view id");
    if (view.cloud.empty()) throw Error(ErrorCode::InvalidParameter, "view cloud is empty");
    view.features.validate(view.cloud.size());
    auto &list = instances_[view.instance_label];
    for (const auto &v : list) {
        if (v.view_id == view.view_id) {
            throw Error(ErrorCode::InvalidParameter, "duplicate view id '" + view.view_id + "'");
        }
    }
    list.push_back(std::move(view));
}

std::vector<std::string> ModelDatabase::labels() const {
    std::vector<std::string> out;
    for (const auto &[label, views] : instances_) out.push_back(label);
    return out;
}

const std::vector<ObjectView> &ModelDatabase::views(const std::string &label) const {
    const auto it = instances_.find(label);
    if (it == instances_.end()) {
        throw Error(ErrorCode::UnknownInstance, "no instance '" + label + "' in database");
    }
    return it->second;
}

std::size_t ModelDatabase::view_count() const noexcept {
    std::size_t n = 0;
    for (const auto &[label, views] : instances_) n += views.size();
    return n;
}

void ModelDatabase::check_compatible(const DescriptionParams &query) const {
    if (!(query == params_)) {
        throw Error(ErrorCode::CompatibilityError,
                    "database built with " + describe(params_) + ", query uses " + describe(query));
    }
}

void save_database(const fs::path &dir, const ModelDatabase &db) {
    fs::create_directories(dir);
    json instances = json::array();
    for (const auto &label : db.labels()) {
        fs::create_directories(dir / label);
        json views = json::array();
        for (const auto &v : db.views(label)) {
            const std::string stem = label + "/" + v.view_id;
            geometry::write_ply(dir / (stem + ".ply"), v.cloud, geometry::PlyFormat::BinaryLittleEndian);
            features::write_features(dir / (stem + ".fpfh"), v.features);
            json jv = {{"id", v.view_id}, {"cloud", stem + ".ply"}, {"features", stem + ".fpfh"}};
            if (v.source_pose_hint) {
                const geometry::Mat4 m = v.source_pose_hint->matrix();
                std::vector<double> flat(m.data(), m.data() + 16);  // column-major
                jv["pose_hint"] = flat;
            }
            views.push_back(std::move(jv));
        }
        instances.push_back({{"label", label}, {"views", std::move(views)}});
    }
    const json manifest = {{"format", "posekit-model-db"},
                           {"version", 1},
                           {"params", params_json(db.params())},
                           {"instances", std::move(instances)}};
    std::ofstream out(dir / "manifest.json");
    if (!out) throw Error(ErrorCode::IoError, "cannot write database manifest");
    out << manifest.dump(2) << '\n';
}

ModelDatabase load_database(const fs::path &dir, const std::optional<DescriptionParams> &expected) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw Error(ErrorCode::IoError, "no database manifest in " + dir.string());
    json manifest;
    DescriptionParams params;
    try {
        manifest = json::parse(in);
        if (manifest.at("format") != "posekit-model-db" || manifest.at("version") != 1) {
            throw Error(ErrorCode::ParseError, "unsupported database format");
        }
        const json &p = manifest.at("params");
        params.leaf = p.at("leaf_m").get<double>();
        params.fpfh_radius = p.at("fpfh_radius_m").get<double>();
        params.normal_radius = p.at("normal_radius_m").get<double>();
    } catch (const json::exception &e) {
        throw Error(ErrorCode::ParseError, std::string("bad database manifest: ") + e.what());
    }
    ModelDatabase db(params);
    if (expected) db.check_compatible(*expected);
    try {
        for (const json &inst : manifest.at("instances")) {
            const std::string label = inst.at("label").get<std::string>();
            const json &views = inst.at("views");
            if (views.empty()) {
                throw Error(ErrorCode::ParseError, "instance '" + label + "' has no views");
            }
            for (const json &jv : views) {
                ObjectView v;
                v.instance_label = label;
                v.view_id = jv.at("id").get<std::string>();
                v.cloud = geometry::read_ply(dir / jv.at("cloud").get<std::string>());
                v.features = features::read_features(dir / jv.at("features").get<std::string>());
                if (jv.contains("pose_hint")) {
                    const auto flat = jv.at("pose_hint").get<std::vector<double>>();
                    if (flat.size() != 16) throw Error(ErrorCode::ParseError, "pose_hint needs 16 values");
                    const geometry::Mat4 m = Eigen::Map<const geometry::Mat4>(flat.data());
                    v.source_pose_hint = RigidTransform(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
                }
                db.add_view(std::move(v));
            }
        }
    } catch (const json::exception &e) {
        throw Error(ErrorCode::ParseError, std::string("bad database manifest: ") + e.what());
    }
    return db;
}

}  // namespace posekit::recognition
