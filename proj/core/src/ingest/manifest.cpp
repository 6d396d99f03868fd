#include "posekit/ingest/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "posekit/error.hpp"

namespace posekit::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path &base, const std::string &p) {
    const fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string relative_to(const fs::path &base, const fs::path &p) {
    // In-memory paths are relative to the working directory, on disk to the manifest.
    const fs::path abs = fs::absolute(p).lexically_normal();
    const fs::path rel = abs.lexically_relative(fs::absolute(base).lexically_normal());
    if (rel.empty() || *rel.begin() == "..") return abs.generic_string();
    return rel.generic_string();
}

void require_file(const fs::path &p) {
    if (!fs::is_regular_file(p)) throw Error(ErrorCode::IoError, "missing file " + p.string());
}

}  // namespace

Dataset load_dataset(const fs::path &manifest) {
    std::ifstream in(manifest);
    if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + manifest.string());
    const fs::path base = manifest.parent_path();
    Dataset ds;
    try {
        const json j = json::parse(in);
        if (j.contains("intrinsics")) {
            const json &k = j.at("intrinsics");
            ds.intrinsics.fx = k.value("fx", ds.intrinsics.fx);
            ds.intrinsics.fy = k.value("fy", ds.intrinsics.fy);
            ds.intrinsics.cx = k.value("cx", ds.intrinsics.cx);
            ds.intrinsics.cy = k.value("cy", ds.intrinsics.cy);
            ds.intrinsics.width = k.value("width", ds.intrinsics.width);
            ds.intrinsics.height = k.value("height", ds.intrinsics.height);
            ds.intrinsics.depth_scale = k.value("depth_scale", ds.intrinsics.depth_scale);
        }
        for (const json &f : j.at("frames")) {
            FrameManifest frame;
            frame.id = f.at("id").get<std::string>();
            frame.rgb = resolve(base, f.at("rgb").get<std::string>());
            frame.depth = resolve(base, f.at("depth").get<std::string>());
            for (const json &a : f.value("annotations", json::array())) {
                Annotation ann;
                ann.label = a.at("label").get<std::string>();
                const auto box = a.at("bbox").get<std::vector<int>>();
                if (box.size() != 4) throw Error(ErrorCode::ParseError, "bbox needs 4 values");
                ann.bbox = {box[0], box[1], box[2], box[3]};
                if (a.contains("embedding")) {
                    ann.embedding = resolve(base, a.at("embedding").get<std::string>());
                }
                frame.annotations.push_back(std::move(ann));
            }
            ds.frames.push_back(std::move(frame));
        }
    } catch (const json::exception &e) {
        throw Error(ErrorCode::ParseError, "bad manifest " + manifest.string() + ": " + e.what());
    }
    ds.intrinsics.validate();
    for (const auto &f : ds.frames) {
        require_file(f.rgb);
        require_file(f.depth);
        for (const auto &a : f.annotations) {
            if (a.embedding) require_file(*a.embedding);
        }
    }
    return ds;
}

void save_dataset(const fs::path &manifest, const Dataset &dataset) {
    const fs::path base = manifest.parent_path();
    const CameraIntrinsics &k = dataset.intrinsics;
    json j;
    j["intrinsics"] = {{"fx", k.fx},         {"fy", k.fy},          {"cx", k.cx},
                       {"cy", k.cy},         {"width", k.width},    {"height", k.height},
                       {"depth_scale", k.depth_scale}};
    json frames = json::array();
    for (const auto &f : dataset.frames) {
        json anns = json::array();
        for (const auto &a : f.annotations) {
            json ja = {{"label", a.label},
                       {"bbox", {a.bbox.x, a.bbox.y, a.bbox.width, a.bbox.height}}};
            if (a.embedding) ja["embedding"] = relative_to(base, *a.embedding);
            anns.push_back(std::move(ja));
        }
        frames.push_back({{"id", f.id},
                          {"rgb", relative_to(base, f.rgb)},
                          {"depth", relative_to(base, f.depth)},
                          {"annotations", std::move(anns)}});
    }
    j["frames"] = std::move(frames);
    std::ofstream out(manifest);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + manifest.string());
    out << j.dump(2) << '\n';
}

FrameImages load_frame_images(const FrameManifest &frame) {
    return {read_depth_png(frame.depth), read_rgb_png(frame.rgb)};
}

}  // namespace posekit::ingest
