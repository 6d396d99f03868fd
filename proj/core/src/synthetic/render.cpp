#include "posekit/synthetic/render.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace posekit::synthetic {

SyntheticObject make_object(std::string label, std::uint64_t seed, double radius,
                            std::size_t surface_points) {
    SyntheticObject obj{std::move(label), BlobShape::random(seed, radius), {}};
    std::mt19937_64 rng(seed ^ 0xC0FFEEull);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Vec3 a(u(rng), u(rng), u(rng));
    const Vec3 b(u(rng), u(rng), u(rng));
    const Vec3 stripe_dir = Vec3(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5).normalized();
    const double stripe_freq = 10.0 + 20.0 * u(rng);

    const PointCloud raw = sample_blob(obj.shape, surface_points, seed + 1);
    std::vector<Vec3> colors;
    colors.reserve(raw.size());
    for (const auto &p : raw.points()) {
        const double w = 0.5 + 0.5 * std::sin(stripe_freq * p.dot(stripe_dir) / radius);
        colors.push_back((1.0 - w) * a + w * b);
    }
    obj.surface = PointCloud(std::vector<Vec3>(raw.points().begin(), raw.points().end()), {},
                             std::move(colors));
    return obj;
}

RenderedScene render_scene(std::span<const Placement> objects, const ingest::CameraIntrinsics &k,
                           int splat) {
    k.validate();
    const std::size_t n = static_cast<std::size_t>(k.width) * k.height;
    std::vector<double> zbuf(n, std::numeric_limits<double>::infinity());
    std::vector<int> owner(n, -1);
    RenderedScene out{ingest::DepthImage(k.width, k.height), ingest::RgbImage(k.width, k.height),
                      {}};

    for (std::size_t o = 0; o < objects.size(); ++o) {
        const PointCloud &surface = objects[o].object->surface;
        for (std::size_t i = 0; i < surface.size(); ++i) {
            const Vec3 p = objects[o].pose.apply(surface.point(i));
            if (p.z() <= 1e-6) continue;
            const Eigen::Vector2d uv = k.project(p);
            const int uc = static_cast<int>(std::lround(uv.x()));
            const int vc = static_cast<int>(std::lround(uv.y()));
            for (int dv = -splat; dv <= splat; ++dv) {
                for (int du = -splat; du <= splat; ++du) {
                    const int u = uc + du;
                    const int v = vc + dv;
                    if (u < 0 || v < 0 || u >= k.width || v >= k.height) continue;
                    const std::size_t idx = static_cast<std::size_t>(v) * k.width + u;
                    if (p.z() < zbuf[idx]) {
                        zbuf[idx] = p.z();
                        owner[idx] = static_cast<int>(o);
                        std::uint8_t *c = out.rgb.at(u, v);
                        const Vec3 &col = surface.colors()[i];
                        for (int ch = 0; ch < 3; ++ch) {
                            c[ch] = static_cast<std::uint8_t>(std::lround(255.0 * col[ch]));
                        }
                    }
                }
            }
        }
    }

    std::vector<ingest::BBox2d> extent(objects.size(), {k.width, k.height, -1, -1});
    std::vector<bool> seen(objects.size(), false);
    for (int v = 0; v < k.height; ++v) {
        for (int u = 0; u < k.width; ++u) {
            const std::size_t idx = static_cast<std::size_t>(v) * k.width + u;
            const int o = owner[idx];
            if (o < 0) continue;
            const double d = std::round(zbuf[idx] * k.depth_scale);
            if (d < 1.0 || d > 65535.0) continue;
            out.depth.at(u, v) = static_cast<std::uint16_t>(d);
            // x, y hold the min corner, width/height the max corner until the end
            auto &e = extent[o];
            e.x = std::min(e.x, u);
            e.y = std::min(e.y, v);
            e.width = std::max(e.width, u);
            e.height = std::max(e.height, v);
            seen[o] = true;
        }
    }
    for (std::size_t o = 0; o < objects.size(); ++o) {
        if (!seen[o]) continue;
        const auto &e = extent[o];
        out.annotations.push_back(
                {objects[o].object->label, {e.x, e.y, e.width - e.x + 1, e.height - e.y + 1}, {}});
    }
    return out;
}

PointCloud render_view(const SyntheticObject &object, const RigidTransform &pose,
                       const ingest::CameraIntrinsics &k) {
    const Placement p{&object, pose};
    const RenderedScene scene = render_scene(std::span<const Placement>(&p, 1), k);
    return ingest::depth_to_cloud(scene.depth, &scene.rgb, k);
}

RigidTransform random_view_pose(std::mt19937_64 &rng, double distance) {
    const RigidTransform r = random_pose(rng, std::numbers::pi, 0.0);
    return RigidTransform(r.rotation(), Vec3(0.0, 0.0, distance));
}

}  // namespace posekit::synthetic
