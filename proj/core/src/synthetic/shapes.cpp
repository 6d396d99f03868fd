#include "posekit/synthetic/shapes.hpp"

#include <cmath>
#include <numbers>

namespace posekit::synthetic {

namespace {

Vec3 random_unit(std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        const Vec3 v(g(rng), g(rng), g(rng));
        const double n = v.norm();
        if (n > 1e-12) return v / n;
    }
}

}  // namespace

BlobShape BlobShape::random(std::uint64_t seed, double radius) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(6.0, 12.0);
    std::uniform_real_distribution<double> amp(0.04, 0.12);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    BlobShape s;
    s.radius = radius;
    for (int k = 0; k < 6; ++k) {
        s.wave_dir[k] = random_unit(rng);
        s.wave_freq[k] = freq(rng);
        s.wave_amp[k] = amp(rng);
        s.wave_phase[k] = phase(rng);
    }
    return s;
}

double BlobShape::radius_along(const Vec3 &d) const {
    double r = 1.0;
    for (int k = 0; k < 6; ++k) {
        r += wave_amp[k] * std::sin(wave_freq[k] * d.dot(wave_dir[k]) + wave_phase[k]);
    }
    return radius * r;
}

Vec3 BlobShape::surface_point(const Vec3 &d) const { return radius_along(d) * d; }

PointCloud sample_blob(const BlobShape &shape, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Vec3> pts;
    std::vector<Vec3> colors;
    pts.reserve(count);
    colors.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Vec3 d = random_unit(rng);
        pts.push_back(shape.surface_point(d));
        colors.push_back(0.5 * (d + Vec3::Ones()));
    }
    return PointCloud(std::move(pts), {}, std::move(colors));
}

PointCloud random_blob(std::size_t count, std::uint64_t seed, double radius) {
    return sample_blob(BlobShape::random(seed, radius), count, seed + 1);
}

PointCloud add_noise(const PointCloud &cloud, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<Vec3> pts(cloud.points().begin(), cloud.points().end());
    for (auto &p : pts) p += Vec3(g(rng), g(rng), g(rng));
    return PointCloud(std::move(pts), {},
                      std::vector<Vec3>(cloud.colors().begin(), cloud.colors().end()));
}

RigidTransform random_pose(std::mt19937_64 &rng, double max_angle, double max_translation) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Vec3 axis = random_unit(rng);
    const double angle = max_angle * u(rng);
    const Vec3 dir = random_unit(rng);
    const double r = max_translation * std::cbrt(u(rng));
    return RigidTransform::from_axis_angle(axis, angle, r * dir);
}

}  // namespace posekit::synthetic
