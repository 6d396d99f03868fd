#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "posekit/geometry/rigid_transform.hpp"

// Seeded test geometry shared by the tests, benchmarks and the demo data
// generator. Nothing here is used by the pipeline itself.
namespace posekit::synthetic {

using geometry::PointCloud;
using geometry::RigidTransform;
using geometry::Vec3;

// Star-shaped closed surface: a sphere of `radius` whose radius is modulated
// by a few random low-frequency waves. Points are uniform in direction.
// Colors vary smoothly with position; no normals.
struct BlobShape {
    double radius = 0.15;
    Vec3 wave_dir[6];
    double wave_freq[6];
    double wave_amp[6];
    double wave_phase[6];

    static BlobShape random(std::uint64_t seed, double radius = 0.15);
    double radius_along(const Vec3 &unit_dir) const;
    Vec3 surface_point(const Vec3 &unit_dir) const;
};

PointCloud sample_blob(const BlobShape &shape, std::size_t count, std::uint64_t seed);

// sample_blob(BlobShape::random(seed), count, seed + 1)
PointCloud random_blob(std::size_t count, std::uint64_t seed, double radius = 0.15);

// i.i.d. Gaussian jitter of every coordinate.
PointCloud add_noise(const PointCloud &cloud, double sigma, std::uint64_t seed);

// Rotation about a uniformly random axis by an angle uniform in
// [0, max_angle], translation uniform in the ball of radius max_translation.
RigidTransform random_pose(std::mt19937_64 &rng, double max_angle, double max_translation);

}  // namespace posekit::synthetic
