#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "posekit/error.hpp"
#include "posekit/geometry/aabb.hpp"
#include "posekit/geometry/kd_tree.hpp"
#include "posekit/geometry/ply_io.hpp"
#include "posekit/geometry/rigid_transform.hpp"
#include "posekit/geometry/sampling.hpp"
#include "posekit/synthetic/shapes.hpp"

using namespace posekit;
using namespace posekit::geometry;

TEST(KdTree, RadiusMatchesBruteForce) {
    const auto pts = oracle::uniform_points(1000, 1);
    const KdTree tree(pts);
    const auto queries = oracle::uniform_points(100, 2, 1.2);
    for (const auto &q : queries) {
        for (double r : {0.05, 0.2, 0.5}) {
            EXPECT_EQ(tree.radius_search(q, r), oracle::brute_radius(pts, q, r));
        }
    }
}

TEST(KdTree, NearestMatchesBruteForce) {
    const auto pts = oracle::uniform_points(1000, 3);
    const KdTree tree(pts);
    for (const auto &q : oracle::uniform_points(100, 4, 1.5)) {
        EXPECT_EQ(tree.nearest(q), oracle::brute_nearest(pts, q));
    }
}

TEST(KdTree, HighDimensionalMatchesLinearScan) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    constexpr std::size_t dim = 33;
    std::vector<double> data(1000 * dim);
    for (auto &x : data) x = u(rng);
    const KdTree tree(data, dim);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> q(dim);
        for (auto &x : q) x = u(rng);
        std::size_t best = 0;
        double best2 = INFINITY;
        for (std::size_t i = 0; i < 1000; ++i) {
            double d2 = 0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double d = data[i * dim + j] - q[j];
                d2 += d * d;
            }
            if (d2 < best2) best2 = d2, best = i;
        }
        const auto nn = tree.nearest(q);
        EXPECT_EQ(nn.index, best);
        EXPECT_EQ(nn.distance, std::sqrt(best2));
    }
}

TEST(KdTree, TrivialCases) {
    const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 5, 0}};
    const KdTree tree(pts);
    auto hits = tree.radius_search(pts[3], 1e-6);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0], (Neighbor{3, 0.0}));
    EXPECT_TRUE(tree.radius_search(Vec3(0.5, 2.5, 3.0), 0.1).empty());
    // (0,0,0) is stored; queries on the y axis are equidistant from 1 and 2
    EXPECT_EQ(tree.nearest(Vec3(0, 0, 0)).distance, 0.0);
    EXPECT_EQ(tree.nearest(Vec3(0, 0, 0)).index, 0u);
    const KdTree two(std::vector<Vec3>{{1, 0, 0}, {-1, 0, 0}});
    EXPECT_EQ(two.nearest(Vec3(0, 0.3, 0)).index, 0u);
    EXPECT_THROW(KdTree().nearest(Vec3::Zero()), Error);
    EXPECT_FALSE(tree.nearest_within(Vec3(10, 10, 10), 1.0).has_value());
}

TEST(VoxelDownsample, SpecCases) {
    EXPECT_TRUE(voxel_downsample(PointCloud{}, 0.01).empty());
    const PointCloud one(std::vector<Vec3>{{0.005, 0.005, 0.005}});
    const auto d1 = voxel_downsample(one, 0.01);
    ASSERT_EQ(d1.size(), 1u);
    EXPECT_EQ(d1.point(0), one.point(0));

    std::vector<Vec3> corners;
    for (int i = 0; i < 8; ++i)
        corners.emplace_back(i & 1 ? 0.005 : -0.005, i & 2 ? 0.005 : -0.005,
                             i & 4 ? 0.005 : -0.005);
    const auto d = voxel_downsample(PointCloud(corners), 0.05);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_NEAR(d.point(0).norm(), 0.0, 1e-15);
    EXPECT_THROW(voxel_downsample(one, 0.0), Error);
}

TEST(VoxelDownsample, OnePointPerVoxelAndIdempotentOccupancy) {
    const PointCloud cloud(oracle::uniform_points(5000, 9, 0.2));
    const double leaf = 0.03;
    const auto d = voxel_downsample(cloud, leaf);
    std::set<std::array<long, 3>> keys;
    for (const auto &p : d.points()) {
        keys.insert({std::lround(std::floor(p.x() / leaf + 0.5)),
                     std::lround(std::floor(p.y() / leaf + 0.5)),
                     std::lround(std::floor(p.z() / leaf + 0.5))});
    }
    EXPECT_EQ(keys.size(), d.size());
    EXPECT_EQ(voxel_downsample(d, leaf).size(), d.size());
}

TEST(EstimateNormals, PlaneOrientation) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) pts.emplace_back(0.01 * i, 0.01 * j, 0.0);
    const PointCloud plane(pts);
    for (double s : {1.0, -1.0}) {
        const auto n = estimate_normals(plane, 0.025, Vec3(0, 0, s));
        for (std::size_t i = 0; i < n.size(); ++i) {
            ASSERT_TRUE(n.normal_valid(i));
            EXPECT_NEAR((n.normal(i) - Vec3(0, 0, s)).norm(), 0.0, 1e-6);
        }
    }
}

TEST(EstimateNormals, MatchesPcaOracle) {
    const auto cloud = synthetic::random_blob(200, 17, 0.1).without_normals();
    const double radius = 0.05;
    const Vec3 viewpoint(0, 0, 1);
    const auto n = estimate_normals(cloud, radius, viewpoint);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto ref = oracle::naive_normal(cloud, i, radius);
        ASSERT_EQ(ref.has_value(), n.normal_valid(i)) << i;
        if (!ref) continue;
        Vec3 r = *ref;
        if (r.dot(viewpoint - cloud.point(i)) < 0) r = -r;
        EXPECT_NEAR((n.normal(i) - r).norm(), 0.0, 1e-6) << i;
        ++checked;
    }
    EXPECT_GT(checked, 150u);
}

TEST(RigidTransform, Basics) {
    const auto rz = RigidTransform::from_axis_angle(Vec3::UnitZ(), std::numbers::pi / 2);
    EXPECT_NEAR((rz.apply(Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);

    const PointCloud cloud(oracle::uniform_points(50, 3));
    EXPECT_EQ(apply_transform(cloud, RigidTransform::identity()), cloud);

    std::mt19937_64 rng(4);
    const auto t = synthetic::random_pose(rng, 2.0, 1.0);
    const auto back = apply_transform(apply_transform(cloud, t), t.inverse());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        EXPECT_NEAR((back.point(i) - cloud.point(i)).norm(), 0.0, 1e-12);
    EXPECT_TRUE(is_rotation(t.rotation()));

    Mat3 bad = Mat3::Identity();
    bad(0, 0) = -1;
    EXPECT_THROW(RigidTransform(bad, Vec3::Zero()), Error);
}

TEST(Aabb, Cases) {
    const PointCloud single(std::vector<Vec3>{{1, 2, 3}});
    EXPECT_EQ(bounding_box(single), Aabb(Vec3(1, 2, 3), Vec3(1, 2, 3)));
    std::vector<Vec3> corners;
    for (int i = 0; i < 8; ++i) corners.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    EXPECT_EQ(bounding_box(PointCloud(corners)), Aabb(Vec3::Zero(), Vec3::Ones()));
    EXPECT_THROW(bounding_box(PointCloud{}), Error);

    // Box of the moved points, not the moved box.
    const auto r = RigidTransform::from_axis_angle(Vec3::UnitZ(), std::numbers::pi / 4);
    const auto moved = apply_transform(PointCloud(corners), r);
    Vec3 lo = Vec3::Constant(INFINITY), hi = -lo;
    for (const auto &p : moved.points()) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
    EXPECT_EQ(bounding_box(moved), Aabb(lo, hi));
}

TEST(Ply, RoundTripBinaryAndAscii) {
    oracle::TempDir tmp("ply");
    auto cloud = estimate_normals(synthetic::random_blob(300, 5, 0.1), 0.04).quantized_to_float();
    for (auto fmt : {PlyFormat::BinaryLittleEndian, PlyFormat::Ascii}) {
        const auto path = tmp.path() / "c.ply";
        write_ply(path, cloud, fmt);
        const auto back = read_ply(path);
        ASSERT_EQ(back.size(), cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            EXPECT_NEAR((back.point(i) - cloud.point(i)).norm(), 0.0, 1e-6);
            EXPECT_EQ(back.normal_valid(i), cloud.normal_valid(i));
        }
    }
    EXPECT_THROW(read_ply(tmp.path() / "missing.ply"), Error);
}
