#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "posekit/error.hpp"
#include "posekit/geometry/rigid_transform.hpp"
#include "posekit/geometry/sampling.hpp"
#include "posekit/registration/coarse.hpp"
#include "posekit/registration/correspondence.hpp"
#include "posekit/registration/icp.hpp"
#include "posekit/synthetic/shapes.hpp"

using namespace posekit;
using namespace posekit::registration;
using geometry::Vec3;
using geometry::Vec6;

namespace {

struct Prepared {
    PointCloud cloud;
    features::FeatureSet features;
};

Prepared prepare(const PointCloud &raw, double normal_radius = 0.02) {
    auto d = geometry::voxel_downsample(raw, 0.01);
    auto n = geometry::estimate_normals(d, normal_radius);
    auto f = features::compute_fpfh(n, 0.05);
    return {n, f};
}

features::FeatureSet random_features(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 50.0f);
    features::FeatureSet fs;
    for (std::size_t i = 0; i < n; ++i) {
        fs.keypoint_indices.push_back(static_cast<std::uint32_t>(i));
        features::FpfhDescriptor d;
        for (auto &b : d) b = u(rng);
        fs.descriptors.push_back(d);
    }
    return fs;
}

double rot_err(const RigidTransform &a, const RigidTransform &b) {
    return geometry::rotation_distance(a.rotation(), b.rotation());
}

}  // namespace

TEST(Matching, SelfMatch) {
    const auto fs = random_features(50, 1);
    const auto m = match_features(fs, fs, false);
    ASSERT_EQ(m.size(), 50u);
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_EQ(m[i].target_index, i);
        EXPECT_EQ(m[i].feature_distance, 0.0);
    }
}

TEST(Matching, MatchesAllPairsArgmin) {
    const auto a = random_features(100, 2), b = random_features(100, 3);
    const auto fwd = match_features(a, b, false);
    const auto back = match_features(b, a, false);
    for (std::size_t i = 0; i < 100; ++i) {
        std::size_t best = 0;
        double best2 = INFINITY;
        for (std::size_t j = 0; j < 100; ++j) {
            double d2 = 0;
            for (std::size_t k = 0; k < 33; ++k) {
                const double d = double(a.descriptors[i][k]) - double(b.descriptors[j][k]);
                d2 += d * d;
            }
            if (d2 < best2) best2 = d2, best = j;
        }
        EXPECT_EQ(fwd[i].target_index, best);
    }
    const auto mutual = match_features(a, b, true);
    std::size_t expected = 0;
    for (const auto &c : fwd) expected += back[c.target_index].target_index == c.source_index;
    EXPECT_EQ(mutual.size(), expected);
    for (const auto &c : mutual) EXPECT_EQ(back[c.target_index].target_index, c.source_index);
}

TEST(Matching, MutualCanBeEmpty) {
    // Two sources both closest to target 0, which prefers neither of them
    // over a third source that prefers target 1.
    features::FeatureSet s, t;
    auto put = [](features::FeatureSet &fs, float v) {
        features::FpfhDescriptor d{};
        d[0] = v;
        fs.keypoint_indices.push_back(static_cast<std::uint32_t>(fs.size()));
        fs.descriptors.push_back(d);
    };
    put(s, 0.0f);
    put(t, 10.0f);
    put(t, -100.0f);
    const auto fwd = match_features(s, t, false);
    EXPECT_EQ(fwd.size(), 1u);
    features::FeatureSet s2 = s;
    put(s2, 10.0f);
    // source 0 -> target 0, but target 0 -> source 1
    const auto m = filter_mutual(s2, t, CorrespondenceSet{fwd[0]});
    EXPECT_TRUE(m.empty());
    EXPECT_THROW(match_features(features::FeatureSet{}, t, false), Error);
}

TEST(EstimateRigid, Cases) {
    const auto src = oracle::uniform_points(30, 4, 0.2);
    const auto id = estimate_rigid(src, src);
    EXPECT_NEAR((id.matrix() - Eigen::Matrix4d::Identity()).norm(), 0.0, 1e-12);

    const auto t = RigidTransform::from_axis_angle(Vec3::UnitZ(), std::numbers::pi / 6,
                                                   Vec3(0.1, 0, 0));
    std::vector<Vec3> dst;
    for (const auto &p : src) dst.push_back(t.apply(p));
    const auto est = estimate_rigid(src, dst);
    EXPECT_NEAR((est.matrix() - t.matrix()).norm(), 0.0, 1e-9);

    const std::vector<Vec3> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    try {
        estimate_rigid(line, line);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateConfiguration);
    }
}

TEST(Ransac, SelfRegistration) {
    // 3 cm normals leave no point without a descriptor.
    const auto p = prepare(synthetic::random_blob(2000, 11), 0.03);
    ASSERT_EQ(p.features.size(), p.cloud.size());
    CoarseParams params;
    const auto r = ransac_registration(p.cloud, p.cloud, p.features, p.features, params);
    EXPECT_GE(r.inlier_ratio, 0.99);
    EXPECT_NEAR((r.transform.matrix() - Eigen::Matrix4d::Identity()).norm(), 0.0, 1e-6);
    EXPECT_TRUE(geometry::is_rotation(r.transform.rotation()));
    EXPECT_EQ(r.inlier_count, r.correspondence_set.size());
}

TEST(Ransac, TooFewCorrespondences) {
    const auto p = prepare(synthetic::random_blob(2000, 12));
    CorrespondenceSet two{{0, 0, 0.0}, {1, 1, 0.0}};
    try {
        ransac_from_correspondences(p.cloud, p.cloud, p.features, p.features, two, {});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewCorrespondences);
    }
}

TEST(Ransac, KnownTransformAndRmseConsistency) {
    const auto src = prepare(synthetic::random_blob(2000, 13));
    std::mt19937_64 rng(1);
    const auto gt = synthetic::random_pose(rng, 0.5, 0.3);
    // Moving the described cloud keeps the features exact.
    const auto moved = geometry::apply_transform(src.cloud, gt);
    const auto r = ransac_registration(src.cloud, moved, src.features, src.features, {});
    EXPECT_LT(rot_err(r.transform, gt), 1e-3);
    EXPECT_LT((r.transform.translation() - gt.translation()).norm(), 1e-3);

    double sse = 0;
    for (const auto &c : r.correspondence_set) {
        const Vec3 a = r.transform.apply(src.cloud.point(src.features.keypoint_indices[c.source_index]));
        const Vec3 b = moved.point(src.features.keypoint_indices[c.target_index]);
        sse += (a - b).squaredNorm();
    }
    EXPECT_NEAR(r.inlier_rmse, std::sqrt(sse / r.inlier_count), 1e-12);
}

TEST(Ransac, SameResultAtAnyThreadCount) {
    const auto a = prepare(synthetic::random_blob(2000, 14));
    std::mt19937_64 rng(2);
    const auto b = prepare(synthetic::add_noise(
            geometry::apply_transform(synthetic::random_blob(2000, 14), synthetic::random_pose(rng, 0.4, 0.2)),
            0.002, 3));
    CoarseParams p;
    p.seed = 42;
    const auto r1 = ransac_registration(a.cloud, b.cloud, a.features, b.features, p);
    p.threads = 3;
    const auto r3 = ransac_registration(a.cloud, b.cloud, a.features, b.features, p);
    EXPECT_EQ(r1.transform, r3.transform);
    EXPECT_EQ(r1.correspondence_set, r3.correspondence_set);
    EXPECT_EQ(r1.iterations, r3.iterations);
}

TEST(Fgr, SelfAndKnownTransform) {
    const auto p = prepare(synthetic::random_blob(2000, 11), 0.03);
    ASSERT_EQ(p.features.size(), p.cloud.size());
    const auto self = fgr_registration(p.cloud, p.cloud, p.features, p.features, {});
    EXPECT_GE(self.inlier_ratio, 0.99);
    EXPECT_NEAR((self.transform.matrix() - Eigen::Matrix4d::Identity()).norm(), 0.0, 1e-6);

    std::mt19937_64 rng(3);
    const auto gt = synthetic::random_pose(rng, 0.5, 0.3);
    const auto moved = geometry::apply_transform(p.cloud, gt);
    const auto r = fgr_registration(p.cloud, moved, p.features, p.features, {});
    EXPECT_LT(rot_err(r.transform, gt), 1e-2);
    for (const auto &s : r.fgr_trace) EXPECT_LE(s.objective_after, s.objective_before * (1 + 1e-12));
}

TEST(Icp, FixedPoint) {
    const auto c = geometry::estimate_normals(
            geometry::voxel_downsample(synthetic::random_blob(20000, 16), 0.004), 0.02);
    ASSERT_EQ(c.valid_normal_count(), c.size());
    const auto r = icp_point_to_plane(c, c, RigidTransform::identity());
    EXPECT_NEAR((r.transform.matrix() - Eigen::Matrix4d::Identity()).norm(), 0.0, 1e-9);
    EXPECT_LT(r.inlier_rmse, 1e-9);
    EXPECT_EQ(r.fitness, 1.0);
}

TEST(Icp, RecoversSmallPerturbation) {
    const auto target = geometry::estimate_normals(
            geometry::voxel_downsample(synthetic::random_blob(20000, 17), 0.004), 0.02);
    const auto pert = RigidTransform::from_axis_angle(Vec3(1, 2, 3), 2.0 * std::numbers::pi / 180,
                                                      Vec3(0.003, -0.004, 0.0));
    const auto source = geometry::apply_transform(target, pert);
    IcpParams params;
    params.max_iterations = 100;
    params.max_correspondence_distance = 0.02;
    params.relative_tolerance = 1e-10;
    const auto r = icp_point_to_plane(source, target, RigidTransform::identity(), params);
    const auto residual = r.transform * pert;
    EXPECT_LT(residual.rotation_angle(), 1e-4);
    EXPECT_LT(residual.translation().norm(), 1e-4);
    for (const auto &s : r.trace) EXPECT_LE(s.objective_after, s.objective_before);
}

TEST(Icp, NoOverlap) {
    const auto c = geometry::estimate_normals(synthetic::random_blob(500, 18), 0.03);
    const auto far = geometry::apply_transform(c, RigidTransform(geometry::Mat3::Identity(), Vec3(1, 0, 0)));
    const auto r = icp_point_to_plane(far, c, RigidTransform::identity());
    EXPECT_TRUE(r.no_overlap);
    EXPECT_EQ(r.fitness, 0.0);
}

TEST(Icp, GradientMatchesFiniteDifference) {
    const auto target = geometry::estimate_normals(synthetic::random_blob(800, 19), 0.03);
    const auto source = geometry::apply_transform(
            target, RigidTransform::from_axis_angle(Vec3(0, 1, 1), 0.02, Vec3(0.002, 0, 0.001)));
    std::vector<PlaneCorrespondence> pairs;
    for (std::size_t i = 0; i < target.size(); ++i)
        if (target.normal_valid(i)) pairs.push_back({i, i});
    const auto at = RigidTransform::from_axis_angle(Vec3(1, 0, 0), 0.01);
    const Vec6 g = point_to_plane_gradient(source, target, pairs, at);
    const double h = 1e-6;
    for (int k = 0; k < 6; ++k) {
        Vec6 e = Vec6::Zero();
        e[k] = h;
        const double fp = point_to_plane_objective(source, target, pairs, RigidTransform::from_twist(e) * at);
        const double fm = point_to_plane_objective(source, target, pairs, RigidTransform::from_twist(-e) * at);
        EXPECT_NEAR((fp - fm) / (2 * h), g[k], 1e-6 * std::max(1.0, std::abs(g[k])));
    }
}

TEST(RegistrationRmse, Cases) {
    std::vector<Vec3> grid;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) grid.emplace_back(0.02 * i, 0.02 * j, 0.0);
    const PointCloud a(grid);
    const auto same = compute_registration_rmse(a, a, RigidTransform::identity(), 0.01);
    EXPECT_EQ(same.rmse, 0.0);
    EXPECT_EQ(same.inlier_ratio, 1.0);

    std::vector<Vec3> shifted;
    for (auto p : grid) shifted.push_back(p + Vec3(0.005, 0, 0));
    const auto off = compute_registration_rmse(PointCloud(shifted), a, RigidTransform::identity(), 0.01);
    EXPECT_NEAR(off.rmse, 0.005, 1e-9);

    std::vector<Vec3> far;
    for (auto p : grid) far.push_back(p + Vec3(5, 0, 0));
    const auto none = compute_registration_rmse(PointCloud(far), a, RigidTransform::identity(), 0.01);
    EXPECT_TRUE(none.no_inliers);
    EXPECT_EQ(none.rmse, 0.0);
    EXPECT_EQ(none.inlier_ratio, 0.0);
}
