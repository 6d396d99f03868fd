#include <gtest/gtest.h>

#include "oracles.hpp"
#include "posekit/error.hpp"
#include "posekit/ingest/camera.hpp"
#include "posekit/ingest/image.hpp"
#include "posekit/ingest/manifest.hpp"

using namespace posekit;
using namespace posekit::ingest;

namespace {

DepthImage plane(std::uint16_t mm) {
    DepthImage d(640, 480);
    std::fill(d.pixels.begin(), d.pixels.end(), mm);
    return d;
}

}  // namespace

TEST(DepthToCloud, ZeroDepthGivesEmptyCloud) {
    CameraIntrinsics k;
    k.width = 64;
    k.height = 48;
    EXPECT_TRUE(depth_to_cloud(DepthImage(64, 48), nullptr, k).empty());
}

TEST(DepthToCloud, PrincipalRay) {
    CameraIntrinsics k;
    k.cx = 10;
    k.cy = 5;
    k.width = 20;
    k.height = 10;
    DepthImage d(20, 10);
    d.at(10, 5) = 1000;
    const auto c = depth_to_cloud(d, nullptr, k);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.point(0), geometry::Vec3(0, 0, 1));
}

TEST(DepthToCloud, FrontoParallelPlane) {
    const auto c = depth_to_cloud(plane(1000), nullptr, CameraIntrinsics{});
    EXPECT_EQ(c.size(), 640u * 480u);
    for (const auto &p : c.points()) EXPECT_NEAR(p.z(), 1.0, 1e-6);
    EXPECT_THROW(depth_to_cloud(DepthImage(10, 10), nullptr, CameraIntrinsics{}), Error);
}

TEST(DepthToCloud, ColorsFollowPixels) {
    CameraIntrinsics k;
    k.width = 4;
    k.height = 2;
    DepthImage d(4, 2);
    RgbImage rgb(4, 2);
    d.at(3, 1) = 500;
    rgb.at(3, 1)[0] = 255;
    const auto c = depth_to_cloud(d, &rgb, k);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.colors()[0], geometry::Vec3(1, 0, 0));
}

TEST(CropByBbox, Cases) {
    const CameraIntrinsics k;
    const auto d = plane(1000);
    EXPECT_EQ(crop_by_bbox(d, nullptr, k, {0, 0, 640, 480}), depth_to_cloud(d, nullptr, k));

    const auto half = crop_by_bbox(d, nullptr, k, {0, 0, 320, 480});
    ASSERT_EQ(half.size(), 320u * 480u);
    std::size_t i = 0;
    for (int v = 0; v < 480; ++v)
        for (int u = 0; u < 320; ++u) EXPECT_EQ(half.point(i++), k.back_project(u, v, 1000));

    auto holes = d;
    for (int v = 0; v < 10; ++v)
        for (int u = 0; u < 10; ++u) holes.at(u, v) = 0;
    try {
        crop_by_bbox(holes, nullptr, k, {0, 0, 10, 10});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyCrop);
    }
}

TEST(Images, PngRoundTrip) {
    oracle::TempDir tmp("png");
    DepthImage d(31, 17);
    RgbImage c(31, 17);
    for (std::size_t i = 0; i < d.pixels.size(); ++i) d.pixels[i] = static_cast<std::uint16_t>(i * 97);
    for (std::size_t i = 0; i < c.pixels.size(); ++i) c.pixels[i] = static_cast<std::uint8_t>(i * 13);
    write_depth_png(tmp.path() / "d.png", d);
    write_rgb_png(tmp.path() / "c.png", c);
    EXPECT_EQ(read_depth_png(tmp.path() / "d.png"), d);
    EXPECT_EQ(read_rgb_png(tmp.path() / "c.png"), c);
    EXPECT_THROW(read_depth_png(tmp.path() / "c.png"), Error);
    EXPECT_THROW(read_depth_png(tmp.path() / "none.png"), Error);
}

TEST(Manifest, SaveLoadResolvesRelativePaths) {
    oracle::TempDir tmp("manifest");
    const auto dir = tmp.path() / "data";
    std::filesystem::create_directories(dir / "img");
    write_depth_png(dir / "img" / "d.png", DepthImage(4, 4));
    write_rgb_png(dir / "img" / "c.png", RgbImage(4, 4));
    Dataset ds;
    ds.frames.push_back({"f0", dir / "img" / "c.png", dir / "img" / "d.png", {{"mug", {0, 0, 2, 2}, {}}}});
    save_dataset(dir / "frames.json", ds);
    const auto back = load_dataset(dir / "frames.json");
    ASSERT_EQ(back.frames.size(), 1u);
    EXPECT_EQ(std::filesystem::weakly_canonical(back.frames[0].depth),
              std::filesystem::weakly_canonical(dir / "img" / "d.png"));
    EXPECT_EQ(back.frames[0].annotations, ds.frames[0].annotations);
    EXPECT_EQ(back.intrinsics, ds.intrinsics);

    std::filesystem::remove(dir / "img" / "d.png");
    EXPECT_THROW(load_dataset(dir / "frames.json"), Error);
}
