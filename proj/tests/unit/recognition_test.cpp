#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "posekit/error.hpp"
#include "posekit/geometry/rigid_transform.hpp"
#include "posekit/recognition/embedding.hpp"
#include "posekit/recognition/logistic.hpp"
#include "posekit/recognition/model_database.hpp"
#include "posekit/recognition/view_selection.hpp"
#include "posekit/synthetic/shapes.hpp"

using namespace posekit;
using namespace posekit::recognition;

namespace {

double accuracy(const LogisticModel &m, const std::vector<Embedding> &x,
                const std::vector<std::string> &y) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ok += predict(m, x[i]).label == y[i];
    return double(ok) / double(x.size());
}

}  // namespace

TEST(Classifier, SeparableTwoClass) {
    std::vector<Embedding> x;
    std::vector<std::string> y;
    for (int i = 0; i < 10; ++i) {
        x.emplace_back(std::vector<float>{1, 0});
        y.push_back("p");
        x.emplace_back(std::vector<float>{0, 1});
        y.push_back("q");
    }
    const auto m = train_classifier(x, y);
    EXPECT_EQ(accuracy(m, x, y), 1.0);
}

TEST(Classifier, BlobsHeldOutAndCentroidOracle) {
    const auto blobs = oracle::gaussian_blobs(100, 100, 10, 3);
    TrainReport report;
    const auto m = train_classifier(blobs.train, blobs.train_labels, {}, &report);
    EXPECT_GE(accuracy(m, blobs.test, blobs.test_labels), 0.99);
    for (std::size_t i = 1; i < report.loss_history.size(); ++i)
        EXPECT_LE(report.loss_history[i], report.loss_history[i - 1]);

    // Nearest training centroid as an independent classifier.
    std::map<std::string, std::vector<double>> centroid;
    std::map<std::string, int> count;
    for (std::size_t i = 0; i < blobs.train.size(); ++i) {
        auto &c = centroid[blobs.train_labels[i]];
        c.resize(10, 0.0);
        for (int d = 0; d < 10; ++d) c[d] += blobs.train[i][d];
        ++count[blobs.train_labels[i]];
    }
    for (auto &[k, c] : centroid)
        for (auto &v : c) v /= count[k];
    std::size_t agree = 0;
    for (const auto &e : blobs.test) {
        std::string best;
        double best_d = INFINITY;
        for (const auto &[k, c] : centroid) {
            double d = 0;
            for (int j = 0; j < 10; ++j) d += (e[j] - c[j]) * (e[j] - c[j]);
            if (d < best_d) best_d = d, best = k;
        }
        agree += predict(m, e).label == best;
    }
    EXPECT_GE(double(agree) / blobs.test.size(), 0.99);
}

TEST(Classifier, StrongPenaltyShrinksWeights) {
    const auto blobs = oracle::gaussian_blobs(20, 0, 10, 4);
    TrainParams p;
    p.l2 = 1e6;
    const auto m = train_classifier(blobs.train, blobs.train_labels, p);
    double norm2 = 0;
    for (float w : m.weights()) norm2 += double(w) * w;
    EXPECT_LT(std::sqrt(norm2), 1e-2);
}

TEST(Classifier, SoftmaxProperties) {
    const LogisticModel zero({"a", "b", "c"}, 4, std::vector<float>(12, 0.0f),
                             std::vector<float>(3, 0.0f));
    const auto pz = predict(zero, Embedding(std::vector<float>{1, 2, 3, 4}));
    for (double v : pz.probabilities) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);

    std::mt19937_64 rng(5);
    std::normal_distribution<float> g(0.0f, 30.0f);
    for (int t = 0; t < 50; ++t) {
        std::vector<float> w(5 * 7), b(5), e(7);
        for (auto &v : w) v = g(rng);
        for (auto &v : b) v = g(rng);
        for (auto &v : e) v = g(rng);
        const LogisticModel m({"a", "b", "c", "d", "e"}, 7, w, b);
        const auto p = predict(m, Embedding(e));
        EXPECT_NEAR(std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0), 1.0, 1e-9);
    }
}

TEST(Classifier, Errors) {
    std::vector<Embedding> x{Embedding(std::vector<float>{1, 0}), Embedding(std::vector<float>{0, 1})};
    std::vector<std::string> one{"a", "a"};
    try {
        train_classifier(x, one);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::SingleClass);
    }
    std::vector<Embedding> mixed{Embedding(std::vector<float>{1, 0}), Embedding(std::vector<float>{1})};
    std::vector<std::string> two{"a", "b"};
    EXPECT_THROW(train_classifier(mixed, two), Error);
}

TEST(Classifier, ModelRoundTrip) {
    oracle::TempDir tmp("model");
    const auto blobs = oracle::gaussian_blobs(10, 0, 6, 6);
    const auto m = train_classifier(blobs.train, blobs.train_labels);
    save_model(tmp.path() / "m.bin", m);
    EXPECT_EQ(load_model(tmp.path() / "m.bin"), m);
}

TEST(Embedding, BaselineHistogram) {
    ingest::RgbImage black(8, 6);
    const auto eb = extract_baseline_embedding(black);
    ASSERT_EQ(eb.dim(), 1000u);
    EXPECT_NEAR(eb[0], 1.0f, 1e-6);

    ingest::RgbImage half(8, 6);
    for (int v = 0; v < 6; ++v)
        for (int u = 4; u < 8; ++u)
            for (int c = 0; c < 3; ++c) half.at(u, v)[c] = 255;
    const auto eh = extract_baseline_embedding(half);
    EXPECT_NEAR(eh[0], 0.5f, 1e-6);
    EXPECT_NEAR(eh[999], 0.5f, 1e-6);

    std::mt19937_64 rng(1);
    ingest::RgbImage noise(37, 23);
    for (auto &p : noise.pixels) p = static_cast<std::uint8_t>(rng());
    const auto en = extract_baseline_embedding(noise);
    EXPECT_NEAR(std::accumulate(en.values().begin(), en.values().end(), 0.0), 1.0, 1e-6);
}

TEST(Embedding, FileRoundTrip) {
    oracle::TempDir tmp("emb");
    std::vector<float> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(float(i)) * 3.0f;
    write_embedding(tmp.path() / "e.bin", Embedding(v));
    const auto back = load_external_embedding(tmp.path() / "e.bin", 1000);
    EXPECT_EQ(back.values(), v);

    std::stringstream ss;
    write_embedding(ss, Embedding(v));
    const auto bytes = ss.str();
    std::stringstream cut(bytes.substr(0, bytes.size() - 2));
    try {
        read_embedding(cut);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
    std::stringstream again(bytes);
    EXPECT_THROW(read_embedding(again, 999), Error);
}

namespace {

ModelDatabase small_db(std::size_t instances, std::size_t views_each) {
    ModelDatabase db;
    for (std::size_t i = 0; i < instances; ++i) {
        for (std::size_t v = 0; v < views_each; ++v) {
            // A handful of points is enough for bookkeeping tests.
            ObjectView view;
            view.instance_label = "inst_" + std::to_string(i);
            view.view_id = "view_" + std::to_string(v);
            view.cloud = geometry::PointCloud(oracle::uniform_points(4, i * 100 + v));
            db.add_view(std::move(view));
        }
    }
    return db;
}

}  // namespace

TEST(ViewSelection, SelectViews) {
    const auto db = small_db(22, 50);
    EXPECT_EQ(db.labels().size(), 22u);
    for (const auto &label : db.labels()) {
        const auto sel = select_views(db, label, 10, 9);
        std::set<std::string> ids;
        for (auto *v : sel) ids.insert(v->view_id);
        EXPECT_EQ(ids.size(), 10u);
        EXPECT_EQ(sel, select_views(db, label, 10, 9));
    }
    const auto few = small_db(1, 3);
    EXPECT_EQ(select_views(few, "inst_0", 10, 1).size(), 3u);
    EXPECT_THROW(select_views(few, "nope", 10, 1), Error);
}

TEST(ViewSelection, BestViewPrefersExactCopy) {
    DescriptionParams params;
    params.normal_radius = 0.03;
    const auto raw = synthetic::random_blob(3000, 31);
    const auto scene = describe_cloud(raw, params);
    const auto exact = describe_view("obj", "exact", raw, params);
    std::vector<std::size_t> every_fourth;
    for (std::size_t i = 0; i < raw.size(); i += 4) every_fourth.push_back(i);
    const auto sparse = describe_view("obj", "sparse", raw.select(every_fourth), params);

    std::vector<const ObjectView *> only{&exact};
    const auto m = select_best_view(scene, only, registration::CoarseMethod::Ransac, {});
    EXPECT_EQ(m.view, &exact);
    EXPECT_GE(m.result.inlier_ratio, 0.99);

    std::vector<const ObjectView *> both{&sparse, &exact};
    const auto m2 = select_best_view(scene, both, registration::CoarseMethod::Ransac, {});
    EXPECT_EQ(m2.view, &exact);
    EXPECT_EQ(m2.view_index, 1u);
}

TEST(ViewSelection, NoMatchBelowThreeInliers) {
    DescriptionParams params;
    const auto scene = describe_cloud(synthetic::random_blob(3000, 32), params);
    // Two isolated point pairs: each view yields at most two features.
    std::vector<ObjectView> views;
    for (int k = 0; k < 3; ++k) {
        const geometry::PointCloud tiny(
                std::vector<geometry::Vec3>{{5.0 + k, 0, 0}, {5.005 + k, 0, 0}},
                std::vector<geometry::Vec3>{{0, 0, 1}, {0, 1, 0}});
        ObjectView v;
        v.instance_label = "far";
        v.view_id = "v" + std::to_string(k);
        v.cloud = tiny;
        v.features = features::compute_fpfh(tiny, 0.05);
        views.push_back(v);
    }
    std::vector<const ObjectView *> ptrs;
    for (auto &v : views) ptrs.push_back(&v);
    try {
        select_best_view(scene, ptrs, registration::CoarseMethod::Ransac, {});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NoMatch);
    }
}

TEST(ModelDatabase, RoundTripAndCompatibility) {
    oracle::TempDir tmp("db");
    DescriptionParams params;
    ModelDatabase db(params);
    auto view = describe_view("mug", "view_000", synthetic::random_blob(2000, 40), params);
    std::mt19937_64 rng(1);
    view.source_pose_hint = synthetic::random_pose(rng, 1.0, 0.5);
    db.add_view(view);
    save_database(tmp.path(), db);
    const auto back = load_database(tmp.path(), params);
    EXPECT_EQ(back, db);
    EXPECT_EQ(back.views("mug")[0].features, view.features);

    DescriptionParams other = params;
    other.leaf = 0.02;
    try {
        load_database(tmp.path(), other);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::CompatibilityError);
    }
    EXPECT_THROW(db.add_view(view), Error);
    ObjectView bad = view;
    bad.view_id = "../x";
    EXPECT_THROW(db.add_view(bad), Error);
}
