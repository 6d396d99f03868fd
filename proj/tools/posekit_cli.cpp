#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "posekit/error.hpp"
#include "posekit/pipeline/commands.hpp"
#include "posekit/synthetic/dataset.hpp"

namespace fs = std::filesystem;
using namespace posekit;

namespace {

// Flags that override config-file values when given.
struct ConfigFlags {
    std::string config_file;
    double leaf = 0, fpfh_radius = 0, normal_radius = 0, inlier_threshold = 0;
    std::string method, mode;
    std::size_t ransac_max_iterations = 0, ransac_validation = 0, fgr_iterations = 0;
    double fgr_tuple_ratio = 0;
    bool mutual = false;
    double icp_max_dist = 0, icp_rel_tol = 0;
    std::size_t icp_max_iterations = 0, views = 0, min_correspondences = 0;
    std::uint64_t seed = 0;
    std::size_t workers = 0, ransac_threads = 0;
    std::vector<CLI::Option *> opts;
    CLI::App *app = nullptr;

    void attach(CLI::App *sub) {
        app = sub;
        sub->add_option("--config", config_file, "JSON config file (flags override it)")
                ->check(CLI::ExistingFile);
        sub->add_option("--leaf", leaf, "voxel leaf size [m]");
        sub->add_option("--fpfh-radius", fpfh_radius, "FPFH radius [m]");
        sub->add_option("--normal-radius", normal_radius, "normal estimation radius [m]");
        sub->add_option("--inlier-threshold", inlier_threshold, "coarse inlier distance [m]");
        sub->add_option("--method", method, "coarse method: RANSAC or FGR");
        sub->add_option("--ransac-max-iterations", ransac_max_iterations);
        sub->add_option("--ransac-validation", ransac_validation);
        sub->add_flag("--mutual", mutual, "mutual feature matching for RANSAC");
        sub->add_option("--fgr-iterations", fgr_iterations);
        sub->add_option("--fgr-tuple-ratio", fgr_tuple_ratio);
        sub->add_option("--icp-max-dist", icp_max_dist, "ICP correspondence distance [m]");
        sub->add_option("--icp-max-iterations", icp_max_iterations);
        sub->add_option("--icp-rel-tol", icp_rel_tol);
        sub->add_option("--views", views, "views registered per detection");
        sub->add_option("--min-correspondences", min_correspondences);
        sub->add_option("--seed", seed);
        sub->add_option("--mode", mode, "classify, coarse or full");
        sub->add_option("--workers", workers, "frame worker threads");
        sub->add_option("--ransac-threads", ransac_threads);
    }

    bool given(const char *name) const { return app->get_option(name)->count() > 0; }

    pipeline::PipelineConfig resolve() const {
        pipeline::PipelineConfig c;
        if (!config_file.empty()) c = pipeline::load_config(config_file);
        if (given("--leaf")) c.leaf_m = leaf;
        if (given("--fpfh-radius")) c.fpfh_radius_m = fpfh_radius;
        if (given("--normal-radius")) c.normal_radius_m = normal_radius;
        if (given("--inlier-threshold")) c.inlier_threshold_m = inlier_threshold;
        if (given("--method")) c.coarse_method = registration::parse_coarse_method(method);
        if (given("--ransac-max-iterations")) c.ransac_max_iterations = ransac_max_iterations;
        if (given("--ransac-validation")) c.ransac_validation = ransac_validation;
        if (given("--mutual")) c.mutual_matching = mutual;
        if (given("--fgr-iterations")) c.fgr_iterations = fgr_iterations;
        if (given("--fgr-tuple-ratio")) c.fgr_tuple_ratio = fgr_tuple_ratio;
        if (given("--icp-max-dist")) c.icp_max_dist_m = icp_max_dist;
        if (given("--icp-max-iterations")) c.icp_max_iterations = icp_max_iterations;
        if (given("--icp-rel-tol")) c.icp_rel_tol = icp_rel_tol;
        if (given("--views")) c.views_per_instance = views;
        if (given("--min-correspondences")) c.min_correspondences = min_correspondences;
        if (given("--seed")) c.seed = seed;
        if (given("--mode")) c.execution_mode = pipeline::parse_execution_mode(mode);
        if (given("--workers")) c.workers = workers;
        if (given("--ransac-threads")) c.ransac_threads = ransac_threads;
        c.validate();
        return c;
    }
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"posekit: RGB-D object recognition and 6DoF pose estimation"};
    app.require_subcommand(1);

    ConfigFlags build_flags, train_flags, run_flags, bench_flags;

    std::string views_dir, db_dir;
    auto *build = app.add_subcommand("build-db", "describe object views into a model database");
    build->add_option("views_dir", views_dir, "directory of <label>/<view>.ply")->required();
    build->add_option("-o,--out", db_dir, "database directory")->required();
    build_flags.attach(build);

    std::string train_manifest, model_out;
    double l2 = 1e-4;
    std::size_t epochs = 500;
    auto *train = app.add_subcommand("train", "train the instance classifier on annotated frames");
    train->add_option("manifest", train_manifest, "frame manifest JSON")->required()->check(CLI::ExistingFile);
    train->add_option("-o,--out", model_out, "model file")->required();
    train->add_option("--l2", l2, "L2 penalty");
    train->add_option("--epochs", epochs, "maximum epochs");
    train_flags.attach(train);

    std::string run_manifest, run_db, run_model, run_report;
    auto *run = app.add_subcommand("run", "run the pipeline over a frame manifest");
    run->add_option("manifest", run_manifest, "frame manifest JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--db", run_db, "model database directory")->required();
    run->add_option("--model", run_model, "classifier model file")->required();
    run->add_option("-o,--out", run_report, "run report JSON")->required();
    run_flags.attach(run);

    std::vector<std::string> eval_inputs;
    std::string eval_json, eval_csv;
    auto *evaluate = app.add_subcommand("evaluate", "score run reports: PRC, AUC, timing table");
    evaluate->add_option("reports", eval_inputs, "run report files")->required()->check(CLI::ExistingFile);
    evaluate->add_option("-o,--out", eval_json, "evaluation JSON")->required();
    evaluate->add_option("--csv", eval_csv, "PRC points CSV (default: next to the JSON)");

    std::size_t bench_seeds = 5;
    std::uint64_t bench_task = 1;
    auto *bench = app.add_subcommand("bench", "RANSAC vs FGR on a synthetic ten-view task");
    bench->add_option("--seeds", bench_seeds, "registration seeds");
    bench->add_option("--task-seed", bench_task, "seed of the synthetic task");
    bench_flags.attach(bench);

    std::string demo_dir;
    synthetic::DemoOptions demo;
    auto *demo_cmd = app.add_subcommand("demo-data", "render a small synthetic dataset");
    demo_cmd->add_option("dir", demo_dir, "output directory")->required();
    demo_cmd->add_option("--instances", demo.instances);
    demo_cmd->add_option("--views", demo.views_per_instance);
    demo_cmd->add_option("--frames", demo.frames);
    demo_cmd->add_option("--seed", demo.seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build) {
            const auto cfg = build_flags.resolve();
            const auto res = pipeline::build_database_cmd(views_dir, db_dir, cfg);
            for (const auto &w : res.warnings) std::cerr << "skipped " << w << '\n';
            std::cout << "database: " << (fs::path(db_dir) / "manifest.json").string() << " ("
                      << res.db.labels().size() << " instances, " << res.db.view_count()
                      << " views)\n";
        } else if (*train) {
            const auto cfg = train_flags.resolve();
            recognition::TrainParams tp;
            tp.l2 = l2;
            tp.max_epochs = epochs;
            const auto res = pipeline::train_cmd(train_manifest, model_out, cfg, tp);
            std::printf("trained on %zu crops, %zu classes, %zu epochs, training accuracy %.4f\n",
                        res.samples, res.model.class_count(), res.report.epochs,
                        res.training_accuracy);
            std::cout << "model: " << model_out << '\n';
        } else if (*run) {
            const auto cfg = run_flags.resolve();
            const auto rep = pipeline::run_cmd(run_manifest, run_db, run_model, cfg, run_report);
            std::size_t errors = 0;
            for (const auto &r : rep.records) errors += r.error.empty() ? 0 : 1;
            std::printf("%zu records, %zu with stage errors\n", rep.records.size(), errors);
            std::cout << "report: " << run_report << '\n';
        } else if (*evaluate) {
            std::vector<fs::path> inputs(eval_inputs.begin(), eval_inputs.end());
            const fs::path csv = eval_csv.empty() ? fs::path(eval_json).replace_extension(".csv")
                                                  : fs::path(eval_csv);
            const auto s = pipeline::evaluate_cmd(inputs, eval_json, csv);
            for (const auto &m : s.methods) {
                std::printf("%-8s AUC %.4f  TP %zu / %zu\n", m.method.c_str(), m.curve.auc,
                            m.true_positives, m.ground_truth);
            }
            for (const auto &m : s.timing) {
                for (const auto &c : m.columns) {
                    std::printf("%-8s %-22s %.4f s  %.2f FPS\n", m.method.c_str(), c.name.c_str(),
                                c.mean_seconds, c.fps);
                }
            }
            std::cout << "report: " << eval_json << "\nprc csv: " << csv.string() << '\n';
        } else if (*bench) {
            const auto cfg = bench_flags.resolve();
            const auto rows = pipeline::bench_cmd(cfg, bench_seeds, bench_task);
            for (const auto &r : rows) {
                std::printf("%-7s coarse time %.4f s  median best inlier ratio %.4f\n",
                            r.method.c_str(), r.total_seconds, r.median_best_ratio);
            }
            if (rows.size() == 2 && rows[1].total_seconds > 0.0) {
                std::printf("RANSAC / FGR time ratio %.2f\n", rows[0].total_seconds / rows[1].total_seconds);
            }
        } else if (*demo_cmd) {
            const auto layout = synthetic::write_demo_dataset(demo_dir, demo);
            std::cout << "views: " << layout.views_dir.string() << "\nmanifest: " << layout.manifest.string() << '\n';
        }
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
