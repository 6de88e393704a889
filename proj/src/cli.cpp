#include "sst/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sst/bench.hpp"
#include "sst/classifier.hpp"
#include "sst/config.hpp"
#include "sst/error.hpp"
#include "sst/io.hpp"
#include "sst/kernels.hpp"
#include "sst/metrics.hpp"
#include "sst/pipeline.hpp"
#include "sst/softlabel.hpp"

namespace sst {

namespace {

struct CommonArgs {
    std::string cube_path;
    std::string labels_path;
    std::string config_path;
    std::string checkpoint_path;
    std::string out_prefix;
    std::int64_t seed = -1;  // <0: keep the config's seed
    int threads = 1;
};

PipelineConfig resolve_config(const CommonArgs& args) {
    PipelineConfig config =
        args.config_path.empty() ? PipelineConfig{} : load_config(args.config_path);
    if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
    config.validate();
    return config;
}

std::string manifest_text(const PipelineConfig& config, int threads,
                          const ClusterOutput& out) {
    std::ostringstream os;
    os.precision(12);
    os << config.serialize();
    os << "threads=" << threads << "\n";
    os << "kernel_backend=" << kernels::backend_name() << "\n";
    os << "tokens=" << out.tokens.count() << "\n";
    os << "mean_pairwise_distance=" << out.filter.mean_pairwise_distance << "\n";
    os << "separation_loss=" << out.filter.separation << "\n";
    return os.str();
}

LabelMap token_map(const ClusterOutput& out, const HsiCube& cube, std::uint16_t token_count) {
    // Token indices are stored 1-based so index 0 keeps its "unlabeled"
    // meaning in the shared container format.
    std::vector<std::uint16_t> labels(out.assignment.size());
    for (std::size_t p = 0; p < out.assignment.size(); ++p)
        labels[p] = static_cast<std::uint16_t>(out.assignment[p] + 1);
    return LabelMap(cube.height(), cube.width(), token_count, std::move(labels));
}

int run_cluster_cmd(const CommonArgs& args) {
    const PipelineConfig config = resolve_config(args);
    const HsiCube cube = read_cube(args.cube_path);
    const ClusterOutput out = run_cluster(cube, config, args.threads);

    write_label_file(args.out_prefix + ".tokens.lbl",
                     token_map(out, cube, static_cast<std::uint16_t>(config.m2)));
    RawCube token_features{out.tokens.count(), 1, out.tokens.features.cols(), {}};
    token_features.values.assign(out.tokens.features.data(),
                                 out.tokens.features.data() + out.tokens.features.size());
    write_cube_file(args.out_prefix + ".tokfeat.cube", token_features);
    write_text_file(args.out_prefix + ".manifest.txt",
                    manifest_text(config, args.threads, out));
    return 0;
}

int run_filter_cmd(const CommonArgs& args) {
    const PipelineConfig config = resolve_config(args);
    const HsiCube cube = read_cube(args.cube_path);
    const ClusterOutput out = run_cluster(cube, config, args.threads);

    std::ostringstream os;
    os.precision(12);
    os << "kept_count=" << out.filter.kept_indices.size() << "\n";
    os << "mean_pairwise_distance=" << out.filter.mean_pairwise_distance << "\n";
    os << "separation_loss=" << out.filter.separation << "\n";
    os << "kept=";
    for (std::size_t i = 0; i < out.filter.kept_indices.size(); ++i)
        os << (i ? "," : "") << out.filter.kept_indices[i];
    os << "\n";
    for (std::size_t j = 0; j < out.filter.scores.size(); ++j)
        os << "score." << j << "=" << out.filter.scores[j] << "\n";
    write_text_file(args.out_prefix + ".filter.txt", os.str());
    return 0;
}

SoftLabelMatrix soft_labels_for(const ClusterOutput& out, const LabelMap& labels) {
    return soft_labels(class_counts(out.assignment, labels, out.tokens.count()));
}

int run_softlabel_cmd(const CommonArgs& args) {
    const PipelineConfig config = resolve_config(args);
    const HsiCube cube = read_cube(args.cube_path);
    const LabelMap labels = read_label_file(args.labels_path);
    if (labels.height() != cube.height() || labels.width() != cube.width())
        throw invalid_input_error("label map dimensions disagree with the cube");
    const ClusterOutput out = run_cluster(cube, config, args.threads);
    const SoftLabelMatrix soft = soft_labels_for(out, labels);

    std::ostringstream os;
    os.precision(12);
    os << "tokens=" << soft.token_count() << "\n";
    os << "classes=" << soft.class_count() << "\n";
    for (std::size_t m = 0; m < soft.token_count(); ++m) {
        os << "token." << m << ".valid=" << (soft.valid[m] ? 1 : 0) << "\n";
        os << "token." << m << ".p=";
        for (std::size_t c = 0; c < soft.class_count(); ++c)
            os << (c ? "," : "") << soft.probabilities(m, c);
        os << "\n";
    }
    write_text_file(args.out_prefix + ".softlabels.txt", os.str());
    return 0;
}

std::vector<std::uint16_t> predicted_classes(const Matrix& probs) {
    std::vector<std::uint16_t> classes(probs.rows());
    for (std::size_t m = 0; m < probs.rows(); ++m) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < probs.cols(); ++c)
            if (probs(m, c) > probs(m, best)) best = c;
        classes[m] = static_cast<std::uint16_t>(best + 1);
    }
    return classes;
}

int run_classify_cmd(const CommonArgs& args, bool evaluate) {
    const PipelineConfig config = resolve_config(args);
    const HsiCube cube = read_cube(args.cube_path);
    const ClusterOutput out = run_cluster(cube, config, args.threads);
    const ClassifierParams params =
        read_checkpoint(args.checkpoint_path, config.blocks, config.channels);

    const Matrix probs = classify(out.tokens.features, params);
    const std::vector<std::uint16_t> classes = predicted_classes(probs);
    const LabelMap class_map =
        project_to_pixels(out.assignment, classes, cube.height(), cube.width(),
                          static_cast<std::uint16_t>(params.class_count()));
    write_label_file(args.out_prefix + ".classmap.lbl", class_map);

    if (evaluate) {
        const LabelMap labels = read_label_file(args.labels_path);
        if (labels.height() != cube.height() || labels.width() != cube.width())
            throw invalid_input_error("label map dimensions disagree with the cube");
        if (labels.class_count() != params.class_count())
            throw config_error("checkpoint", "class count disagrees with the label file");
        const ConfusionMatrix cm = confusion(labels, class_map);
        write_text_file(args.out_prefix + ".metrics.txt",
                        format_metric_report(scores(cm), cm.total()));
    }
    return 0;
}

int run_train_toy_cmd(const CommonArgs& args, int steps, double learning_rate) {
    const PipelineConfig config = resolve_config(args);
    const HsiCube cube = read_cube(args.cube_path);
    const LabelMap labels = read_label_file(args.labels_path);
    if (labels.height() != cube.height() || labels.width() != cube.width())
        throw invalid_input_error("label map dimensions disagree with the cube");

    const ClusterOutput out = run_cluster(cube, config, args.threads);
    const SoftLabelMatrix soft = soft_labels_for(out, labels);

    ClassifierParams params = init_classifier(config.blocks, config.channels,
                                              labels.class_count(), config.seed);
    const std::vector<double> trace = train_toy(out.tokens.features, params, soft,
                                                &out.tokens.features, steps, learning_rate);

    write_checkpoint(args.out_prefix + ".ckpt", params);
    std::ostringstream os;
    os.precision(17);
    for (double loss : trace) os << loss << "\n";
    write_text_file(args.out_prefix + ".trace.txt", os.str());
    return 0;
}

std::vector<BenchSize> parse_sizes(const std::string& text) {
    std::vector<BenchSize> sizes;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        BenchSize size;
        unsigned long h = 0, w = 0, b = 0;
        if (std::sscanf(token.c_str(), "%lux%lux%lu", &h, &w, &b) != 3 || h < 1 || w < 1 ||
            b < 2)
            throw config_error("sizes", "expected HxWxB with B >= 2, got '" + token + "'");
        size.height = h;
        size.width = w;
        size.bands = b;
        sizes.push_back(size);
    }
    if (sizes.empty()) throw config_error("sizes", "no sizes given");
    return sizes;
}

int run_bench_cmd(const CommonArgs& args, const std::string& sizes_text, int repetitions,
                  std::size_t patch_size, int baseline_iterations) {
    const PipelineConfig config = resolve_config(args);
    if (repetitions < 3) throw config_error("reps", "need at least 3 repetitions");

    BenchOptions options;
    options.sizes = parse_sizes(sizes_text);
    options.repetitions = repetitions;
    options.threads = args.threads;
    options.m1 = config.m1;
    options.mask_size = config.mask_size;
    options.channels = config.channels;
    options.smoothing_radius = config.smoothing_radius;
    options.patch_size = patch_size;
    options.baseline_iterations = baseline_iterations;
    options.seed = config.seed;

    const auto results = measure_bench(options);
    const std::string report = format_bench_report(options, results);
    std::cout << report;
    if (!args.out_prefix.empty()) write_text_file(args.out_prefix + ".bench.txt", report);
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"spectral supertoken clustering, classification and benchmarking"};
    app.require_subcommand(1);

    CommonArgs args;
    int steps = 200;
    double learning_rate = 0.01;
    std::string sizes_text = "256x256x32";
    int repetitions = 5;
    std::size_t patch_size = 64;
    int baseline_iterations = 3;

    auto add_common = [&](CLI::App* cmd, bool cube, bool labels, bool checkpoint, bool out) {
        if (cube) cmd->add_option("--cube", args.cube_path, "input cube file")->required();
        if (labels)
            cmd->add_option("--labels", args.labels_path, "input label file")->required();
        if (checkpoint)
            cmd->add_option("--checkpoint", args.checkpoint_path, "parameter checkpoint")
                ->required();
        if (out)
            cmd->add_option("--out", args.out_prefix, "output path prefix")->required();
        cmd->add_option("--config", args.config_path, "key=value configuration file");
        cmd->add_option("--seed", args.seed, "override the config seed");
        cmd->add_option("--threads", args.threads, "worker thread count")
            ->check(CLI::PositiveNumber);
    };

    std::function<int()> action;

    CLI::App* cluster = app.add_subcommand("cluster", "cluster a cube into supertokens");
    add_common(cluster, true, false, false, true);
    cluster->callback([&] { action = [&] { return run_cluster_cmd(args); }; });

    CLI::App* filter = app.add_subcommand("filter", "report center filtering scores");
    add_common(filter, true, false, false, true);
    filter->callback([&] { action = [&] { return run_filter_cmd(args); }; });

    CLI::App* softlabel_cmd =
        app.add_subcommand("softlabel", "emit per-token class proportions");
    add_common(softlabel_cmd, true, true, false, true);
    softlabel_cmd->callback([&] { action = [&] { return run_softlabel_cmd(args); }; });

    CLI::App* classify_cmd = app.add_subcommand("classify", "predict a class map");
    add_common(classify_cmd, true, false, true, true);
    classify_cmd->callback([&] { action = [&] { return run_classify_cmd(args, false); }; });

    CLI::App* eval_cmd =
        app.add_subcommand("eval", "predict a class map and score it against labels");
    add_common(eval_cmd, true, true, true, true);
    eval_cmd->callback([&] { action = [&] { return run_classify_cmd(args, true); }; });

    CLI::App* train = app.add_subcommand("train-toy", "gradient-descent training at toy scale");
    add_common(train, true, true, false, true);
    train->add_option("--steps", steps, "gradient steps")->check(CLI::PositiveNumber);
    train->add_option("--lr", learning_rate, "learning rate");
    train->callback(
        [&] { action = [&] { return run_train_toy_cmd(args, steps, learning_rate); }; });

    CLI::App* bench = app.add_subcommand(
        "bench", "compare global one-shot aggregation against the patch-iterative baseline");
    add_common(bench, false, false, false, false);
    bench->add_option("--out", args.out_prefix, "also write the report to <out>.bench.txt");
    bench->add_option("--sizes", sizes_text, "comma-separated HxWxB sizes");
    bench->add_option("--reps", repetitions, "timed repetitions per path (>= 3)");
    bench->add_option("--patch-size", patch_size, "baseline tile size")
        ->check(CLI::PositiveNumber);
    bench->add_option("--baseline-iters", baseline_iterations,
                      "association rounds per baseline tile")
        ->check(CLI::PositiveNumber);
    bench->callback([&] {
        action = [&] {
            return run_bench_cmd(args, sizes_text, repetitions, patch_size,
                                 baseline_iterations);
        };
    });

    try {
        app.parse(argc, argv);
        return action ? action() : 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const invalid_input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const degenerate_input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const training_diverged_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sst
